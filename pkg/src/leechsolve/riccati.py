"""Stein equations and the stabilizing solution of a discrete algebraic Riccati equation.

The Riccati equation solved here is, for data (A, Gamma, R0, C),

    Q = A* Q A + (C - Gamma* Q A)* (R0 - Gamma* Q Gamma)^{-1} (C - Gamma* Q A)

with Delta = R0 - Gamma* Q Gamma required positive definite along the way and
A0 = A - Gamma Delta^{-1} (C - Gamma* Q A) Schur stable at the solution.  The
solver iterates the fixed-point map from Q = 0 and switches to Newton steps
(each one a Stein solve against the current closed loop) once the closed loop
is stable, falling back whenever a Newton step would lose definiteness.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DefinitenessError,
    DimensionError,
    ObservabilityError,
    RiccatiError,
    StabilityError,
)
from .linalg import (
    as_cmatrix,
    herm,
    hermitian_posdef_check,
    is_schur_stable,
    singular_extremes,
    solve_hermitian,
)

log = logging.getLogger("leechsolve.riccati")


def _stein_unchecked(A, W):
    """Solve P - A P A* = W by the Kronecker system, no preconditions checked."""
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    K = np.eye(n * n, dtype=complex) - np.kron(A, A.conj())
    return np.linalg.solve(K, W.reshape(n * n)).reshape(n, n)


def solve_stein(A, W, tol=1e-11):
    """Unique solution P of P - A P A* = W for Schur stable A and Hermitian PSD W.

    The solution is returned exactly Hermitian; the residual is verified
    against tol * (1 + ||W||).
    """
    A = as_cmatrix(A, "A")
    W = as_cmatrix(W, "W")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError(f"A must be square, got {A.shape}")
    if W.shape != (n, n):
        raise DimensionError(f"W must be {n}x{n} to match A, got {W.shape}")
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if not is_schur_stable(A):
        raise StabilityError("Stein equation requires a Schur stable A")
    scale = float(np.linalg.norm(W))
    if np.linalg.norm(W - W.conj().T) > 1e-10 * (1.0 + scale):
        raise DefinitenessError("Stein right-hand side must be Hermitian")
    wmin = float(np.linalg.eigvalsh(herm(W))[0])
    if wmin < -1e-10 * (1.0 + scale):
        raise DefinitenessError(
            f"Stein right-hand side must be PSD, min eigenvalue {wmin:.3e}"
        )
    P = herm(_stein_unchecked(A, herm(W)))
    residual = float(np.linalg.norm(P - A @ P @ A.conj().T - herm(W)))
    if residual > tol * (1.0 + scale):
        raise RiccatiError(f"Stein solve residual {residual:.3e} exceeds tolerance")
    return P


def observability_matrix(C, A):
    """Stack [C; CA; ...; CA^{n-1}]."""
    n = A.shape[0]
    blocks = []
    Ck = C.copy()
    for _ in range(n):
        blocks.append(Ck)
        Ck = Ck @ A
    if not blocks:
        return np.zeros((0, n), dtype=complex)
    return np.vstack(blocks)


def is_observable(C, A, threshold=1e-10):
    """Rank test on the observability matrix: sigma_min > threshold * sigma_max."""
    O = observability_matrix(C, A)
    if A.shape[0] == 0:
        return True
    smin, smax = singular_extremes(O)
    if smax == 0.0:
        return False
    return smin > threshold * smax


@dataclass
class RiccatiSolution:
    """Stabilizing solution Q with its Schur complement Delta = R0 - Gamma* Q Gamma,
    closed loop A0, iteration count and final fixed-point residual."""

    Q: np.ndarray
    Delta: np.ndarray
    A0: np.ndarray
    iterations: int
    residual: float


def stabilizing_riccati(A, Gamma, R0, C, tol=1e-12, max_iter=10000, initial=None):
    """Stabilizing solution of the Riccati equation for (A, Gamma, R0, C).

    Preconditions: A Schur stable, {C, A} observable.  Raises RiccatiError if
    Delta loses definiteness, the iteration diverges, or the computed solution
    fails its postconditions (PD Delta, stable A0, invertible Q, small residual).
    The solution is unique, so any admissible `initial` converges to the same Q.
    """
    A = as_cmatrix(A, "A")
    Gamma = as_cmatrix(Gamma, "Gamma")
    R0 = as_cmatrix(R0, "R0")
    C = as_cmatrix(C, "C")
    n = A.shape[0]
    m = R0.shape[0]
    if A.shape != (n, n):
        raise DimensionError(f"A must be square, got {A.shape}")
    if Gamma.shape != (n, m):
        raise DimensionError(f"Gamma must be {n}x{m}, got {Gamma.shape}")
    if R0.shape != (m, m):
        raise DimensionError(f"R0 must be square, got {R0.shape}")
    if C.shape != (m, n):
        raise DimensionError(f"C must be {m}x{n}, got {C.shape}")
    if not is_schur_stable(A):
        raise StabilityError("Riccati data requires a Schur stable A")
    if not is_observable(C, A):
        raise ObservabilityError("Riccati data requires an observable pair {C, A}")

    if n == 0:
        if not hermitian_posdef_check(R0):
            raise RiccatiError("R0 must be positive definite when there is no state")
        empty = np.zeros((0, 0), dtype=complex)
        return RiccatiSolution(empty, herm(R0), empty, 0, 0.0)

    Q = herm(as_cmatrix(initial, "initial")) if initial is not None else np.zeros((n, n), dtype=complex)
    if Q.shape != (n, n):
        raise DimensionError(f"initial iterate must be {n}x{n}, got {Q.shape}")

    Ah = A.conj().T
    Gh = Gamma.conj().T
    min_step = np.inf
    iterations = 0
    converged = False
    for k in range(1, max_iter + 1):
        iterations = k
        Delta = herm(R0 - Gh @ Q @ Gamma)
        if not hermitian_posdef_check(Delta, tol=0.0):
            raise RiccatiError(
                f"Schur complement lost positive definiteness at iteration {k}; "
                "no stabilizing solution exists for this data"
            )
        W = C - Gh @ Q @ A
        L = solve_hermitian(Delta, W, "riccati gain")
        A0 = A - Gamma @ L
        Qn = None
        if is_schur_stable(A0):
            # Newton step solves Qn - A0* Qn A0 = L*C + C*L - L*R0 L
            rhs = herm(L.conj().T @ C + C.conj().T @ L - L.conj().T @ R0 @ L)
            cand = herm(_stein_unchecked(A0.conj().T, rhs))
            if hermitian_posdef_check(herm(R0 - Gh @ cand @ Gamma), tol=0.0):
                Qn = cand
        if Qn is None:
            Qn = herm(Ah @ Q @ A + W.conj().T @ L)
        step = float(np.linalg.norm(Qn - Q))
        log.debug("riccati iter %d: step %.3e", k, step)
        Q = Qn
        if step <= tol * (1.0 + float(np.linalg.norm(Q))):
            converged = True
            break
        if k > 3 and step > 1e4 * min_step and step > 1e-6 * (1.0 + float(np.linalg.norm(Q))):
            raise RiccatiError(f"Riccati iteration diverging at step {k} (step {step:.3e})")
        min_step = min(min_step, step)
    if not converged:
        raise RiccatiError(f"Riccati iteration did not converge in {max_iter} steps")

    Delta = herm(R0 - Gh @ Q @ Gamma)
    if not hermitian_posdef_check(Delta, tol=0.0):
        raise RiccatiError("computed Schur complement is not positive definite")
    W = C - Gh @ Q @ A
    L = solve_hermitian(Delta, W, "riccati gain")
    A0 = A - Gamma @ L
    residual = float(np.linalg.norm(Q - herm(Ah @ Q @ A + W.conj().T @ L)))
    if residual > 1e-9 * (1.0 + float(np.linalg.norm(Q))):
        raise RiccatiError(f"Riccati residual {residual:.3e} exceeds tolerance")
    if not is_schur_stable(A0):
        raise RiccatiError("closed-loop matrix of the computed solution is not Schur stable")
    qw = np.linalg.eigvalsh(herm(Q))
    if float(np.min(np.abs(qw))) <= 1e-14 * max(1.0, float(np.max(np.abs(qw)))):
        raise RiccatiError("stabilizing solution is numerically singular")
    log.debug(
        "riccati solved in %d iterations, residual %.3e, cond(Q) %.3e",
        iterations, residual, float(np.max(np.abs(qw)) / np.min(np.abs(qw))),
    )
    return RiccatiSolution(Q, Delta, A0, iterations, residual)
