"""Dense complex linear-algebra primitives.

Everything downstream funnels through a single heavy primitive — the
Hermitian eigendecomposition — so definiteness tests, rank decisions,
spectral norms and PD square roots all share one numerical backbone.
All operations accept 0-sized matrices.
"""

import logging

import numpy as np

from .errors import DefinitenessError, DimensionError

log = logging.getLogger("leechsolve.linalg")

DEFAULT_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-8


def as_cmatrix(M, name="matrix"):
    """Coerce to a 2-d complex ndarray, rejecting non-finite entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A.reshape(-1, 1)
    elif A.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.size and not np.all(np.isfinite(A)):
        raise DimensionError(f"{name} contains non-finite entries")
    return A


def herm(M):
    """Hermitian part (M + M*)/2."""
    return 0.5 * (M + M.conj().T)


def hermitian_norm(M):
    """Largest |eigenvalue| of a Hermitian matrix (0 for empty)."""
    if M.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(herm(M))
    return float(np.max(np.abs(w)))


def hermitian_posdef_check(M, tol=DEFAULT_TOL):
    """True iff M is Hermitian within tol and its smallest eigenvalue exceeds +tol.

    The empty 0x0 matrix counts as positive definite.
    """
    A = as_cmatrix(M, "M")
    rows, cols = A.shape
    if rows != cols:
        raise DimensionError(f"definiteness test needs a square matrix, got {rows}x{cols}")
    if rows == 0:
        return True
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A - A.conj().T) > tol * scale:
        return False
    w = np.linalg.eigvalsh(herm(A))
    return bool(w[0] > tol)


def minimal_rank_factor(M, rank_tol=DEFAULT_RANK_TOL):
    """Factor a Hermitian PSD matrix as M = F F* with F of full column rank.

    Eigenvalues below rank_tol * ||M|| are treated as zero; any eigenvalue
    below -rank_tol * ||M|| raises, since M was promised PSD.  Columns of F
    are ordered by decreasing eigenvalue.  The zero matrix yields an n x 0
    factor.
    """
    A = as_cmatrix(M, "M")
    rows, cols = A.shape
    if rows != cols:
        raise DimensionError(f"rank factorization needs a square matrix, got {rows}x{cols}")
    if rows == 0:
        return np.zeros((0, 0), dtype=complex)
    H = herm(A)
    w, V = np.linalg.eigh(H)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    cut = rank_tol * scale
    if np.any(w < -max(cut, 0.0)):
        raise DefinitenessError(
            f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e} "
            f"below -{cut:.3e}"
        )
    keep = w > cut
    # decreasing eigenvalue order
    idx = np.argsort(w[keep])[::-1]
    wk = w[keep][idx]
    Vk = V[:, keep][:, idx]
    return Vk * np.sqrt(wk)


def spectral_norm(M):
    """Largest singular value, via the Hermitian eigenproblem on the smaller Gram matrix."""
    A = as_cmatrix(M, "M")
    if A.size == 0:
        return 0.0
    if A.shape[0] <= A.shape[1]:
        G = A @ A.conj().T
    else:
        G = A.conj().T @ A
    w = np.linalg.eigvalsh(herm(G))
    return float(np.sqrt(max(float(w[-1]), 0.0)))


def singular_extremes(M):
    """(sigma_min, sigma_max) over the column space: eigenvalue range of M* M."""
    A = as_cmatrix(M, "M")
    if A.shape[1] == 0:
        return 0.0, 0.0
    w = np.linalg.eigvalsh(herm(A.conj().T @ A))
    return float(np.sqrt(max(float(w[0]), 0.0))), float(np.sqrt(max(float(w[-1]), 0.0)))


def spectral_radius_estimate(A, iters=512):
    """Power-iteration estimate of the spectral radius (deterministic start)."""
    M = as_cmatrix(A, "A")
    n = M.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(0x5EED)
    best = 0.0
    for _ in range(2):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        growth = 1.0
        steps = 0
        for _ in range(iters):
            y = M @ x
            g = np.linalg.norm(y)
            if g == 0.0:
                growth, steps = 0.0, 1
                break
            x = y / g
            growth *= g
            steps += 1
            if growth > 1e120 or growth < 1e-120:
                break
        if steps:
            best = max(best, growth ** (1.0 / steps))
    return best


def is_schur_stable(A, tol=DEFAULT_TOL):
    """True iff the spectral radius of A is below 1 - tol.

    Primary test: solve the Stein equation X - A X A* = I via the Kronecker
    system; a clean positive definite solution of moderate norm certifies
    stability, a clean indefinite one certifies instability.  Singular or
    borderline systems fall back to a power-iteration radius estimate.
    """
    M = as_cmatrix(A, "A")
    n, ncols = M.shape
    if n != ncols:
        raise DimensionError(f"stability test needs a square matrix, got {n}x{ncols}")
    if n == 0:
        return True
    K = np.eye(n * n, dtype=complex) - np.kron(M, M.conj())
    rhs = np.eye(n, dtype=complex).reshape(n * n)
    try:
        x = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return spectral_radius_estimate(M) < 1.0 - tol
    X = x.reshape(n, n)
    residual = np.linalg.norm(X - M @ X @ M.conj().T - np.eye(n))
    norm_x = np.linalg.norm(X)
    if residual > 1e-8 * (1.0 + norm_x) or norm_x > 0.1 / max(tol, 1e-300):
        # ill-conditioned Stein system: radius is too close to 1 to certify
        return spectral_radius_estimate(M) < 1.0 - tol
    w = np.linalg.eigvalsh(herm(X))
    return bool(w[0] > 0.0)


def sqrtm_posdef(M, tol=DEFAULT_TOL):
    """Hermitian square root of a positive definite matrix (eigendecomposition)."""
    A = as_cmatrix(M, "M")
    rows, cols = A.shape
    if rows != cols:
        raise DimensionError(f"matrix square root needs a square matrix, got {rows}x{cols}")
    if rows == 0:
        return np.zeros((0, 0), dtype=complex)
    H = herm(A)
    w, V = np.linalg.eigh(H)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w[0] <= tol * scale or w[0] <= 0.0:
        raise DefinitenessError(
            f"matrix square root requires positive definiteness: min eigenvalue {w[0]:.3e}"
        )
    return (V * np.sqrt(w)) @ V.conj().T


def solve_hermitian(M, B, what="system"):
    """Solve M X = B for Hermitian positive definite M, logging the conditioning."""
    A = herm(as_cmatrix(M, "M"))
    rhs = np.asarray(B, dtype=complex)
    if A.shape[0] == 0:
        return np.zeros((0,) + rhs.shape[1:], dtype=complex)
    try:
        X = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"{what}: coefficient matrix is singular") from exc
    if log.isEnabledFor(logging.DEBUG):
        w = np.linalg.eigvalsh(A)
        if w[0] > 0:
            log.debug("%s: condition number %.3e", what, w[-1] / w[0])
        else:
            log.debug("%s: matrix not PD (min eig %.3e)", what, w[0])
    return X
