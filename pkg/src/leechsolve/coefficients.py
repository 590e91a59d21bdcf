"""Coefficient functions of the linear-fractional parametrization.

From the derived matrices, the four coefficients

    [ U11(z)  U12(z) ]
    [ U21(z)  U22(z) ]

share the single stable state matrix A0, and every solution of the
interpolation problem is X = (U12 + U11 Y)(U22 + U21 Y)^{-1} with Y ranging
over the stable functions of size (p - m) x q with sup norm at most 1.  The
equivalent feedback (Redheffer) form with coefficients Phi_ij is built from
the same blocks by state-space composition.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StabilityError
from .linalg import spectral_norm
from .realization import (
    Realization,
    add,
    constant,
    evaluate,
    hinf_norm_estimate,
    inverse,
    product,
    zeros,
)

log = logging.getLogger("leechsolve.coefficients")


def _inv(M):
    if M.size == 0:
        return np.zeros(M.shape[::-1], dtype=complex)
    return np.linalg.inv(M)


@dataclass
class CoefficientSet:
    """The four coefficient realizations plus their constant ingredients.

    U11: p x (p-m),  U12: p x q,  U21: q x (p-m),  U22: q x q.
    `joint` stacks them into one (p+q) x (p-m+q) realization on the shared
    state, convenient for evaluating all four at once.
    """

    Theta0: np.ndarray
    Delta0: np.ndarray
    Delta1: np.ndarray
    U11: Realization
    U12: Realization
    U21: Realization
    U22: Realization
    joint: Realization

    @property
    def p(self):
        return self.U11.out_dim

    @property
    def q(self):
        return self.U22.out_dim

    @property
    def free_dim(self):
        return self.U11.in_dim


def build_upsilon(derived):
    """Assemble the coefficient realizations from the derived matrices.

    All four blocks share A0.  With gap = Q^{-1} + P2 - P1:

        U11(z) = Theta0 Delta1^{-1} - z C1 (I - z A0)^{-1} Bt,
                 Bt = Q^{-1} gap^{-1} B1 Theta0 Delta1^{-1}
        U21(z) =                  - z C2 (I - z A0)^{-1} Bt
        U12(z) = U12(0) + z C1 (I - z A0)^{-1} B0 Delta0^{-1},
                 U12(0) = ((D1 - Gamma* Q B1)* Delta^{-1} (D2 - Gamma* Q B2)
                           + B1* Q B2 + C1 Omega C2*) Delta0^{-1}
        U22(z) = Delta0 + z C2 (I - z A0)^{-1} B0 Delta0^{-1}
    """
    data = derived.data
    p, q, k = data.p, data.q, data.p - data.m
    A0, C1, C2 = derived.A0, derived.C1, derived.C2
    d0inv = _inv(derived.Delta0)
    d1inv = _inv(derived.Delta1)
    GhQ = derived.Gamma.conj().T @ derived.Q
    DGQB1 = data.D1 - GhQ @ data.B1
    DGQB2 = data.D2 - GhQ @ data.B2
    U12_0 = (DGQB1.conj().T @ np.linalg.solve(derived.Delta, DGQB2)
             + data.B1.conj().T @ derived.Q @ data.B2
             + C1 @ derived.Omega @ C2.conj().T) @ d0inv
    Bt = derived.Qinv @ np.linalg.solve(derived.gap, data.B1 @ derived.Theta0) @ d1inv
    B0d = derived.B0 @ d0inv

    U11 = Realization(A0, -Bt, C1, derived.Theta0 @ d1inv, stable=True)
    U21 = Realization(A0, -Bt, C2, np.zeros((q, k), dtype=complex), stable=True)
    U12 = Realization(A0, B0d, C1, U12_0, stable=True)
    U22 = Realization(A0, B0d, C2, derived.Delta0, stable=True)
    joint = Realization(
        A0,
        np.hstack([-Bt, B0d]),
        np.vstack([C1, C2]),
        np.block([
            [derived.Theta0 @ d1inv, U12_0],
            [np.zeros((q, k), dtype=complex), derived.Delta0],
        ]),
        stable=True,
    )
    return CoefficientSet(derived.Theta0, derived.Delta0, derived.Delta1,
                          U11, U12, U21, U22, joint)


def j_inner_defect(coeffs, points=64):
    """sup over circle samples of || U(z)* J1 U(z) - J2 || with
    J1 = diag(I_p, -I_q), J2 = diag(I_{p-m}, -I_q)."""
    p, q, k = coeffs.p, coeffs.q, coeffs.free_dim
    J1 = np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)
    J2 = np.diag(np.concatenate([np.ones(k), -np.ones(q)])).astype(complex)
    worst = 0.0
    for theta in 2.0 * np.pi * np.arange(points) / points:
        Uz = evaluate(coeffs.joint, np.exp(1j * theta))
        worst = max(worst, spectral_norm(Uz.conj().T @ J1 @ Uz - J2))
    return worst


@dataclass
class RedhefferSet:
    """Feedback form of the parametrization:

        X = Phi22 + Phi21 Y (I - Phi11 Y)^{-1} Phi12

    over the same contractive Y.  Built by state-space composition from the
    coefficient set, so state dimensions add without minimization."""

    Phi11: Realization
    Phi12: Realization
    Phi21: Realization
    Phi22: Realization


def build_redheffer(coeffs):
    """Convert the coefficient set to feedback form:

        Phi12 = U22^{-1}, Phi11 = -Phi12 U21,
        Phi22 = U12 Phi12, Phi21 = U11 - U12 Phi12 U21.
    """
    Phi12 = inverse(coeffs.U22)
    if Phi12.stable is not True:
        raise StabilityError(
            "U22 is not outer: its inverse left the stable class (breakdown)")
    Phi11 = product(Phi12, coeffs.U21)
    Phi11 = Realization(Phi11.A, Phi11.B, -Phi11.C, -Phi11.D, stable=Phi11.stable)
    Phi21 = add(coeffs.U11, _negate(product(coeffs.U12, product(Phi12, coeffs.U21))))
    Phi22 = product(coeffs.U12, Phi12)
    return RedhefferSet(Phi11, Phi12, Phi21, Phi22)


def _negate(F):
    return Realization(F.A, F.B, -F.C, -F.D, stable=F.stable)


def check_parameter(coeffs, Y, tol=1e-9):
    """Validate the free parameter: shape (p-m) x q, stable, sup norm <= 1 + tol."""
    if not isinstance(Y, Realization):
        raise ParameterError("free parameter must be a Realization")
    k, q = coeffs.free_dim, coeffs.q
    if (Y.out_dim, Y.in_dim) != (k, q):
        raise ParameterError(
            f"free parameter must be {k}x{q}, got {Y.out_dim}x{Y.in_dim}")
    if Y.stable is False:
        raise ParameterError("free parameter must be a stable function")
    try:
        norm = hinf_norm_estimate(Y) if (k and q) else 0.0
    except StabilityError as exc:
        raise ParameterError(f"free parameter must be a stable function: {exc}") from exc
    if norm > 1.0 + tol:
        raise ParameterError(
            f"free parameter exceeds the unit ball: estimated sup norm {norm:.6e}")
    return norm


def apply_lft(coeffs, Y, tol=1e-9):
    """Solution X = (U12 + U11 Y)(U22 + U21 Y)^{-1} for a contractive Y.

    The denominator is invertible at the origin by construction
    ((U22 + U21 Y)(0) = Delta0) and outer for admissible Y; its inverse is
    checked to be stable and the composition fails loudly otherwise.
    """
    check_parameter(coeffs, Y, tol=tol)
    num = add(coeffs.U12, product(coeffs.U11, Y))
    den = add(coeffs.U22, product(coeffs.U21, Y))
    deninv = inverse(den)
    if deninv.stable is not True:
        raise StabilityError(
            "denominator U22 + U21 Y is not outer for this parameter (breakdown)")
    return product(num, deninv)


def central_solution(coeffs, tol=1e-9):
    """The solution at Y = 0, namely X = U12 U22^{-1}."""
    return apply_lft(coeffs, zeros(coeffs.free_dim, coeffs.q), tol=tol)


def apply_redheffer(phi, Y, tol=1e-9):
    """Evaluate the feedback form X = Phi22 + Phi21 Y (I - Phi11 Y)^{-1} Phi12."""
    if not isinstance(Y, Realization):
        raise ParameterError("free parameter must be a Realization")
    q = phi.Phi12.in_dim
    k = phi.Phi11.in_dim
    if (Y.out_dim, Y.in_dim) != (k, q):
        raise ParameterError(
            f"free parameter must be {k}x{q}, got {Y.out_dim}x{Y.in_dim}")
    loop = add(constant(np.eye(q, dtype=complex)), _negate(product(phi.Phi11, Y)))
    loopinv = inverse(loop)
    if loopinv.stable is not True:
        raise StabilityError("feedback loop I - Phi11 Y is not outer (breakdown)")
    return add(phi.Phi22, product(phi.Phi21, product(Y, product(loopinv, phi.Phi12))))


def solution_report(derived, coeffs, X, grid=512, points=64):
    """Verification appendix for a computed solution: interpolation residual,
    norm estimate, and the indefinite-metric defect of the coefficients."""
    data = derived.data
    G = data.g()
    K = data.k()
    residual = 0.0
    for theta in 2.0 * np.pi * np.arange(points) / points:
        z = np.exp(1j * theta)
        residual = max(residual, spectral_norm(
            evaluate(G, z) @ evaluate(X, z) - evaluate(K, z)))
    norm = hinf_norm_estimate(X, grid=grid)
    defect = j_inner_defect(coeffs, points=points)
    return {
        "interpolation_residual": residual,
        "norm_estimate": norm,
        "norm_grid": int(grid),
        "coefficient_metric_defect": defect,
        "circle_points": int(points),
        "margins": {key: float(val) for key, val in derived.margins.items()},
    }
