"""State-space calculus for rational matrix functions on the unit disc.

A realization stores F(z) = D + z C (I - z A)^{-1} B.  The Taylor
coefficients at the origin are F_0 = D and F_j = C A^{j-1} B for j >= 1, so
Schur stability of A is exactly analyticity of F on a disc of radius > 1.
Sums, products, concatenations and inverses are formed by composing state
spaces; state dimensions add, and no minimization is attempted.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EvaluationError, NotInvertibleError, StabilityError
from .linalg import as_cmatrix, is_schur_stable, spectral_norm


@dataclass(frozen=True)
class Realization:
    """State-space data (A, B, C, D) for F(z) = D + z C (I - z A)^{-1} B.

    `stable` is a tri-state flag: True when stability of A is structurally
    guaranteed (or has been verified), False when A is known unstable, None
    when unknown.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    stable: bool = field(default=None)

    def __post_init__(self):
        A = as_cmatrix(self.A, "A")
        B = as_cmatrix(self.B, "B")
        C = as_cmatrix(self.C, "C")
        D = as_cmatrix(self.D, "D")
        n = A.shape[0]
        out_dim, in_dim = D.shape
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape != (n, in_dim):
            raise DimensionError(f"B must be {n}x{in_dim}, got {B.shape}")
        if C.shape != (out_dim, n):
            raise DimensionError(f"C must be {out_dim}x{n}, got {C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def state_dim(self):
        return self.A.shape[0]

    @property
    def out_dim(self):
        return self.D.shape[0]

    @property
    def in_dim(self):
        return self.D.shape[1]


def constant(D):
    """Realization of the constant function z -> D (no state)."""
    D = as_cmatrix(D, "D")
    n0 = np.zeros((0, 0), dtype=complex)
    return Realization(n0, np.zeros((0, D.shape[1]), dtype=complex),
                       np.zeros((D.shape[0], 0), dtype=complex), D, stable=True)


def zeros(out_dim, in_dim):
    return constant(np.zeros((out_dim, in_dim), dtype=complex))


def identity(dim):
    return constant(np.eye(dim, dtype=complex))


def evaluate(F, z):
    """Value F(z) = D + z C (I - z A)^{-1} B; raises if I - z A is singular."""
    if F.state_dim == 0:
        return F.D.copy()
    M = np.eye(F.state_dim, dtype=complex) - z * F.A
    try:
        X = np.linalg.solve(M, F.B)
    except np.linalg.LinAlgError as exc:
        raise EvaluationError(f"resolvent singular at z = {z}") from exc
    return F.D + z * (F.C @ X)


def taylor_blocks(F, count):
    """First `count` Taylor coefficients [F_0, F_1, ...] of F at the origin."""
    blocks = [F.D.copy()]
    if count <= 1:
        return blocks[:count]
    CAk = F.C.copy()
    for _ in range(count - 1):
        blocks.append(CAk @ F.B)
        CAk = CAk @ F.A
    return blocks


def _merge_stable(*flags):
    if all(f is True for f in flags):
        return True
    return None


def product(F, G):
    """Pointwise product (F G)(z) = F(z) G(z)."""
    if F.in_dim != G.out_dim:
        raise DimensionError(
            f"product needs inner dimensions to match: {F.in_dim} vs {G.out_dim}")
    nf, ng = F.state_dim, G.state_dim
    A = np.block([
        [F.A, F.B @ G.C],
        [np.zeros((ng, nf), dtype=complex), G.A],
    ])
    B = np.vstack([F.B @ G.D, G.B])
    C = np.hstack([F.C, F.D @ G.C])
    D = F.D @ G.D
    return Realization(A, B, C, D, stable=_merge_stable(F.stable, G.stable))


def add(F, G):
    """Pointwise sum (F + G)(z)."""
    if (F.out_dim, F.in_dim) != (G.out_dim, G.in_dim):
        raise DimensionError(
            f"sum needs matching shapes: {F.out_dim}x{F.in_dim} vs {G.out_dim}x{G.in_dim}")
    nf, ng = F.state_dim, G.state_dim
    A = np.block([
        [F.A, np.zeros((nf, ng), dtype=complex)],
        [np.zeros((ng, nf), dtype=complex), G.A],
    ])
    B = np.vstack([F.B, G.B])
    C = np.hstack([F.C, G.C])
    D = F.D + G.D
    return Realization(A, B, C, D, stable=_merge_stable(F.stable, G.stable))


def hconcat(F, G):
    """Side-by-side block row [F(z)  G(z)] acting on stacked inputs."""
    if F.out_dim != G.out_dim:
        raise DimensionError(
            f"hconcat needs matching output dimensions: {F.out_dim} vs {G.out_dim}")
    nf, ng = F.state_dim, G.state_dim
    A = np.block([
        [F.A, np.zeros((nf, ng), dtype=complex)],
        [np.zeros((ng, nf), dtype=complex), G.A],
    ])
    B = np.block([
        [F.B, np.zeros((nf, G.in_dim), dtype=complex)],
        [np.zeros((ng, F.in_dim), dtype=complex), G.B],
    ])
    C = np.hstack([F.C, G.C])
    D = np.hstack([F.D, G.D])
    return Realization(A, B, C, D, stable=_merge_stable(F.stable, G.stable))


def vconcat(F, G):
    """Stacked block column [F(z); G(z)] sharing one input."""
    if F.in_dim != G.in_dim:
        raise DimensionError(
            f"vconcat needs matching input dimensions: {F.in_dim} vs {G.in_dim}")
    nf, ng = F.state_dim, G.state_dim
    A = np.block([
        [F.A, np.zeros((nf, ng), dtype=complex)],
        [np.zeros((ng, nf), dtype=complex), G.A],
    ])
    B = np.vstack([F.B, G.B])
    C = np.block([
        [F.C, np.zeros((F.out_dim, ng), dtype=complex)],
        [np.zeros((G.out_dim, nf), dtype=complex), G.C],
    ])
    D = np.vstack([F.D, G.D])
    return Realization(A, B, C, D, stable=_merge_stable(F.stable, G.stable))


def inverse(F):
    """Pointwise inverse F(z)^{-1}, requiring D = F(0) invertible.

    Uses A - B D^{-1} C as the new state matrix; the stable flag records
    whether that matrix passed the stability test, since the inverse of a
    stable function need not be stable.
    """
    if F.out_dim != F.in_dim:
        raise DimensionError(f"inverse needs a square function, got {F.out_dim}x{F.in_dim}")
    k = F.out_dim
    if k == 0:
        return Realization(F.A, F.B, F.C, F.D, stable=F.stable)
    sv = np.linalg.svd(F.D, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise NotInvertibleError(
            f"function is not invertible at the origin (sigma_min(D) = {sv[-1]:.3e})")
    Dinv = np.linalg.inv(F.D)
    A = F.A - F.B @ Dinv @ F.C
    B = F.B @ Dinv
    C = -Dinv @ F.C
    D = Dinv
    return Realization(A, B, C, D, stable=bool(is_schur_stable(A)) if A.shape[0] else True)


def hinf_norm_estimate(F, grid=512):
    """Lower bound for sup_{|z|=1} ||F(z)|| from a uniform grid plus one
    golden-section refinement around the best grid point."""
    if F.stable is False:
        raise StabilityError("H-infinity norm needs a stable function")
    if F.stable is None and F.state_dim and not is_schur_stable(F.A):
        raise StabilityError("H-infinity norm needs a stable function")
    if F.out_dim == 0 or F.in_dim == 0:
        return 0.0
    grid = max(int(grid), 8)

    def val(theta):
        return spectral_norm(evaluate(F, np.exp(1j * theta)))

    thetas = 2.0 * np.pi * np.arange(grid) / grid
    values = [val(t) for t in thetas]
    jbest = int(np.argmax(values))
    best = values[jbest]
    # golden-section refinement on the bracket around the best grid point
    lo = thetas[jbest] - 2.0 * np.pi / grid
    hi = thetas[jbest] + 2.0 * np.pi / grid
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = val(c), val(d)
    for _ in range(48):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = val(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = val(d)
    best = max(best, fc, fd)
    return float(best)
