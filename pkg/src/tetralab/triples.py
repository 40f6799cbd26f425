"""Commuting contractive triples (A, B, P) and their defect data.

A triple here models the coordinates of a tetrablock contraction.  Only
necessary conditions are machine-checkable (pairwise commutation and the
coordinate norm bounds); actual spectral-set membership for the tetrablock
is not finitely decidable from matrix data, and every report produced from
this module says so in its header.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hardy import TruncatedHardy, pencil, shift, toeplitz
from .matcore import (
    DEFAULT_POLICY,
    NotContractiveError,
    ShapeError,
    SubspaceBasis,
    TetralabError,
    TolerancePolicy,
    commutator,
    defect,
    ensure_matrix,
    op_norm,
)
from .report import NECESSARY_HEADER, CheckReport

__all__ = [
    "NonCommutingError",
    "NotCoinvariantError",
    "TetrablockTriple",
    "PurityCertificate",
    "validate",
    "necessary_report",
    "is_pure",
    "from_symbols",
    "compress",
]


class NonCommutingError(TetralabError):
    """A pair of coordinates fails to commute within eq_tol."""


class NotCoinvariantError(TetralabError):
    """Subspace is not co-invariant (invariant under the adjoints) within eq_tol."""


@dataclass(frozen=True)
class TetrablockTriple:
    """Validated commuting triple with cached defect operators of P.

    dp / dpstar are the defect operators D_P and D_{P*}; dp_basis and
    dpstar_basis are orthonormal bases of their ranges.  All downstream
    batteries express operators on the defect spaces in these bases, so a
    triple is the single source of basis conventions for its own checks.
    """

    A: np.ndarray
    B: np.ndarray
    P: np.ndarray
    dp: np.ndarray
    dpstar: np.ndarray
    dp_basis: SubspaceBasis
    dpstar_basis: SubspaceBasis

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def adjoint(self, pol: TolerancePolicy = DEFAULT_POLICY) -> "TetrablockTriple":
        """The triple (A*, B*, P*), revalidated so its caches are consistent."""
        return validate(self.A.conj().T, self.B.conj().T, self.P.conj().T, pol)

    def max_norm(self) -> float:
        return max(op_norm(self.A), op_norm(self.B), op_norm(self.P))


def _commutation_residuals(a, b, p) -> dict[str, float]:
    return {
        "AB": op_norm(commutator(a, b)),
        "AP": op_norm(commutator(a, p)),
        "BP": op_norm(commutator(b, p)),
    }


def validate(a, b, p, pol: TolerancePolicy = DEFAULT_POLICY) -> TetrablockTriple:
    """Check necessary conditions and build the triple with cached defects.

    Checks: equal square shapes; pairwise commutation within eq_tol
    (relative); ||A||, ||B||, ||P|| <= 1 + eq_tol.  The defect operators of P
    and their range bases are computed once here and cached.
    """
    a = ensure_matrix(a, square=True, name="A")
    b = ensure_matrix(b, square=True, name="B")
    p = ensure_matrix(p, square=True, name="P")
    if not (a.shape == b.shape == p.shape):
        raise ShapeError(f"coordinate shapes differ: {a.shape}, {b.shape}, {p.shape}")
    norms = {"A": op_norm(a), "B": op_norm(b), "P": op_norm(p)}
    for name, value in norms.items():
        if value > 1.0 + pol.eq_tol:
            raise NotContractiveError(f"||{name}|| = {value:.12g} exceeds 1 + eq_tol")
    scale = pol.scaled_eq(*norms.values())
    for pair, res in _commutation_residuals(a, b, p).items():
        if res > scale:
            raise NonCommutingError(f"[{pair[0]},{pair[1]}] has norm {res:.3e} > {scale:.3e}")
    dp, dp_basis = defect(p, pol)
    dpstar, dpstar_basis = defect(p.conj().T, pol)
    return TetrablockTriple(
        A=a,
        B=b,
        P=p,
        dp=dp,
        dpstar=dpstar,
        dp_basis=dp_basis,
        dpstar_basis=dpstar_basis,
    )


def necessary_report(triple: TetrablockTriple, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckReport:
    """Residual-level record of the necessary conditions on a built triple."""
    rep = CheckReport(title="triple necessary conditions", header=NECESSARY_HEADER)
    norms = {"A": op_norm(triple.A), "B": op_norm(triple.B), "P": op_norm(triple.P)}
    scale = pol.scaled_eq(*norms.values())
    for pair, res in _commutation_residuals(triple.A, triple.B, triple.P).items():
        rep.check(f"commute_{pair}", res, scale)
    for name, value in norms.items():
        rep.check(f"norm_{name}", max(value - 1.0, 0.0), pol.eq_tol)
    return rep


@dataclass(frozen=True)
class PurityCertificate:
    """Purity verdict for a contraction P (P^n -> 0).

    decay_power, when set, is an n with ||P^n|| <= 1e-12 (a power of two).
    nilpotency_index, when set, is the least n with P^n numerically zero.
    """

    pure: bool
    spectral_radius: float
    decay_power: int | None = None
    nilpotency_index: int | None = None

    def __bool__(self) -> bool:
        return self.pure


def is_pure(p, pol: TolerancePolicy = DEFAULT_POLICY) -> PurityCertificate:
    """Decide purity by the spectral radius: pure iff rho(P) < 1 - rank_tol."""
    p = ensure_matrix(p, square=True, name="P")
    n = p.shape[0]
    if n == 0:
        return PurityCertificate(pure=True, spectral_radius=0.0, decay_power=1, nilpotency_index=1)
    rho = float(np.abs(np.linalg.eigvals(p)).max())
    if rho >= 1.0 - pol.rank_tol:
        return PurityCertificate(pure=False, spectral_radius=rho)
    nil_index = None
    if rho < pol.rank_tol:
        power = np.eye(n, dtype=complex)
        for k in range(1, n + 1):
            power = power @ p
            if op_norm(power) <= 1e-12:
                nil_index = k
                break
    decay = None
    m = p.copy()
    k = 1
    for _ in range(20):
        if op_norm(m) <= 1e-12:
            decay = k
            break
        m = m @ m
        k *= 2
    return PurityCertificate(
        pure=True,
        spectral_radius=rho,
        decay_power=decay,
        nilpotency_index=nil_index,
    )


def from_symbols(f1, f2, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> TetrablockTriple:
    """Triple of truncated multiplication operators

        A = M_{F1* + F2 z},  B = M_{F2* + F1 z},  P = M_z

    on the degree <= n Hardy grid with fiber C^d.  Validation failures
    propagate: commutation requires [F1, F2] = 0 together with the balance
    [F1, F1*] = [F2, F2*] (those are exactly the coefficients multiplying
    z^2 and z in [A, B]), and the norm check requires the pencil multiplier
    sup_{|z|=1} ||F2* + F1 z|| <= 1; numerical radii <= 1 alone do not
    suffice.
    """
    f1 = ensure_matrix(f1, square=True, name="F1")
    f2 = ensure_matrix(f2, square=True, name="F2")
    if f1.shape != f2.shape:
        raise ShapeError(f"F1, F2 shapes differ: {f1.shape}, {f2.shape}")
    d = f1.shape[0]
    space = TruncatedHardy(max_degree=n, fiber_dim=d)
    a = toeplitz(pencil(f1.conj().T, f2), n)
    b = toeplitz(pencil(f2.conj().T, f1), n)
    p = shift(space)
    return validate(a, b, p, pol)


def compress(
    triple: TetrablockTriple,
    subspace: SubspaceBasis,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> TetrablockTriple:
    """Compression of the triple to a co-invariant subspace.

    Co-invariance (invariance of the subspace under A*, B*, P*) makes the
    compression multiplicative on polynomials, which is what preserves
    commutation and the contraction bounds; it is checked here via
    ||(I - Q) X* Q|| <= eq_tol relative, Q the orthogonal projection.
    """
    if subspace.ambient_dim != triple.dim:
        raise ShapeError("subspace ambient dimension does not match the triple")
    if subspace.rank == 0:
        raise ShapeError("cannot compress to the zero subspace")
    q = subspace.projector
    eye = np.eye(triple.dim)
    for name, x in (("A", triple.A), ("B", triple.B), ("P", triple.P)):
        leak = op_norm((eye - q) @ x.conj().T @ q)
        if leak > pol.scaled_eq(op_norm(x)):
            raise NotCoinvariantError(
                f"subspace not invariant under {name}*: leak {leak:.3e}"
            )
    v = subspace.basis
    return validate(
        v.conj().T @ triple.A @ v,
        v.conj().T @ triple.B @ v,
        v.conj().T @ triple.P @ v,
        pol,
    )
