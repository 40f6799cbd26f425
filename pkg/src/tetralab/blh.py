"""Invariant subspaces of the pencil triple and symbol extraction.

On the D-valued Hardy space, a closed subspace M that is jointly invariant
under (M_{F1*+F2 z}, M_{F2*+F1 z}, M_z) and of Beurling form M = Theta H^2
for an inner Theta forces the compressions

    Phi = M_Theta* M_{F1*+F2 z} M_Theta,   Psi = M_Theta* M_{F2*+F1 z} M_Theta

to be multiplication operators with degree-one symbols Phi = G1 + G2* z and
Psi = G2 + G1* z; conversely those intertwinings restate the invariance.
At truncation degree N only the coefficient blocks with row/column degree
<= N - deg(Theta) are faithful to the infinite operators, so extraction and
uniqueness are asserted on that interior region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charfn import suggest_degree, theta_coeffs, truncation_tail
from .fundamental import solve_fundamental
from .hardy import AnalyticSymbol, TruncatedHardy, pencil, shift, toeplitz
from .matcore import (
    DEFAULT_POLICY,
    ShapeError,
    SubspaceBasis,
    TetralabError,
    TolerancePolicy,
    ensure_matrix,
    op_norm,
    range_basis,
)
from .report import CheckReport
from .triples import TetrablockTriple, from_symbols, necessary_report

__all__ = [
    "NotInnerError",
    "NotDegreeOneError",
    "InvariantSubspace",
    "from_inner",
    "wandering_theta",
    "check_invariance",
    "extract_symbols",
    "extraction_roundtrip",
    "verify_isometry_propagation",
]


class NotInnerError(TetralabError):
    """Toeplitz matrix of the symbol is not isometric on the interior degrees."""


class NotDegreeOneError(TetralabError):
    """Compressed symbol has interior Taylor mass beyond degree one.

    This is the numerical signature of a subspace that is NOT jointly
    invariant under the pencil operators.
    """


@dataclass(frozen=True)
class InvariantSubspace:
    """Candidate invariant subspace of a truncated Hardy grid."""

    space: TruncatedHardy
    basis: SubspaceBasis
    theta: AnalyticSymbol | None = None

    def __post_init__(self) -> None:
        if self.basis.ambient_dim != self.space.dim:
            raise ShapeError(
                f"basis ambient dim {self.basis.ambient_dim} != grid dim {self.space.dim}"
            )


def from_inner(theta: AnalyticSymbol, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> InvariantSubspace:
    """Subspace range(toeplitz(theta)) on the degree <= n grid.

    The symbol must actually be inner at this truncation: columns of degree
    <= n - deg(theta) have to be isometric (NotInnerError otherwise).  Top
    degrees are excused because the grid cuts their tails off.
    """
    space = TruncatedHardy(max_degree=n, fiber_dim=theta.d_out)
    t = toeplitz(theta, n)
    cut = max(n - theta.degree, 0)
    k = (cut + 1) * theta.d_in
    gram = t.conj().T @ t
    resid = op_norm(gram[:k, :k] - np.eye(k))
    if resid > pol.scaled_eq(1.0):
        raise NotInnerError(
            f"toeplitz(theta) not isometric on degrees <= {cut} (residual {resid:.3e})"
        )
    return InvariantSubspace(space=space, basis=range_basis(t, pol, scale=1.0), theta=theta)


def wandering_theta(sub: InvariantSubspace, pol: TolerancePolicy = DEFAULT_POLICY) -> AnalyticSymbol:
    """Generating symbol from the wandering subspace M - (z M).

    An orthonormal basis of M ortho-minus (shift M) is read off degree by
    degree; its column coefficients are the Taylor blocks of a symbol whose
    Toeplitz range reproduces M on interior degrees when M is genuinely
    shift-invariant of Beurling form.
    """
    s = shift(sub.space)
    m = sub.basis.basis
    if m.shape[1] == 0:
        raise ShapeError("cannot extract a wandering symbol from the zero subspace")
    zm = range_basis(s @ m, pol, scale=1.0)
    # project M onto the complement of zM and orthonormalize what survives
    resid = (np.eye(sub.space.dim) - zm.projector) @ m
    wander = range_basis(resid, pol, scale=1.0)
    d = sub.space.fiber_dim
    cols = wander.basis
    coeffs = [
        cols[sub.space.block(k), :] for k in range(sub.space.max_degree + 1)
    ]
    return AnalyticSymbol(tuple(coeffs)).trimmed(tol=1e-13)


def check_invariance(
    sub: InvariantSubspace,
    f1,
    f2,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """Joint-invariance residuals ||(I - Q) X Q|| for the three pencil operators.

    Inputs are restricted to interior degrees (<= N - 1) so that the checks
    measure genuine leakage rather than top-degree truncation loss.
    """
    f1 = ensure_matrix(f1, square=True, name="F1")
    f2 = ensure_matrix(f2, square=True, name="F2")
    space = sub.space
    if f1.shape[0] != space.fiber_dim:
        raise ShapeError("symbol fiber does not match the grid")
    n = space.max_degree
    xa = toeplitz(pencil(f1.conj().T, f2), n)
    xb = toeplitz(pencil(f2.conj().T, f1), n)
    xp = shift(space)
    q = sub.basis.projector
    eye = np.eye(space.dim)
    interior = space.degree_projector(n - 1)
    rep = CheckReport(title="pencil invariance of subspace")
    scale = pol.scaled_eq(op_norm(f1), op_norm(f2))
    for name, x in (("A_pencil", xa), ("B_pencil", xb), ("shift", xp)):
        rep.check(f"invariant_{name}", op_norm((eye - q) @ x @ q @ interior), scale)
    return rep


def _interior_cut(n: int, theta: AnalyticSymbol) -> int:
    """Largest block index faithful to the infinite compression."""
    return n - theta.degree


def extract_symbols(
    theta: AnalyticSymbol,
    f1,
    f2,
    n: int,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> tuple[np.ndarray, np.ndarray, CheckReport]:
    """Recover (G1, G2) from the compressions of the pencils to range(M_theta).

    Requires toeplitz(theta) isometric on degrees <= n - deg(theta)
    (NotInnerError otherwise).  The compressed operators Phi, Psi must be
    block Toeplitz with only degree-0 and degree-1 diagonals on the interior
    region; interior mass at degree >= 2 raises NotDegreeOneError, which
    signals that the subspace is not invariant under the pencil pair.
    Returns G1 = Phi_0, G2 = Psi_0 together with a report asserting the
    Toeplitz structure, the degree bound, and the cross-consistency
    Phi_1 = G2*, Psi_1 = G1*.
    """
    f1 = ensure_matrix(f1, square=True, name="F1")
    f2 = ensure_matrix(f2, square=True, name="F2")
    if theta.d_out != f1.shape[0]:
        raise ShapeError("theta output fiber must match the symbol dimension")
    cut = _interior_cut(n, theta)
    if cut < 1:
        raise ShapeError(
            f"truncation degree {n} too small for theta of degree {theta.degree}; "
            "need at least deg(theta) + 1"
        )
    t_th = toeplitz(theta, n)
    scale = pol.scaled_eq(op_norm(f1), op_norm(f2))
    # inner on interior: columns of degree <= cut are isometric
    d_in = theta.d_in
    gram = t_th.conj().T @ t_th
    k = (cut + 1) * d_in
    inner_resid = op_norm(gram[:k, :k] - np.eye(k))
    if inner_resid > pol.scaled_eq(1.0):
        raise NotInnerError(
            f"toeplitz(theta) not isometric on degrees <= {cut} (residual {inner_resid:.3e})"
        )
    xa = toeplitz(pencil(f1.conj().T, f2), n)
    xb = toeplitz(pencil(f2.conj().T, f1), n)
    phi = t_th.conj().T @ xa @ t_th
    psi = t_th.conj().T @ xb @ t_th
    rep = CheckReport(title="symbol extraction from invariant subspace")
    rep.check("inner_on_interior", inner_resid, pol.scaled_eq(1.0))

    def block(mat: np.ndarray, i: int, j: int) -> np.ndarray:
        return mat[i * d_in : (i + 1) * d_in, j * d_in : (j + 1) * d_in]

    # Toeplitz structure on the interior region
    toep_resid = 0.0
    for mat in (phi, psi):
        for diag in range(-cut, cut + 1):
            ref = None
            for j in range(cut + 1):
                i = j + diag
                if not 0 <= i <= cut:
                    continue
                blk = block(mat, i, j)
                if ref is None:
                    ref = blk
                else:
                    toep_resid = max(toep_resid, op_norm(blk - ref))
    rep.check("toeplitz_on_interior", toep_resid, scale)
    # upper-triangular interior mass (the compressions are analytic)
    analytic_resid = 0.0
    for mat in (phi, psi):
        for j in range(1, cut + 1):
            analytic_resid = max(analytic_resid, op_norm(block(mat, 0, j)))
    rep.check("analytic_on_interior", analytic_resid, scale)
    high_resid = 0.0
    for mat in (phi, psi):
        for i in range(2, cut + 1):
            high_resid = max(high_resid, op_norm(block(mat, i, 0)))
    ok = rep.check("degree_le_one_on_interior", high_resid, scale)
    if not ok:
        raise NotDegreeOneError(
            f"interior Taylor mass at degree >= 2 is {high_resid:.3e}; "
            "subspace is not invariant under the pencil pair"
        )
    g1 = block(phi, 0, 0)
    g2 = block(psi, 0, 0)
    rep.check("cross_consistency_1", op_norm(block(phi, 1, 0) - g2.conj().T), scale)
    rep.check("cross_consistency_2", op_norm(block(psi, 1, 0) - g1.conj().T), scale)
    return g1, g2, rep


def extraction_roundtrip(
    triple: TetrablockTriple,
    pol: TolerancePolicy = DEFAULT_POLICY,
    theta_degree: int | None = None,
    margin: int = 3,
) -> tuple[np.ndarray, np.ndarray, CheckReport]:
    """Extract (G1, G2) from Theta_{P*} and compare with the direct solver.

    The characteristic function of P* maps D_P* to D_P, its Toeplitz range
    is invariant under the F-pencils, and the compressed symbols must be the
    G-pencils.  ``theta_degree`` defaults to one past the degree at which
    the power tail of P drops below 1e-12, so the omitted Taylor mass is
    accounted for in the match tolerance.
    """
    pair_f = solve_fundamental(triple, pol)
    pair_g = solve_fundamental(triple.adjoint(pol), pol)
    if theta_degree is None:
        theta_degree = suggest_degree(triple.P, 1e-12, pol) + 1
    theta = theta_coeffs(triple.P.conj().T, theta_degree, pol)
    n = theta.degree + margin
    tail = truncation_tail(triple.P, max(theta_degree - 1, 0), pol)
    g1, g2, rep = extract_symbols(theta, pair_f.F1, pair_f.F2, n, pol)
    out = CheckReport(title="symbol extraction round trip")
    out.extend(rep, prefix="ext_")
    tol = pol.scaled_eq(op_norm(pair_g.F1), op_norm(pair_g.F2)) + 8.0 * tail
    out.check("match_G1", op_norm(g1 - pair_g.F1), tol)
    out.check("match_G2", op_norm(g2 - pair_g.F2), tol)
    return g1, g2, out


def verify_isometry_propagation(
    f1,
    f2,
    g1,
    g2,
    n: int,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """If the source pencil triple passes the necessary isometry battery,
    the extracted-target pencil triple must pass it too.

    Source: (M_{F1*+F2 z}, M_{F2*+F1 z}, M_z).  Target: the same construction
    carrying (G1 + G2* z, G2 + G1* z, z), i.e. from_symbols(G1*, G2*, n).
    The battery is: pairwise commutation, coordinate norms <= 1, and P
    isometric on interior degrees.  When the source battery fails the target
    entries are recorded as skips (the implication is vacuous).
    """
    rep = CheckReport(title="isometry propagation to extracted symbols")

    def battery(a1, a2) -> tuple[CheckReport, str]:
        sub = CheckReport(title="battery")
        try:
            trip = from_symbols(a1, a2, n, pol)
        except TetralabError as exc:
            return sub, str(exc)
        sub.extend(necessary_report(trip, pol))
        space = TruncatedHardy(max_degree=n, fiber_dim=ensure_matrix(a1).shape[0])
        interior = space.degree_projector(n - 1)
        iso = op_norm((trip.P.conj().T @ trip.P - np.eye(space.dim)) @ interior)
        sub.check("shift_isometric_interior", iso, pol.scaled_eq(1.0))
        return sub, ""

    src_rep, src_err = battery(f1, f2)
    if src_err or not src_rep.overall:
        reason = src_err or "; ".join(e.name for e in src_rep.failures)
        rep.vacuous(
            "propagation",
            f"source pencil triple fails its own battery at this truncation ({reason})",
        )
        return rep
    rep.extend(src_rep, prefix="source_")
    g1 = ensure_matrix(g1, square=True, name="G1")
    g2 = ensure_matrix(g2, square=True, name="G2")
    tgt_rep, tgt_err = battery(g1.conj().T, g2.conj().T)
    if tgt_err:
        rep.check("target_battery", float("inf"), pol.scaled_eq(1.0), note=tgt_err)
        return rep
    rep.extend(tgt_rep, prefix="target_")
    return rep
