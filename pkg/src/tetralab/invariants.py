"""Characteristic functions as complete unitary invariants.

Two contractions P, P' have coinciding characteristic functions when there
are unitaries u: D_P -> D_P' and u*: D_P* -> D_P'* with

    u_star Theta_P(z) = Theta_P'(z) u     for all z in the disc.

A unitary equivalence U of triples induces such witnesses together with
equivalences of the fundamental pairs; conversely, coincidence plus
fundamental-pair equivalence lets I (x) u_star carry the model space H_P
onto H_P' and intertwine the model operators, recovering the equivalence of
pure triples.  This module checks both directions at truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charfn import ModelData, build_model, model_operators, theta_eval, theta_taylor
from .fundamental import FundamentalPair, solve_fundamental
from .matcore import (
    DEFAULT_POLICY,
    ShapeError,
    TetralabError,
    TolerancePolicy,
    ensure_matrix,
    op_norm,
    range_basis,
    subspace_gap,
)
from .report import CheckReport
from .triples import TetrablockTriple

__all__ = [
    "NotIntertwiningError",
    "CoincidenceWitness",
    "verify_coincidence",
    "induced_defect_unitary",
    "verify_fundamental_equivalence",
    "unitary_invariant_suite",
]


class NotIntertwiningError(TetralabError):
    """Candidate equivalence fails to intertwine the triples within eq_tol."""


@dataclass(frozen=True)
class CoincidenceWitness:
    """Pair of defect-space maps (u on D_P, u_star on D_P*), unitary when valid."""

    u: np.ndarray
    u_star: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", ensure_matrix(self.u, name="u"))
        object.__setattr__(self, "u_star", ensure_matrix(self.u_star, name="u_star"))

    def unitarity_residual(self) -> float:
        res = 0.0
        for m in (self.u, self.u_star):
            rows, cols = m.shape
            if rows != cols:
                return float("inf")
            if rows:
                res = max(res, op_norm(m.conj().T @ m - np.eye(cols)))
        return res


def verify_coincidence(
    p,
    p_prime,
    wit: CoincidenceWitness,
    samples,
    pol: TolerancePolicy = DEFAULT_POLICY,
    taylor_degree: int = 12,
) -> CheckReport:
    """Check u_star Theta_P(z) = Theta_P'(z) u at sample points and on
    Taylor coefficients up to ``taylor_degree``.

    Zero-dimensional defect spaces make the statement vacuous; that is
    reported explicitly rather than silently passed.
    """
    p = ensure_matrix(p, square=True, name="P")
    p_prime = ensure_matrix(p_prime, square=True, name="P'")
    rep = CheckReport(title="characteristic function coincidence")
    rep.check("witness_unitary", wit.unitarity_residual(), pol.scaled_eq(1.0))
    if wit.u.shape[1] == 0 and wit.u_star.shape[1] == 0:
        rep.vacuous("coincidence", "both defect spaces are zero-dimensional")
        return rep
    worst_eval = 0.0
    max_abs = 0.0
    count = 0
    for z in samples:
        z = complex(z)
        max_abs = max(max_abs, abs(z))
        count += 1
        lhs = wit.u_star @ theta_eval(p, z, pol)
        rhs = theta_eval(p_prime, z, pol) @ wit.u
        worst_eval = max(worst_eval, op_norm(lhs - rhs))
    denom = max(1.0 - max_abs, 1e-3)
    rep.check(
        "coincidence_at_samples",
        worst_eval,
        pol.scaled_eq(1.0) / denom,
        note=f"{count} sample points",
    )
    worst_taylor = 0.0
    for k in range(taylor_degree + 1):
        lhs = wit.u_star @ theta_taylor(p, k, pol)
        rhs = theta_taylor(p_prime, k, pol) @ wit.u
        worst_taylor = max(worst_taylor, op_norm(lhs - rhs))
    rep.check(
        "coincidence_taylor",
        worst_taylor,
        pol.scaled_eq(1.0),
        note=f"coefficients 0..{taylor_degree}",
    )
    return rep


def induced_defect_unitary(
    u,
    triple: TetrablockTriple,
    triple_prime: TetrablockTriple,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CoincidenceWitness:
    """Witness induced by a unitary equivalence U of triples.

    Requires U A = A' U, U B = B' U, U P = P' U and U unitary
    (NotIntertwiningError otherwise).  Then U D_P = D_P' U, so compressing U
    to the defect bases yields unitaries u, u_star; their unitarity is
    re-certified before returning.
    """
    u = ensure_matrix(u, square=True, name="U")
    if u.shape[0] != triple.dim or triple.dim != triple_prime.dim:
        raise ShapeError("dimension mismatch between U and the triples")
    scale = pol.scaled_eq(1.0)
    if op_norm(u.conj().T @ u - np.eye(triple.dim)) > scale:
        raise NotIntertwiningError("U is not unitary within eq_tol")
    for name, x, xp in (
        ("A", triple.A, triple_prime.A),
        ("B", triple.B, triple_prime.B),
        ("P", triple.P, triple_prime.P),
    ):
        res = op_norm(u @ x - xp @ u)
        if res > pol.scaled_eq(op_norm(x)):
            raise NotIntertwiningError(f"U does not intertwine {name} (residual {res:.3e})")
    small_u = triple_prime.dp_basis.basis.conj().T @ u @ triple.dp_basis.basis
    small_ustar = triple_prime.dpstar_basis.basis.conj().T @ u @ triple.dpstar_basis.basis
    wit = CoincidenceWitness(u=small_u, u_star=small_ustar)
    res = wit.unitarity_residual()
    if res > scale:
        raise NotIntertwiningError(
            f"induced defect maps are not unitary (residual {res:.3e}); "
            "defect ranks probably disagree"
        )
    return wit


def verify_fundamental_equivalence(
    witness_map,
    pair: FundamentalPair,
    pair_prime: FundamentalPair,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """Check u F_i u* = F_i' for a defect-space unitary u."""
    u = ensure_matrix(witness_map, name="witness map")
    rep = CheckReport(title="fundamental pair equivalence")
    if u.shape != (pair_prime.basis.rank, pair.basis.rank):
        raise ShapeError(
            f"witness map shape {u.shape} does not connect defect ranks "
            f"{pair.basis.rank} -> {pair_prime.basis.rank}"
        )
    if u.shape[0] == 0:
        rep.vacuous("pair_equivalence", "defect spaces are zero-dimensional")
        return rep
    scale = pol.scaled_eq(op_norm(pair.F1), op_norm(pair.F2))
    rep.check("equivalence_F1", op_norm(u @ pair.F1 @ u.conj().T - pair_prime.F1), scale)
    rep.check("equivalence_F2", op_norm(u @ pair.F2 @ u.conj().T - pair_prime.F2), scale)
    return rep


def _model_transport(
    model: ModelData,
    model_prime: ModelData,
    wit: CoincidenceWitness,
    pair_g: FundamentalPair,
    pair_g_prime: FundamentalPair,
    pol: TolerancePolicy,
) -> CheckReport:
    """Converse direction: U_star = I (x) u_star carries model to model'."""
    rep = CheckReport(title="model transport")
    if model.N != model_prime.N:
        raise ShapeError("models must be built at the same truncation degree")
    blocks = model.N + 1
    u_star_big = np.kron(np.eye(blocks, dtype=complex), wit.u_star)
    transported = range_basis(u_star_big @ model.h_basis.basis, pol, scale=1.0)
    gap = subspace_gap(transported, model_prime.h_basis)
    tails = model.tail + model_prime.tail
    rep.check("model_space_transport", gap, 1e-6 + 4.0 * tails)
    xa, xb, xp = model_operators(pair_g.F1, pair_g.F2, model.N)
    xa_p, xb_p, xp_p = model_operators(pair_g_prime.F1, pair_g_prime.F2, model_prime.N)
    scale = pol.scaled_eq(1.0, op_norm(pair_g.F1), op_norm(pair_g.F2)) + 8.0 * tails
    for name, x, x_p in (("A", xa, xa_p), ("B", xb, xb_p), ("P", xp, xp_p)):
        rep.check(
            f"model_intertwine_{name}",
            op_norm(u_star_big @ x - x_p @ u_star_big),
            scale,
        )
    return rep


def unitary_invariant_suite(
    triple: TetrablockTriple,
    triple_prime: TetrablockTriple,
    u,
    pol: TolerancePolicy = DEFAULT_POLICY,
    samples=(0.3 + 0.2j, -0.55, 0.1 - 0.6j, 0.72j),
    model_degree: int | None = None,
) -> CheckReport:
    """Round trip of the complete-unitary-invariant property for pure triples.

    Forward: U induces defect witnesses, which must exhibit coincidence of
    characteristic functions and equivalence of both fundamental pairs.
    Converse: from those witnesses alone, I (x) u_star must carry H_P onto
    H_P' and intertwine the model operator triples.
    """
    rep = CheckReport(title="unitary invariant suite")
    wit = induced_defect_unitary(u, triple, triple_prime, pol)
    rep.extend(verify_coincidence(triple.P, triple_prime.P, wit, samples, pol), prefix="fwd_")
    pair_f = solve_fundamental(triple, pol)
    pair_f_prime = solve_fundamental(triple_prime, pol)
    pair_g = solve_fundamental(triple.adjoint(pol), pol)
    pair_g_prime = solve_fundamental(triple_prime.adjoint(pol), pol)
    rep.extend(verify_fundamental_equivalence(wit.u, pair_f, pair_f_prime, pol), prefix="fwd_F_")
    rep.extend(
        verify_fundamental_equivalence(wit.u_star, pair_g, pair_g_prime, pol), prefix="fwd_G_"
    )
    model = build_model(triple.P, model_degree, pol)
    model_prime = build_model(triple_prime.P, model.N, pol)
    rep.extend(
        _model_transport(model, model_prime, wit, pair_g, pair_g_prime, pol), prefix="cnv_"
    )
    return rep
