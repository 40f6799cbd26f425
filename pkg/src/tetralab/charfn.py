"""Characteristic function and functional model of a pure contraction.

The characteristic function of a contraction P,

    Theta_P(z) = [-P + z D_{P*} (I - z P*)^{-1} D_P] restricted to D_P,

maps the defect space of P into the defect space of P*.  For pure P the map
W h = sum_n z^n (x) D_{P*} P*^n h is an isometry into the D_{P*}-valued Hardy
space, the ranges of W and of multiplication by Theta_P are complementary,
and the compression of the pencil pair built from the adjoint fundamental
operators (G1, G2) to H_P = (Theta_P H^2)^perp reproduces the original
triple.  Everything here is computed on the truncated grid of degrees <= N
with a certified tail bound.

All defect-space operators are expressed in the deterministic eigenbases
produced by ``matcore.defect``; since those bases depend only on the matrix
bytes, coefficients produced by different functions of the same P are
directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fundamental import FundamentalPair, solve_fundamental
from .hardy import AnalyticSymbol, TruncatedHardy, shift, toeplitz
from .matcore import (
    DEFAULT_POLICY,
    ShapeError,
    SubspaceBasis,
    TetralabError,
    TolerancePolicy,
    commutator,
    defect,
    ensure_matrix,
    null_basis,
    op_norm,
    orth_complement,
    range_basis,
    subspace_gap,
)
from .report import CheckReport
from .triples import TetrablockTriple, is_pure

__all__ = [
    "NotPureError",
    "RestrictionLeakError",
    "ResolventSingularError",
    "NotIsometryLikeError",
    "ModelMismatchError",
    "ModelData",
    "theta_taylor",
    "theta_coeffs",
    "theta_eval",
    "kernel_identity_check",
    "truncation_tail",
    "suggest_degree",
    "build_model",
    "model_operators",
    "verify_model_decomposition",
    "verify_functional_model",
    "verify_pencil_intertwining",
    "pure_isometry_model",
]


class NotPureError(TetralabError):
    """P^n does not tend to zero (spectral radius >= 1 - rank_tol)."""


class RestrictionLeakError(TetralabError):
    """An operator expected to map one defect space into another leaks out."""


class ResolventSingularError(TetralabError):
    """(I - z P*) is numerically singular at the requested point."""


class NotIsometryLikeError(TetralabError):
    """Triple has no isometric part to anchor a truncated-isometry model."""


class ModelMismatchError(TetralabError):
    """Dual constructions of the model space disagree beyond tolerance."""


def _defect_pair(p: np.ndarray, pol: TolerancePolicy):
    dp, qb = defect(p, pol)
    ds, sb = defect(p.conj().T, pol)
    return dp, qb, ds, sb


def theta_taylor(p, n: int, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """n-th Taylor coefficient of Theta_P in the defect bases.

    Theta_0 = -P restricted to D_P, Theta_n = D_{P*} P*^{n-1} D_P for n >= 1.
    The n = 0 case checks that P actually maps D_P into D_{P*} (it must,
    because P D_P = D_{P*} P) and raises RestrictionLeakError otherwise.
    """
    p = ensure_matrix(p, square=True, name="P")
    if n < 0:
        raise ValueError("Taylor index must be >= 0")
    dp, qb, ds, sb = _defect_pair(p, pol)
    if n == 0:
        image = p @ qb.basis
        leak = op_norm(image - sb.projector @ image)
        allowance = pol.rank_tol * (1.0 + op_norm(p)) + pol.eq_tol
        if leak > allowance:
            raise RestrictionLeakError(
                f"P(D_P) leaks out of D_P* by {leak:.3e} (> {allowance:.3e})"
            )
        return -(sb.basis.conj().T @ image)
    power = np.linalg.matrix_power(p.conj().T, n - 1)
    return sb.basis.conj().T @ ds @ power @ dp @ qb.basis


def theta_coeffs(p, n_max: int, pol: TolerancePolicy = DEFAULT_POLICY) -> AnalyticSymbol:
    """Taylor coefficients 0..n_max of Theta_P as an AnalyticSymbol."""
    p = ensure_matrix(p, square=True, name="P")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    dp, qb, ds, sb = _defect_pair(p, pol)
    coeffs = [theta_taylor(p, 0, pol)]
    cur = ds  # D_{P*} P*^{n-1}, advanced as n grows
    pd = p.conj().T
    right = dp @ qb.basis
    for _ in range(1, n_max + 1):
        coeffs.append(sb.basis.conj().T @ cur @ right)
        cur = cur @ pd
    return AnalyticSymbol(tuple(coeffs))


def theta_eval(p, z: complex, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Theta_P(z) in the defect bases, via the resolvent of P*."""
    p = ensure_matrix(p, square=True, name="P")
    z = complex(z)
    dp, qb, ds, sb = _defect_pair(p, pol)
    n = p.shape[0]
    res = np.eye(n) - z * p.conj().T
    sv = np.linalg.svd(res, compute_uv=False)
    if sv.size == 0 or sv[-1] <= pol.clamp_tol * max(1.0, sv[0] if sv.size else 1.0):
        raise ResolventSingularError(f"I - z P* singular at z = {z!r}")
    middle = -p + z * (ds @ np.linalg.solve(res, dp))
    return sb.basis.conj().T @ middle @ qb.basis


def kernel_identity_check(p, z: complex, w: complex, pol: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Residual of the reproducing-kernel identity on the defect space of P*:

        I - Theta_P(w) Theta_P(z)* =
            (1 - w conj(z)) D_{P*} (I - w P*)^{-1} (I - conj(z) P)^{-1} D_{P*}.
    """
    p = ensure_matrix(p, square=True, name="P")
    z, w = complex(z), complex(w)
    dp, qb, ds, sb = _defect_pair(p, pol)
    n = p.shape[0]
    tw = theta_eval(p, w, pol)
    tz = theta_eval(p, z, pol)
    lhs = np.eye(sb.rank) - tw @ tz.conj().T
    res_w = np.eye(n) - w * p.conj().T
    res_z = np.eye(n) - np.conj(z) * p
    for label, r in (("w", res_w), ("conj(z)", res_z)):
        sv = np.linalg.svd(r, compute_uv=False)
        if sv.size == 0 or sv[-1] <= pol.clamp_tol * max(1.0, sv[0]):
            raise ResolventSingularError(f"resolvent at {label} singular")
    core = ds @ np.linalg.solve(res_w, np.linalg.solve(res_z, ds))
    rhs = (1.0 - w * np.conj(z)) * (sb.basis.conj().T @ core @ sb.basis)
    return op_norm(lhs - rhs)


def truncation_tail(p, n: int, pol: TolerancePolicy = DEFAULT_POLICY, cutoff: float = 1e-14) -> float:
    """Upper estimate of (sum_{m > n} ||P^m||^2)^(1/2).

    Powers are summed until their norm drops below ``cutoff``; the neglected
    remainder is below cutoff^2 / (1 - rho^2), irrelevant at the tolerances
    used here.  Exact (zero) for nilpotent P once n exceeds the index.
    """
    p = ensure_matrix(p, square=True, name="P")
    cert = is_pure(p, pol)
    if not cert:
        raise NotPureError(f"P is not pure (rho = {cert.spectral_radius:.6f})")
    m = np.linalg.matrix_power(p, n + 1)
    total = 0.0
    for _ in range(100000):
        nm = op_norm(m)
        if nm <= cutoff:
            break
        total += nm * nm
        m = m @ p
    return float(np.sqrt(total))


def suggest_degree(p, target: float = 1e-12, pol: TolerancePolicy = DEFAULT_POLICY) -> int:
    """Smallest truncation degree whose tail estimate is <= target."""
    p = ensure_matrix(p, square=True, name="P")
    cert = is_pure(p, pol)
    if not cert:
        raise NotPureError(f"P is not pure (rho = {cert.spectral_radius:.6f})")
    norms = []
    m = p.copy()
    for _ in range(100000):
        nm = op_norm(m)
        if nm <= 1e-14:
            break
        norms.append(nm)
        m = m @ p
    # norms[k] = ||P^(k+1)||; tail(N)^2 sums indices k >= N+1 i.e. k-list >= N
    tail_sq = 0.0
    tails = [0.0] * (len(norms) + 1)
    for k in range(len(norms) - 1, -1, -1):
        tail_sq += norms[k] * norms[k]
        tails[k] = tail_sq
    for n in range(len(tails)):
        if np.sqrt(tails[n]) <= target:
            return n
    return len(norms)


@dataclass(frozen=True)
class ModelData:
    """Truncated functional model of a pure contraction.

    W maps the original space into the truncated D_{P*}-valued Hardy grid;
    h_basis spans H_P = (range of mult-by-theta)^perp; tail bounds the
    truncation error; gap records the cross-validation distance between
    H_P and range(W).
    """

    P: np.ndarray
    N: int
    theta: AnalyticSymbol
    W: np.ndarray
    h_basis: SubspaceBasis
    tail: float
    gap: float
    dp: np.ndarray
    dpstar: np.ndarray
    dp_basis: SubspaceBasis
    dpstar_basis: SubspaceBasis

    @property
    def space(self) -> TruncatedHardy:
        return TruncatedHardy(max_degree=self.N, fiber_dim=self.dpstar_basis.rank)


def build_model(
    p,
    n: int | None = None,
    pol: TolerancePolicy = DEFAULT_POLICY,
    tail_target: float = 1e-12,
) -> ModelData:
    """Assemble the truncated model of a pure contraction.

    When ``n`` is omitted the smallest degree with tail <= tail_target is
    used.  The model space is cross-validated: the orthocomplement of
    range(toeplitz(theta)) must agree with range(W) within 1e-6 + tail,
    otherwise ModelMismatchError (the two constructions are independent).
    """
    p = ensure_matrix(p, square=True, name="P")
    cert = is_pure(p, pol)
    if not cert:
        raise NotPureError(f"P is not pure (rho = {cert.spectral_radius:.6f})")
    if n is None:
        n = suggest_degree(p, tail_target, pol)
    dp, qb, ds, sb = _defect_pair(p, pol)
    theta = theta_coeffs(p, n, pol)
    pd = p.conj().T
    blocks = []
    cur = ds
    for _ in range(n + 1):
        blocks.append(sb.basis.conj().T @ cur)
        cur = cur @ pd
    w = np.vstack(blocks)
    tail = truncation_tail(p, n, pol)
    t_theta = toeplitz(theta, n)
    h_basis = orth_complement(range_basis(t_theta, pol, scale=1.0))
    w_range = range_basis(w, pol, scale=1.0)
    gap = subspace_gap(h_basis, w_range)
    if gap > 1e-6 + tail:
        raise ModelMismatchError(
            f"model space mismatch: complement-of-theta-range vs range(W) gap {gap:.3e}"
        )
    return ModelData(
        P=p,
        N=n,
        theta=theta,
        W=w,
        h_basis=h_basis,
        tail=tail,
        gap=gap,
        dp=dp,
        dpstar=ds,
        dp_basis=qb,
        dpstar_basis=sb,
    )


def model_operators(g1, g2, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated pencil operators (I (x) G1* + S (x) G2, I (x) G2* + S (x) G1, S (x) I)."""
    g1 = ensure_matrix(g1, square=True, name="G1")
    g2 = ensure_matrix(g2, square=True, name="G2")
    if g1.shape != g2.shape:
        raise ShapeError(f"G1, G2 shapes differ: {g1.shape}, {g2.shape}")
    d = g1.shape[0]
    space = TruncatedHardy(max_degree=n, fiber_dim=d)
    s = shift(space)
    eye_blocks = np.eye(n + 1, dtype=complex)
    xa = np.kron(eye_blocks, g1.conj().T) + s @ np.kron(eye_blocks, g2)
    xb = np.kron(eye_blocks, g2.conj().T) + s @ np.kron(eye_blocks, g1)
    return xa, xb, s


def verify_model_decomposition(model: ModelData, pol: TolerancePolicy = DEFAULT_POLICY) -> CheckReport:
    """Check W W* + M_theta M_theta* = I on the truncated grid.

    Blockwise this identity involves only finitely many Taylor coefficients,
    all of which the grid retains, so it holds to rounding for every
    contraction; the interior entry (degrees <= N-1) is reported separately
    and must meet eq_tol for nilpotent P.
    """
    rep = CheckReport(title="model range partition")
    t = toeplitz(model.theta, model.N)
    resid = model.W @ model.W.conj().T + t @ t.conj().T - np.eye(t.shape[0])
    tol = pol.scaled_eq(1.0) + 4.0 * model.tail
    rep.check("range_partition", op_norm(resid), tol)
    proj = model.space.degree_projector(model.N - 1)
    rep.check("range_partition_interior", op_norm(proj @ resid @ proj), tol)
    rep.check("model_space_gap", model.gap, 1e-6 + model.tail)
    return rep


def _check_basis_match(pair: FundamentalPair, expected: SubspaceBasis, label: str) -> None:
    if pair.basis.rank != expected.rank or pair.basis.ambient_dim != expected.ambient_dim:
        raise ShapeError(f"{label}: defect basis shape mismatch")
    if op_norm(pair.basis.basis - expected.basis) > 1e-12:
        raise ShapeError(
            f"{label}: fundamental pair expressed in a different defect basis; "
            "solve it from triple.adjoint() so bases line up"
        )


def verify_functional_model(
    triple: TetrablockTriple,
    model: ModelData,
    pair_g: FundamentalPair,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """Check that W carries the model pencils back to the original triple:

        W* (I (x) G1* + M_z (x) G2) W = A,  W* (I (x) G2* + M_z (x) G1) W = B,
        W* (M_z (x) I) W = P,

    where (G1, G2) is the fundamental pair of (A*, B*, P*), plus
    co-invariance of range(W) under the model operators.
    """
    _check_basis_match(pair_g, model.dpstar_basis, "verify_functional_model")
    rep = CheckReport(title="functional model intertwining")
    g1, g2 = pair_g.F1, pair_g.F2
    xa, xb, xp = model_operators(g1, g2, model.N)
    w = model.W
    c_tail = 4.0 * (1.0 + op_norm(g1) + op_norm(g2))
    tol = pol.scaled_eq(triple.max_norm()) + c_tail * model.tail
    rep.check("model_reproduces_A", op_norm(w.conj().T @ xa @ w - triple.A), tol)
    rep.check("model_reproduces_B", op_norm(w.conj().T @ xb @ w - triple.B), tol)
    rep.check("model_reproduces_P", op_norm(w.conj().T @ xp @ w - triple.P), tol)
    rep.check("W_isometry", op_norm(w.conj().T @ w - np.eye(w.shape[1])), pol.scaled_eq(1.0) + model.tail)
    q = range_basis(w, pol, scale=1.0).projector
    eye = np.eye(q.shape[0])
    for name, x in (("A", xa), ("B", xb), ("P", xp)):
        rep.check(
            f"rangeW_coinvariant_{name}",
            op_norm((eye - q) @ x.conj().T @ q),
            tol,
        )
    return rep


def verify_pencil_intertwining(
    triple: TetrablockTriple,
    pair_f: FundamentalPair,
    pair_g: FundamentalPair,
    samples,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """Check that Theta_{P*} intertwines the two fundamental pencils:

        (F1* + F2 z) Theta_{P*}(z) = Theta_{P*}(z) (G1 + G2* z)
        (F2* + F1 z) Theta_{P*}(z) = Theta_{P*}(z) (G2 + G1* z)

    at each sample point z in the open disc.
    """
    rep = CheckReport(title="characteristic-function pencil intertwining")
    pstar = triple.P.conj().T
    f1, f2 = pair_f.F1, pair_f.F2
    g1, g2 = pair_g.F1, pair_g.F2
    worst = {"pencil_intertwine_1": 0.0, "pencil_intertwine_2": 0.0}
    max_abs = 0.0
    count = 0
    for z in samples:
        z = complex(z)
        if abs(z) >= 1.0:
            raise ResolventSingularError(f"sample |z| = {abs(z):.3f} not inside the open disc")
        max_abs = max(max_abs, abs(z))
        count += 1
        th = theta_eval(pstar, z, pol)
        r1 = (f1.conj().T + z * f2) @ th - th @ (g1 + z * g2.conj().T)
        r2 = (f2.conj().T + z * f1) @ th - th @ (g2 + z * g1.conj().T)
        worst["pencil_intertwine_1"] = max(worst["pencil_intertwine_1"], op_norm(r1))
        worst["pencil_intertwine_2"] = max(worst["pencil_intertwine_2"], op_norm(r2))
    denom = max(1.0 - max_abs, 1e-3)
    tol = pol.scaled_eq(op_norm(f1), op_norm(f2), op_norm(g1), op_norm(g2)) / denom
    for name, value in worst.items():
        rep.check(name, value, tol, note=f"{count} sample points")
    return rep


def pure_isometry_model(
    triple: TetrablockTriple,
    n: int | None = None,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> CheckReport:
    """Model battery for truncations of pure tetrablock isometries.

    The triple must have a nonempty isometric part ker(I - P*P) (so P = 0 or
    any strict contraction without isometric directions is rejected with
    NotIsometryLikeError).  Verifies that W is unitary onto the truncated
    model, that the compressed model operators agree with the raw symbol
    pencils on the image of the isometric part, and that the adjoint pair
    satisfies [G1, G2] = 0 and [G1, G1*] = [G2, G2*]; the last two balance
    checks are restricted to defect directions supported on the isometric
    parts of A and B when such directions exist (for wide-border truncations
    the balance defect provably lives on the truncation edge).
    """
    iso = orth_complement(triple.dp_basis)
    if iso.rank == 0:
        raise NotIsometryLikeError("P has no isometric directions (D_P has full rank)")
    cert = is_pure(triple.P, pol)
    if not cert:
        raise NotPureError(f"P is not pure (rho = {cert.spectral_radius:.6f})")
    rep = CheckReport(title="truncated isometry model")
    dim = triple.dim
    eye = np.eye(dim)
    rep.check(
        "isometric_part",
        op_norm((triple.P.conj().T @ triple.P - eye) @ iso.basis),
        pol.scaled_eq(1.0),
        note=f"dim {iso.rank} of {dim}",
    )
    model = build_model(triple.P, n, pol)
    pair_g = solve_fundamental(triple.adjoint(pol), pol)
    rep.extend(verify_model_decomposition(model, pol))
    rep.extend(verify_functional_model(triple, model, pair_g, pol))
    # compression acts as the raw pencil on the image of the isometric part
    g1, g2 = pair_g.F1, pair_g.F2
    xa, xb, xp = model_operators(g1, g2, model.N)
    qh = model.h_basis.projector
    eye_h = np.eye(qh.shape[0])
    w_iso = model.W @ iso.basis
    tol = pol.scaled_eq(1.0, op_norm(g1), op_norm(g2)) + 8.0 * model.tail
    for name, x in (("A", xa), ("B", xb), ("P", xp)):
        rep.check(f"pencil_on_model_{name}", op_norm((eye_h - qh) @ x @ w_iso), tol)
    # adjoint-pair symbol conditions, gated to the isometric interior when available
    qs = triple.dpstar_basis
    ka = null_basis(eye - triple.A.conj().T @ triple.A, pol, scale=1.0)
    kb = null_basis(eye - triple.B.conj().T @ triple.B, pol, scale=1.0)
    stacked = np.vstack(
        [
            (eye - ka.projector) @ qs.basis,
            (eye - kb.projector) @ qs.basis,
        ]
    )
    interior = null_basis(stacked, pol, scale=1.0)
    comm = commutator(g1, g2)
    balance = commutator(g1, g1.conj().T) - commutator(g2, g2.conj().T)
    gtol = pol.scaled_eq(op_norm(g1), op_norm(g2))
    if interior.rank:
        note = f"interior dim {interior.rank} of {qs.rank}; full residuals {op_norm(comm):.2e}/{op_norm(balance):.2e}"
        rep.check("adjoint_pair_commute", op_norm(comm @ interior.basis), gtol, note=note)
        rep.check("adjoint_pair_balance", op_norm(balance @ interior.basis), gtol, note=note)
    else:
        rep.check("adjoint_pair_commute", op_norm(comm), gtol)
        rep.check("adjoint_pair_balance", op_norm(balance), gtol)
    return rep
