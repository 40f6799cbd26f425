"""Dense complex linear algebra kernel.

Everything downstream (defect operators, characteristic functions, model
spaces) is built from the handful of primitives in this module: validated
complex matrices, Hermitian square roots with eigenvalue clamping, defect
operators of contractions, rank-revealing range bases, the operator norm,
and a certified numerical-radius estimate.

Conventions
-----------
* Matrices are ``numpy.ndarray`` of ``complex128``, row-major, validated to
  be finite on entry to every public function.
* Equality checks are relative: a residual ``r`` passes at tolerance ``tol``
  when ``r <= tol * (1 + max operand norm)``.
* Rank decisions are relative to the largest singular value (or eigenvalue)
  at ``TolerancePolicy.rank_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TetralabError",
    "ShapeError",
    "NotFiniteError",
    "NotHermitianError",
    "NotPSDError",
    "NotContractiveError",
    "TolerancePolicy",
    "DEFAULT_POLICY",
    "SubspaceBasis",
    "ensure_matrix",
    "op_norm",
    "commutator",
    "herm_part",
    "hermitian_sqrt",
    "hermitian_pinv",
    "defect",
    "range_basis",
    "null_basis",
    "orth_complement",
    "subspace_gap",
    "numerical_radius",
]


class TetralabError(ValueError):
    """Base class for numerical-contract violations raised by this package."""


class ShapeError(TetralabError):
    """Operand has the wrong dimensions for the requested operation."""


class NotFiniteError(TetralabError):
    """Matrix contains NaN or infinite entries."""


class NotHermitianError(TetralabError):
    """Matrix is not Hermitian within the equality tolerance."""


class NotPSDError(TetralabError):
    """Hermitian matrix has an eigenvalue below the clamping threshold."""


class NotContractiveError(TetralabError):
    """Operator norm exceeds 1 beyond the equality tolerance."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Bundle of the three tolerances used across the package.

    eq_tol    relative equality / residual tolerance
    rank_tol  relative rank-decision threshold
    clamp_tol relative eigenvalue clamping threshold for Hermitian roots
    """

    eq_tol: float = 1e-10
    rank_tol: float = 1e-9
    clamp_tol: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("eq_tol", "rank_tol", "clamp_tol"):
            value = getattr(self, name)
            if not (value > 0.0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite float, got {value!r}")
        if not self.rank_tol > self.clamp_tol:
            raise ValueError(
                f"rank_tol ({self.rank_tol}) must exceed clamp_tol ({self.clamp_tol})"
            )

    def scaled_eq(self, *norms: float) -> float:
        """Absolute equality tolerance for operands of the given norms."""
        return self.eq_tol * (1.0 + max(norms, default=0.0))


DEFAULT_POLICY = TolerancePolicy()


def ensure_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite complex128 2-D array."""
    arr = np.array(a, dtype=np.complex128, copy=True, order="C")
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NotFiniteError(f"{name} contains non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    return arr


def op_norm(m) -> float:
    """Operator (spectral) norm: the largest singular value."""
    m = ensure_matrix(m, name="operand")
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def commutator(x, y) -> np.ndarray:
    """XY - YX for square operands of equal size."""
    x = ensure_matrix(x, square=True, name="X")
    y = ensure_matrix(y, square=True, name="Y")
    if x.shape != y.shape:
        raise ShapeError(f"commutator needs equal shapes, got {x.shape} and {y.shape}")
    return x @ y - y @ x


def herm_part(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M*)/2."""
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^n, columns of ``basis``.

    Invariant: basis* basis = I_rank within 1e-12.
    """

    ambient_dim: int
    basis: np.ndarray
    rank: int

    def __post_init__(self) -> None:
        b = self.basis
        if b.ndim != 2 or b.shape != (self.ambient_dim, self.rank):
            raise ShapeError(
                f"basis shape {b.shape} inconsistent with ambient_dim={self.ambient_dim},"
                f" rank={self.rank}"
            )
        if self.rank:
            gram = b.conj().T @ b
            defect_from_identity = np.linalg.norm(gram - np.eye(self.rank), 2)
            if defect_from_identity > 1e-12:
                raise ShapeError(
                    f"basis columns not orthonormal (Gram defect {defect_from_identity:.3e})"
                )

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projection onto the subspace, as an ambient matrix."""
        return self.basis @ self.basis.conj().T

    def restrict(self, m: np.ndarray) -> np.ndarray:
        """Compression basis* M basis of an ambient operator to the subspace."""
        return self.basis.conj().T @ m @ self.basis

    def embed(self, m: np.ndarray) -> np.ndarray:
        """Ambient extension basis M basis* of an operator on the subspace."""
        return self.basis @ m @ self.basis.conj().T


def hermitian_sqrt(h, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues within clamp_tol * ||H|| of zero (on either side) are snapped
    to exactly zero before the root is taken -- sqrt is not Lipschitz at 0,
    so noise eigenvalues of 1e-16 would otherwise surface as 1e-8 in the
    result.  Anything more negative than the clamp floor raises
    ``NotPSDError``.  The result is re-Hermitized so that rounding cannot
    leak a skew part.
    """
    h = ensure_matrix(h, square=True, name="H")
    hnorm = op_norm(h)
    if op_norm(h - h.conj().T) > pol.scaled_eq(hnorm):
        raise NotHermitianError("matrix is not Hermitian within eq_tol")
    w, v = np.linalg.eigh(herm_part(h))
    floor = pol.clamp_tol * max(hnorm, np.finfo(float).tiny)
    if w.size and w.min() < -floor:
        raise NotPSDError(f"eigenvalue {w.min():.3e} below -clamp_tol*||H||")
    w = np.where(w <= floor, 0.0, w)
    s = (v * np.sqrt(w)) @ v.conj().T
    return herm_part(s)


def hermitian_pinv(h, pol: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Pseudoinverse of a Hermitian matrix, cutting eigenvalues at rank_tol."""
    h = ensure_matrix(h, square=True, name="H")
    hnorm = op_norm(h)
    if op_norm(h - h.conj().T) > pol.scaled_eq(hnorm):
        raise NotHermitianError("matrix is not Hermitian within eq_tol")
    w, v = np.linalg.eigh(herm_part(h))
    if w.size == 0:
        return h.copy()
    cut = pol.rank_tol * np.abs(w).max()
    inv = np.where(np.abs(w) > cut, 1.0 / np.where(np.abs(w) > cut, w, 1.0), 0.0)
    return herm_part((v * inv) @ v.conj().T)


def defect(t, pol: TolerancePolicy = DEFAULT_POLICY) -> tuple[np.ndarray, SubspaceBasis]:
    """Defect operator D_T = (I - T*T)^(1/2) and a basis of its range.

    Raises ``NotContractiveError`` when ||T|| > 1 + eq_tol.  The range basis
    keeps the eigenvectors whose eigenvalue of I - T*T exceeds rank_tol
    times the largest one (deciding on I - T*T rather than on its square
    root keeps round-off noise below the threshold), ordered by decreasing
    eigenvalue.
    """
    t = ensure_matrix(t, square=True, name="T")
    tnorm = op_norm(t)
    if tnorm > 1.0 + pol.eq_tol:
        raise NotContractiveError(f"||T|| = {tnorm:.12g} exceeds 1 + eq_tol")
    n = t.shape[0]
    h = herm_part(np.eye(n) - t.conj().T @ t)
    w, v = np.linalg.eigh(h)
    # I - T*T has natural scale 1 for a contraction; eigenvalues within
    # clamp_tol of zero are snapped to exactly zero BEFORE the square root,
    # which is not Lipschitz at 0 and would lift 1e-16 noise to 1e-8
    floor = pol.clamp_tol
    if w.size and w.min() < -floor:
        raise NotPSDError(f"I - T*T has eigenvalue {w.min():.3e} below clamp threshold")
    w = np.where(w <= floor, 0.0, w)
    s = np.sqrt(w)
    d = herm_part((v * s) @ v.conj().T)
    # rank decision on I - T*T against its natural unit scale, so that a
    # numerically unitary T gets an exactly empty defect space
    mask = w > pol.rank_tol * max(float(w.max()) if w.size else 0.0, 1.0)
    order = np.argsort(s[mask])[::-1]
    basis = v[:, mask][:, order]
    return d, SubspaceBasis(ambient_dim=n, basis=basis, rank=basis.shape[1])


def range_basis(
    m, pol: TolerancePolicy = DEFAULT_POLICY, scale: float | None = None
) -> SubspaceBasis:
    """Orthonormal basis of the column space, rank decided by SVD at rank_tol.

    The cutoff is rank_tol * max(sigma_max, scale).  Pass ``scale`` when the
    matrix has a known natural norm (1.0 for contractions): without it, a
    matrix that is pure round-off noise would be reported as full rank,
    because its largest singular value is itself noise.
    """
    m = ensure_matrix(m, name="M")
    rows = m.shape[0]
    if m.size == 0:
        return SubspaceBasis(ambient_dim=rows, basis=np.zeros((rows, 0), complex), rank=0)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cutoff = pol.rank_tol * max(float(s[0]) if s.size else 0.0, scale or 0.0)
    k = int(np.count_nonzero(s > cutoff)) if cutoff > 0.0 else 0
    return SubspaceBasis(ambient_dim=rows, basis=u[:, :k], rank=k)


def null_basis(
    m, pol: TolerancePolicy = DEFAULT_POLICY, scale: float | None = None
) -> SubspaceBasis:
    """Orthonormal basis of the (numerical) null space of M.

    ``scale`` anchors the cutoff exactly as in ``range_basis``: against a
    pure-noise matrix with ``scale=1.0`` the whole domain is null.
    """
    m = ensure_matrix(m, name="M")
    cols = m.shape[1]
    if m.size == 0:
        return SubspaceBasis(ambient_dim=cols, basis=np.eye(cols, dtype=complex), rank=cols)
    _, s, vh = np.linalg.svd(m)
    cutoff = pol.rank_tol * max(float(s[0]) if s.size else 0.0, scale or 0.0)
    k = int(np.count_nonzero(s > cutoff)) if cutoff > 0.0 else 0
    basis = vh.conj().T[:, k:]
    return SubspaceBasis(ambient_dim=cols, basis=basis, rank=basis.shape[1])


def orth_complement(sub: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement within the ambient space."""
    n, r = sub.ambient_dim, sub.rank
    if r == 0:
        return SubspaceBasis(ambient_dim=n, basis=np.eye(n, dtype=complex), rank=n)
    u, _, _ = np.linalg.svd(sub.basis, full_matrices=True)
    comp = u[:, r:]
    return SubspaceBasis(ambient_dim=n, basis=comp, rank=n - r)


def subspace_gap(a: SubspaceBasis, b: SubspaceBasis) -> float:
    """Gap ||P_A - P_B|| between two subspaces of the same ambient space.

    Equals the sine of the largest principal angle when dims agree, and
    reaches 1 when dimensions differ.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ShapeError("subspaces live in different ambient spaces")
    return op_norm(a.projector - b.projector)


def _real_field_max(x: np.ndarray, theta: float) -> float:
    half = 0.5 * (np.exp(1j * theta) * x + np.exp(-1j * theta) * x.conj().T)
    return float(np.linalg.eigvalsh(half).max())


def numerical_radius(
    x,
    grid_size: int = 256,
    refine_iters: int = 48,
) -> tuple[float, float]:
    """Certified estimate of the numerical radius w(X).

    w(X) = max over theta of lambda_max(Re(e^{i theta} X)).  The maximum is
    located on a uniform theta-grid and sharpened by golden-section search
    around the best grid point.  Every evaluation is a true lower bound, so

        value <= w(X) <= value + error_bound,

    with error_bound = pi * ||X|| / grid_size coming from the Lipschitz bound
    |d/dtheta lambda_max| <= ||X||.
    """
    x = ensure_matrix(x, square=True, name="X")
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    xnorm = op_norm(x)
    if xnorm == 0.0 or x.size == 0:
        return 0.0, 0.0
    thetas = 2.0 * np.pi * np.arange(grid_size) / grid_size
    vals = np.array([_real_field_max(x, th) for th in thetas])
    j = int(np.argmax(vals))
    best = float(vals[j])
    spacing = 2.0 * np.pi / grid_size
    lo = thetas[j] - spacing
    hi = thetas[j] + spacing
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = _real_field_max(x, c)
    fd = _real_field_max(x, d)
    best = max(best, fc, fd)
    for _ in range(refine_iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = _real_field_max(x, c)
            best = max(best, fc)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = _real_field_max(x, d)
            best = max(best, fd)
    error_bound = np.pi * xnorm / grid_size
    return best, float(error_bound)
