"""Characteristic function, kernel identity, and the functional model.

Scalar oracle: for |p| < 1 the characteristic function collapses to the
Moebius transform

    theta(z) = -p + z (1 - |p|^2) / (1 - conj(p) z) = (z - p) / (1 - conj(p) z),

an inner function of the disc.  All defect spaces are one-dimensional with
basis vector 1, so the package's matrix-valued answer is directly comparable.
"""

from __future__ import annotations

import numpy as np
import pytest

from tetralab.charfn import (
    ModelMismatchError,
    NotPureError,
    build_model,
    kernel_identity_check,
    model_operators,
    pure_isometry_model,
    suggest_degree,
    theta_coeffs,
    theta_eval,
    theta_taylor,
    truncation_tail,
    verify_functional_model,
    verify_model_decomposition,
    verify_pencil_intertwining,
)
from tetralab.fundamental import solve_fundamental
from tetralab.generate import make_instance
from tetralab.matcore import op_norm
from tetralab.triples import is_pure

from conftest import random_contraction


def moebius(p: complex, z: complex) -> complex:
    return (z - p) / (1.0 - np.conj(p) * z)


SCALARS = [0.0, 0.3, -0.4 + 0.2j, 0.6j]
POINTS = [0.2 + 0.1j, -0.5, 0.05 - 0.6j, 0.7j]


@pytest.mark.parametrize("p", SCALARS)
@pytest.mark.parametrize("z", POINTS)
def test_scalar_theta_is_moebius(p, z):
    val = theta_eval(np.array([[p]]), z)
    assert val.shape == (1, 1)
    assert val[0, 0] == pytest.approx(moebius(p, z), abs=1e-12)


def test_theta_of_zero_is_multiplication_by_z():
    sym = theta_coeffs(np.zeros((3, 3)), 4)
    assert sym.trimmed(0.0).degree == 1  # coefficients beyond z^1 vanish
    assert op_norm(sym.coeff(0)) == 0.0
    assert np.allclose(sym.coeff(1), np.eye(3), atol=1e-14)


def test_taylor_series_matches_direct_evaluation(rng):
    p = random_contraction(rng, 4, norm=0.7)
    z = 0.35 - 0.25j
    coeffs = [theta_taylor(p, k) for k in range(40)]
    series = sum(c * z**k for k, c in enumerate(coeffs))
    assert op_norm(series - theta_eval(p, z)) < 1e-11


@pytest.mark.parametrize("p", SCALARS[1:])
def test_scalar_theta_inner_on_circle(p):
    for theta in np.linspace(0.0, 2 * np.pi, 9):
        z = np.exp(1j * theta)
        assert abs(theta_eval(np.array([[p]]), z)[0, 0]) == pytest.approx(1.0, abs=1e-12)


def test_kernel_identity(rng):
    for _ in range(3):
        p = random_contraction(rng, 4, norm=0.85)
        for _ in range(5):
            z, w = [complex(*rng.uniform(-0.65, 0.65, 2)) for _ in range(2)]
            assert kernel_identity_check(p, z, w) < 1e-10


def test_resolvent_guard():
    from tetralab.charfn import ResolventSingularError

    with pytest.raises(ResolventSingularError):
        theta_eval(np.array([[1.0]]), 1.0)


# -------------------------------------------------------- truncation tail


def test_tail_monotone_and_suggest_degree(rng):
    p = random_contraction(rng, 4, norm=0.9)
    tails = [truncation_tail(p, n) for n in (2, 6, 12, 20)]
    assert all(t1 >= t2 for t1, t2 in zip(tails, tails[1:]))
    n = suggest_degree(p, target=1e-12)
    assert truncation_tail(p, n) <= 1e-12


def test_tail_zero_for_nilpotent():
    p = np.diag([1.0 + 0j] * 2, -1)
    assert truncation_tail(p, 2) == 0.0
    assert suggest_degree(p) <= 3


# ------------------------------------------------------- functional model


def test_build_model_rejects_non_pure():
    with pytest.raises(NotPureError):
        build_model(np.diag([1.0, 0.5]))


def test_model_dimensions_and_tail(rng):
    p = random_contraction(rng, 3, norm=0.8)
    model = build_model(p)
    # W maps the original space isometrically into the truncated grid
    assert model.W.shape[1] == 3
    assert op_norm(model.W.conj().T @ model.W - np.eye(3)) < 1e-10
    assert model.tail <= 1e-12
    rep = verify_model_decomposition(model)
    assert rep.overall, [e.name for e in rep.failures]


@pytest.mark.parametrize("family,dim", [("symbols", 3), ("compressions", 12), ("scalars", 6)])
def test_functional_model_reproduces_triple(family, dim):
    inst = make_instance(family, seed=11, index=1, dim=dim)
    triple = inst.triple
    assert is_pure(triple.P).pure
    model = build_model(triple.P)
    pair_g = solve_fundamental(triple.adjoint())
    rep = verify_functional_model(triple, model, pair_g)
    assert rep.overall, (inst.label, [e.name for e in rep.failures])


def test_model_operators_are_pencil_toeplitz(rng):
    from tetralab.hardy import pencil, toeplitz

    g1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    g2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    xa, xb, xp = model_operators(g1, g2, 4)
    assert np.array_equal(xa, toeplitz(pencil(g1.conj().T, g2), 4))
    assert np.array_equal(xb, toeplitz(pencil(g2.conj().T, g1), 4))
    sym_z = pencil(np.zeros((2, 2)), np.eye(2))
    assert np.array_equal(xp, toeplitz(sym_z, 4))


def test_pencil_intertwining_battery(small_suite):
    samples = [0.3 + 0.2j, -0.55, 0.1 - 0.6j, 0.72j, 0.0]
    for inst in small_suite:
        pair_f = solve_fundamental(inst.triple)
        pair_g = solve_fundamental(inst.triple.adjoint())
        rep = verify_pencil_intertwining(inst.triple, pair_f, pair_g, samples)
        assert rep.overall, (inst.label, [e.name for e in rep.failures])


def test_pure_isometry_model_on_symbol_instance():
    inst = make_instance("symbols", seed=3, index=0, dim=3)
    rep = pure_isometry_model(inst.triple)
    assert rep.overall, [e.name for e in rep.failures]
