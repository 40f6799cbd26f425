"""Fundamental-equation solver and the identity batteries around it.

The scalar case has a closed form that pins the solver down: with defect
d^2 = 1 - |p|^2 the equations read d F1 d = a - conj(b) p and
d F2 d = b - conj(a) p, so F1 = (a - conj(b) p) / (1 - |p|^2) exactly.
"""

from __future__ import annotations

import numpy as np
import pytest

from tetralab.fundamental import (
    SolveFailedError,
    solve_fundamental,
    verify_commutator_transfer,
    verify_cross_relations,
    verify_difference_identity,
    verify_tetra_characterization,
)
from tetralab.generate import make_instance
from tetralab.matcore import op_norm
from tetralab.triples import validate


def scalar_triple(a, b, p):
    return validate([[a]], [[b]], [[p]])


def closed_form_f1(a, b, p):
    return (a - np.conj(b) * p) / (1.0 - abs(p) ** 2)


SCALAR_POINTS = [
    (0.3, 0.2 + 0.1j, 0.05),
    (0.25j, -0.3, 0.4),
    (0.5, 0.0, 0.0),
    (0.1 - 0.2j, 0.3 + 0.1j, -0.35j),
]


@pytest.mark.parametrize("a,b,p", SCALAR_POINTS)
def test_scalar_closed_form(a, b, p):
    pair = solve_fundamental(scalar_triple(a, b, p))
    assert pair.F1[0, 0] == pytest.approx(closed_form_f1(a, b, p), abs=1e-12)
    assert pair.F2[0, 0] == pytest.approx(closed_form_f1(b, a, p), abs=1e-12)
    assert pair.solve_residual < 1e-12


def test_methods_agree(small_suite):
    # the pseudoinverse route and the least-squares route must produce the
    # same compressed operators: the restricted solution is unique
    for inst in small_suite:
        via_pinv = solve_fundamental(inst.triple, method="pinv")
        via_lstsq = solve_fundamental(inst.triple, method="lstsq")
        assert op_norm(via_pinv.F1 - via_lstsq.F1) < 1e-9, inst.label
        assert op_norm(via_pinv.F2 - via_lstsq.F2) < 1e-9, inst.label


def test_unknown_method_rejected(small_suite):
    with pytest.raises(ValueError):
        solve_fundamental(small_suite[0].triple, method="banana")


def test_unsolvable_when_defect_vanishes():
    # P unitary makes D_P = 0; the right-hand side A - B* P = 0.5 cannot be
    # represented, so the equations have no solution at all
    with pytest.raises(SolveFailedError):
        solve_fundamental(scalar_triple(0.5, 0.0, 1.0))


def test_solution_supported_on_defect_space():
    # F lives on range(D_P); its embedding back into the ambient space must
    # vanish on the orthogonal complement
    inst = make_instance("compressions", seed=3, index=0, dim=12)
    pair = solve_fundamental(inst.triple)
    f1_full = pair.basis.embed(pair.F1)
    comp = np.eye(f1_full.shape[0]) - pair.basis.projector
    assert op_norm(comp @ f1_full) < 1e-12
    assert op_norm(f1_full @ comp) < 1e-12


def test_radius_bound_certificates(small_suite):
    for inst in small_suite:
        pair = solve_fundamental(inst.triple)
        assert pair.w1 <= 1.0 + pair.w1_err + 1e-12, inst.label
        assert pair.w2 <= 1.0 + pair.w2_err + 1e-12, inst.label


# ----------------------------------------------------- identity batteries


@pytest.mark.parametrize("family", ["symbols", "compressions", "scalars"])
@pytest.mark.parametrize("index", [0, 1, 2])
def test_identity_batteries(family, index):
    dim = {"symbols": 3, "compressions": 12, "scalars": 6}[family]
    inst = make_instance(family, seed=2026, index=index, dim=dim)
    triple = inst.triple
    pair_f = solve_fundamental(triple)
    pair_g = solve_fundamental(triple.adjoint())

    rep = verify_tetra_characterization(triple, pair_f)
    assert rep.overall, (inst.label, [e.name for e in rep.failures])

    rep = verify_difference_identity(triple, pair_f)
    assert rep.overall, (inst.label, [e.name for e in rep.failures])

    rep = verify_cross_relations(triple, pair_f, pair_g)
    assert rep.overall, (inst.label, [e.name for e in rep.failures])

    rep = verify_commutator_transfer(triple, pair_f, pair_g)
    assert rep.overall, (inst.label, [e.name for e in rep.failures])


def test_transfer_on_invertible_scalar_instance():
    # scalars instances have invertible P, so both transfer directions run
    inst = make_instance("scalars", seed=5, index=4, dim=6)
    pair_f = solve_fundamental(inst.triple)
    pair_g = solve_fundamental(inst.triple.adjoint())
    rep = verify_commutator_transfer(inst.triple, pair_f, pair_g)
    names = {e.name for e in rep.entries if not e.skipped}
    # forward conclusions and the converse direction all materialize
    assert {"balance_F", "transfer_G_commute", "balance_G", "converse_F_commute"} <= names
    assert rep.overall, [e.name for e in rep.failures]
    assert not rep.skipped


def test_transfer_skips_when_range_not_dense():
    # symbols instances have nilpotent P: range is not dense, hypothesis out
    inst = make_instance("symbols", seed=5, index=0, dim=3)
    pair_f = solve_fundamental(inst.triple)
    pair_g = solve_fundamental(inst.triple.adjoint())
    rep = verify_commutator_transfer(inst.triple, pair_f, pair_g)
    assert rep.skipped
