import numpy as np
import pytest

import qcrkit as q
from qcrkit.registers import Subsystem, SystemLayout


def two_party_shield_layout(da, db):
    return SystemLayout((
        Subsystem("D.a", "D", "shield", da),
        Subsystem("A1.a", "A1", "shield", db),
    ))


def random_density(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def test_ppt_product_state_has_no_negativity():
    layout = q.standard_layout(2, 1)
    state = q.QuantumState.basis_state(layout, (0, 0, 0, 0))
    cut = q.CutSpec.dealer_cut(layout, ["A1"])
    result = q.ppt_check(state, cut)
    assert result.ppt
    assert abs(result.min_eigenvalue) < 1e-12


def test_ppt_maximally_entangled_hits_minus_half(max_ent):
    cut = q.CutSpec.dealer_cut(max_ent.layout, ["A1"])
    result = q.ppt_check(max_ent, cut)
    assert not result.ppt
    assert abs(result.min_eigenvalue - (-0.5)) < 1e-10


def test_ppt_ghz_dealer_cuts_negative():
    g = q.build_ghz_qcr(2, 2)
    report = q.all_dealer_cuts_ppt(g)
    assert not report.all_ppt
    assert len(report.cuts) == 3
    for result in report.cuts:
        assert result.min_eigenvalue < -0.2


@pytest.mark.parametrize("seed", range(10))
def test_ppt_tensor_of_separable_factors(seed):
    rng = np.random.default_rng(200 + seed)
    layout = SystemLayout((
        Subsystem("D.a", "D", "shield", 2),
        Subsystem("A1.a", "A1", "shield", 2),
        Subsystem("D.b", "D", "shield", 2),
        Subsystem("A2.b", "A2", "shield", 2),
    ))
    rho = np.kron(q.random_separable_density(2, 2, rng),
                  q.random_separable_density(2, 2, rng))
    state = q.QuantumState(layout, matrix=rho)
    report = q.all_dealer_cuts_ppt(state)
    assert report.all_ppt
    assert len(report.cuts) == 3
    for result in report.cuts:
        assert result.min_eigenvalue >= -1e-9


def test_ppt_cut_sides_are_symmetric(max_ent):
    layout = max_ent.layout
    one = q.ppt_check(max_ent, q.CutSpec(("D.info", "D.shield"),
                                         ("A1.info", "A1.shield")))
    two = q.ppt_check(max_ent, q.CutSpec(("A1.info", "A1.shield"),
                                         ("D.info", "D.shield")))
    assert abs(one.min_eigenvalue - two.min_eigenvalue) < 1e-10


def test_partial_transpose_keeps_trace_and_hermiticity():
    rng = np.random.default_rng(201)
    layout = two_party_shield_layout(2, 3)
    state = q.QuantumState(layout, matrix=random_density(6, rng))
    pt = q.partial_transpose(state, ["A1.a"])
    assert abs(np.trace(pt) - 1.0) < 1e-12
    assert np.max(np.abs(pt - pt.conj().T)) < 1e-12


def test_cut_spec_validation():
    layout = q.standard_layout(2, 2)
    with pytest.raises(ValueError):
        q.CutSpec((), ("A1.info",)).validate(layout)
    with pytest.raises(ValueError):
        q.CutSpec(("D.info",), ("D.info", "A1.info")).validate(layout)
    with pytest.raises(ValueError):
        # leaves A2 uncovered
        q.CutSpec(("D.info", "D.shield"), ("A1.info", "A1.shield")).validate(layout)
    with pytest.raises(ValueError):
        q.CutSpec(("D.info",), ("A1.info", "A9.info")).validate(layout)


def test_all_dealer_cuts_counts_subsets():
    g = q.build_ghz_qcr(2, 3)
    report = q.all_dealer_cuts_ppt(g)
    assert len(report.cuts) == 7
    sides = {tuple(sorted(c.side_two)) for c in report.cuts}
    assert ("A1.info", "A1.shield") in sides
    assert len(sides) == 7


def test_ppt_report_serialization(max_ent):
    report = q.all_dealer_cuts_ppt(max_ent)
    doc = report.to_dict()
    assert doc["all_ppt"] is False
    assert len(doc["cuts"]) == 1
    entry = doc["cuts"][0]
    assert set(entry) == {"side_one", "side_two", "min_eigenvalue", "ppt"}


# -- trace distance ------------------------------------------------------


def test_trace_distance_basics():
    layout = q.standard_layout(2, 1)
    zero = q.QuantumState.basis_state(layout, (0, 0, 0, 0))
    one = q.QuantumState.basis_state(layout, (1, 0, 1, 0))
    assert q.trace_distance(zero, zero) == 0.0
    assert abs(q.trace_distance(zero, one) - 2.0) < 1e-12
    with pytest.raises(ValueError):
        q.trace_distance(zero, q.maximally_entangled(3))


def test_trace_distance_contracts_under_partial_trace():
    rng = np.random.default_rng(202)
    layout = two_party_shield_layout(2, 2)
    for _ in range(20):
        a = q.QuantumState(layout, matrix=random_density(4, rng))
        b = q.QuantumState(layout, matrix=random_density(4, rng))
        whole = q.trace_distance(a, b)
        part = q.trace_distance(q.partial_trace(a, ["A1.a"]),
                                q.partial_trace(b, ["A1.a"]))
        assert part <= whole + 1e-12


def test_trace_distance_telescoping_bound():
    rng = np.random.default_rng(203)
    layout = two_party_shield_layout(2, 2)
    for _ in range(20):
        s1, s2, t1, t2 = (random_density(2, rng) for _ in range(4))
        left = q.QuantumState(layout, matrix=np.kron(s1, s2))
        right = q.QuantumState(layout, matrix=np.kron(t1, t2))
        lhs = q.trace_distance(left, right)
        rhs = q.trace_norm(s1 - t1) + q.trace_norm(s2 - t2)
        assert lhs <= rhs + 1e-10


def test_trace_distance_unitary_invariance():
    rng = np.random.default_rng(204)
    layout = two_party_shield_layout(2, 2)
    a = q.QuantumState(layout, matrix=random_density(4, rng))
    b = q.QuantumState(layout, matrix=random_density(4, rng))
    u = q.haar_unitary(4, rng)
    ua = q.QuantumState(layout, matrix=u @ a.matrix @ u.conj().T)
    ub = q.QuantumState(layout, matrix=u @ b.matrix @ u.conj().T)
    assert abs(q.trace_distance(a, b) - q.trace_distance(ua, ub)) < 1e-10
