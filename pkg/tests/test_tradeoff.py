import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_mixed, random_pure
from qsteer.errors import IdentityViolationError
from qsteer.tensor import DensityMatrix, basis_state, density_from_pure, ghz_state, maximally_mixed
from qsteer.tradeoff import (
    PAIRS, check_bell_monogamy, check_conjecture, check_theorem1, check_theorem2, exclusivity_check,
    mdcc_closed_form, mdcc_point, mdcc_state, tradeoff_report,
)


def test_ghz_report():
    rep = tradeoff_report(ghz_state())
    assert rep.sum_f3_sq == pytest.approx(3)
    assert all(rep.f3_sq[p] == pytest.approx(1) for p in PAIRS)
    assert rep.sum_f2_sq == pytest.approx(3)
    assert rep.sum_bell_sq == pytest.approx(12)
    assert rep.tangle == pytest.approx(1)


def test_product_state_report():
    rep = tradeoff_report(basis_state("000"))
    assert all(rep.f3_sq[p] == pytest.approx(1) for p in PAIRS)
    assert rep.sum_f3_sq == pytest.approx(3)
    assert rep.complementarity_lhs == pytest.approx(1)


def test_maximally_mixed_report():
    rep = tradeoff_report(maximally_mixed(3))
    assert rep.sum_f2_sq == rep.sum_f3_sq == rep.sum_bell_sq == 0
    assert rep.tangle is None and not rep.purity_flag
    assert check_theorem1(rep).margin == 3


def test_ghz_sits_on_the_boundaries():
    rep = tradeoff_report(ghz_state())
    t1 = check_theorem1(rep)
    assert t1.passed and t1.margin == pytest.approx(0, abs=1e-12)
    assert check_theorem2(rep).equality
    bell = check_bell_monogamy(rep)
    assert bell.passed and bell.value == pytest.approx(12)


def test_ghz_fully_mixed_with_noise():
    rho = DensityMatrix.from_matrix(0.0 * density_from_pure(ghz_state()).entries + np.eye(8) / 8)
    assert tradeoff_report(rho).sum_f3_sq == 0


def test_theorem2_flags_broken_pure_identity():
    rep = dataclasses.replace(tradeoff_report(ghz_state()), sum_f3_sq=2.9)
    with pytest.raises(IdentityViolationError):
        check_theorem2(rep)


def test_bell_consistency_guard():
    rep = dataclasses.replace(tradeoff_report(ghz_state()), sum_bell_sq=11.0)
    with pytest.raises(IdentityViolationError):
        check_bell_monogamy(rep)


def test_exclusivity_examples():
    assert exclusivity_check(tradeoff_report(ghz_state())).count == 0
    v = exclusivity_check(tradeoff_report(mdcc_state(1.0)))
    assert v.maximal_pairs == ("AC",)
    assert v.others_obey and v.ok


def test_mdcc_points():
    p0 = mdcc_point(0.0)
    assert (p0.f3_sq_ab, p0.f3_sq_ac, p0.tangle) == pytest.approx((1, 1, 1))
    p1 = mdcc_point(1.0)
    assert (p1.f3_sq_ab, p1.f3_sq_ac, p1.tangle) == pytest.approx((0, 3, 0), abs=1e-12)
    assert mdcc_point(0.5).f3_sq_ac == pytest.approx(2.28)
    for m in np.linspace(0, 1, 11):
        pt = mdcc_point(m)
        assert pt.max_delta <= 1e-10
        assert pt.f3_sq_ab == pytest.approx(pt.f3_sq_bc, abs=1e-12)
        assert pt.complementarity_lhs == pytest.approx(2 * pt.tangle + pt.f3_sq_ac, abs=1e-12)


def test_mdcc_closed_form_identity():
    for m in np.linspace(0, 1, 50):
        cf = mdcc_closed_form(m)
        assert 2 * cf["tangle"] + cf["f3_sq_ac"] == pytest.approx(3, abs=1e-14)


def test_mdcc_range():
    with pytest.raises(ValueError):
        mdcc_state(1.5)


def test_conjecture_examples():
    assert check_conjecture(mdcc_state(0.3)).lhs == pytest.approx(3, abs=1e-12)
    c = check_conjecture(basis_state("000"))
    assert c.passed and c.lhs == pytest.approx(1)
    with pytest.raises(ValueError):
        check_conjecture(maximally_mixed(3))


def test_report_rejects_two_qubits():
    with pytest.raises(ValueError):
        tradeoff_report(maximally_mixed(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pure_identity_and_relations(seed):
    psi = random_pure(np.random.default_rng(seed))
    rep = tradeoff_report(psi)
    assert abs(rep.sum_f3_sq - 3) <= 1e-9
    assert check_theorem1(rep).passed and check_theorem2(rep).passed and check_bell_monogamy(rep).passed
    assert exclusivity_check(rep).count <= 2
    assert check_conjecture(rep).passed
    assert rep.sum_f2_sq == pytest.approx(sum(rep.f2_sq.values()), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 4, 8]))
def test_mixed_relations(seed, rank):
    rho = random_mixed(np.random.default_rng(seed), 3, rank)
    rep = tradeoff_report(rho)
    assert rep.sum_f3_sq <= 3 + 1e-9
    assert check_theorem1(rep).passed and check_theorem2(rep).passed and check_bell_monogamy(rep).passed
    assert exclusivity_check(rep).ok
