import numpy as np
import pytest

from deltaprime import (
    InvalidInputError,
    NonResonant,
    NotResonantError,
    Resonant,
    classify,
    coupling,
    find_resonances,
    shoot,
)
from deltaprime.resonance import _brackets_from_scan

from oracles import step_resonance_alpha, step_resonance_theta

TABLE_ALPHAS = [0.0, 18.1747, 57.1490, 117.4863, 199.1756]


@pytest.fixture(scope="module")
def seba_scan(seba):
    return find_resonances(seba, 0.0, 200.0, 0.5)


def test_seba_full_window_matches_table(seba_scan):
    found = [rv.alpha for rv in seba_scan]
    assert len(found) == len(TABLE_ALPHAS)
    for got, want in zip(found, TABLE_ALPHAS):
        assert got == pytest.approx(want, abs=5e-4)


def test_alpha_zero_entry_is_analytic(seba_scan):
    rv = seba_scan[0]
    assert rv.alpha == 0.0
    assert rv.theta == 1.0
    assert rv.residual == 0.0


def test_results_sorted_and_deduplicated(seba_scan):
    alphas = [rv.alpha for rv in seba_scan]
    assert alphas == sorted(alphas)
    gaps = np.diff(alphas)
    assert np.all(gaps >= 0.5 / 10.0)


def test_residual_invariant(seba_scan, seba):
    for rv in seba_scan:
        fd = shoot(seba, rv.alpha, 0.0)
        assert rv.residual <= 1e-8 * max(1.0, abs(fd.u1))
        assert np.isfinite(rv.theta) and rv.theta != 0.0


def test_zero_profile_has_only_alpha_zero(zero):
    rvs = find_resonances(zero, -10.0, 10.0, 0.5)
    assert [(rv.alpha, rv.theta) for rv in rvs] == [(0.0, 1.0)]


def test_step_window_roots_match_oracle(step):
    rvs = find_resonances(step, -20.0, 20.0, 0.5)
    alpha_star = step_resonance_alpha()
    assert len(rvs) == 3
    assert rvs[0].alpha == pytest.approx(-alpha_star, abs=1e-8)
    assert rvs[1].alpha == 0.0
    assert rvs[2].alpha == pytest.approx(alpha_star, abs=1e-8)
    assert rvs[2].theta == pytest.approx(step_resonance_theta(), rel=1e-8)


def test_symmetric_sets_for_odd_profiles(seba, step):
    for profile, window in ((seba, 25.0), (step, 20.0)):
        rvs = find_resonances(profile, -window, window, 0.5)
        alphas = [rv.alpha for rv in rvs]
        for rv in rvs:
            assert -rv.alpha == pytest.approx(alphas[len(alphas) - 1 - alphas.index(rv.alpha)], abs=1e-9)
        pos = [rv for rv in rvs if rv.alpha > 0]
        neg = [rv for rv in rvs if rv.alpha < 0]
        for p, n in zip(pos, reversed(neg)):
            assert p.theta * n.theta == pytest.approx(1.0, rel=1e-6)


def test_scan_step_refinement_does_not_change_roots(seba, seba_scan):
    finer = find_resonances(seba, 0.0, 200.0, 0.25)
    coarse = [rv.alpha for rv in seba_scan]
    fine = [rv.alpha for rv in finer]
    assert len(coarse) == len(fine)
    for a, b in zip(coarse, fine):
        assert a == pytest.approx(b, abs=1e-9)


def test_lagrange_identity_for_returned_values(seba, step):
    for profile in (seba, step):
        for rv in find_resonances(profile, -45.0, 45.0, 0.5):
            fd = shoot(profile, rv.alpha, 0.0)
            assert abs(rv.theta * fd.dv1 - 1.0) <= 1e-8


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha_min": 5.0, "alpha_max": 5.0},
        {"alpha_min": 5.0, "alpha_max": 1.0},
        {"alpha_min": float("nan"), "alpha_max": 1.0},
        {"scan_step": 0.0},
        {"scan_step": -1.0},
    ],
)
def test_find_resonances_preconditions(seba, kwargs):
    full = {"alpha_min": -1.0, "alpha_max": 1.0, "scan_step": 0.5}
    full.update(kwargs)
    with pytest.raises(InvalidInputError):
        find_resonances(seba, **full)


def test_brackets_from_scan_sign_change():
    brackets, tang = _brackets_from_scan([0.0, 1.0, 2.0], [1.0, -1.0, 2.0])
    assert brackets == [(0, 1), (1, 2)]
    assert tang == []


def test_brackets_from_scan_grid_zero_crossing():
    brackets, _ = _brackets_from_scan([0.0, 1.0, 2.0], [1.0, 0.0, -1.0])
    assert brackets == [(1, 1)]


def test_brackets_from_scan_tangential_zero_ignored():
    brackets, _ = _brackets_from_scan([0.0, 1.0, 2.0], [1.0, 0.0, 1.0])
    assert brackets == []


def test_brackets_from_scan_identically_zero():
    brackets, tang = _brackets_from_scan([0.0, 1.0, 2.0], [0.0, 0.0, 0.0])
    assert brackets == [] and tang == []


def test_brackets_from_scan_near_tangency_warning_indices():
    brackets, tang = _brackets_from_scan(
        [0.0, 1.0, 2.0], [1.0, 1e-9, 1.0]
    )
    assert brackets == []
    assert tang == [1]


def test_coupling_at_zero(seba):
    assert coupling(seba, 0.0) == 1.0


def test_coupling_accepts_tabulated_value(seba):
    assert coupling(seba, 18.1747) == pytest.approx(-54.9385, rel=5e-3)


def test_coupling_at_step_resonance(step):
    alpha = step_resonance_alpha()
    assert coupling(step, alpha) == pytest.approx(step_resonance_theta(), rel=1e-8)


def test_coupling_rejects_nonresonant(seba):
    with pytest.raises(NotResonantError):
        coupling(seba, 10.0)


def test_classify_zero_resonant(seba, step, zero):
    for profile in (seba, step, zero):
        c = classify(profile, 0.0, 1e-8)
        assert isinstance(c, Resonant) and c.theta == 1.0


def test_classify_tabulated_with_loose_tol(seba):
    c = classify(seba, 18.1747, 1e-3)
    assert isinstance(c, Resonant)
    assert c.theta == pytest.approx(-54.9385, rel=5e-3)


def test_classify_tabulated_with_tight_tol_is_nonresonant(seba):
    assert isinstance(classify(seba, 18.1747, 1e-8), NonResonant)


def test_classify_nonresonant(seba):
    assert isinstance(classify(seba, 10.0, 1e-8), NonResonant)


def test_classify_preconditions(seba):
    with pytest.raises(InvalidInputError):
        classify(seba, 1.0, 0.0)
    with pytest.raises(InvalidInputError):
        classify(seba, float("inf"), 1e-8)


def test_threads_env_deterministic(seba, monkeypatch):
    monkeypatch.setenv("DELTAPRIME_THREADS", "1")
    sequential = find_resonances(seba, -25.0, 25.0, 0.5)
    monkeypatch.setenv("DELTAPRIME_THREADS", "4")
    threaded = find_resonances(seba, -25.0, 25.0, 0.5)
    assert [rv.alpha for rv in sequential] == [rv.alpha for rv in threaded]
    assert [rv.theta for rv in sequential] == [rv.theta for rv in threaded]


def test_threads_env_invalid(seba, monkeypatch):
    monkeypatch.setenv("DELTAPRIME_THREADS", "many")
    with pytest.raises(InvalidInputError, match="DELTAPRIME_THREADS"):
        find_resonances(seba, -1.0, 1.0, 0.5)
