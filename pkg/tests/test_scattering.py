import numpy as np
import pytest

from deltaprime import (
    InvalidInputError,
    NonResonant,
    NumericalFailureError,
    Resonant,
    asymptotic_coeffs,
    find_resonances,
    finite_coeffs,
    limit_coeffs,
    q_factor,
)
from deltaprime.scattering import _solve_small_complex

from oracles import step_resonance_alpha, step_resonance_theta


@pytest.fixture(scope="module")
def seba_root(seba):
    (rv,) = find_resonances(seba, 17.0, 19.0, 0.5)
    return rv


def test_limit_theta_one_transmits_fully():
    c = limit_coeffs(Resonant(1.0))
    assert c.R == 0.0 and c.T == 1.0
    assert c.regime == "limit"
    assert (c.R.imag, c.T.imag) == (0.0, 0.0)


def test_limit_nonresonant_opaque():
    c = limit_coeffs(NonResonant())
    assert c.R == -1.0 and c.T == 0.0


def test_limit_table_transmission():
    c = limit_coeffs(Resonant(-54.9385))
    assert c.transmission_probability == pytest.approx(0.00132, rel=0.01)


def test_limit_rejects_other_types():
    with pytest.raises(InvalidInputError):
        limit_coeffs(-54.9)


def test_finite_free_potential_passes_plane_wave(seba):
    c = finite_coeffs(seba, 0.0, 1.0, 0.1)
    assert abs(c.R) <= 1e-12
    assert abs(c.T - 1.0) <= 1e-12
    assert c.regime == "finite-eps"


def test_finite_table_row(seba):
    c = finite_coeffs(seba, 18.1747, 1.0, 1e-3)
    assert c.transmission_probability == pytest.approx(0.00132, rel=0.01)


def test_finite_nonresonant_reflection_linear_in_eps(seba):
    r1 = abs(finite_coeffs(seba, 10.0, 1.0, 1e-2).R + 1.0)
    r2 = abs(finite_coeffs(seba, 10.0, 1.0, 1e-3).R + 1.0)
    assert 8.0 <= r1 / r2 <= 12.0


def test_finite_unitarity_lattice(seba, step):
    for profile in (seba, step):
        for alpha in (-30.0, -10.0, 0.0, 5.0, 18.1747, 45.0):
            for k in (0.5, 1.0, 2.0):
                for eps in (0.1, 0.01, 0.001):
                    c = finite_coeffs(profile, alpha, k, eps)
                    assert c.unitarity_defect <= 1e-9


def test_finite_resonant_modulus_error_quadratic(seba, seba_root):
    t_lim = abs(limit_coeffs(Resonant(seba_root.theta)).T)
    errs = [
        abs(abs(finite_coeffs(seba, seba_root.alpha, 1.0, eps).T) - t_lim)
        for eps in (0.02, 0.01, 0.005)
    ]
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    assert 3.5 <= errs[1] / errs[2] <= 4.5


def test_finite_nonresonant_transmission_linear(seba):
    ts = [abs(finite_coeffs(seba, 10.0, 1.0, eps).T) for eps in (0.02, 0.01, 0.005)]
    assert 1.8 <= ts[0] / ts[1] <= 2.2
    assert 1.8 <= ts[1] / ts[2] <= 2.2


def test_finite_mirror_preserves_transmission_probability(seba, seba_root):
    c = finite_coeffs(seba, seba_root.alpha, 1.0, 0.01)
    m = finite_coeffs(seba.reflected(), seba_root.alpha, 1.0, 0.01)
    assert abs(m.T) == pytest.approx(abs(c.T), rel=1e-9)


@pytest.mark.parametrize("k,eps", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0), (1.0, -0.5)])
def test_finite_preconditions(seba, k, eps):
    with pytest.raises(InvalidInputError):
        finite_coeffs(seba, 1.0, k, eps)


def test_q_factor_free_value(seba):
    assert q_factor(seba, 0.0) == pytest.approx(-2.0, abs=1e-12)


def test_q_factor_identity_at_seba_root(seba, seba_root):
    q = q_factor(seba, seba_root.alpha)
    want = -(seba_root.theta + 1.0 / seba_root.theta)
    assert q == pytest.approx(want, rel=1e-8)


def test_q_factor_identity_at_step_root(step):
    alpha = step_resonance_alpha()
    theta = step_resonance_theta()
    assert q_factor(step, alpha) == pytest.approx(-(theta + 1.0 / theta), rel=1e-8)


def test_asymptotic_resonant_kappa_zero_equals_limit(seba, seba_root):
    a = asymptotic_coeffs(seba, seba_root.alpha, 0.0)
    c = limit_coeffs(Resonant(seba_root.theta))
    assert a.R == pytest.approx(c.R, rel=1e-10)
    assert a.T == pytest.approx(c.T, rel=1e-10)
    assert a.regime == "asymptotic"


def test_asymptotic_nonresonant_kappa_zero(seba):
    a = asymptotic_coeffs(seba, 10.0, 0.0)
    assert a.R == -1.0 and a.T == 0.0


def test_asymptotic_matches_finite_near_resonance(seba):
    # near a resonance numerator and denominator are both O(kappa), so the
    # dropped remainders cost O(kappa) relative; |T| is small enough that the
    # absolute transmission mismatch still sits well under 1e-3
    a = asymptotic_coeffs(seba, 18.1747, 0.01)
    f = finite_coeffs(seba, 18.1747, 1.0, 0.01)
    assert abs(a.T - f.T) <= 1e-3


def test_asymptotic_matches_finite_second_order_off_resonance(seba):
    diffs = [
        abs(asymptotic_coeffs(seba, 10.0, k).R - finite_coeffs(seba, 10.0, 1.0, k).R)
        for k in (0.02, 0.01, 0.005)
    ]
    assert 3.5 <= diffs[0] / diffs[1] <= 4.5
    assert 3.5 <= diffs[1] / diffs[2] <= 4.5


def test_asymptotic_rejects_nonfinite_kappa(seba):
    with pytest.raises(InvalidInputError):
        asymptotic_coeffs(seba, 1.0, float("inf"))


def test_small_solver_matches_numpy():
    rng = np.random.default_rng(42)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    x = _solve_small_complex(A, b)
    np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-12, atol=1e-14)


def test_small_solver_reports_singularity_with_determinant():
    A = np.array(
        [[1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0], [0, 0, 1, 0], [0, 0, 0, 1]],
        dtype=complex,
    )
    with pytest.raises(NumericalFailureError, match="determinant estimate"):
        _solve_small_complex(A, np.ones(4, dtype=complex))
