import numpy as np
import pytest

from nonphys.channels import apply, classify, compose
from nonphys.exceptions import DomainError, InputError
from nonphys.linalg import omega_projector
from nonphys.nonmarkov import (builtin_family, depolarizing_semigroup, g_dia, i_dia, oscillatory_dephasing,
                               parse_family, propagator, sup_dia)
from nonphys.nonmarkov.families import OscillatoryDephasing

E01 = np.array([[0.0, 1.0], [0.0, 0.0]])
# [0.85, 2.2] lies between the zeros of cos(2t) at pi/4 and 3 pi/4
WINDOW = (0.85, 2.2)


def test_family_at_zero_is_identity():
    f = oscillatory_dephasing()
    np.testing.assert_allclose(f(0.0).choi, omega_projector(2), atol=1e-12)
    for t in (0.0, 0.3, 1.2, 2.0):
        cls = classify(f(t))
        assert cls.cp and cls.tp


def test_guard_raises_domain_error():
    f = oscillatory_dephasing(Gamma=0.2, omega=2.0)
    with pytest.raises(DomainError, match='q_floor'):
        f(np.pi / 4)
    with pytest.raises(DomainError):
        f(-1.0)


def test_propagator_identity_and_ratio():
    f = oscillatory_dephasing()
    np.testing.assert_allclose(propagator(f, 1.0, 1.0).choi, omega_projector(2), atol=1e-9)
    dephaser = OscillatoryDephasing()
    s, t = 1.0, 1.3
    out = apply(propagator(f, s, t), E01)
    assert float(np.real(out[0, 1])) == pytest.approx(dephaser.q(t) / dephaser.q(s), abs=1e-9)
    with pytest.raises(DomainError):
        propagator(f, 1.3, 1.0)


def test_propagator_chain_rule():
    f = oscillatory_dephasing()
    r, s, t = 0.2, 0.5, 0.7
    chained = compose(propagator(f, s, t), propagator(f, r, s))
    np.testing.assert_allclose(chained.choi, propagator(f, r, t).choi, atol=1e-8)


def test_g_vanishes_for_semigroup_and_at_zero():
    f = depolarizing_semigroup(gamma=1.0)
    assert abs(g_dia(f, 0.5)) <= 1e-6
    assert abs(g_dia(oscillatory_dephasing(), 0.0)) <= 1e-6
    with pytest.raises(DomainError):
        g_dia(f, 0.5, eps=0.0)


def test_g_matches_analytic_in_revival():
    f = oscillatory_dephasing(Gamma=0.2, omega=2.0)
    t = 1.0
    expected = f.analytic_g(t)
    assert expected > 4.0
    assert g_dia(f, t) == pytest.approx(expected, abs=5e-3)
    assert g_dia(f, t, richardson=True) == pytest.approx(expected, abs=5e-3)


def test_markovian_semigroup_integral():
    report = i_dia(depolarizing_semigroup(gamma=1.0), 2.0, 10)
    assert report.integral <= 1e-4
    assert report.markovian
    assert report.analytic_integral == 0.0
    assert len(report.times) == 11


def test_monotone_dephasing_is_cp_divisible():
    f = oscillatory_dephasing(Gamma=0.2, omega=0.0)
    report = i_dia(f, 2.0, 4)
    assert abs(report.integral) <= 1e-8
    assert report.markovian
    assert report.analytic_integral == pytest.approx(0.0)


def test_analytic_integral_of_revival():
    dephaser = OscillatoryDephasing(Gamma=0.2, omega=2.0)
    t_min, t_max = WINDOW
    # ln|q| rises from t_min to the revival peak, then falls to t_max
    peak = (np.pi - np.arctan(0.1)) / 2.0
    expected = np.log(abs(dephaser.q(peak)) / abs(dephaser.q(t_min)))
    assert dephaser.analytic_integral(t_min, t_max) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.91, abs=0.01)
    with pytest.raises(DomainError, match='q_floor'):
        dephaser.analytic_integral(0.0, 1.0)


@pytest.mark.slow
def test_revival_integral_matches_analytic():
    f = oscillatory_dephasing(Gamma=0.2, omega=2.0)
    report = i_dia(f, WINDOW[1], 80, t_min=WINDOW[0])
    assert report.analytic_integral == pytest.approx(1.91, abs=0.01)
    assert report.integral == pytest.approx(report.analytic_integral, rel=0.05)
    assert not report.markovian
    assert np.min(report.g) >= -1e-6
    out = report.to_dict()
    assert out['relative_error'] <= 0.05
    assert out['markovian'] is False


def test_i_dia_fails_fast_on_guard():
    f = oscillatory_dephasing(Gamma=0.2, omega=2.0)
    with pytest.raises(DomainError, match='q_floor'):
        i_dia(f, 1.0, 10)


def test_i_dia_argument_checks():
    f = depolarizing_semigroup()
    with pytest.raises(DomainError):
        i_dia(f, 1.0, 1)
    with pytest.raises(DomainError):
        i_dia(f, 1.0, 4, t_min=1.0)


def test_i_dia_parallel_matches_serial():
    f = depolarizing_semigroup(gamma=0.5)
    serial = i_dia(f, 1.0, 4)
    parallel = i_dia(f, 1.0, 4, jobs=3)
    np.testing.assert_allclose(parallel.g, serial.g, atol=1e-12)


def test_sup_dia():
    value, (s, t) = sup_dia(depolarizing_semigroup(), [0.0, 0.5, 1.0])
    assert value == pytest.approx(1.0, abs=1e-9)
    report = i_dia(depolarizing_semigroup(), 1.0, 2, sup_points=3)
    assert report.sup[0] == pytest.approx(1.0, abs=1e-9)
    assert 'sup' in report.to_dict()


def test_parse_family():
    f = parse_family('oscillatory_dephasing?Gamma=0.3&omega=1.5')
    assert f.params['Gamma'] == pytest.approx(0.3)
    assert f.params['omega'] == pytest.approx(1.5)
    f = parse_family('depolarizing_semigroup?gamma=2&d=3')
    assert f(0.1).d_in == 3
    assert builtin_family('depolarizing_semigroup').params['gamma'] == 1.0
    for text in ('nope', 'oscillatory_dephasing?Gamma', 'oscillatory_dephasing?rate=1',
                 'depolarizing_semigroup?d=1.5'):
        with pytest.raises(InputError):
            parse_family(text)
    with pytest.raises(DomainError):
        parse_family('depolarizing_semigroup?gamma=-1')


@pytest.mark.slow
@pytest.mark.parametrize('t', np.linspace(WINDOW[0], WINDOW[1], 10))
def test_g_matches_analytic_across_window(t):
    f = oscillatory_dephasing(Gamma=0.2, omega=2.0)
    assert g_dia(f, t, eps=1e-4) == pytest.approx(f.analytic_g(t), abs=2e-3)
