import json

import numpy as np
import pytest

from nonphys.channels import (add, apply, builtin, classify, compose, dump_channel, from_choi, from_function,
                              from_kraus, from_transfer, hermitian_split, inverse, is_cp, load_channel,
                              output_trace, parse_builtin, parse_channel_source, scale, tensor, to_transfer)
from nonphys.channels.io import channel_from_dict
from nonphys.channels.library import (choi_map, dephasing_inverse_decomposition, leakage_inverse_decomposition,
                                      preparation)
from nonphys.exceptions import DomainError, HermiticityError, InputError, SingularMapError
from nonphys.linalg import omega_projector, random_density, random_unitary


def test_from_kraus_identity():
    m = from_kraus([np.eye(3)])
    np.testing.assert_allclose(m.choi, omega_projector(3), atol=1e-12)
    np.testing.assert_allclose(builtin('amplitude_damping', gamma=0.0).choi, omega_projector(2), atol=1e-12)


def test_leakage_output_trace():
    m = builtin('leakage', p=0.3)
    np.testing.assert_allclose(output_trace(m), np.diag([1.0, 0.7]), atol=1e-12)


def test_from_choi_rejects_non_hermitian():
    j = np.eye(4, dtype=complex)
    e = np.zeros((4, 4))
    e[0, 1] = 1.0
    with pytest.raises(HermiticityError):
        from_choi(j + 1e-3j * (e - e.T), 2, 2)


def test_from_choi_completely_depolarizing():
    m = from_choi(np.eye(4) / 2, 2, 2)
    rho = random_density(np.random.default_rng(0), 2)
    np.testing.assert_allclose(apply(m, rho), np.eye(2) / 2, atol=1e-12)


def test_apply_transpose():
    rng = np.random.default_rng(1)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = g + g.conj().T
    np.testing.assert_allclose(apply(builtin('transpose', d=3), x), x.T, atol=1e-12)


def test_apply_choi_map():
    e00 = np.diag([1.0, 0.0, 0.0])
    np.testing.assert_allclose(apply(choi_map(normalized=False), e00), np.diag([1.0, 0.0, 1.0]), atol=1e-12)
    np.testing.assert_allclose(apply(choi_map(), e00), np.diag([0.5, 0.0, 0.5]), atol=1e-12)


def test_apply_depolarizing():
    rho = random_density(np.random.default_rng(2), 3)
    out = apply(builtin('depolarizing', p=0.3, d=3), rho)
    np.testing.assert_allclose(out, 0.7 * rho + 0.3 * np.eye(3) / 3, atol=1e-12)


def test_compose_with_inverse_is_identity():
    dep = builtin('depolarizing', p=0.3, d=2)
    np.testing.assert_allclose(compose(inverse(dep), dep).choi, omega_projector(2), atol=1e-9)
    np.testing.assert_allclose(inverse(dep).choi, builtin('depolarizing_inverse', p=0.3, d=2).choi, atol=1e-9)
    m = builtin('amplitude_damping', gamma=0.4)
    np.testing.assert_allclose(compose(builtin('amplitude_damping_inverse', gamma=0.4), m).choi,
                               omega_projector(2), atol=1e-9)


def test_compose_dephasing_multiplies_schur_multipliers():
    # multipliers 1 - 2p: 0.8 * 0.6 = 0.48 = 1 - 2 * 0.26
    both = compose(builtin('dephasing', p=0.1), builtin('dephasing', p=0.2))
    np.testing.assert_allclose(both.choi, builtin('dephasing', p=0.26).choi, atol=1e-12)


def test_compose_identity_and_dimension_check():
    m = builtin('random_tp_map', seed=3, d=2)
    np.testing.assert_allclose(compose(builtin('identity', d=2), m).choi, m.choi, atol=1e-12)
    with pytest.raises(ValueError):
        compose(builtin('identity', d=3), m)


def test_inverse_of_unitary_and_singular():
    u = random_unitary(np.random.default_rng(4), 2)
    inv = inverse(from_kraus([u]))
    np.testing.assert_allclose(inv.choi, from_kraus([u.conj().T]).choi, atol=1e-9)
    with pytest.raises(SingularMapError):
        inverse(builtin('completely_depolarizing', d=2))


def test_tensor():
    np.testing.assert_allclose(tensor(builtin('id', d=2), builtin('id', d=2)).choi, omega_projector(4), atol=1e-12)
    m = builtin('random_hp_map', seed=1, d=2)
    np.testing.assert_allclose(tensor(m, builtin('identity', d=1)).choi, m.choi, atol=1e-12)
    rng = np.random.default_rng(5)
    rho, sigma = random_density(rng, 2), random_density(rng, 2)
    out = apply(tensor(builtin('transpose', d=2), builtin('identity', d=2)), np.kron(rho, sigma))
    np.testing.assert_allclose(out, np.kron(rho.T, sigma), atol=1e-12)


def test_transfer_round_trip():
    m = builtin('random_hp_map', seed=2, d=3)
    t = to_transfer(m)
    x = random_density(np.random.default_rng(6), 3)
    np.testing.assert_allclose(t @ x.reshape(-1), np.asarray(apply(m, x)).reshape(-1), atol=1e-12)
    np.testing.assert_allclose(from_transfer(t, 3, 3).choi, m.choi, atol=1e-12)


def test_classify():
    c = classify(builtin('amplitude_damping', gamma=0.5))
    assert c.cp and c.tp and c.tni and c.hermiticity_preserving
    c = classify(builtin('transpose_map', d=3))
    assert c.tp and not c.cp and c.hermiticity_preserving
    c = classify(choi_map(normalized=False))
    assert not c.tp and c.proportional_tp
    assert c.factor == pytest.approx(2.0)
    c = classify(builtin('random_tp_map', seed=0, d=3))
    assert c.tp
    c = classify(builtin('random_channel', seed=0, d=3))
    assert c.tp and c.cp
    assert is_cp(builtin('random_cp_map', seed=0, d=2))


def test_dephasing_inverse_multiplier():
    j = np.asarray(builtin('dephasing_general_inverse', p=[0.75, 0.25]).choi).reshape(2, 2, 2, 2)
    s = np.array([[j[a, a, b, b] for b in range(2)] for a in range(2)])
    np.testing.assert_allclose(s, [[1.0, 2.0], [2.0, 1.0]], atol=1e-12)
    with pytest.raises(DomainError):
        builtin('dephasing_general_inverse', p=[0.5, 0.5])


def test_dephasing_inverse_decomposition():
    c_plus, m_plus, c_minus, m_minus = dephasing_inverse_decomposition([0.75, 0.25])
    assert c_plus == pytest.approx(1.5)
    assert c_minus == pytest.approx(0.5)
    for part in (m_plus, m_minus):
        cls = classify(part)
        assert cls.cp and cls.tp
    combined = add(scale(m_plus, c_plus), scale(m_minus, -c_minus))
    np.testing.assert_allclose(combined.choi, builtin('dephasing_inverse', p=0.25).choi, atol=1e-10)


def test_leakage_inverse_decomposition():
    total = None
    for coeff, m in leakage_inverse_decomposition(0.4):
        term = scale(m, coeff)
        total = term if total is None else add(total, term)
    np.testing.assert_allclose(total.choi, builtin('leakage_inverse', p=0.4).choi, atol=1e-10)


def test_hermitian_split():
    rng = np.random.default_rng(7)
    j = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h, sh = hermitian_split(j, 2, 2)
    np.testing.assert_allclose(np.asarray(h.choi) + 1j * np.asarray(sh.choi), j, atol=1e-12)


def test_from_function_matches_kraus():
    k = np.array([[1.0, 0.0], [0.0, np.sqrt(0.5)]])
    fn = from_function(lambda x: k @ x @ k.T, 2, 2)
    np.testing.assert_allclose(fn.choi, builtin('leakage', p=0.5).choi, atol=1e-12)


def test_preparation():
    m = preparation([1.5, -0.5])
    assert (m.d_in, m.d_out) == (1, 2)
    np.testing.assert_allclose(apply(m, np.eye(1)), np.diag([1.5, -0.5]), atol=1e-12)


def test_builtin_domain_errors():
    with pytest.raises(DomainError):
        builtin('depolarizing', p=1.5)
    with pytest.raises(DomainError):
        builtin('depolarizing_inverse', p=1.0)
    with pytest.raises(DomainError):
        builtin('amplitude_damping_inverse', gamma=1.0)
    with pytest.raises(InputError):
        builtin('no_such_map')
    with pytest.raises(InputError):
        builtin('identity', q=1)


def test_parse_builtin():
    m = parse_builtin('builtin:dephasing_general?p=0.7,0.2,0.1')
    assert (m.d_in, m.d_out) == (3, 3)
    m = parse_builtin('builtin:transpose?d=3')
    np.testing.assert_allclose(m.choi, builtin('transpose_map', d=3).choi)
    assert parse_builtin('extreme_disparity').d_in == 2


@pytest.mark.parametrize('text', [
    'builtin:depolarizing?p',
    'builtin:depolarizing?q=0.1',
    'builtin:depolarizing?p=0.1&p=0.2',
    'builtin:depolarizing?p=abc',
    'builtin:depolarizing?d=2.5',
    'builtin:depolarizing?p=1.5',
    'builtin:nope',
])
def test_parse_builtin_errors(text):
    with pytest.raises(InputError):
        parse_builtin(text)


def test_channel_file_round_trip(tmp_path):
    m = builtin('amplitude_damping', gamma=0.3)
    path = tmp_path / 'ad.json'
    dump_channel(m, str(path))
    loaded = parse_channel_source(str(path))
    assert (loaded.d_in, loaded.d_out) == (2, 2)
    np.testing.assert_allclose(loaded.choi, m.choi, atol=1e-11)


def test_channel_from_kraus_dict():
    data = {'d_in': 2, 'd_out': 2, 'kraus': [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
    m = channel_from_dict(data)
    np.testing.assert_allclose(m.choi, omega_projector(2), atol=1e-12)


@pytest.mark.parametrize('data', [
    [],
    {'d_in': 2},
    {'d_in': 2, 'd_out': 2},
    {'d_in': 2, 'd_out': 2, 'kraus': [], 'choi': []},
    {'d_in': 2, 'd_out': 2, 'kraus': []},
    {'d_in': 2, 'd_out': 2, 'choi': [[1, 2], [3, 4]]},
])
def test_channel_from_dict_errors(data):
    with pytest.raises(InputError):
        channel_from_dict(data)


def test_load_channel_errors(tmp_path):
    bad = tmp_path / 'bad.json'
    bad.write_text('{"d_in": 2,')
    with pytest.raises(InputError, match='malformed JSON'):
        load_channel(str(bad))
    with pytest.raises(InputError):
        parse_channel_source(str(tmp_path / 'missing.json'))
    good = tmp_path / 'nonherm.json'
    choi = [[[0, 0]] * 4 for _ in range(4)]
    choi[0][1] = [1, 0]
    good.write_text(json.dumps({'d_in': 2, 'd_out': 2, 'choi': choi}))
    with pytest.raises(HermiticityError):
        load_channel(str(good))
