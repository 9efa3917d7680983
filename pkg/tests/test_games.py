import numpy as np
import pytest

from nonphys.channels import add, builtin, scale
from nonphys.exceptions import DimensionError, InputError, SolverError
from nonphys.linalg import hs_inner, omega_projector, partial_transpose
import nonphys.measures.games as games_module
from nonphys.measures import Game, best_cptp_payoff, game_advantage, game_from_witness, game_operator, payoff


def basis_game():
    """Send |0><0| and reward the outcome 0."""
    states = np.array([np.diag([1.0, 0.0])], dtype=complex)
    povm = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], dtype=complex)
    return Game(np.array([1.0]), states, povm, np.array([[1.0, 0.0]]))


def test_payoff_of_basis_game():
    g = basis_game()
    assert payoff(builtin('identity', d=2), g) == pytest.approx(1.0)
    assert payoff(builtin('amplitude_damping', gamma=0.3), g) == pytest.approx(1.0)
    assert payoff(builtin('completely_depolarizing', d=2), g) == pytest.approx(0.5)
    assert g.povm_error() == pytest.approx(0.0)


def test_zero_weights_give_zero_payoff():
    g = basis_game()
    zero = Game(g.probabilities, g.states, g.povm, np.zeros_like(g.weights))
    assert payoff(builtin('random_hp_map', seed=0, d=2), zero) == pytest.approx(0.0)


def test_payoff_is_linear():
    g = basis_game()
    a, b = builtin('random_hp_map', seed=1, d=2), builtin('random_hp_map', seed=2, d=2)
    combined = add(scale(a, 0.3), scale(b, -1.7))
    assert payoff(combined, g) == pytest.approx(0.3 * payoff(a, g) - 1.7 * payoff(b, g), abs=1e-12)


def test_game_rejects_mismatched_shapes():
    g = basis_game()
    with pytest.raises(DimensionError):
        Game(g.probabilities, g.states, g.povm, np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        payoff(builtin('identity', d=3), g)


def test_game_operator_reproduces_payoff():
    g = basis_game()
    m = builtin('random_hp_map', seed=3, d=2)
    assert payoff(m, g) == pytest.approx(hs_inner(game_operator(g), m.choi), abs=1e-12)


def test_game_from_witness_identity():
    w = np.asarray(omega_projector(2)) / 2
    g = game_from_witness(w, 2, 2)
    np.testing.assert_allclose(game_operator(g), w, atol=1e-9)
    assert g.povm_error() <= 1e-9
    for e in g.povm:
        assert np.linalg.eigvalsh(e)[0] >= -1e-9
    ident = builtin('identity', d=2)
    assert payoff(ident, g) == pytest.approx(hs_inner(w, ident.choi), abs=1e-9)


def test_game_from_witness_partial_transpose_structure():
    w = np.asarray(omega_projector(2)) / 2
    g = game_from_witness(w, 2, 2)
    coeff = g.weights * g.probabilities[:, None]
    rebuilt = np.einsum('ij,iab,jcd->acbd', coeff, g.states, g.povm).reshape(4, 4)
    np.testing.assert_allclose(rebuilt, partial_transpose(w, 2, 2, 'A'), atol=1e-9)


def test_transpose_game():
    t = builtin('transpose_map', d=2)
    adv = game_advantage(t)
    assert adv.value == pytest.approx(1.5, abs=1e-6)
    g = game_from_witness(adv.dual_witness['W'], 2, 2)
    assert payoff(t, g) == pytest.approx(1.5, abs=1e-5)
    best = best_cptp_payoff(g)
    assert best.value == pytest.approx(1.0, abs=1e-6)
    assert best.gap <= 1e-7


def test_witness_game_is_nonnegative_on_cp_maps():
    adv = game_advantage(builtin('transpose_map', d=2))
    g = game_from_witness(adv.dual_witness['W'], 2, 2)
    for seed in range(3):
        assert payoff(builtin('random_cp_map', seed=seed, d=2), g) >= -1e-7


I2 = np.eye(2, dtype=complex)


@pytest.mark.parametrize('probabilities, states, povm', [
    ([2.0], [I2 / 2], [I2 / 2, I2 / 2]),
    ([1.5, -0.5], [I2 / 2, I2 / 2], [I2 / 2, I2 / 2]),
    ([1.0], [I2 / 2], [-I2, 2 * I2]),
    ([1.0], [I2 / 2], [I2 / 2, I2 / 4]),
    ([1.0], [I2], [I2 / 2, I2 / 2]),
    ([1.0], [np.diag([1.5, -0.5])], [I2 / 2, I2 / 2]),
    ([1.0], [np.array([[0.5, 0.5], [0.0, 0.5]])], [I2 / 2, I2 / 2]),
])
def test_invalid_games_are_rejected(probabilities, states, povm):
    weights = np.ones((len(probabilities), len(povm)))
    with pytest.raises(InputError):
        Game(probabilities, states, povm, weights)


def test_game_accepts_array_likes():
    g = Game([1.0], [np.diag([1.0, 0.0])], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], [[1.0, 0.0]])
    assert g.d_in == 2 and g.d_out == 2
    assert payoff(builtin('identity', d=2), g) == pytest.approx(1.0)


def test_depolarizing_inverse_game():
    m = builtin('depolarizing_inverse', p=0.3, d=2)
    adv = game_advantage(m)
    # R' + 1 with R' = (23/14 - 1) / 2
    assert adv.value == pytest.approx(37 / 28, abs=1e-6)
    w = np.asarray(adv.dual_witness['W'])
    g = game_from_witness(w, 2, 2)
    np.testing.assert_allclose(game_operator(g), w, atol=1e-8)
    assert payoff(m, g) == pytest.approx(adv.value, abs=1e-5)
    assert best_cptp_payoff(g).value == pytest.approx(1.0, abs=1e-6)


def test_inexact_decomposition_is_refused(monkeypatch):
    exact = games_module.product_decomposition

    def perturbed(w, dA, dB):
        x, sa, eb, pairs = exact(w, dA, dB)
        return x + 1e-3, sa, eb, pairs

    monkeypatch.setattr(games_module, 'product_decomposition', perturbed)
    with pytest.raises(SolverError):
        game_from_witness(np.asarray(omega_projector(2)) / 2, 2, 2)
