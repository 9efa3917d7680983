import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np
import scipy.linalg as sla

import logging
from dataclasses import dataclass

from ..channels import apply
from ..exceptions import DimensionError, InputError, SolverError
from ..linalg import hermitian_basis, hermitian_coordinates, partial_transpose, tomographic_states
from ..sdp import SolverConfig, Status, solve
from .norms import MeasureResult, CROSS_CHECK_TOL, derived, robustness_Rprime
from .programs import cptp_payoff_dual, cptp_payoff_primal

logger = logging.getLogger(__name__)

POVM_TOL = 1e-9
# normalization of p, Tr sigma and sum M
NORMALIZATION_TOL = 1e-8
# max |W_G - W| accepted from game_from_witness, relative to max(1, max|W|)
GAME_OPERATOR_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Game:
    """
    Input-output game: states sigma_i prepared with probability p_i, a POVM {M_j} on the
    output and payoff weights w_ij.
    """
    probabilities: np.ndarray
    states: np.ndarray
    povm: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for name, dtype in (('probabilities', float), ('states', np.complex128), ('povm', np.complex128),
                            ('weights', float)):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=dtype))
        if self.weights.shape != (len(self.probabilities), len(self.povm)):
            raise DimensionError("weights must be {}x{}".format(len(self.probabilities), len(self.povm)))
        if len(self.states) != len(self.probabilities):
            raise DimensionError("one state per probability required")
        for name, ops in (('states', self.states), ('povm', self.povm)):
            if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
                raise DimensionError("{} must be a stack of square matrices, got shape {}".format(name, ops.shape))
        if np.any(self.probabilities < -NORMALIZATION_TOL) or \
                abs(self.probabilities.sum() - 1.0) > NORMALIZATION_TOL:
            raise InputError("game probabilities {} are not a distribution".format(self.probabilities.tolist()))
        for i, s in enumerate(self.states):
            if abs(np.trace(s) - 1.0) > NORMALIZATION_TOL or _min_eigenvalue(s) < -POVM_TOL:
                raise InputError("game state {} is not a density operator".format(i))
        for j, e in enumerate(self.povm):
            lo = _min_eigenvalue(e)
            if lo < -POVM_TOL:
                raise InputError("POVM element {} has eigenvalue {:.3e}".format(j, lo))
        if self.povm_error() > NORMALIZATION_TOL:
            raise InputError("POVM elements sum to the identity only within {:.3e}".format(self.povm_error()))

    @property
    def d_in(self):
        return self.states.shape[1]

    @property
    def d_out(self):
        return self.povm.shape[1]

    def povm_error(self):
        return float(np.max(np.abs(self.povm.sum(axis=0) - np.eye(self.d_out))))

    def to_dict(self):
        return {'probabilities': self.probabilities, 'states': [s for s in self.states],
                'povm': [e for e in self.povm], 'weights': self.weights}


def _min_eigenvalue(h):
    h = np.asarray(h)
    if np.max(np.abs(h - h.conj().T)) > POVM_TOL:
        return -np.inf
    return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])


def payoff(m, g):
    """P(Phi, G) = sum_ij w_ij p_i <M_j, Phi(sigma_i)>."""
    if (m.d_in, m.d_out) != (g.d_in, g.d_out):
        raise DimensionError("game for {} -> {} played with a map {} -> {}".format(g.d_in, g.d_out, m.d_in, m.d_out))
    outputs = jnp.stack([apply(m, s) for s in g.states])
    probs = jnp.real(jnp.einsum('jab,iba->ij', jnp.asarray(g.povm), outputs))
    return float(jnp.sum(jnp.asarray(g.weights) * jnp.asarray(g.probabilities)[:, None] * probs))


def game_operator(g):
    """W_G = sum_ij p_i w_ij sigma_i^T (x) M_j, so that P(Phi, G) = <W_G, J_Phi>."""
    coeff = g.weights * g.probabilities[:, None]
    states_t = np.transpose(g.states, (0, 2, 1))
    w = np.einsum('ij,iab,jcd->acbd', coeff, states_t, g.povm)
    n = g.d_in * g.d_out
    return w.reshape(n, n)


def product_decomposition(w, dA, dB):
    """
    Real coefficients x_(a,b) with W = sum x_(a,b) s_a (x) e_b over the tomographically
    complete product states s_a of A and e_b of B.
    """
    sa, eb = tomographic_states(dA), tomographic_states(dB)
    products = np.einsum('aij,bkl->abikjl', sa, eb).reshape(len(sa) * len(eb), dA * dB, dA * dB)
    basis = hermitian_basis(dA * dB)
    system = np.stack([hermitian_coordinates(p, basis) for p in products], axis=1)
    lu = sla.lu_factor(system)
    if np.min(np.abs(np.diag(lu[0]))) < 1e-12:
        raise SolverError("product-state decomposition system is singular")
    x = sla.lu_solve(lu, hermitian_coordinates(w, basis))
    pairs = [(a, b) for a in range(len(sa)) for b in range(len(eb))]
    return x, sa, eb, pairs


def game_from_witness(w, dA, dB):
    """
    Game whose payoff is P(Phi, G) = <W, J_Phi> for every map: decompose
    W^(T_A) = sum_i x_i sigma_i (x) eta_i, take M_i = eta_i/||sum eta||, the completing
    outcome M_(n+1) = 1 - sum M_i, uniform p_i = 1/n and w_ii = x_i n ||sum eta||.
    """
    w = np.asarray(w, dtype=np.complex128)
    w_ta = np.asarray(partial_transpose(w, dA, dB, 'A'))
    x, sa, eb, pairs = product_decomposition(w_ta, dA, dB)
    n = len(pairs)
    etas = np.stack([eb[b] for _, b in pairs])
    eta_sum = etas.sum(axis=0)
    norm = float(np.max(np.abs(np.linalg.eigvalsh(eta_sum))))
    povm = list(etas / norm)
    rest = np.eye(dB) - sum(povm)
    evals, evecs = np.linalg.eigh(0.5 * (rest + rest.conj().T))
    if evals[0] < -POVM_TOL:
        raise SolverError("completing POVM element has eigenvalue {:.2e}".format(evals[0]))
    povm.append((evecs * np.clip(evals, 0.0, None)) @ evecs.conj().T)
    weights = np.zeros((n, n + 1))
    weights[np.arange(n), np.arange(n)] = x * n * norm
    game = Game(np.full(n, 1.0 / n), np.stack([sa[a] for a, _ in pairs]), np.asarray(povm), weights)
    residual = float(np.max(np.abs(game_operator(game) - w)))
    logger.debug("extracted game with %d states, operator residual %.2e", n, residual)
    if residual > GAME_OPERATOR_TOL * max(1.0, float(np.max(np.abs(w)))):
        raise SolverError("extracted game reproduces the witness only within {:.3e}".format(residual))
    return game


def game_advantage(m, config=None, programs=None, certify=False):
    """sup over games of P(Phi, G) / max over channels of P(Lambda, G), which equals R' + 1."""
    return derived(robustness_Rprime(m, config, programs, certify), 'game_advantage', lambda r: r + 1.0)


def best_cptp_payoff(g, config=None, programs=None):
    """max over CPTP maps Lambda of P(Lambda, G), solved as primal and dual programs."""
    config = config or SolverConfig()
    w_g = game_operator(g)
    values, unpacked, iterations = [], [], 0
    for builder in (cptp_payoff_primal, cptp_payoff_dual):
        program, sense = builder(w_g, g.d_in, g.d_out)
        if programs is not None:
            programs.append(program)
        sol = solve(program, config)
        if sol.status != Status.OPTIMAL:
            raise SolverError("{} ended with status {}".format(program.name, sol.status.value), sol.status)
        values.append(sense * sol.primal_objective)
        unpacked.append(program.unpack(sol.x))
        iterations += sol.iterations
    p_val, d_val = values
    gap = abs(p_val - d_val) / max(1.0, abs(p_val))
    if gap > CROSS_CHECK_TOL:
        raise SolverError("best CPTP payoff: primal {:.10g} and dual {:.10g} disagree".format(p_val, d_val))
    return MeasureResult('best_cptp_payoff', p_val, p_val, d_val, gap, Status.OPTIMAL,
                         {'J': unpacked[0]['J']}, {'Z': unpacked[1]['Z']}, iterations)
