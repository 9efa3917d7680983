import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np

import logging
from dataclasses import dataclass

from ..channels import LinearMapRep, apply, add, compose, complete_to_tp, from_function, is_trace_preserving, tensor
from ..channels.maps import _trusted
from ..exceptions import DimensionError
from ..linalg import hermitian_basis, lambda_max, project_psd, random_density, trace_norm
from .norms import robustness_R

logger = logging.getLogger(__name__)

ANCILLA_DIM = 2
# Below this the negative branch of the decomposition is dropped
ZERO_ROBUSTNESS = 1e-12


@dataclass(frozen=True, eq=False)
class SimulationPlan:
    """
    Phi(rho) = Lambda(rho (x) X) with Lambda CPTNI on A (x) A' -> B and a unit-trace
    Hermitian X = mu_+ omega_+ - mu_- omega_- on a qubit ancilla A'.
    """
    lambda_map: LinearMapRep
    x: np.ndarray
    mu_plus: float
    mu_minus: float
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    robustness: float
    completed: bool = False

    @property
    def cost(self):
        return self.mu_plus + self.mu_minus

    def to_dict(self):
        return {'x': self.x, 'mu_plus': self.mu_plus, 'mu_minus': self.mu_minus,
                'omega_plus': self.omega_plus, 'omega_minus': self.omega_minus,
                'robustness': self.robustness, 'trace_norm_x': trace_norm(self.x), 'completed': self.completed,
                'lambda': {'d_in': self.lambda_map.d_in, 'd_out': self.lambda_map.d_out,
                           'choi': np.asarray(self.lambda_map.choi)}}


def _test_map(p):
    """T_P(Y) = Tr(P Y): a functional on the ancilla, Choi operator P^T with d_out = 1."""
    p = np.asarray(p, dtype=np.complex128)
    return _trusted(p.T, p.shape[0], 1)


def build_simulation(m, config=None, complete=True, result=None):
    """
    Simulation of a Hermiticity-preserving map from the optimal robustness decomposition
    Phi = (1 + R) L_+ - R L_-, using Lambda = L_+ (x) T_|0><0| + L_- (x) T_|1><1| and
    X = (1 + R)|0><0| - R|1><1|.

    Parameters
    ----------
    m : LinearMapRep
    config : SolverConfig, optional
    complete : bool
        For trace-preserving maps, complete both branches to CPTP maps so that Lambda
        is itself a channel.
    result : MeasureResult, optional
        A robustness_R result for `m` to reuse instead of solving again.
    """
    res = result if result is not None else robustness_R(m, config)
    dA, dB = m.d_in, m.d_out
    j = np.asarray(m.choi)
    m_minus = np.asarray(project_psd(res.primal_witness['M-']))
    m_plus = j + m_minus
    tr_plus = np.einsum('ibjb->ij', m_plus.reshape(dA, dB, dA, dB))
    tr_minus = np.einsum('ibjb->ij', m_minus.reshape(dA, dB, dA, dB))
    r = max(lambda_max(tr_plus) - 1.0, lambda_max(tr_minus), 0.0)
    logger.debug("robustness %.10g, repaired decomposition uses %.10g", res.value, r)

    l_plus = _trusted(m_plus / (1.0 + r), dA, dB)
    if r > ZERO_ROBUSTNESS:
        l_minus = _trusted(m_minus / r, dA, dB)
    else:
        l_minus = _trusted(np.zeros_like(j), dA, dB)
    completed = False
    if complete and is_trace_preserving(m):
        l_plus, l_minus = complete_to_tp(l_plus), complete_to_tp(l_minus)
        completed = True

    omega_plus = np.diag([1.0, 0.0]).astype(np.complex128)
    omega_minus = np.diag([0.0, 1.0]).astype(np.complex128)
    lam = add(tensor(l_plus, _test_map(omega_plus)), tensor(l_minus, _test_map(omega_minus)))
    x = (1.0 + r) * omega_plus - r * omega_minus
    return SimulationPlan(lam, x, 1.0 + r, r, omega_plus, omega_minus, r, completed)


def simulate(plan, rho):
    """Lambda(rho (x) X)."""
    return apply(plan.lambda_map, jnp.kron(jnp.asarray(rho), jnp.asarray(plan.x)))


def verify_simulation(plan, m, probe_count=50, seed=0):
    """
    Largest trace-norm deviation ||Lambda(rho (x) X) - Phi(rho)||_1 over a Hermitian operator
    basis of A plus probe_count seeded random density operators.
    """
    if plan.lambda_map.d_in != m.d_in * ANCILLA_DIM or plan.lambda_map.d_out != m.d_out:
        raise DimensionError("simulation plan does not match a map {} -> {}".format(m.d_in, m.d_out))
    rng = np.random.default_rng(seed)
    probes = list(hermitian_basis(m.d_in)) + [random_density(rng, m.d_in) for _ in range(probe_count)]
    return max(trace_norm(simulate(plan, rho) - apply(m, rho)) for rho in probes)


def _append_ancilla(state, d):
    state = jnp.asarray(state)
    return from_function(lambda rho: jnp.kron(rho, state), d, d * state.shape[0])


def quasiprobability_decomposition(plan, d_in):
    """
    Phi = mu_+ L'_+ - mu_- L'_- with L'_+-(rho) = Lambda(rho (x) omega_+-), mu_+ + mu_- = ||X||_1.
    """
    branch_plus = compose(plan.lambda_map, _append_ancilla(plan.omega_plus, d_in))
    branch_minus = compose(plan.lambda_map, _append_ancilla(plan.omega_minus, d_in))
    return plan.mu_plus, branch_plus, plan.mu_minus, branch_minus
