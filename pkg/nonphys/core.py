import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np
import h5py

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Tuple

from .channels import classify, is_cp, output_trace
from .channels.maps import _trusted
from .exceptions import DomainError, InputError
from .linalg import hermitian_basis, hs_inner, lambda_max, lambda_min, operator_norm, random_density
from .measures import (MeasureResult, approx_inverse_bounds, base_norm_cptni, best_cptp_payoff, bounds_lower,
                       bounds_trace_norm, bounds_upper, build_simulation, diamond_norm, game_advantage,
                       game_from_witness, payoff, robustness_R, robustness_Rdoubleprime, robustness_Rprime,
                       simulation_cost_result, spa, spa_prime, verify_simulation)
from .measures.bounds import QUANTITIES
from .nonmarkov import i_dia
from .sdp import SolverConfig, Status
from .sdp.certificate import Check

logger = logging.getLogger(__name__)

VERIFY_TOL = 1e-6


def _closed_form(name, fn):
    def evaluate(m, config=None, programs=None, certify=False):
        value = fn(m)
        return MeasureResult(name, value, value, value, 0.0, Status.OPTIMAL)
    return evaluate


MEASURES = {
    'diamond': diamond_norm,
    'cptni': base_norm_cptni,
    'R': robustness_R,
    'Rprime': robustness_Rprime,
    'Rdoubleprime': robustness_Rdoubleprime,
    'S': simulation_cost_result,
    'game_advantage': game_advantage,
    'spa': _closed_form('spa', spa),
    'spa_prime': _closed_form('spa_prime', spa_prime),
}


def compute(channel, measures, config=None, jobs=1, certify=False, programs=None):
    """
    Evaluate a list of measures on one map.

    Parameters
    ----------
    channel : LinearMapRep
    measures : list of str
        Names from MEASURES: 'diamond', 'cptni', 'R', 'Rprime', 'Rdoubleprime', 'S',
        'game_advantage', 'spa', 'spa_prime'.
    config : SolverConfig, optional
    jobs : int
        Number of measures evaluated concurrently.
    certify : bool
        Run the certificate checks on every program solved.
    programs : list, optional
        Collects every compiled ConeProgram.

    Returns
    -------
    A dict measure name -> MeasureResult, ordered by name.
    """
    unknown = [name for name in measures if name not in MEASURES]
    if unknown:
        raise InputError("unknown measure(s) {}; known: {}".format(unknown, ', '.join(sorted(MEASURES))))
    config = config or SolverConfig()
    names = sorted(set(measures))

    def run(name):
        collected = [] if programs is not None else None
        return MEASURES[name](channel, config, collected, certify), collected

    if jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, names))
    else:
        outcomes = [run(name) for name in names]
    # programs are appended in measure-name order whatever the completion order
    if programs is not None:
        for _, collected in outcomes:
            programs.extend(collected)
    return {name: result for name, (result, _) in zip(names, outcomes)}


def bounds(channel, probes=None, certify=False, approx_inverse=None, eps=0.0, config=None):
    """
    Analytic bounds on the five SDP quantities.

    `approx_inverse` is the forward map that `channel` approximately inverts to accuracy
    eps; when given, the approximate-inverse bounds are added. With `certify` the SDP values
    are included and checked against the bounds.
    """
    report = bounds_trace_norm(channel).extend(bounds_upper(channel)).extend(bounds_lower(channel, probes))
    if approx_inverse is not None:
        report.extend(approx_inverse_bounds(approx_inverse, channel, eps, probes))
    if certify:
        results = compute(channel, list(QUANTITIES), config, certify=True)
        report.sdp_values = {name: res.value for name, res in results.items()}
    for quantity, lo, up in report.violations():
        logger.warning("bound sandwich violated for %s: %.10g > %.10g", quantity, lo, up)
    return report


def simulate(channel, config=None, probe_count=50, seed=0):
    """Optimal simulation plan of the map and its largest deviation over the probe set."""
    plan = build_simulation(channel, config)
    residual = verify_simulation(plan, channel, probe_count, seed)
    logger.info("simulation cost %.10g, residual %.3e", plan.cost, residual)
    return plan, residual


@dataclass
class GameReport:
    advantage: MeasureResult
    game: object
    payoff: float
    payoff_residual: float
    identity_residual: float
    best_cptp: MeasureResult
    tol: float = 1e-5

    @property
    def passed(self):
        return (self.payoff_residual <= self.tol and self.identity_residual <= self.tol
                and abs(self.best_cptp.value - 1.0) <= VERIFY_TOL)

    def to_dict(self):
        return {'advantage': self.advantage.value, 'R_prime': self.advantage.value - 1.0, 'game': self.game,
                'payoff': self.payoff, 'payoff_residual': self.payoff_residual,
                'identity_residual': self.identity_residual, 'best_cptp_payoff': self.best_cptp.value,
                'passed': self.passed}


def payoff_identity_residual(g, w, d_in, d_out):
    """max over a Hermitian basis of Choi operators of |P(Psi, G) - <W, J_Psi>|."""
    worst = 0.0
    for j in hermitian_basis(d_in * d_out):
        psi = _trusted(j, d_in, d_out)
        worst = max(worst, abs(payoff(psi, g) - hs_inner(w, j)))
    return worst


def game(channel, config=None):
    """Optimal input-output game for the map from the dual witness of R'."""
    adv = game_advantage(channel, config)
    w = adv.dual_witness['W']
    g = game_from_witness(w, channel.d_in, channel.d_out)
    value = payoff(channel, g)
    best = best_cptp_payoff(g, config)
    report = GameReport(adv, g, value, abs(value - adv.value),
                        payoff_identity_residual(g, w, channel.d_in, channel.d_out), best)
    logger.info("game advantage %.10g, payoff %.10g, best CPTP payoff %.10g", adv.value, value, best.value)
    return report


@dataclass
class VerifyReport:
    checks: List[Check] = field(default_factory=list)
    skipped: List[Tuple[str, str]] = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def check(self, name, lhs, rhs, relation, tol):
        """Record lhs == rhs or lhs <= rhs within tol."""
        if relation == '==':
            value = abs(lhs - rhs)
            passed = value <= tol
        else:
            value = lhs - rhs
            passed = value <= tol
        self.checks.append(Check(name, bool(passed), float(value), tol))

    def skip(self, name, reason):
        self.skipped.append((name, reason))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {'passed': self.passed, 'values': self.values,
                'checks': [c.__dict__ for c in self.checks],
                'failures': [c.name for c in self.failures()],
                'skipped': [{'check': n, 'reason': r} for n, r in self.skipped]}


def verify(channel, config=None, tol=VERIFY_TOL, jobs=1):
    """
    Run the identity suite on a map: the trace-preserving equalities, the diamond/base-norm
    and robustness inequalities, the CP equality, the duality gaps and the bound
    sandwiches. Checks that do not apply to the map are listed as skipped.
    """
    cls = classify(channel)
    results = compute(channel, list(QUANTITIES), config, jobs=jobs)
    v = {name: res.value for name, res in results.items()}
    report = VerifyReport(values=dict(v))
    dia, cptni, r, rp, rpp = v['diamond'], v['cptni'], v['R'], v['Rprime'], v['Rdoubleprime']
    red = output_trace(channel)

    for name, res in results.items():
        report.check('gap_' + name, res.gap, 0.0, '<=', tol)

    if cls.tp:
        report.check('tp_R_equals_Rprime', r, rp, '==', tol)
        report.check('tp_R_equals_Rdoubleprime', r, rpp, '==', tol)
        report.check('tp_R_equals_half_diamond', 2.0 * r + 1.0, dia, '==', tol)
        report.check('tp_R_equals_half_cptni', 2.0 * r + 1.0, cptni, '==', tol)
    else:
        for name in ('tp_R_equals_Rprime', 'tp_R_equals_Rdoubleprime', 'tp_R_equals_half_diamond',
                     'tp_R_equals_half_cptni'):
            report.skip(name, 'map is not trace preserving')
    if cls.proportional_tp:
        report.check('proportional_tp_cptni_equals_diamond', cptni, dia, '==', tol)
    else:
        report.skip('proportional_tp_cptni_equals_diamond', 'Tr_B J is not proportional to the identity')

    report.check('cptni_at_most_twice_diamond', cptni, 2.0 * dia, '<=', tol)
    report.check('diamond_at_most_cptni', dia, cptni, '<=', tol)
    report.check('Rprime_at_most_diamond_plus_one', rp, dia + 1.0, '<=', tol)
    report.check('Rprime_lower', 0.5 * (dia - 2.0 + lambda_min(red)), rp, '<=', tol)
    report.check('Rdoubleprime_at_most_diamond', rpp, dia, '<=', tol)
    report.check('Rdoubleprime_lower', 0.5 * (dia - lambda_max(red)), rpp, '<=', tol)
    report.check('R_dominates_Rprime', rp, r, '<=', tol)
    report.check('R_dominates_Rdoubleprime', rpp, r, '<=', tol)

    if is_cp(channel):
        norm = operator_norm(red)
        report.check('cp_diamond_equals_reduced_norm', dia, norm, '==', tol)
        report.check('cp_cptni_equals_reduced_norm', cptni, norm, '==', tol)
    else:
        report.skip('cp_diamond_equals_reduced_norm', 'map is not completely positive')
        report.skip('cp_cptni_equals_reduced_norm', 'map is not completely positive')

    if cls.tp:
        try:
            sp = spa_prime(channel)
            report.check('R_at_most_spa_prime', r, sp, '<=', tol)
            report.check('spa_prime_at_most_spa', sp, spa(channel), '<=', tol)
        except DomainError as exc:
            report.skip('R_at_most_spa_prime', str(exc))
            report.skip('spa_prime_at_most_spa', str(exc))

    rep = bounds_trace_norm(channel).extend(bounds_upper(channel)).extend(bounds_lower(channel))
    rep.sdp_values = dict(v)
    for quantity in QUANTITIES:
        lo, up = rep.lower(quantity), rep.upper(quantity)
        if lo is not None:
            report.check('lower_bound_' + quantity, lo, v[quantity], '<=', tol)
        if up is not None:
            report.check('upper_bound_' + quantity, v[quantity], up, '<=', tol)

    for c in report.failures():
        logger.warning("check %s failed: %.3e > %.1e", c.name, c.value, c.threshold)
    logger.info("%d checks, %d failed, %d skipped", len(report.checks), len(report.failures()), len(report.skipped))
    return report


def nonmarkov(family, t_max, steps, eps=1e-4, t_min=0.0, richardson=False, sup_points=0, config=None, jobs=1):
    """Divisibility report of a channel family over [t_min, t_max]."""
    return i_dia(family, t_max, steps, eps, t_min, richardson, sup_points, config, jobs)


def random_probes(d, count, seed=0):
    rng = np.random.default_rng(seed)
    return [random_density(rng, d) for _ in range(count)]


def save_witnesses(results, path):
    """
    Write the witnesses of every MeasureResult to an HDF5 file, one group per measure
    with 'primal' and 'dual' subgroups.
    """
    with h5py.File(path, 'w') as f:
        for name, res in results.items():
            group = f.create_group(name)
            group.attrs['value'] = res.value
            group.attrs['gap'] = res.gap
            group.attrs['status'] = res.status.value
            for side, witness in (('primal', res.primal_witness), ('dual', res.dual_witness)):
                sub = group.create_group(side)
                for key, value in witness.items():
                    sub.create_dataset(key, data=np.asarray(jnp.asarray(value)))
