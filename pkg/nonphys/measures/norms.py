import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..channels import difference, inverse
from ..exceptions import SolverError
from ..sdp import SolverConfig, Status, solve, verify_certificate
from .programs import PROGRAMS

logger = logging.getLogger(__name__)

WITNESS_TOL = 1e-7
CROSS_CHECK_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class MeasureResult:
    """
    Value of one measure with the optimal points of its primal and dual programs.
    """
    measure: str
    value: float
    primal_value: float
    dual_value: float
    gap: float
    status: Status
    primal_witness: Dict[str, object] = field(default_factory=dict)
    dual_witness: Dict[str, object] = field(default_factory=dict)
    iterations: int = 0
    certificates: Optional[List[dict]] = None

    def to_dict(self, witnesses=False):
        out = {'measure': self.measure, 'value': self.value, 'primal_value': self.primal_value,
               'dual_value': self.dual_value, 'gap': self.gap, 'status': self.status.value,
               'iterations': self.iterations}
        if self.certificates is not None:
            out['certificates'] = self.certificates
        if witnesses:
            out['witnesses'] = {'primal': self.primal_witness, 'dual': self.dual_witness}
        return out


def _psd_violation(h, scale):
    h = np.asarray(h)
    return max(0.0, -float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])) / scale


def _lift(x, dB):
    return np.kron(np.asarray(x), np.eye(dB))


def _reduced(x, dA, dB):
    return np.einsum('ibjb->ij', np.asarray(x).reshape(dA, dB, dA, dB))


def _inner(a, b):
    return float(np.real(np.vdot(np.asarray(a), np.asarray(b))))


def _primal_witness(name, m, pv):
    """
    Named primal witness, the PSD conditions it must satisfy, the equality residual
    and its objective value.
    """
    dA, dB = m.d_in, m.d_out
    j = np.asarray(m.choi)
    eye = np.eye(dA)
    if name in ('diamond', 'cptni', 'R'):
        mp, mm = pv['M+'], pv['M-']
        residual = np.max(np.abs(mp - mm - j))
        tp, tm = _reduced(mp, dA, dB), _reduced(mm, dA, dB)
        if name == 'diamond':
            mu = float(pv['mu'][0])
            return {'M+': mp, 'M-': mm, 'mu': mu}, [mp, mm, mu * eye - tp - tm], residual, mu
        if name == 'cptni':
            lp, lm = float(pv['lambda+'][0]), float(pv['lambda-'][0])
            return ({'M+': mp, 'M-': mm, 'lambda+': lp, 'lambda-': lm},
                    [mp, mm, lp * eye - tp, lm * eye - tm], residual, lp + lm)
        lam = float(pv['lambda'][0])
        return ({'M+': mp, 'M-': mm, 'lambda': lam},
                [mp, mm, (1.0 + lam) * eye - tp, lam * eye - tm], residual, lam)
    mmat, nmat = pv['M'], pv['N']
    if name == 'Rprime':
        t = float(pv['t'][0])
        residual = max(np.max(np.abs(mmat - nmat - j)), np.max(np.abs(_reduced(mmat, dA, dB) - t * eye)))
        return {'M': mmat, 'lambda': t - 1.0}, [mmat, nmat], residual, t - 1.0
    lam = float(pv['lambda'][0])
    residual = max(np.max(np.abs(nmat - mmat - j)), np.max(np.abs(_reduced(mmat, dA, dB) - lam * eye)))
    return {'M': mmat, 'lambda': lam}, [mmat, nmat], residual, lam


def _dual_witness(name, m, dv):
    """Named dual witness, its PSD conditions, trace conditions and objective value."""
    dA, dB = m.d_in, m.d_out
    j = np.asarray(m.choi)
    if name == 'diamond':
        rho = dv['rho']
        w = dv['P'] - dv['Q']
        lifted = _lift(rho, dB)
        return ({'W': w, 'rho': rho}, [lifted + w, lifted - w, rho],
                [np.trace(rho).real - 1.0], _inner(j, w))
    if name == 'cptni':
        rho, sigma = dv['rho'], dv['sigma']
        w = dv['P'] - _lift(rho, dB)
        return ({'W': w, 'rho': rho, 'sigma': sigma},
                [w + _lift(rho, dB), _lift(sigma, dB) - w, rho, sigma],
                [np.trace(rho).real - 1.0, np.trace(sigma).real - 1.0], _inner(j, w))
    if name == 'R':
        x, y = dv['X'], dv['Y']
        w = dv['P'] - _lift(y, dB)
        return ({'W': w, 'X': x, 'Y': y}, [w + _lift(y, dB), _lift(x, dB) - w, x, y],
                [np.trace(x).real + np.trace(y).real - 1.0], _inner(j, w) - np.trace(x).real)
    rho, w = dv['rho'], dv['W']
    conditions = [w, _lift(rho, dB) - w, rho]
    traces = [np.trace(rho).real - 1.0]
    if name == 'Rprime':
        return {'W': w, 'rho': rho}, conditions, traces, _inner(j, w) - 1.0
    return {'W': w, 'rho': rho}, conditions, traces, _inner(j, w) - _inner(_reduced(j, dA, dB), rho)


def _check_witness(kind, name, conditions, equalities, claimed, value, scale):
    worst_psd = max((_psd_violation(c, scale) for c in conditions), default=0.0)
    worst_eq = max((abs(e) for e in equalities), default=0.0) / scale
    mismatch = abs(claimed - value) / max(1.0, abs(value))
    if max(worst_psd, worst_eq, mismatch) > WITNESS_TOL:
        logger.warning("%s %s witness failed: psd %.2e, equality %.2e, objective %.2e",
                       name, kind, worst_psd, worst_eq, mismatch)
        raise SolverError("{} {} witness is not feasible within {:.0e} (psd {:.2e}, equality {:.2e}, "
                          "objective {:.2e})".format(name, kind, WITNESS_TOL, worst_psd, worst_eq, mismatch))


def _solve_checked(program, sense, config, programs, certify):
    if programs is not None:
        programs.append(program)
    sol = solve(program, config)
    if sol.status != Status.OPTIMAL:
        raise SolverError("{} ended with status {}".format(program.name, sol.status.value), sol.status)
    cert = None
    if certify:
        report = verify_certificate(program, sol, tol=10 * max(config.feas_tol, config.gap_tol))
        cert = dict(report.to_dict(), program=program.name)
        if not report.passed:
            raise SolverError("{} failed certificate checks {}".format(program.name, report.failures()), sol.status)
    return sense * (sol.primal_objective), program.unpack(sol.x), sol, cert


def evaluate(name, m, config=None, programs=None, certify=False):
    """
    Solve the primal and dual programs of a measure, cross-check their values and
    independently check both witnesses before reporting.

    Parameters
    ----------
    name : str
        One of 'diamond', 'cptni', 'R', 'Rprime', 'Rdoubleprime'.
    m : LinearMapRep
    config : SolverConfig, optional
    programs : list, optional
        Every compiled ConeProgram is appended here (used for debug dumps).
    certify : bool
        Also run the from-scratch certificate check on both solutions.
    """
    config = config or SolverConfig()
    primal_fn, dual_fn = PROGRAMS[name]
    p_val, pv, p_sol, p_cert = _solve_checked(*primal_fn(m), config, programs, certify)
    d_val, dv, d_sol, d_cert = _solve_checked(*dual_fn(m), config, programs, certify)
    gap = abs(p_val - d_val) / max(1.0, abs(p_val))
    logger.info("%s: primal %.10g dual %.10g gap %.2e", name, p_val, d_val, gap)
    if gap > CROSS_CHECK_TOL:
        raise SolverError("{}: primal {:.10g} and dual {:.10g} disagree (gap {:.2e})".format(name, p_val, d_val, gap))
    scale = max(1.0, float(jnp.linalg.norm(m.choi)))
    primal_w, p_conditions, residual, p_claimed = _primal_witness(name, m, pv)
    _check_witness('primal', name, p_conditions, [residual], p_claimed, p_val, scale)
    dual_w, d_conditions, traces, d_claimed = _dual_witness(name, m, dv)
    _check_witness('dual', name, d_conditions, traces, d_claimed, d_val, scale)
    certs = [p_cert, d_cert] if certify else None
    return MeasureResult(name, p_val, p_val, d_val, gap, Status.OPTIMAL, primal_w, dual_w,
                         p_sol.iterations + d_sol.iterations, certs)


def diamond_norm(m, config=None, programs=None, certify=False):
    return evaluate('diamond', m, config, programs, certify)


def base_norm_cptni(m, config=None, programs=None, certify=False):
    return evaluate('cptni', m, config, programs, certify)


def robustness_R(m, config=None, programs=None, certify=False):
    return evaluate('R', m, config, programs, certify)


def robustness_Rprime(m, config=None, programs=None, certify=False):
    return evaluate('Rprime', m, config, programs, certify)


def robustness_Rdoubleprime(m, config=None, programs=None, certify=False):
    return evaluate('Rdoubleprime', m, config, programs, certify)


def derived(result, name, transform):
    """A MeasureResult for a quantity that is an affine function of another measure."""
    return dataclasses.replace(result, measure=name, value=transform(result.value),
                               primal_value=transform(result.primal_value),
                               dual_value=transform(result.dual_value))


def simulation_cost(m, config=None, programs=None):
    """Minimal ||X||_1 of an ancilla simulating the map with a CPTNI map, 2 R + 1."""
    return 2.0 * robustness_R(m, config, programs).value + 1.0


def simulation_cost_result(m, config=None, programs=None, certify=False):
    return derived(robustness_R(m, config, programs, certify), 'S', lambda r: 2.0 * r + 1.0)


def channel_distance(a, b, config=None, programs=None, certify=False):
    """Diamond distance ||a - b||_diamond; the difference of two channels annihilates the trace."""
    res = diamond_norm(difference(a, b), config, programs, certify)
    return dataclasses.replace(res, measure='channel_distance')


def mitigation_cost(forward, config=None, programs=None, certify=False):
    """
    Sampling overhead of undoing `forward` with quasi-probabilistic CPTP implementations,
    the CPTNI base norm of its inverse.
    """
    res = base_norm_cptni(inverse(forward), config, programs, certify)
    return dataclasses.replace(res, measure='mitigation_cost')
