import numpy as np
from scipy.integrate import trapezoid

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..channels import compose, inverse, is_cp, output_trace
from ..exceptions import DomainError
from ..linalg import operator_norm
from ..measures import diamond_norm
from ..sdp import SolverConfig

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-4
# Propagators with lambda_min(J) above -CP_TOL use the CP equality instead of an SDP
CP_TOL = 1e-10
G_FLOOR = -1e-6


@dataclass
class DivisibilityReport:
    family: str
    params: Dict[str, float]
    times: np.ndarray
    g: np.ndarray
    integral: float
    cp_divisible: List[bool]
    eps: float
    richardson: bool = False
    sup: Optional[Tuple[float, Tuple[float, float]]] = None
    analytic_integral: Optional[float] = None
    analytic_g: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def markovian(self):
        return all(self.cp_divisible)

    def to_dict(self):
        out = {'family': self.family, 'params': self.params, 'times': self.times, 'g': self.g,
               'integral': self.integral, 'cp_divisible': self.cp_divisible, 'markovian': self.markovian,
               'eps': self.eps, 'richardson': self.richardson}
        if self.sup is not None:
            value, (s, t) = self.sup
            out['sup'] = {'value': value, 's': s, 't': t}
        if self.analytic_integral is not None:
            out['analytic_integral'] = self.analytic_integral
            out['relative_error'] = abs(self.integral - self.analytic_integral) / max(1e-12, abs(self.analytic_integral))
        if self.analytic_g is not None:
            out['analytic_g'] = self.analytic_g
        return out


def propagator(f, s, t):
    """Xi_(t,s) = Lambda_(t,0) o Lambda_(s,0)^-1."""
    if not 0.0 <= s <= t:
        raise DomainError("propagator needs 0 <= s <= t, got s = {}, t = {}".format(s, t))
    return compose(f(t), inverse(f(s)))


def propagator_norm(xi, config=None):
    """Diamond norm of a propagator; CP propagators use ||Tr_B J||_inf."""
    if is_cp(xi, tol=CP_TOL):
        return operator_norm(output_trace(xi))
    return diamond_norm(xi, config).value


def _forward_difference(f, t, eps, config):
    return (propagator_norm(propagator(f, t, t + eps), config) - 1.0) / eps


def g_dia(f, t, eps=DEFAULT_EPS, richardson=False, config=None):
    """
    Right-hand derivative of the diamond norm of the propagator,
    (||Lambda_(t+eps,0) o Lambda_(t,0)^-1||_diamond - 1) / eps.

    With `richardson` the first-order bias is removed by combining eps and eps/2.
    """
    if eps <= 0:
        raise DomainError("eps must be positive, got {}".format(eps))
    coarse = _forward_difference(f, t, eps, config)
    if not richardson:
        return coarse
    fine = _forward_difference(f, t, eps / 2.0, config)
    return 2.0 * fine - coarse


def sup_dia(f, times, config=None):
    """max over grid pairs s < t of ||Xi_(t,s)||_diamond and the pair attaining it."""
    times = np.asarray(times, dtype=float)
    best, pair = 1.0, (float(times[0]), float(times[0]))
    for i, s in enumerate(times):
        for t in times[i + 1:]:
            value = propagator_norm(propagator(f, s, t), config)
            if value > best:
                best, pair = value, (float(s), float(t))
    return best, pair


def i_dia(f, t_max, steps, eps=DEFAULT_EPS, t_min=0.0, richardson=False, sup_points=0, config=None, jobs=1):
    """
    Total non-Markovianity: trapezoidal integral of g_dia over a uniform grid of
    steps + 1 points on [t_min, t_max].

    Parameters
    ----------
    f : ChannelFamily
    t_max : float
    steps : int
        Number of grid intervals, at least 2.
    eps : float
        Finite-difference step.
    t_min : float
        Start of the window.
    richardson : bool
        Richardson-extrapolate every g value.
    sup_points : int
        When >= 2, also report the sup of the propagator norm over a grid of this many points.
    config : SolverConfig, optional
    jobs : int
        Grid points evaluated concurrently.

    Returns
    -------
    DivisibilityReport
    """
    if steps < 2:
        raise DomainError("steps must be at least 2, got {}".format(steps))
    if not 0.0 <= t_min < t_max:
        raise DomainError("need 0 <= t_min < t_max, got [{}, {}]".format(t_min, t_max))
    config = config or SolverConfig()
    times = np.linspace(t_min, t_max, steps + 1)
    # fail fast on the guard before any solve
    for t in times:
        f.check(t)
    f.check(t_max + eps)

    def point(t):
        return g_dia(f, t, eps, richardson, config)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            g = np.array(list(pool.map(point, times)))
    else:
        g = np.array([point(t) for t in times])
    if np.min(g) < G_FLOOR:
        logger.warning("%s: g reaches %.3e below zero", f.name, float(np.min(g)))
    integral = float(trapezoid(g, times))
    flags = [is_cp(propagator(f, s, t), tol=CP_TOL) for s, t in zip(times[:-1], times[1:])]
    logger.info("%s on [%g, %g]: I = %.8g from %d points, %d non-CP intervals",
                f.name, t_min, t_max, integral, len(times), flags.count(False))

    report = DivisibilityReport(f.name, dict(f.params), times, g, integral, flags, eps, richardson)
    if sup_points >= 2:
        report.sup = sup_dia(f, np.linspace(t_min, t_max, sup_points), config)
    if f.analytic_integral is not None:
        report.analytic_integral = f.analytic_integral(t_min, t_max)
        report.analytic_g = np.array([f.analytic_g(t) for t in times])
    return report
