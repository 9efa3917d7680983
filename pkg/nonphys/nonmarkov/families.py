"""
Parameterized channel families t -> Lambda_(t,0) used by the divisibility measures.
"""
import numpy as np

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

from ..channels.io import parse_query
from ..channels.library import depolarizing, dephasing, _check_dim
from ..channels.maps import LinearMapRep
from ..exceptions import DomainError, InputError

logger = logging.getLogger(__name__)

Q_FLOOR = 0.05


@dataclass(frozen=True, eq=False)
class ChannelFamily:
    """
    A one-parameter family of channels Lambda_(t,0) on [0, t_max].

    `guard(t)` returns None when Lambda_(t,0) may be evaluated (and inverted) and an
    explanation otherwise. The optional analytic helpers give g(t) and its integral in
    closed form.
    """
    name: str
    evaluator: Callable[[float], LinearMapRep]
    params: Dict[str, float] = field(default_factory=dict)
    t_max: float = np.inf
    guard: Optional[Callable[[float], Optional[str]]] = None
    analytic_g: Optional[Callable[[float], float]] = None
    analytic_integral: Optional[Callable[[float, float], float]] = None

    def check(self, t):
        if not 0.0 <= t <= self.t_max:
            raise DomainError("{}: t = {} outside [0, {}]".format(self.name, t, self.t_max))
        if self.guard is not None:
            reason = self.guard(t)
            if reason is not None:
                raise DomainError("{}: {}".format(self.name, reason))

    def __call__(self, t):
        t = float(t)
        self.check(t)
        return self.evaluator(t)


def depolarizing_semigroup(gamma=1.0, d=2):
    """Lambda_(t,0) = D_p(t) with p(t) = 1 - exp(-gamma t); CP-divisible for gamma >= 0."""
    d = _check_dim(d)
    if gamma < 0:
        raise DomainError("gamma must be nonnegative, got {}".format(gamma))

    def evaluator(t):
        return depolarizing(1.0 - np.exp(-gamma * t), d)

    return ChannelFamily('depolarizing_semigroup', evaluator, {'gamma': float(gamma), 'd': d},
                         analytic_g=lambda t: 0.0, analytic_integral=lambda a, b: 0.0)


class OscillatoryDephasing:
    """
    Qubit dephasing with Schur multiplier q(t) = exp(-Gamma t) cos(omega t), so that
    Lambda_(t,0) is dephasing with p(t) = (1 - q(t))/2.

    The propagator Lambda_(t,0) o Lambda_(s,0)^-1 is dephasing with multiplier q(t)/q(s)
    and diamond norm max(1, |q(t)/q(s)|), which gives
    g(t) = max(0, -Gamma - omega tan(omega t)).
    """

    def __init__(self, Gamma=0.2, omega=2.0, q_floor=Q_FLOOR):
        if Gamma < 0:
            raise DomainError("Gamma must be nonnegative, got {}".format(Gamma))
        if not 0.0 < q_floor < 1.0:
            raise DomainError("q_floor must lie in (0, 1), got {}".format(q_floor))
        self.Gamma = float(Gamma)
        self.omega = float(omega)
        self.q_floor = float(q_floor)

    def q(self, t):
        return float(np.exp(-self.Gamma * t) * np.cos(self.omega * t))

    def guard(self, t):
        q = self.q(t)
        if abs(q) <= self.q_floor:
            return "q_floor guard: |q({:.6g})| = {:.3g} is not above q_floor = {:.3g}".format(t, abs(q), self.q_floor)
        return None

    def evaluate(self, t):
        return dephasing((1.0 - self.q(t)) / 2.0)

    def analytic_g(self, t):
        return max(0.0, -self.Gamma - self.omega * np.tan(self.omega * t))

    def _critical_points(self, t_min, t_max):
        # stationary points of ln|q|: tan(omega t) = -Gamma/omega
        if self.omega == 0.0:
            return []
        phase = np.arctan(self.Gamma / abs(self.omega))
        step = np.pi / abs(self.omega)
        k_lo = int(np.floor((t_min * abs(self.omega) + phase) / np.pi))
        out = []
        for k in range(k_lo, k_lo + int((t_max - t_min) / step) + 3):
            t = (k * np.pi - phase) / abs(self.omega)
            if t_min < t < t_max:
                out.append(t)
        return out

    def analytic_integral(self, t_min, t_max):
        """Integral of g over [t_min, t_max], the sum of the increases of ln|q|."""
        for t in np.linspace(t_min, t_max, 257):
            reason = self.guard(t)
            if reason is not None:
                raise DomainError("oscillatory_dephasing: window crosses the {}".format(reason))
        points = [t_min] + self._critical_points(t_min, t_max) + [t_max]
        logs = [np.log(abs(self.q(t))) for t in points]
        return float(sum(max(0.0, b - a) for a, b in zip(logs[:-1], logs[1:])))

    def family(self):
        return ChannelFamily('oscillatory_dephasing', self.evaluate,
                             {'Gamma': self.Gamma, 'omega': self.omega, 'q_floor': self.q_floor},
                             guard=self.guard, analytic_g=self.analytic_g,
                             analytic_integral=self.analytic_integral)


def oscillatory_dephasing(Gamma=0.2, omega=2.0, q_floor=Q_FLOOR):
    return OscillatoryDephasing(Gamma, omega, q_floor).family()


FAMILIES = {
    'depolarizing_semigroup': (depolarizing_semigroup, {'gamma': float, 'd': int}),
    'oscillatory_dephasing': (oscillatory_dephasing, {'Gamma': float, 'omega': float, 'q_floor': float}),
}


def builtin_family(name, **params):
    if name not in FAMILIES:
        raise InputError("unknown channel family {!r}; known: {}".format(name, ', '.join(sorted(FAMILIES))))
    constructor, known = FAMILIES[name]
    unknown = set(params) - set(known)
    if unknown:
        raise InputError("unknown parameter(s) {} for family {!r}".format(sorted(unknown), name))
    return constructor(**{k: known[k](v) for k, v in params.items()})


def parse_family(text):
    """A family mini-spec '<name>?k=v&k=v', e.g. 'oscillatory_dephasing?Gamma=0.2&omega=2'."""
    name, _, query = text.partition('?')
    name = name.strip()
    if name not in FAMILIES:
        raise InputError("unknown channel family {!r}; known: {}".format(name, ', '.join(sorted(FAMILIES))))
    return builtin_family(name, **parse_query(name, query, FAMILIES[name][1]))
