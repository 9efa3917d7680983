"""
Constructors for the built-in maps: channels, their inverses, positive-but-not-CP maps
and seeded random maps.
"""
import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np

from typing import Callable, Dict, NamedTuple

from ..exceptions import DomainError, InputError
from ..linalg import omega_projector, positive_negative_parts, random_unitary, swap
from .maps import LinearMapRep, from_choi, from_function, from_kraus, complete_to_tp, _trusted

# |S_jk| below this makes the dephasing inverse undefined
SCHUR_FLOOR = 1e-12


def _check_unit_interval(name, value, closed=False):
    ok = 0.0 <= value <= 1.0 if closed else 0.0 <= value < 1.0
    if not ok:
        raise DomainError("{} = {} outside {}".format(name, value, '[0, 1]' if closed else '[0, 1)'))


def _check_dim(d):
    if int(d) != d or d < 1:
        raise DomainError("dimension must be a positive integer, got {}".format(d))
    return int(d)


def identity(d=2):
    d = _check_dim(d)
    return _trusted(omega_projector(d), d, d)


def completely_depolarizing(d=2):
    d = _check_dim(d)
    return _trusted(jnp.eye(d * d, dtype=jnp.complex128) / d, d, d)


def depolarizing(p, d=2):
    """X -> (1 - p) X + p Tr(X) 1/d."""
    d = _check_dim(d)
    _check_unit_interval('p', p, closed=True)
    j = (1.0 - p) * omega_projector(d) + p * jnp.eye(d * d) / d
    return _trusted(j, d, d)


def depolarizing_inverse(p, d=2):
    d = _check_dim(d)
    _check_unit_interval('p', p)
    j = omega_projector(d) / (1.0 - p) - p / ((1.0 - p) * d) * jnp.eye(d * d)
    return _trusted(j, d, d)


def schur_multiplier_map(s):
    """X -> X o S (entrywise product); Choi sum_jk S_jk |jj><kk|."""
    s = np.asarray(s, dtype=np.complex128)
    d = s.shape[0]
    j = np.zeros((d, d, d, d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            j[a, a, b, b] = s[a, b]
    return from_choi(j.reshape(d * d, d * d), d, d, tol=1e-10)


def dephasing_multiplier(p):
    """Circulant Schur multiplier S_jk = sum_i p_i w^(i(j-k)) of the clock-operator dephasing channel."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size < 2:
        raise DomainError("dephasing needs a probability vector of length >= 2")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("dephasing weights {} are not a probability vector".format(p.tolist()))
    d = p.size
    idx = np.arange(d)
    omega = np.exp(2j * np.pi / d)
    diff = idx[:, None] - idx[None, :]
    return np.einsum('i,ijk->jk', p, omega ** (idx[:, None, None] * diff[None, :, :]))


def dephasing_general(p):
    return schur_multiplier_map(dephasing_multiplier(p))


def dephasing_general_inverse(p):
    s = dephasing_multiplier(p)
    if np.min(np.abs(s)) < SCHUR_FLOOR:
        raise DomainError("dephasing multiplier has a zero coefficient, the channel is not invertible")
    return schur_multiplier_map(1.0 / s)


def dephasing(p):
    """Qubit dephasing X -> (1 - p) X + p Z X Z."""
    _check_unit_interval('p', p, closed=True)
    return dephasing_general([1.0 - p, p])


def dephasing_inverse(p):
    _check_unit_interval('p', p, closed=True)
    return dephasing_general_inverse([1.0 - p, p])


def dephasing_inverse_decomposition(p):
    """
    Split the inverse dephasing multiplier S^-1 = S_+ - S_- into two CPTP dephasing-type maps,
    Delta^-1 = c_+ L_+ - c_- L_- with c_+ + c_- = ||S^-1||_1 / d.
    """
    s_bar = 1.0 / dephasing_multiplier(p)
    d = s_bar.shape[0]
    s_plus, s_minus = (np.asarray(x) for x in positive_negative_parts(s_bar))
    parts = []
    for s_part in (s_plus, s_minus):
        c = float(np.real(np.trace(s_part))) / d
        parts.append((c, schur_multiplier_map(s_part / c) if c > SCHUR_FLOOR else identity(d)))
    (c_plus, m_plus), (c_minus, m_minus) = parts
    return c_plus, m_plus, c_minus, m_minus


def amplitude_damping(gamma):
    _check_unit_interval('gamma', gamma, closed=True)
    a0 = jnp.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]])
    a1 = jnp.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return from_kraus([a0, a1])


def amplitude_damping_inverse(gamma):
    _check_unit_interval('gamma', gamma)
    r = 1.0 / (1.0 - gamma)
    c = 1.0 / np.sqrt(1.0 - gamma)

    def action(x):
        return jnp.array([[x[0, 0] - gamma * r * x[1, 1], c * x[0, 1]],
                          [c * x[1, 0], r * x[1, 1]]])
    return from_function(action, 2, 2)


def leakage(p):
    """Excited state lost with probability p: Kraus L_p = diag(1, sqrt(1 - p))."""
    _check_unit_interval('p', p, closed=True)
    return from_kraus([jnp.diag(jnp.array([1.0, np.sqrt(1.0 - p)]))])


def leakage_inverse(p):
    _check_unit_interval('p', p)
    return from_kraus([jnp.diag(jnp.array([1.0, 1.0 / np.sqrt(1.0 - p)]))])


def leakage_inverse_decomposition(p):
    """Coefficients and maps of L_p^-1 = a id - b Z.Z + c Pi_1.Pi_1."""
    _check_unit_interval('p', p)
    r = 1.0 / np.sqrt(1.0 - p)
    z = jnp.diag(jnp.array([1.0, -1.0]))
    pi1 = jnp.diag(jnp.array([0.0, 1.0]))
    return [(0.5 * (1.0 + r), identity(2)),
            (-0.5 * (r - 1.0), from_kraus([z])),
            (p / (1.0 - p), from_kraus([pi1]))]


def transpose_map(d=2):
    d = _check_dim(d)
    return _trusted(swap(d), d, d)


def choi_map(normalized=True):
    """
    Choi's indecomposable positive map on 3x3 matrices,
    X -> [[X11+X22, -X12, -X13], [-X21, X22+X33, -X23], [-X31, -X32, X33+X11]].
    It doubles the trace; normalized=True returns half of it, which is trace preserving.
    """
    factor = 0.5 if normalized else 1.0

    def action(x):
        diag = jnp.array([x[0, 0] + x[1, 1], x[1, 1] + x[2, 2], x[2, 2] + x[0, 0]])
        off = -(x - jnp.diag(jnp.diag(x)))
        return factor * (off + jnp.diag(diag))
    return from_function(action, 3, 3)


def extreme_disparity():
    """X -> <0|X|0> |0><0| - <1|X|1> |1><1|."""
    j = np.zeros((4, 4), dtype=np.complex128)
    j[0, 0] = 1.0
    j[3, 3] = -1.0
    return _trusted(j, 2, 2)


def unitary(seed=0, d=2):
    d = _check_dim(d)
    return from_kraus([random_unitary(np.random.default_rng(seed), d)])


def _gaussian_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def random_hp_map(seed=0, d=2):
    """Hermitian Choi operator with Gaussian entries and no further structure."""
    d = _check_dim(d)
    return _trusted(_gaussian_hermitian(np.random.default_rng(seed), d * d), d, d)


def random_tp_map(seed=0, d=2):
    return complete_to_tp(random_hp_map(seed, d))


def random_cp_map(seed=0, d=2):
    d = _check_dim(d)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    return _trusted(g @ g.conj().T / (d * d), d, d)


def random_channel(seed=0, d=2):
    """Random CPTP map: a Ginibre Choi operator normalized by (Tr_B J)^(-1/2) on the input."""
    m = random_cp_map(seed, d)
    j = np.asarray(m.choi)
    tr_b = np.einsum('ibjb->ij', j.reshape(d, d, d, d))
    evals, evecs = np.linalg.eigh(tr_b)
    k = np.kron((evecs / np.sqrt(evals)) @ evecs.conj().T, np.eye(d))
    return _trusted(k @ j @ k.conj().T, d, d)


def preparation(y):
    """Map with trivial input (d_in = 1) preparing the Hermitian operator diag(y)."""
    y = np.asarray(y, dtype=float).reshape(-1)
    return _trusted(np.diag(y).astype(np.complex128), 1, y.size)


class Builtin(NamedTuple):
    constructor: Callable[..., LinearMapRep]
    params: Dict[str, type]


# list-valued parameters are marked with `list`
BUILTINS = {
    'identity': Builtin(identity, {'d': int}),
    'completely_depolarizing': Builtin(completely_depolarizing, {'d': int}),
    'depolarizing': Builtin(depolarizing, {'p': float, 'd': int}),
    'depolarizing_inverse': Builtin(depolarizing_inverse, {'p': float, 'd': int}),
    'dephasing': Builtin(dephasing, {'p': float}),
    'dephasing_inverse': Builtin(dephasing_inverse, {'p': float}),
    'dephasing_general': Builtin(dephasing_general, {'p': list}),
    'dephasing_general_inverse': Builtin(dephasing_general_inverse, {'p': list}),
    'amplitude_damping': Builtin(amplitude_damping, {'gamma': float}),
    'amplitude_damping_inverse': Builtin(amplitude_damping_inverse, {'gamma': float}),
    'leakage': Builtin(leakage, {'p': float}),
    'leakage_inverse': Builtin(leakage_inverse, {'p': float}),
    'transpose_map': Builtin(transpose_map, {'d': int}),
    'choi_map': Builtin(choi_map, {'normalized': int}),
    'extreme_disparity': Builtin(extreme_disparity, {}),
    'unitary': Builtin(unitary, {'seed': int, 'd': int}),
    'random_tp_map': Builtin(random_tp_map, {'seed': int, 'd': int}),
    'random_channel': Builtin(random_channel, {'seed': int, 'd': int}),
    'random_cp_map': Builtin(random_cp_map, {'seed': int, 'd': int}),
    'random_hp_map': Builtin(random_hp_map, {'seed': int, 'd': int}),
    'preparation': Builtin(preparation, {'y': list}),
}

ALIASES = {'transpose': 'transpose_map', 'id': 'identity'}


def builtin(name, **params):
    """
    Construct a built-in map by name with keyword parameters. Unknown names and
    unknown parameters are rejected.
    """
    name = ALIASES.get(name, name)
    if name not in BUILTINS:
        raise InputError("unknown builtin map {!r}; known: {}".format(name, ', '.join(sorted(BUILTINS))))
    entry = BUILTINS[name]
    unknown = set(params) - set(entry.params)
    if unknown:
        raise InputError("unknown parameter(s) {} for builtin {!r}".format(sorted(unknown), name))
    try:
        return entry.constructor(**params)
    except TypeError as exc:
        raise InputError("bad parameters for builtin {!r}: {}".format(name, exc)) from exc
