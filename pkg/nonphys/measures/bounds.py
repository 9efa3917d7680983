import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np
from scipy.optimize import minimize

import logging
from dataclasses import dataclass, field
from typing import Dict, List

from ..channels import apply, compose, pseudo_inverse
from ..exceptions import DimensionError, DomainError
from ..linalg import (lambda_max, lambda_min, operator_norm, partial_trace, positive_negative_parts,
                      positive_part_trace, tomographic_states, trace_norm)

logger = logging.getLogger(__name__)

QUANTITIES = ('diamond', 'cptni', 'R', 'Rprime', 'Rdoubleprime')
SANDWICH_TOL = 1e-7
# Largest ||forward(Z) - sigma||_1 accepted for a pseudo-inverse preimage
PREIMAGE_TOL = 1e-8


@dataclass(frozen=True)
class Bound:
    quantity: str
    kind: str
    value: float
    source: str


@dataclass
class BoundsReport:
    bounds: List[Bound] = field(default_factory=list)
    sdp_values: Dict[str, float] = field(default_factory=dict)

    def add(self, quantity, kind, value, source):
        self.bounds.append(Bound(quantity, kind, float(value), source))

    def extend(self, other):
        self.bounds.extend(other.bounds)
        self.sdp_values.update(other.sdp_values)
        return self

    def lower(self, quantity):
        vals = [b.value for b in self.bounds if b.quantity == quantity and b.kind == 'lower']
        return max(vals) if vals else None

    def upper(self, quantity):
        vals = [b.value for b in self.bounds if b.quantity == quantity and b.kind == 'upper']
        return min(vals) if vals else None

    def violations(self, tol=SANDWICH_TOL):
        """Pairs (quantity, lower, upper) where a lower bound exceeds an upper bound or the SDP value."""
        out = []
        for q in QUANTITIES:
            lo, up = self.lower(q), self.upper(q)
            sdp = self.sdp_values.get(q)
            if lo is not None and up is not None and lo > up + tol * max(1.0, abs(up)):
                out.append((q, lo, up))
            if sdp is not None and lo is not None and lo > sdp + tol * max(1.0, abs(sdp)):
                out.append((q, lo, sdp))
            if sdp is not None and up is not None and sdp > up + tol * max(1.0, abs(up)):
                out.append((q, sdp, up))
        return out

    @property
    def consistent(self):
        return not self.violations()

    def to_dict(self):
        summary = {}
        for q in QUANTITIES:
            entry = {'lower': self.lower(q), 'upper': self.upper(q)}
            if q in self.sdp_values:
                entry['sdp'] = self.sdp_values[q]
            if entry['lower'] is not None or entry['upper'] is not None:
                summary[q] = entry
        return {'summary': summary, 'consistent': self.consistent,
                'bounds': [b.__dict__ for b in self.bounds]}


def bounds_trace_norm(m):
    """Bounds from the trace norm and the positive/negative parts of J."""
    j = m.choi
    dA = m.d_in
    norm1 = trace_norm(j)
    tp, tm = positive_part_trace(j)
    rep = BoundsReport()
    src = 'trace_norm'
    rep.add('diamond', 'upper', norm1, src)
    rep.add('diamond', 'lower', norm1 / dA, src)
    rep.add('cptni', 'upper', norm1, src)
    rep.add('cptni', 'lower', norm1 / dA, src)
    rep.add('R', 'upper', max(tp - 1.0, tm), src)
    rep.add('R', 'lower', max(tp / dA - 1.0, tm / dA), src)
    rep.add('Rprime', 'upper', tp - 1.0, src)
    rep.add('Rprime', 'lower', tp / dA - 1.0, src)
    rep.add('Rdoubleprime', 'upper', tm, src)
    rep.add('Rdoubleprime', 'lower', tm / dA, src)
    return rep


def bounds_upper(m):
    """Upper bounds from the largest eigenvalues of Tr_B J_+ and Tr_B J_-."""
    j_plus, j_minus = positive_negative_parts(m.choi)
    a = lambda_max(partial_trace(j_plus, m.d_in, m.d_out))
    b = lambda_max(partial_trace(j_minus, m.d_in, m.d_out))
    ab = lambda_max(partial_trace(j_plus + j_minus, m.d_in, m.d_out))
    rep = BoundsReport()
    src = 'reduced_parts'
    rep.add('diamond', 'upper', ab, src)
    rep.add('cptni', 'upper', a + b, src)
    rep.add('R', 'upper', max(a - 1.0, b), src)
    rep.add('Rprime', 'upper', a - 1.0, src)
    rep.add('Rdoubleprime', 'upper', b, src)
    return rep


def default_probes(d):
    """Computational basis states, the maximally mixed state and the uniform superposition."""
    probes = [np.outer(e, e).astype(np.complex128) for e in np.eye(d)]
    probes.append(np.eye(d, dtype=np.complex128) / d)
    v = np.ones(d) / np.sqrt(d)
    probes.append(np.outer(v, v).astype(np.complex128))
    return probes


def _check_probes(probes, d):
    out = []
    for rho in probes:
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (d, d):
            raise DimensionError("probe of shape {} for dimension {}".format(rho.shape, d))
        out.append(rho)
    return out


def bounds_lower(m, probes=None):
    """
    Lower bounds from output operators Phi(rho) over a probe set, plus the closed forms
    in the eigenvalues of Tr_B J (the probe-free optimum of the trace parts).
    """
    probes = default_probes(m.d_in) + _check_probes(probes or [], m.d_in)
    norm1, pos, neg = [], [], []
    for rho in probes:
        out = apply(m, rho)
        norm1.append(trace_norm(out))
        p, n = positive_part_trace(out)
        pos.append(p)
        neg.append(n)
    rep = BoundsReport()
    src = 'probes'
    rep.add('diamond', 'lower', max(norm1), src)
    rep.add('cptni', 'lower', max(neg) + max(pos), src)
    rep.add('R', 'lower', max(max(neg), max(pos) - 1.0), src)
    rep.add('Rprime', 'lower', max(pos) - 1.0, src)
    rep.add('Rdoubleprime', 'lower', max(neg), src)

    red = partial_trace(m.choi, m.d_in, m.d_out)
    hi, lo = lambda_max(red), lambda_min(red)
    src = 'reduced_spectrum'
    rep.add('diamond', 'lower', operator_norm(red), src)
    rep.add('cptni', 'lower', max(hi, 0.0) + max(-lo, 0.0), src)
    rep.add('R', 'lower', max(max(-lo, 0.0), hi - 1.0), src)
    rep.add('Rprime', 'lower', hi - 1.0, src)
    rep.add('Rdoubleprime', 'lower', max(-lo, 0.0), src)
    return rep


def inversion_error(forward, candidate):
    """max over a tomographically complete state set of ||candidate(forward(rho)) - rho||_1."""
    loop = compose(candidate, forward)
    return max(trace_norm(apply(loop, rho) - rho) for rho in tomographic_states(forward.d_in))


def approx_inverse_bounds(forward, candidate, eps, probes=None):
    """
    Lower bounds on the measures of a map `candidate` that inverts `forward` up to eps.

    For each output density operator sigma of `forward` with an exact preimage
    Z = forward^+(sigma), candidate(sigma) is within eps ||Z||_1 of Z, which bounds
    ||candidate||_diamond >= ||Z||_1 (1 - eps) and the analogous trace-part bounds.
    """
    if (candidate.d_in, candidate.d_out) != (forward.d_out, forward.d_in):
        raise DimensionError("candidate must map {} -> {}".format(forward.d_out, forward.d_in))
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    observed = inversion_error(forward, candidate)
    if eps < observed - 1e-9:
        raise DomainError("eps = {:.3e} is smaller than the observed inversion error {:.3e}".format(eps, observed))
    pinv = pseudo_inverse(forward)
    d = forward.d_out
    probes = default_probes(d) + _check_probes(probes or [], d)
    norm1, neg, pos = [], [], []
    used = 0
    for sigma in probes:
        z = apply(pinv, sigma)
        if trace_norm(apply(forward, z) - sigma) > PREIMAGE_TOL:
            continue
        used += 1
        zn = trace_norm(z)
        zp, zm = positive_part_trace(z)
        norm1.append(zn * (1.0 - eps))
        neg.append(zm - eps * zn)
        pos.append(zp - eps * zn)
    rep = BoundsReport()
    if not used:
        logger.warning("no probe state has an exact preimage under the forward map")
        return rep
    logger.debug("approximate-inverse bounds from %d of %d probes", used, len(probes))
    src = 'approx_inverse'
    rep.add('diamond', 'lower', max(norm1), src)
    rep.add('cptni', 'lower', max(neg) + max(pos), src)
    rep.add('R', 'lower', max(max(neg), max(pos) - 1.0), src)
    rep.add('Rprime', 'lower', max(pos) - 1.0, src)
    rep.add('Rdoubleprime', 'lower', max(neg), src)
    return rep


@jax.jit
def _bloch_values(j, vectors):
    """||sqrt(rho (x) 1) J sqrt(rho (x) 1)||_1 for qubit states with Bloch vectors `vectors`."""
    dB = j.shape[0] // 2
    paulis = jnp.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=jnp.complex128)

    def value(v):
        r = jnp.minimum(jnp.linalg.norm(v), 1.0)
        n_sigma = jnp.einsum('k,kab->ab', v / jnp.maximum(jnp.linalg.norm(v), 1e-300), paulis)
        a = 0.5 * (jnp.sqrt((1 + r) / 2) + jnp.sqrt((1 - r) / 2))
        b = 0.5 * (jnp.sqrt((1 + r) / 2) - jnp.sqrt((1 - r) / 2))
        sqrt_rho = a * jnp.eye(2) + b * n_sigma
        k = jnp.kron(sqrt_rho, jnp.eye(dB))
        x = k @ j @ k
        return jnp.sum(jnp.abs(jnp.linalg.eigvalsh(0.5 * (x + x.conj().T))))
    return jax.vmap(value)(jnp.asarray(vectors, dtype=jnp.float64))


def bloch_oracle(m, n_theta=60, n_phi=120, n_radius=11, refine=True):
    """
    Brute-force diamond norm of a qubit-input map, max over the Bloch ball of
    ||sqrt(rho (x) 1) J sqrt(rho (x) 1)||_1, on a grid and then polished by Nelder-Mead.
    """
    if m.d_in != 2:
        raise DimensionError("the Bloch oracle needs a qubit input")
    j = jnp.asarray(m.choi)
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    radius = np.linspace(0.0, 1.0, n_radius)
    t, p, r = np.meshgrid(theta, phi, radius, indexing='ij')
    vectors = np.stack([r * np.sin(t) * np.cos(p), r * np.sin(t) * np.sin(p), r * np.cos(t)], axis=-1).reshape(-1, 3)
    values = np.asarray(_bloch_values(j, vectors))
    best = int(np.argmax(values))
    value = float(values[best])
    if refine:
        def objective(v):
            v = v / max(1.0, np.linalg.norm(v))
            return -float(_bloch_values(j, v[None, :])[0])
        res = minimize(objective, vectors[best], method='Nelder-Mead',
                       options={'xatol': 1e-10, 'fatol': 1e-12, 'maxiter': 4000})
        value = max(value, -float(res.fun))
    return value
