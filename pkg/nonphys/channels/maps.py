import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np

import logging
from dataclasses import dataclass

from ..exceptions import DimensionError, SingularMapError
from ..linalg import (HERMITICITY_TOL, as_matrix, check_hermitian, hermitize, hermiticity_error,
                      lambda_min, partial_trace)

logger = logging.getLogger(__name__)

# Largest transfer-matrix condition number accepted by inverse()
CONDITION_LIMIT = 1e12
CLASSIFY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LinearMapRep:
    """
    Hermiticity-preserving linear map Phi: L(C^d_in) -> L(C^d_out), stored through its Choi
    operator J = sum_ij |i><j| (x) Phi(|i><j|) on A (x) B with row-major index a*d_out + b.
    """
    d_in: int
    d_out: int
    choi: jnp.ndarray

    @property
    def dim(self):
        return self.d_in * self.d_out

    def __repr__(self):
        return "LinearMapRep(d_in={}, d_out={})".format(self.d_in, self.d_out)


@dataclass(frozen=True)
class Classification:
    hermiticity_preserving: bool
    cp: bool
    tp: bool
    tni: bool
    proportional_tp: bool
    factor: float
    tol: float

    def to_dict(self):
        return dict(self.__dict__)


def from_choi(j, d_in, d_out, tol=HERMITICITY_TOL):
    """
    Wrap a Choi operator. Non-Hermitian input means the map does not preserve
    Hermiticity and is rejected.
    """
    if d_in < 1 or d_out < 1:
        raise DimensionError("dimensions must be positive, got ({}, {})".format(d_in, d_out))
    j = check_hermitian(j, tol, name='Choi operator')
    if j.shape[0] != d_in * d_out:
        raise DimensionError("Choi operator of size {} does not match d_in*d_out = {}".format(
            j.shape[0], d_in * d_out))
    return LinearMapRep(int(d_in), int(d_out), hermitize(j))


def _trusted(j, d_in, d_out):
    """Wrap an operator that is Hermitian up to rounding by construction."""
    return LinearMapRep(int(d_in), int(d_out), hermitize(j))


def from_kraus(kraus):
    """
    Choi operator sum_a (1 (x) K_a)|Omega><Omega|(1 (x) K_a)^dagger of a Kraus set.
    """
    kraus = [jnp.asarray(k, dtype=jnp.complex128) for k in kraus]
    if not kraus:
        raise DimensionError("empty Kraus set")
    shape = kraus[0].shape
    if len(shape) != 2 or any(k.shape != shape for k in kraus):
        raise DimensionError("Kraus operators must be matrices of one common shape")
    d_out, d_in = shape
    vecs = jnp.stack([k.T.reshape(-1) for k in kraus])
    j = jnp.einsum('ki,kj->ij', vecs, vecs.conj())
    return _trusted(j, d_in, d_out)


def from_function(fn, d_in, d_out):
    """Choi operator of a linear map given as a Python callable on d_in x d_in matrices."""
    j = jnp.zeros((d_in * d_out, d_in * d_out), dtype=jnp.complex128)
    for i in range(d_in):
        for k in range(d_in):
            e = jnp.zeros((d_in, d_in), dtype=jnp.complex128).at[i, k].set(1.0)
            out = jnp.asarray(fn(e), dtype=jnp.complex128)
            if out.shape != (d_out, d_out):
                raise DimensionError("map returned shape {}, expected {}".format(out.shape, (d_out, d_out)))
            j = j + jnp.kron(e, out)
    return from_choi(j, d_in, d_out, tol=1e-8)


def apply(m, x):
    """Phi(X) = Tr_A[(X^T (x) 1_B) J]."""
    x = as_matrix(x)
    if x.shape[0] != m.d_in:
        raise DimensionError("input of size {} for a map with d_in = {}".format(x.shape[0], m.d_in))
    j4 = m.choi.reshape(m.d_in, m.d_out, m.d_in, m.d_out)
    return jnp.einsum('ij,ibjc->bc', x, j4)


def output_trace(m):
    """Tr_B J, the operator on A with Tr Phi(X) = Tr(X^T Tr_B J)."""
    return partial_trace(m.choi, m.d_in, m.d_out, keep='A')


def to_transfer(m):
    """Transfer matrix with vec(Phi(X)) = T vec(X) for row-major vec: T[(a,b),(i,j)] = J[(i,a),(j,b)]."""
    j4 = m.choi.reshape(m.d_in, m.d_out, m.d_in, m.d_out)
    return j4.transpose(1, 3, 0, 2).reshape(m.d_out ** 2, m.d_in ** 2)


def from_transfer(t, d_in, d_out):
    t = jnp.asarray(t, dtype=jnp.complex128)
    if t.shape != (d_out ** 2, d_in ** 2):
        raise DimensionError("transfer matrix of shape {} does not match ({}, {})".format(t.shape, d_out ** 2, d_in ** 2))
    j = t.reshape(d_out, d_out, d_in, d_in).transpose(2, 0, 3, 1).reshape(d_in * d_out, d_in * d_out)
    return _trusted(j, d_in, d_out)


def compose(second, first):
    """second o first."""
    if first.d_out != second.d_in:
        raise DimensionError("cannot compose: first.d_out = {} but second.d_in = {}".format(first.d_out, second.d_in))
    t = to_transfer(second) @ to_transfer(first)
    return from_transfer(t, first.d_in, second.d_out)


def tensor(a, b):
    """a (x) b on (A1 A2) -> (B1 B2)."""
    j = jnp.kron(a.choi, b.choi)
    j = j.reshape(a.d_in, a.d_out, b.d_in, b.d_out, a.d_in, a.d_out, b.d_in, b.d_out)
    j = j.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    d_in, d_out = a.d_in * b.d_in, a.d_out * b.d_out
    return _trusted(j.reshape(d_in * d_out, d_in * d_out), d_in, d_out)


def inverse(m, condition_limit=CONDITION_LIMIT):
    """
    Two-sided inverse through the transfer matrix. Raises SingularMapError for
    non-square, singular or ill-conditioned maps.
    """
    if m.d_in != m.d_out:
        raise SingularMapError("map {} -> {} is not invertible".format(m.d_in, m.d_out))
    t = to_transfer(m)
    cond = float(jnp.linalg.cond(t))
    if not np.isfinite(cond) or cond > condition_limit:
        raise SingularMapError("transfer matrix condition number {:.3e} exceeds {:.1e}".format(cond, condition_limit))
    logger.debug("inverting map with transfer condition number %.3e", cond)
    return from_transfer(jnp.linalg.inv(t), m.d_in, m.d_out)


def pseudo_inverse(m):
    return from_transfer(jnp.linalg.pinv(to_transfer(m)), m.d_out, m.d_in)


def classify(m, tol=CLASSIFY_TOL):
    j = m.choi
    herm = hermiticity_error(j) <= tol
    tr_b = output_trace(m)
    eye = jnp.eye(m.d_in)
    cp = lambda_min(j) >= -tol
    tp = float(jnp.max(jnp.abs(tr_b - eye))) <= tol
    tni = lambda_min(eye - tr_b) >= -tol
    factor = float(jnp.real(jnp.trace(j))) / m.d_in
    prop = float(jnp.max(jnp.abs(tr_b - factor * eye))) <= tol
    return Classification(herm, cp, tp, tni, prop, factor, tol)


def is_trace_preserving(m, tol=CLASSIFY_TOL):
    return float(jnp.max(jnp.abs(output_trace(m) - jnp.eye(m.d_in)))) <= tol


def is_cp(m, tol=CLASSIFY_TOL):
    return lambda_min(m.choi) >= -tol


def hermitian_split(j, d_in, d_out):
    """
    Split an arbitrary linear map J = J_H + i J_SH into two Hermiticity-preserving maps.
    """
    j = as_matrix(j)
    if j.shape[0] != d_in * d_out:
        raise DimensionError("Choi operator of size {} does not match {}x{}".format(j.shape[0], d_in, d_out))
    j_h = 0.5 * (j + j.conj().T)
    j_sh = (j - j.conj().T) / 2j
    return _trusted(j_h, d_in, d_out), _trusted(j_sh, d_in, d_out)


def _check_same(a, b):
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        raise DimensionError("maps act on different spaces: ({}, {}) vs ({}, {})".format(
            a.d_in, a.d_out, b.d_in, b.d_out))


def add(a, b):
    _check_same(a, b)
    return _trusted(a.choi + b.choi, a.d_in, a.d_out)


def difference(a, b):
    _check_same(a, b)
    return _trusted(a.choi - b.choi, a.d_in, a.d_out)


def scale(m, factor):
    return _trusted(float(factor) * m.choi, m.d_in, m.d_out)


def complete_to_tp(m):
    """
    J' = J + (1 - Tr_B J)/d_B (x) 1_B. For trace non-increasing CP maps the result is CPTP.
    """
    c = jnp.eye(m.d_in) - output_trace(m)
    return _trusted(m.choi + jnp.kron(c, jnp.eye(m.d_out)) / m.d_out, m.d_in, m.d_out)
