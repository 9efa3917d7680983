import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np
from typing import NamedTuple

from ..exceptions import DimensionError, HermiticityError

# Absolute tolerance on the largest entry of H - H^dagger
HERMITICITY_TOL = 1e-10


class Spectrum(NamedTuple):
    """Eigenvalues in descending order and the matching orthonormal eigenvector columns."""
    eigenvalues: jnp.ndarray
    eigenvectors: jnp.ndarray


def as_matrix(x):
    """
    Coerce array-like input to a square complex128 JAX array.
    """
    x = jnp.asarray(x, dtype=jnp.complex128)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError("expected a square matrix, got shape {}".format(x.shape))
    return x


def hermiticity_error(h):
    return float(jnp.max(jnp.abs(h - h.conj().T))) if h.size else 0.0


def check_hermitian(h, tol=HERMITICITY_TOL, name='operator'):
    """
    Validate that h is Hermitian within tol and return it as a complex JAX array.
    Inputs failing the test are rejected rather than symmetrized.
    """
    h = as_matrix(h)
    err = hermiticity_error(h)
    if err > tol:
        raise HermiticityError("{} is not Hermitian: max|H - H^dagger| = {:.3e} > {:.1e}".format(name, err, tol))
    return h


def hermitize(h):
    h = jnp.asarray(h, dtype=jnp.complex128)
    return 0.5 * (h + h.conj().T)


def kron(a, b):
    return jnp.kron(jnp.asarray(a), jnp.asarray(b))


def _check_bipartite(x, dA, dB):
    x = jnp.asarray(x)
    if x.shape != (dA * dB, dA * dB):
        raise DimensionError("operator of shape {} does not act on a {}x{} bipartite space".format(x.shape, dA, dB))
    return x.reshape(dA, dB, dA, dB)


def partial_trace(x, dA, dB, keep='A'):
    """
    Partial trace of an operator on A (x) B, row-major index a*dB + b.

    Parameters
    ----------
    x : array (dA*dB, dA*dB)
    dA, dB : int
        Subsystem dimensions.
    keep : str
        'A' traces out B, 'B' traces out A.
    """
    x4 = _check_bipartite(x, dA, dB)
    if keep == 'A':
        return jnp.einsum('ibjb->ij', x4)
    if keep == 'B':
        return jnp.einsum('aiaj->ij', x4)
    raise ValueError("keep must be 'A' or 'B', got {!r}".format(keep))


def partial_transpose(x, dA, dB, subsystem='A'):
    x4 = _check_bipartite(x, dA, dB)
    if subsystem == 'A':
        x4 = x4.transpose(2, 1, 0, 3)
    elif subsystem == 'B':
        x4 = x4.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 'A' or 'B', got {!r}".format(subsystem))
    return x4.reshape(dA * dB, dA * dB)


def eigh(h, tol=HERMITICITY_TOL):
    """
    Eigendecomposition of a Hermitian operator, eigenvalues sorted descending.
    """
    h = check_hermitian(h, tol)
    evals, evecs = jnp.linalg.eigh(hermitize(h))
    return Spectrum(evals[::-1], evecs[:, ::-1])


def eigvalsh(h):
    """Ascending eigenvalues of an operator that is Hermitian by construction (no validation)."""
    return jnp.linalg.eigvalsh(hermitize(h))


def lambda_min(h):
    return float(eigvalsh(h)[0])


def lambda_max(h):
    return float(eigvalsh(h)[-1])


def trace_norm(h, tol=HERMITICITY_TOL):
    return float(jnp.sum(jnp.abs(eigvalsh(check_hermitian(h, tol)))))


def operator_norm(h, tol=HERMITICITY_TOL):
    return float(jnp.max(jnp.abs(eigvalsh(check_hermitian(h, tol)))))


def positive_negative_parts(h, tol=HERMITICITY_TOL):
    """
    Split H = H_+ - H_- with H_+, H_- PSD and H_+ H_- = 0.
    """
    return _split(check_hermitian(h, tol))


def _split(h):
    evals, evecs = jnp.linalg.eigh(hermitize(h))
    pos = jnp.clip(evals, 0.0, None)
    neg = jnp.clip(-evals, 0.0, None)
    h_plus = (evecs * pos) @ evecs.conj().T
    h_minus = (evecs * neg) @ evecs.conj().T
    return hermitize(h_plus), hermitize(h_minus)


def positive_part_trace(h):
    """Tr H_+ and Tr H_-."""
    evals = eigvalsh(h)
    return float(jnp.sum(jnp.clip(evals, 0.0, None))), float(jnp.sum(jnp.clip(-evals, 0.0, None)))


def hs_inner(a, b):
    """Hilbert-Schmidt inner product Tr(A^dagger B), real part (both arguments Hermitian)."""
    a = jnp.asarray(a)
    b = jnp.asarray(b)
    if a.shape != b.shape:
        raise DimensionError("shape mismatch {} vs {}".format(a.shape, b.shape))
    return float(jnp.real(jnp.vdot(a, b)))


def is_psd(h, tol=1e-10):
    return lambda_min(check_hermitian(h)) >= -tol


def project_psd(h):
    """Nearest PSD operator in Frobenius norm to the Hermitian part of h."""
    return _split(h)[0]


def sqrtm_psd(h):
    evals, evecs = jnp.linalg.eigh(hermitize(h))
    return hermitize((evecs * jnp.sqrt(jnp.clip(evals, 0.0, None))) @ evecs.conj().T)


def maximally_entangled(d):
    """Unnormalized |Omega> = sum_i |ii>."""
    return jnp.eye(d, dtype=jnp.complex128).reshape(-1)


def omega_projector(d):
    v = maximally_entangled(d)
    return jnp.outer(v, v.conj())


def swap(d):
    """SWAP on C^d (x) C^d; also the Choi operator of the transpose map."""
    s = np.zeros((d, d, d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[i, j, j, i] = 1.0
    return jnp.asarray(s.reshape(d * d, d * d))


def hermitian_basis(d):
    """
    Orthonormal basis of the d*d-dimensional real space of Hermitian d x d matrices
    w.r.t. the Hilbert-Schmidt inner product. Returned as an array of shape (d*d, d, d).
    """
    basis = []
    for k in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[k, k] = 1.0
        basis.append(e)
    r2 = 1.0 / np.sqrt(2.0)
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[k, l] = e[l, k] = r2
            basis.append(e)
            f = np.zeros((d, d), dtype=np.complex128)
            f[k, l] = -1j * r2
            f[l, k] = 1j * r2
            basis.append(f)
    return np.asarray(basis)


def hermitian_coordinates(h, basis):
    """Real coordinates <G_k, H> of H in an orthonormal Hermitian basis."""
    return np.real(np.einsum('kij,ij->k', np.conj(np.asarray(basis)), np.asarray(h)))


def tomographic_states(d):
    """
    Tomographically complete set of d*d density operators:
    |k><k|, (|k>+|l>)(<k|+<l|)/2 and (|k>+i|l>)(<k|-i<l|)/2 for k < l.
    """
    states = []
    eye = np.eye(d, dtype=np.complex128)
    for k in range(d):
        states.append(np.outer(eye[k], eye[k]))
    for k in range(d):
        for l in range(k + 1, d):
            v = (eye[k] + eye[l]) / np.sqrt(2.0)
            states.append(np.outer(v, v.conj()))
            v = (eye[k] + 1j * eye[l]) / np.sqrt(2.0)
            states.append(np.outer(v, v.conj()))
    return np.asarray(states)


def random_density(rng, d, rank=None):
    """Random density operator from a Ginibre matrix, rng a numpy Generator."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
