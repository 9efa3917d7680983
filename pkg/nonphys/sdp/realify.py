import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
import numpy as np

from ..linalg import check_hermitian


def realify(h):
    """
    Embed a complex Hermitian d x d matrix as the real symmetric 2d x 2d matrix
    [[Re H, -Im H], [Im H, Re H]].
    Each eigenvalue of H appears twice, so H >= 0 iff realify(H) >= 0, and
    Tr realify(H) = 2 Tr H.
    """
    h = check_hermitian(h)
    re, im = jnp.real(h), jnp.imag(h)
    return jnp.block([[re, -im], [im, re]])


def realify_unchecked(g):
    g = np.asarray(g, dtype=np.complex128)
    re, im = g.real, g.imag
    return np.block([[re, -im], [im, re]])


def complexify(y):
    """
    Inverse of the embedding for an arbitrary real symmetric 2d x 2d matrix Y,
    H = (Y11 + Y22)/2 + i (Y21 - Y12)/2. PSD Y give PSD H, and
    <realify(G), Y> = 2 <G, H> for every Hermitian G.
    """
    y = jnp.asarray(y)
    d = y.shape[0] // 2
    y11, y12 = y[:d, :d], y[:d, d:]
    y21, y22 = y[d:, :d], y[d:, d:]
    h = 0.5 * (y11 + y22) + 0.5j * (y21 - y12)
    return 0.5 * (h + h.conj().T)
