import logging

from ..exceptions import DomainError
from ..linalg import eigvalsh

logger = logging.getLogger(__name__)

ORDER_TOL = 1e-6


def spa(m):
    """
    Structural physical approximation: least s with J + s 1/d_B >= 0, i.e. the admixture
    of the completely depolarizing channel that makes (Phi + s D)/(1 + s) completely positive.
    """
    lmin = float(eigvalsh(m.choi)[0])
    return m.d_out * max(0.0, -lmin)


def spa_prime(m, robustness=None):
    """
    Optimised SPA from the extreme eigenvalues of J,
    -l_min (d_B l_max - 1) / (l_max - l_min).

    The formula needs l_min < l_max and l_max != 1/d_B. Completely positive maps need no
    admixture and give 0. When a robustness value is supplied the ordering
    R <= SPA' <= SPA is checked and a violation is logged.
    """
    evals = eigvalsh(m.choi)
    lmin, lmax = float(evals[0]), float(evals[-1])
    if not lmin < lmax - 1e-12:
        raise DomainError("optimised SPA undefined: Choi operator has a single eigenvalue {:.6g}".format(lmax))
    if abs(lmax - 1.0 / m.d_out) <= 1e-12:
        raise DomainError("optimised SPA undefined: largest Choi eigenvalue equals 1/d_B")
    if lmin >= 0.0:
        return 0.0
    value = -lmin * (m.d_out * lmax - 1.0) / (lmax - lmin)
    if robustness is not None:
        upper = spa(m)
        if not (robustness - ORDER_TOL <= value <= upper + ORDER_TOL):
            logger.warning("ordering R <= SPA' <= SPA violated: R = %.8g, SPA' = %.8g, SPA = %.8g",
                           robustness, value, upper)
    return value
