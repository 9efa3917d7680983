import jax
jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
from jax.scipy.linalg import solve_triangular
import numpy as np
import scipy.linalg as sla
from scipy.linalg import LinAlgError

import dataclasses
import enum
import logging
import time
from dataclasses import dataclass

from .program import PSD, NONNEG, FREE, Block, ConeProgram

logger = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = 'Optimal'
    PRIMAL_INFEASIBLE = 'PrimalInfeasible'
    DUAL_INFEASIBLE = 'DualInfeasible'
    MAX_ITERATIONS = 'MaxIterations'
    NUMERICAL_ERROR = 'NumericalError'


@dataclass(frozen=True)
class SolverConfig:
    """
    Tolerances and limits of the interior-point solver.

    Parameters
    ----------
    gap_tol : float
        Target relative duality gap |p - d| / max(1, |p|).
    feas_tol : float
        Target relative primal and dual residuals.
    max_iterations : int
    step_fraction : float
        Fraction of the step to the cone boundary actually taken, in (0, 1).
    stagnation_window : int
        Iterations without improvement of the merit function before giving up.
    divergence_limit : float
        Iterate norm taken as evidence of infeasibility.
    presolve_tol : float
        Pivot threshold used to drop linearly dependent equality rows.
    """
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iterations: int = 200
    step_fraction: float = 0.98
    stagnation_window: int = 30
    divergence_limit: float = 1e10
    presolve_tol: float = 1e-10

    def __post_init__(self):
        if not (self.gap_tol > 0 and self.feas_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.step_fraction < 1.0:
            raise ValueError("step_fraction must lie in (0, 1)")

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class Solution:
    """Primal-dual point of a ConeProgram together with its quality indicators."""
    status: Status
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    primal_objective: float
    dual_objective: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    seconds: float = 0.0

    @property
    def optimal(self):
        return self.status == Status.OPTIMAL


def relative_gap(p, d):
    return abs(p - d) / max(1.0, abs(p))


def residuals(program, x, y, s):
    """Relative primal residual ||Ax - b||/(1+||b||) and dual residual ||A^T y + s - c||/(1+||c||)."""
    rp = np.linalg.norm(program.A @ x - program.b) / (1.0 + np.linalg.norm(program.b))
    rd = np.linalg.norm(program.A.T @ y + s - program.c) / (1.0 + np.linalg.norm(program.c))
    return float(rp), float(rd)


@jax.jit
def _nt_block(X, S):
    """
    Nesterov-Todd scaling of one PSD block. Returns the Cholesky factors of X and S,
    R with W = R R^T (W S W = X), its inverse and the scaled eigenvalues lambda
    such that R^-1 X R^-T = R^T S R = diag(lambda).
    """
    n = X.shape[0]
    Lx = jnp.linalg.cholesky(X)
    Ls = jnp.linalg.cholesky(S)
    _, lam, Vt = jnp.linalg.svd(Ls.T @ Lx)
    R = (Lx @ Vt.T) / jnp.sqrt(lam)
    Lx_inv = solve_triangular(Lx, jnp.eye(n), lower=True)
    Rinv = jnp.sqrt(lam)[:, None] * (Vt @ Lx_inv)
    return Lx, Ls, R, Rinv, R @ R.T, lam


@jax.jit
def _schur_block(Ab, W):
    m = Ab.shape[0]
    n = W.shape[0]
    WAW = jnp.einsum('ij,mjk,kl->mil', W, Ab.reshape(m, n, n), W)
    return Ab @ WAW.reshape(m, -1).T


@jax.jit
def _corrector_block(R, Rinv, lam, dX, dS, target):
    dXt = Rinv @ dX @ Rinv.T
    dSt = R.T @ dS @ R
    rhs = target * jnp.eye(lam.shape[0]) - jnp.diag(lam ** 2) - 0.5 * (dXt @ dSt + dSt @ dXt)
    Z = 2.0 * rhs / (lam[:, None] + lam[None, :])
    return R @ Z @ R.T


@jax.jit
def _max_step_block(L, dX):
    """Largest alpha with L L^T + alpha dX still PSD (inf when dX is PSD)."""
    tmp = solve_triangular(L, dX, lower=True)
    M = solve_triangular(L, tmp.T, lower=True)
    lmin = jnp.linalg.eigvalsh(0.5 * (M + M.T))[0]
    return jnp.where(lmin < 0, -1.0 / lmin, jnp.inf)


class _Cone:
    """PSD and nonnegative parts of the working (free-variable-free) cone."""

    def __init__(self, blocks):
        self.psd = []
        lp = []
        start = 0
        for blk in blocks:
            if blk.kind == PSD:
                self.psd.append((slice(start, start + blk.length), blk.size))
            else:
                lp.extend(range(start, start + blk.length))
            start += blk.length
        self.lp = np.asarray(lp, dtype=int)
        self.n = start
        self.nu = sum(n for _, n in self.psd) + self.lp.size

    def identity(self):
        e = np.zeros(self.n)
        for sl, n in self.psd:
            e[sl] = np.eye(n).reshape(-1)
        e[self.lp] = 1.0
        return e

    def symmetrize(self, v):
        v = v.copy()
        for sl, n in self.psd:
            mat = v[sl].reshape(n, n)
            v[sl] = (0.5 * (mat + mat.T)).reshape(-1)
        return v


def _expand_free(program):
    """Replace every free variable by the difference of two nonnegative ones."""
    free_cols = []
    start = 0
    blocks = []
    for blk in program.blocks:
        if blk.kind == FREE:
            free_cols.extend(range(start, start + blk.length))
            blocks.append(Block(NONNEG, blk.size))
        else:
            blocks.append(blk)
        start += blk.length
    free_cols = np.asarray(free_cols, dtype=int)
    A, c = program.A, program.c
    if free_cols.size:
        A = np.hstack([A, -A[:, free_cols]])
        c = np.concatenate([c, -c[free_cols]])
        blocks.append(Block(NONNEG, free_cols.size))
    return A, c, blocks, free_cols


def _presolve(A, b, tol):
    """
    Indices of a maximal set of linearly independent rows of A, and whether the
    dropped rows are consistent with the kept ones.
    """
    m = A.shape[0]
    if m == 0:
        return np.arange(0), True
    _, r, piv = sla.qr(A.T, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r))
    scale = max(diag[0], 1.0) if diag.size else 1.0
    rank = int(np.sum(diag > tol * scale))
    keep = np.sort(piv[:rank])
    if rank == m:
        return keep, True
    drop = np.setdiff1d(np.arange(m), keep)
    coeff = np.linalg.lstsq(A[keep].T, A[drop].T, rcond=None)[0]
    mismatch = np.max(np.abs(coeff.T @ b[keep] - b[drop]))
    logger.debug("presolve dropped %d dependent rows (mismatch %.2e)", drop.size, mismatch)
    return keep, mismatch <= 1e-8 * (1.0 + np.max(np.abs(b)))


def _factor(M):
    """Factor the normal matrix: Cholesky, then LU, then least squares."""
    try:
        L = sla.cho_factor(M)
        return lambda r: sla.cho_solve(L, r)
    except (LinAlgError, ValueError):
        pass
    try:
        lu = sla.lu_factor(M, check_finite=True)
        if not np.all(np.isfinite(lu[0])) or np.min(np.abs(np.diag(lu[0]))) < 1e-300:
            raise LinAlgError
        logger.debug("normal matrix not positive definite, using LU")
        return lambda r: sla.lu_solve(lu, r)
    except (LinAlgError, ValueError):
        logger.debug("normal matrix singular, using least squares")
        return lambda r: np.linalg.lstsq(M, r, rcond=None)[0]


class _Scaling:
    def __init__(self, cone, x, s):
        self.cone = cone
        self.blocks = []
        for sl, n in cone.psd:
            X = jnp.asarray(x[sl].reshape(n, n))
            S = jnp.asarray(s[sl].reshape(n, n))
            self.blocks.append(_nt_block(X, S))
        self.x_lp = x[cone.lp]
        self.s_lp = s[cone.lp]
        self.w_lp = self.x_lp / self.s_lp

    def finite(self):
        return all(bool(jnp.all(jnp.isfinite(blk[4]))) and bool(jnp.all(jnp.isfinite(blk[5])))
                   for blk in self.blocks) and bool(np.all(np.isfinite(self.w_lp)))

    def apply_w(self, v):
        out = np.empty_like(v)
        for (sl, n), blk in zip(self.cone.psd, self.blocks):
            W = blk[4]
            out[sl] = np.asarray(W @ jnp.asarray(v[sl].reshape(n, n)) @ W).reshape(-1)
        out[self.cone.lp] = self.w_lp * v[self.cone.lp]
        return out

    def corrector(self, dx, ds, target):
        rc = np.empty_like(dx)
        for (sl, n), blk in zip(self.cone.psd, self.blocks):
            _, _, R, Rinv, _, lam = blk
            rc[sl] = np.asarray(_corrector_block(
                R, Rinv, lam, jnp.asarray(dx[sl].reshape(n, n)), jnp.asarray(ds[sl].reshape(n, n)),
                target)).reshape(-1)
        lp = self.cone.lp
        rc[lp] = (target - self.x_lp * self.s_lp - dx[lp] * ds[lp]) / self.s_lp
        return rc

    def max_step(self, dx, ds):
        ap, ad = np.inf, np.inf
        for (sl, n), blk in zip(self.cone.psd, self.blocks):
            Lx, Ls = blk[0], blk[1]
            ap = min(ap, float(_max_step_block(Lx, jnp.asarray(dx[sl].reshape(n, n)))))
            ad = min(ad, float(_max_step_block(Ls, jnp.asarray(ds[sl].reshape(n, n)))))
        lp = self.cone.lp
        neg = dx[lp] < 0
        if np.any(neg):
            ap = min(ap, float(np.min(-self.x_lp[neg] / dx[lp][neg])))
        neg = ds[lp] < 0
        if np.any(neg):
            ad = min(ad, float(np.min(-self.s_lp[neg] / ds[lp][neg])))
        return ap, ad


def _normal_matrix(A, cone, scaling, block_rows):
    m = A.shape[0]
    M = jnp.zeros((m, m))
    for (sl, n), blk, rows in zip(cone.psd, scaling.blocks, block_rows):
        if rows.size == 0:
            continue
        Ab = jnp.asarray(A[np.ix_(rows, np.arange(sl.start, sl.stop))])
        M = M.at[jnp.ix_(rows, rows)].add(_schur_block(Ab, blk[4]))
    if cone.lp.size:
        Alp = A[:, cone.lp]
        M = M + jnp.asarray((Alp * scaling.w_lp) @ Alp.T)
    M = np.asarray(M)
    return 0.5 * (M + M.T)


def _start_point(A, b, c, cone):
    nu = cone.nu
    row_norms = np.linalg.norm(A, axis=1) if A.shape[0] else np.zeros(0)
    tau_p = max(10.0, np.sqrt(nu), float(np.max((1.0 + np.abs(b)) / (1.0 + row_norms), initial=0.0)))
    tau_d = max(10.0, np.sqrt(nu), float(np.max(np.abs(c), initial=0.0)),
                float(np.max(row_norms, initial=0.0)))
    e = cone.identity()
    return tau_p * e, np.zeros(A.shape[0]), tau_d * e


def solve(program: ConeProgram, config: SolverConfig = None) -> Solution:
    """
    Primal-dual interior-point method with Nesterov-Todd scaling and a Mehrotra
    predictor-corrector step for a ConeProgram over PSD, nonnegative and free blocks.

    Parameters
    ----------
    program : ConeProgram
    config : SolverConfig, optional

    Returns
    -------
    Solution in the variable space of the original program; its status is never
    silently Optimal unless the gap and both residuals meet the tolerances.
    """
    config = config or SolverConfig()
    t0 = time.time()
    A_full, c, blocks, free_cols = _expand_free(program)
    cone = _Cone(blocks)
    keep, consistent = _presolve(A_full, program.b, config.presolve_tol)
    A = A_full[keep]
    b = program.b[keep]
    x, y, s = _start_point(A, b, c, cone)
    if not consistent:
        logger.info("%s: equality constraints are inconsistent", program.name)
        return _finish(program, free_cols, keep, x, y, s, Status.PRIMAL_INFEASIBLE, 0, t0)

    block_rows = [np.flatnonzero(np.any(A[:, sl] != 0.0, axis=1)) for sl, _ in cone.psd]
    bnorm = 1.0 + np.linalg.norm(b)
    cnorm = 1.0 + np.linalg.norm(c)

    status = Status.MAX_ITERATIONS
    best_merit, best_iter = np.inf, 0
    iteration = 0
    for iteration in range(config.max_iterations + 1):
        rp = b - A @ x
        rd = c - A.T @ y - s
        pobj = float(c @ x)
        dobj = float(b @ y)
        mu = float(x @ s) / cone.nu
        pres = np.linalg.norm(rp) / bnorm
        dres = np.linalg.norm(rd) / cnorm
        gap = relative_gap(pobj + program.offset, dobj + program.offset)
        logger.debug("%s it %3d  p %+.9e  d %+.9e  gap %.2e  pres %.2e  dres %.2e  mu %.2e",
                     program.name, iteration, pobj + program.offset, dobj + program.offset, gap, pres, dres, mu)

        if not (np.isfinite(pobj) and np.isfinite(dobj) and np.isfinite(mu)):
            status = Status.NUMERICAL_ERROR
            break
        if gap <= config.gap_tol and pres <= config.feas_tol and dres <= config.feas_tol:
            status = Status.OPTIMAL
            break
        if np.max(np.abs(x)) > config.divergence_limit:
            status = Status.DUAL_INFEASIBLE
            break
        if max(np.max(np.abs(y), initial=0.0), np.max(np.abs(s))) > config.divergence_limit:
            status = Status.PRIMAL_INFEASIBLE
            break
        merit = max(gap, pres, dres)
        if merit < 0.5 * best_merit:
            best_merit, best_iter = merit, iteration
        elif iteration - best_iter >= config.stagnation_window:
            if pres <= config.feas_tol and dres <= config.feas_tol:
                status = Status.NUMERICAL_ERROR
            else:
                status = Status.PRIMAL_INFEASIBLE if pres > dres else Status.DUAL_INFEASIBLE
            logger.info("%s: no progress for %d iterations", program.name, config.stagnation_window)
            break
        if iteration == config.max_iterations:
            break

        scaling = _Scaling(cone, x, s)
        if not scaling.finite():
            status = Status.NUMERICAL_ERROR
            break
        solve_normal = _factor(_normal_matrix(A, cone, scaling, block_rows))
        w_rd = scaling.apply_w(rd)

        def direction(rc):
            dy = solve_normal(rp - A @ rc + A @ w_rd)
            ds = rd - A.T @ dy
            dx = rc - scaling.apply_w(ds)
            return dx, dy, ds

        # predictor
        dx_a, _, ds_a = direction(-x)
        ap, ad = scaling.max_step(dx_a, ds_a)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = float((x + ap * dx_a) @ (s + ad * ds_a)) / cone.nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector
        dx, dy, ds = direction(scaling.corrector(dx_a, ds_a, sigma * mu))
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dy))):
            status = Status.NUMERICAL_ERROR
            break
        ap, ad = scaling.max_step(dx, ds)
        ap = min(1.0, config.step_fraction * ap)
        ad = min(1.0, config.step_fraction * ad)
        x = cone.symmetrize(x + ap * dx)
        y = y + ad * dy
        s = cone.symmetrize(s + ad * ds)

    logger.info("%s: %s after %d iterations", program.name, status.value, iteration)
    return _finish(program, free_cols, keep, x, y, s, status, iteration, t0)


def _finish(program, free_cols, keep, x, y, s, status, iteration, t0):
    n = program.c.size
    x_orig = x[:n].copy()
    s_orig = s[:n].copy()
    if free_cols.size:
        x_orig[free_cols] -= x[n:]
        s_orig[free_cols] = 0.0
    y_full = np.zeros(program.num_constraints)
    y_full[keep] = y
    pobj = float(program.c @ x_orig) + program.offset
    dobj = float(program.b @ y_full) + program.offset
    pres, dres = residuals(program, x_orig, y_full, s_orig)
    if pobj < dobj - 1e-6 * max(1.0, abs(pobj)) and status == Status.OPTIMAL:
        logger.warning("%s: weak duality violated (p = %.10g < d = %.10g)", program.name, pobj, dobj)
    return Solution(status, x_orig, y_full, s_orig, pobj, dobj, relative_gap(pobj, dobj),
                    pres, dres, iteration, time.time() - t0)
