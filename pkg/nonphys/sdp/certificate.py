import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .program import PSD, FREE, ConeProgram
from .solver import Solution, relative_gap, residuals

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float


@dataclass
class CertificateReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self):
        return all(chk.passed for chk in self.checks)

    def failures(self):
        return [chk.name for chk in self.checks if not chk.passed]

    def to_dict(self):
        return {'passed': self.passed,
                'checks': [{'name': c.name, 'passed': c.passed, 'value': c.value, 'threshold': c.threshold}
                           for c in self.checks]}


def _cone_violation(program, vec, dual=False):
    """Largest (relative) amount by which vec leaves the cone (or its dual)."""
    worst = 0.0
    for blk, sl in zip(program.blocks, program.block_slices()):
        v = vec[sl]
        if blk.kind == PSD:
            mat = v.reshape(blk.size, blk.size)
            mat = 0.5 * (mat + mat.T)
            lmin = np.linalg.eigvalsh(mat)[0]
            worst = max(worst, -lmin / max(1.0, np.linalg.norm(mat, 2)))
        elif blk.kind == FREE:
            if dual:
                worst = max(worst, float(np.max(np.abs(v))))
        else:
            worst = max(worst, float(-np.min(v)))
    return worst


def verify_certificate(program: ConeProgram, solution: Solution, tol=1e-7):
    """
    Independently re-check a primal-dual pair against the program data: equality
    residuals, cone membership of x and s, the duality gap and weak duality.
    Nothing reported by the solver is trusted.
    """
    x, y, s = solution.x, solution.y, solution.s
    report = CertificateReport()
    pres, dres = residuals(program, x, y, s)
    report.checks.append(Check('primal_residual', pres <= tol, pres, tol))
    report.checks.append(Check('dual_residual', dres <= tol, dres, tol))
    px = _cone_violation(program, x)
    report.checks.append(Check('primal_cone', px <= tol, px, tol))
    ds = _cone_violation(program, s, dual=True)
    report.checks.append(Check('dual_cone', ds <= tol, ds, tol))
    pobj = float(program.c @ x) + program.offset
    dobj = float(program.b @ y) + program.offset
    gap = relative_gap(pobj, dobj)
    report.checks.append(Check('gap', gap <= tol, gap, tol))
    slack = max(0.0, dobj - pobj) / max(1.0, abs(pobj))
    report.checks.append(Check('weak_duality', slack <= tol, slack, tol))
    if not report.passed:
        logger.info("%s: certificate failed checks %s", program.name, report.failures())
    return report
