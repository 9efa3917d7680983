import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..exceptions import DimensionError
from ..linalg import hermitian_basis
from .realify import realify_unchecked, complexify

logger = logging.getLogger(__name__)

PSD = 'psd'
NONNEG = 'nonneg'
FREE = 'free'


@dataclass(frozen=True)
class Block:
    """
    One factor of the cone. PSD blocks hold a real symmetric n x n matrix stored in
    full row-major form (n*n entries); nonneg and free blocks hold n scalars.
    """
    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in (PSD, NONNEG, FREE):
            raise ValueError("unknown block kind {!r}".format(self.kind))
        if self.size < 1:
            raise ValueError("block size must be positive")

    @property
    def length(self):
        return self.size * self.size if self.kind == PSD else self.size


@dataclass(frozen=True)
class Variable:
    """Named slice of the stacked variable; complex=True marks a realified Hermitian matrix."""
    name: str
    block: int
    offset: int
    kind: str
    size: int
    complex: bool = False


@dataclass
class ConeProgram:
    """
    Standard-form cone program

        minimize    c^T x + offset
        subject to  A x = b,  x in K = K_1 x ... x K_p

    with dual  maximize b^T y + offset  s.t.  A^T y + s = c,  s in K*.
    """
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    blocks: List[Block]
    offset: float = 0.0
    variables: Tuple[Variable, ...] = ()
    name: str = 'program'

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.A = np.asarray(self.A, dtype=float).reshape(self.b.size, -1)
        n = sum(blk.length for blk in self.blocks)
        if n != self.c.size or n != self.A.shape[1]:
            raise DimensionError("block lengths ({}) disagree with len(c) = {} and A columns = {}".format(
                n, self.c.size, self.A.shape[1]))

    @property
    def num_constraints(self):
        return self.A.shape[0]

    def block_slices(self):
        slices, start = [], 0
        for blk in self.blocks:
            slices.append(slice(start, start + blk.length))
            start += blk.length
        return slices

    def unpack(self, vec):
        """
        Split a primal (or dual slack) vector into named values: Hermitian matrices for
        realified variables, real matrices for plain PSD blocks, vectors otherwise.
        """
        vec = np.asarray(vec)
        out = {}
        for var in self.variables:
            if var.kind == PSD:
                n = var.size
                mat = vec[var.offset:var.offset + n * n].reshape(n, n)
                mat = 0.5 * (mat + mat.T)
                out[var.name] = np.asarray(complexify(mat)) if var.complex else mat
            else:
                out[var.name] = vec[var.offset:var.offset + var.size].copy()
        return out

    def to_dict(self):
        return {
            'name': self.name,
            'objective': self.c.tolist(),
            'offset': self.offset,
            'A': self.A.tolist(),
            'b': self.b.tolist(),
            'blocks': [{'kind': blk.kind, 'size': blk.size} for blk in self.blocks],
            'variables': [{'name': v.name, 'kind': v.kind, 'size': v.size, 'offset': v.offset,
                           'complex': v.complex} for v in self.variables],
        }


def dump_programs(programs, path):
    """Write a list of ConeProgram objects to a JSON file for external cross-checking."""
    with open(path, 'w') as f:
        json.dump({'schema': 1, 'programs': [p.to_dict() for p in programs]}, f)
    logger.info("wrote %d cone programs to %s", len(programs), path)


class ProgramBuilder:
    """
    Assemble a ConeProgram from named matrix and scalar variables.

    Hermitian PSD variables of dimension d are stored as realified 2d x 2d blocks;
    a linear functional <G, H> of such a variable enters A as <realify(G), Y>/2.
    """

    def __init__(self, name='program'):
        self.name = name
        self._vars: Dict[str, Variable] = {}
        self._blocks: List[Block] = []
        self._length = 0
        self._rows: List[Dict[str, np.ndarray]] = []
        self._rhs: List[float] = []
        self._objective: Dict[str, np.ndarray] = {}
        self.offset = 0.0

    def _add(self, name, kind, size, is_complex=False):
        if name in self._vars:
            raise ValueError("variable {!r} already defined".format(name))
        blk = Block(kind, size)
        var = Variable(name, len(self._blocks), self._length, kind, size, is_complex)
        self._blocks.append(blk)
        self._vars[name] = var
        self._length += blk.length
        return name

    def hermitian_psd(self, name, d):
        return self._add(name, PSD, 2 * d, True)

    def symmetric_psd(self, name, n):
        return self._add(name, PSD, n)

    def nonneg(self, name, size=1):
        return self._add(name, NONNEG, size)

    def free(self, name, size=1):
        return self._add(name, FREE, size)

    def dim(self, name):
        var = self._vars[name]
        return var.size // 2 if var.complex else var.size

    def _coefficient(self, name, coeff):
        """Map a user-level coefficient to the flat row segment of the variable."""
        var = self._vars[name]
        if var.kind == PSD:
            g = np.asarray(coeff)
            if var.complex:
                d = var.size // 2
                if g.shape != (d, d):
                    raise DimensionError("coefficient for {!r} must be {}x{}, got {}".format(name, d, d, g.shape))
                g = 0.5 * (g + g.conj().T)
                return 0.5 * realify_unchecked(g).reshape(-1)
            g = np.real(g)
            if g.shape != (var.size, var.size):
                raise DimensionError("coefficient for {!r} has shape {}".format(name, g.shape))
            return (0.5 * (g + g.T)).reshape(-1)
        seg = np.real(np.asarray(coeff, dtype=complex)).reshape(-1)
        if seg.size != var.size:
            raise DimensionError("coefficient for {!r} must have {} entries".format(name, var.size))
        return seg

    def add_constraint(self, terms, rhs):
        """One scalar equality sum_v <coeff_v, X_v> = rhs."""
        row = {}
        for name, coeff in terms.items():
            seg = self._coefficient(name, coeff)
            row[name] = row.get(name, 0.0) + seg
        self._rows.append(row)
        self._rhs.append(float(np.real(rhs)))

    def add_matrix_constraint(self, d, terms, rhs):
        """
        Hermitian-valued equality sum_v L_v(X_v) = C on a d-dimensional space,
        expanded over an orthonormal Hermitian basis {G_k}:
        sum_v <L_v^dagger(G_k), X_v> = <G_k, C>.

        terms is a sequence of (variable name, adjoint) pairs where adjoint(G) returns
        the coefficient of that variable for the basis element G.
        """
        rhs = np.asarray(rhs, dtype=np.complex128)
        if rhs.shape != (d, d):
            raise DimensionError("right-hand side must be {}x{}".format(d, d))
        for g in hermitian_basis(d):
            row = {}
            for name, adjoint in terms:
                seg = self._coefficient(name, adjoint(g))
                row[name] = row.get(name, 0.0) + seg
            self._rows.append(row)
            self._rhs.append(float(np.real(np.vdot(g, rhs))))

    def minimize(self, terms, offset=0.0):
        for name, coeff in terms.items():
            seg = self._coefficient(name, coeff)
            self._objective[name] = self._objective.get(name, 0.0) + seg
        self.offset += float(offset)

    def maximize(self, terms, offset=0.0):
        """Stored as minimization of the negated objective; callers flip the sign back."""
        neg = {name: -np.asarray(coeff) for name, coeff in terms.items()}
        self.minimize(neg, -offset)

    def build(self):
        n = self._length
        c = np.zeros(n)
        for name, seg in self._objective.items():
            var = self._vars[name]
            c[var.offset:var.offset + seg.size] += seg
        A = np.zeros((len(self._rows), n))
        for i, row in enumerate(self._rows):
            for name, seg in row.items():
                var = self._vars[name]
                A[i, var.offset:var.offset + seg.size] += seg
        variables = tuple(self._vars.values())
        return ConeProgram(c, A, np.asarray(self._rhs), list(self._blocks), self.offset, variables, self.name)


# Adjoint maps used to express the matrix constraints of the measure programs.

def adj_identity():
    return lambda g: g


def adj_negate():
    return lambda g: -g


def adj_partial_trace(dA, dB, sign=1.0):
    """Adjoint of X -> Tr_B X, namely G -> G (x) 1_B."""
    eye = np.eye(dB)
    return lambda g: sign * np.kron(g, eye)


def adj_tensor_identity(dA, dB, sign=1.0):
    """Adjoint of rho -> rho (x) 1_B, namely G -> Tr_B G."""
    def adjoint(g):
        g4 = np.asarray(g).reshape(dA, dB, dA, dB)
        return sign * np.einsum('ibjb->ij', g4)
    return adjoint


def adj_scalar(k, sign=1.0):
    """Adjoint of t -> t K for a scalar variable t."""
    k = np.asarray(k)
    return lambda g: np.array([sign * np.real(np.vdot(g, k))])
