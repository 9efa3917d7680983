"""
Cone programs for the non-physicality measures of a Hermiticity-preserving map with
Choi operator J on A (x) B. Every measure is compiled twice, as its primal minimization
and as its Lagrange dual, and both are written without free variables.

Each builder returns (ConeProgram, sense): the optimal value of the measure is
sense * (objective of the program), since maximizations are stored negated.
"""
import numpy as np

from ..sdp.program import (ProgramBuilder, adj_identity, adj_negate, adj_partial_trace,
                           adj_tensor_identity, adj_scalar)

MINIMIZE = 1.0
MAXIMIZE = -1.0


def _dims(m):
    return m.d_in, m.d_out, np.asarray(m.choi)


def _reduced(j, dA, dB):
    return np.einsum('ibjb->ij', j.reshape(dA, dB, dA, dB))


def diamond_primal(m):
    """min mu  s.t.  J = M+ - M-,  M+- >= 0,  Tr_B(M+ + M-) + S = mu 1,  S >= 0."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('diamond:primal')
    pb.hermitian_psd('M+', n)
    pb.hermitian_psd('M-', n)
    pb.nonneg('mu')
    pb.hermitian_psd('S', dA)
    pb.add_matrix_constraint(n, [('M+', adj_identity()), ('M-', adj_negate())], j)
    pb.add_matrix_constraint(dA, [('M+', adj_partial_trace(dA, dB)), ('M-', adj_partial_trace(dA, dB)),
                                  ('S', adj_identity()), ('mu', adj_scalar(-np.eye(dA)))], np.zeros((dA, dA)))
    pb.minimize({'mu': [1.0]})
    return pb.build(), MINIMIZE


def diamond_dual(m):
    """max <J, P - Q>  s.t.  P + Q = rho (x) 1,  P, Q >= 0,  Tr rho = 1; witness W = P - Q."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('diamond:dual')
    pb.hermitian_psd('rho', dA)
    pb.hermitian_psd('P', n)
    pb.hermitian_psd('Q', n)
    pb.add_matrix_constraint(n, [('P', adj_identity()), ('Q', adj_identity()),
                                 ('rho', adj_tensor_identity(dA, dB, -1.0))], np.zeros((n, n)))
    pb.add_constraint({'rho': np.eye(dA)}, 1.0)
    pb.maximize({'P': j, 'Q': -j})
    return pb.build(), MAXIMIZE


def base_norm_primal(m):
    """min l+ + l-  s.t.  J = M+ - M-,  Tr_B M+- + S+- = l+- 1."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('cptni:primal')
    pb.hermitian_psd('M+', n)
    pb.hermitian_psd('M-', n)
    pb.nonneg('lambda+')
    pb.nonneg('lambda-')
    pb.hermitian_psd('S+', dA)
    pb.hermitian_psd('S-', dA)
    pb.add_matrix_constraint(n, [('M+', adj_identity()), ('M-', adj_negate())], j)
    for sign in '+-':
        pb.add_matrix_constraint(dA, [('M' + sign, adj_partial_trace(dA, dB)), ('S' + sign, adj_identity()),
                                      ('lambda' + sign, adj_scalar(-np.eye(dA)))], np.zeros((dA, dA)))
    pb.minimize({'lambda+': [1.0], 'lambda-': [1.0]})
    return pb.build(), MINIMIZE


def base_norm_dual(m):
    """
    max <J, P> - <Tr_B J, rho>  s.t.  P + Q = (rho + sigma) (x) 1,  Tr rho = Tr sigma = 1;
    witness W = P - rho (x) 1 with -rho (x) 1 <= W <= sigma (x) 1.
    """
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('cptni:dual')
    pb.hermitian_psd('rho', dA)
    pb.hermitian_psd('sigma', dA)
    pb.hermitian_psd('P', n)
    pb.hermitian_psd('Q', n)
    pb.add_matrix_constraint(n, [('P', adj_identity()), ('Q', adj_identity()),
                                 ('rho', adj_tensor_identity(dA, dB, -1.0)),
                                 ('sigma', adj_tensor_identity(dA, dB, -1.0))], np.zeros((n, n)))
    pb.add_constraint({'rho': np.eye(dA)}, 1.0)
    pb.add_constraint({'sigma': np.eye(dA)}, 1.0)
    pb.maximize({'P': j, 'rho': -_reduced(j, dA, dB)})
    return pb.build(), MAXIMIZE


def robustness_primal(m):
    """min l  s.t.  J = M+ - M-,  Tr_B M+ + S+ = (1 + l) 1,  Tr_B M- + S- = l 1."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('R:primal')
    pb.hermitian_psd('M+', n)
    pb.hermitian_psd('M-', n)
    pb.nonneg('lambda')
    pb.hermitian_psd('S+', dA)
    pb.hermitian_psd('S-', dA)
    pb.add_matrix_constraint(n, [('M+', adj_identity()), ('M-', adj_negate())], j)
    pb.add_matrix_constraint(dA, [('M+', adj_partial_trace(dA, dB)), ('S+', adj_identity()),
                                  ('lambda', adj_scalar(-np.eye(dA)))], np.eye(dA))
    pb.add_matrix_constraint(dA, [('M-', adj_partial_trace(dA, dB)), ('S-', adj_identity()),
                                  ('lambda', adj_scalar(-np.eye(dA)))], np.zeros((dA, dA)))
    pb.minimize({'lambda': [1.0]})
    return pb.build(), MINIMIZE


def robustness_dual(m):
    """
    max <J, P> - <Tr_B J, Y> - Tr X  s.t.  P + Q = (X + Y) (x) 1,  Tr X + Tr Y = 1;
    witness W = P - Y (x) 1 with -Y (x) 1 <= W <= X (x) 1.
    """
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('R:dual')
    pb.hermitian_psd('X', dA)
    pb.hermitian_psd('Y', dA)
    pb.hermitian_psd('P', n)
    pb.hermitian_psd('Q', n)
    pb.add_matrix_constraint(n, [('P', adj_identity()), ('Q', adj_identity()),
                                 ('X', adj_tensor_identity(dA, dB, -1.0)),
                                 ('Y', adj_tensor_identity(dA, dB, -1.0))], np.zeros((n, n)))
    pb.add_constraint({'X': np.eye(dA), 'Y': np.eye(dA)}, 1.0)
    pb.maximize({'P': j, 'Y': -_reduced(j, dA, dB), 'X': -np.eye(dA)})
    return pb.build(), MAXIMIZE


def robustness_prime_primal(m):
    """min t - 1  s.t.  M - N = J,  M, N >= 0,  Tr_B M = t 1."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('Rprime:primal')
    pb.hermitian_psd('M', n)
    pb.hermitian_psd('N', n)
    pb.nonneg('t')
    pb.add_matrix_constraint(n, [('M', adj_identity()), ('N', adj_negate())], j)
    pb.add_matrix_constraint(dA, [('M', adj_partial_trace(dA, dB)), ('t', adj_scalar(-np.eye(dA)))],
                             np.zeros((dA, dA)))
    pb.minimize({'t': [1.0]}, offset=-1.0)
    return pb.build(), MINIMIZE


def _bounded_witness_program(name, m, objective_extra):
    """Feasible set 0 <= W <= rho (x) 1, Tr rho = 1 shared by the R' and R'' duals."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder(name)
    pb.hermitian_psd('rho', dA)
    pb.hermitian_psd('W', n)
    pb.hermitian_psd('Q', n)
    pb.add_matrix_constraint(n, [('W', adj_identity()), ('Q', adj_identity()),
                                 ('rho', adj_tensor_identity(dA, dB, -1.0))], np.zeros((n, n)))
    pb.add_constraint({'rho': np.eye(dA)}, 1.0)
    terms, offset = objective_extra(j, dA, dB)
    terms['W'] = j
    pb.maximize(terms, offset)
    return pb.build(), MAXIMIZE


def robustness_prime_dual(m):
    """max <J, W> - 1  s.t.  0 <= W <= rho (x) 1,  Tr rho = 1."""
    return _bounded_witness_program('Rprime:dual', m, lambda j, dA, dB: ({}, -1.0))


def robustness_doubleprime_primal(m):
    """min l  s.t.  N - M = J,  M, N >= 0,  Tr_B M = l 1."""
    dA, dB, j = _dims(m)
    n = dA * dB
    pb = ProgramBuilder('Rdoubleprime:primal')
    pb.hermitian_psd('M', n)
    pb.hermitian_psd('N', n)
    pb.nonneg('lambda')
    pb.add_matrix_constraint(n, [('N', adj_identity()), ('M', adj_negate())], j)
    pb.add_matrix_constraint(dA, [('M', adj_partial_trace(dA, dB)), ('lambda', adj_scalar(-np.eye(dA)))],
                             np.zeros((dA, dA)))
    pb.minimize({'lambda': [1.0]})
    return pb.build(), MINIMIZE


def robustness_doubleprime_dual(m):
    """max <J, W> - <Tr_B J, rho>  s.t.  0 <= W <= rho (x) 1,  Tr rho = 1."""
    return _bounded_witness_program('Rdoubleprime:dual', m,
                                    lambda j, dA, dB: ({'rho': -_reduced(j, dA, dB)}, 0.0))


def cptp_payoff_primal(w_g, dA, dB):
    """max <W_G, J_L>  s.t.  J_L >= 0,  Tr_B J_L = 1."""
    n = dA * dB
    pb = ProgramBuilder('cptp_payoff:primal')
    pb.hermitian_psd('J', n)
    pb.add_matrix_constraint(dA, [('J', adj_partial_trace(dA, dB))], np.eye(dA))
    pb.maximize({'J': w_g})
    return pb.build(), MAXIMIZE


def cptp_payoff_dual(w_g, dA, dB):
    """
    min Tr Y  s.t.  Y (x) 1 >= W_G, written with Z = Y + c 1 >= 0 for c = ||W_G||_inf:
    min Tr Z - c dA  s.t.  Z (x) 1 - S = W_G + c 1,  Z, S >= 0.
    """
    n = dA * dB
    w_g = np.asarray(w_g)
    c = float(np.max(np.abs(np.linalg.eigvalsh(w_g)))) if w_g.size else 0.0
    pb = ProgramBuilder('cptp_payoff:dual')
    pb.hermitian_psd('Z', dA)
    pb.hermitian_psd('S', n)
    pb.add_matrix_constraint(n, [('Z', adj_tensor_identity(dA, dB)), ('S', adj_negate())], w_g + c * np.eye(n))
    pb.minimize({'Z': np.eye(dA)}, offset=-c * dA)
    return pb.build(), MINIMIZE


PROGRAMS = {
    'diamond': (diamond_primal, diamond_dual),
    'cptni': (base_norm_primal, base_norm_dual),
    'R': (robustness_primal, robustness_dual),
    'Rprime': (robustness_prime_primal, robustness_prime_dual),
    'Rdoubleprime': (robustness_doubleprime_primal, robustness_doubleprime_dual),
}
