import dataclasses
import json

import numpy as np
import pytest

from nonphys.channels import builtin
from nonphys.measures.programs import diamond_primal
from nonphys.sdp import Block, ConeProgram, ProgramBuilder, SolverConfig, Status, dump_programs, solve, verify_certificate
from nonphys.sdp.realify import complexify, realify
from nonphys.sdp.solver import _factor
from nonphys.exceptions import DimensionError
from nonphys.linalg import random_density


def shifted_lp():
    """minimize x  s.t.  x - s = 3,  x, s >= 0."""
    pb = ProgramBuilder('shifted_lp')
    pb.nonneg('x')
    pb.nonneg('s')
    pb.add_constraint({'x': [1.0], 's': [-1.0]}, 3.0)
    pb.minimize({'x': [1.0]})
    return pb.build()


def sigma_x_bound():
    """minimize t  s.t.  t 1 - sigma_x = S,  S >= 0."""
    pb = ProgramBuilder('sigma_x_bound')
    pb.nonneg('t')
    pb.symmetric_psd('S', 2)
    e00 = np.diag([1.0, 0.0])
    e11 = np.diag([0.0, 1.0])
    off = np.array([[0.0, 0.5], [0.5, 0.0]])
    pb.add_constraint({'S': e00, 't': [-1.0]}, 0.0)
    pb.add_constraint({'S': e11, 't': [-1.0]}, 0.0)
    pb.add_constraint({'S': off}, -1.0)
    pb.minimize({'t': [1.0]})
    return pb.build()


def test_realify_examples():
    np.testing.assert_allclose(realify(np.diag([1.0, 2.0])), np.diag([1.0, 2.0, 1.0, 2.0]))
    sy = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_allclose(np.linalg.eigvalsh(np.asarray(realify(sy))), [-1, -1, 1, 1], atol=1e-12)


def test_realify_preserves_spectrum_and_psd():
    rng = np.random.default_rng(0)
    for d in range(1, 6):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = g + g.conj().T
        evals = np.sort(np.repeat(np.linalg.eigvalsh(h), 2))
        np.testing.assert_allclose(np.linalg.eigvalsh(np.asarray(realify(h))), evals, atol=1e-10)
        rho = random_density(rng, d)
        assert np.linalg.eigvalsh(np.asarray(realify(rho)))[0] >= -1e-12
        np.testing.assert_allclose(complexify(realify(h)), h, atol=1e-12)


def test_solve_shifted_lp():
    sol = solve(shifted_lp())
    assert sol.status == Status.OPTIMAL
    assert sol.optimal
    assert sol.primal_objective == pytest.approx(3.0, abs=1e-6)
    assert sol.dual_objective == pytest.approx(3.0, abs=1e-6)
    assert sol.primal_objective >= sol.dual_objective - 1e-8


def test_solve_sigma_x_bound():
    sol = solve(sigma_x_bound())
    assert sol.status == Status.OPTIMAL
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-6)


def test_solve_hermitian_max_eigenvalue():
    c = np.array([[1.0, 1j], [-1j, 2.0]])
    pb = ProgramBuilder('max_eig')
    pb.hermitian_psd('X', 2)
    pb.add_constraint({'X': np.eye(2)}, 1.0)
    pb.maximize({'X': c})
    program = pb.build()
    sol = solve(program)
    assert sol.optimal
    assert -sol.primal_objective == pytest.approx((3 + np.sqrt(5)) / 2, abs=1e-6)
    x = program.unpack(sol.x)['X']
    assert np.trace(x).real == pytest.approx(1.0, abs=1e-7)
    assert np.linalg.eigvalsh(x)[0] >= -1e-7


def test_diamond_program_of_identity():
    program, _ = diamond_primal(builtin('identity', d=2))
    sol = solve(program)
    assert sol.optimal
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-6)
    assert verify_certificate(program, sol).passed


def test_solve_is_deterministic():
    program = sigma_x_bound()
    a, b = solve(program), solve(program)
    assert abs(a.primal_objective - b.primal_objective) <= 1e-10
    assert a.iterations == b.iterations


def test_inconsistent_equalities_are_primal_infeasible():
    pb = ProgramBuilder('inconsistent')
    pb.nonneg('x')
    pb.add_constraint({'x': [1.0]}, 1.0)
    pb.add_constraint({'x': [1.0]}, 2.0)
    pb.minimize({'x': [1.0]})
    sol = solve(pb.build())
    assert sol.status == Status.PRIMAL_INFEASIBLE
    assert not sol.optimal


def test_iteration_limit_is_reported():
    sol = solve(sigma_x_bound(), SolverConfig(max_iterations=1))
    assert sol.status == Status.MAX_ITERATIONS


def test_certificate_passes_on_solutions():
    for program in (shifted_lp(), sigma_x_bound()):
        sol = solve(program)
        report = verify_certificate(program, sol, tol=1e-7)
        assert report.passed, report.failures()


def test_certificate_detects_perturbed_solution():
    program = shifted_lp()
    sol = solve(program)
    x = sol.x.copy()
    x[0] += 1e-3
    report = verify_certificate(program, dataclasses.replace(sol, x=x), tol=1e-7)
    assert 'primal_residual' in report.failures()

    bad = dataclasses.replace(sol, y=sol.y * (1.0 - 1e-5))
    assert 'gap' in verify_certificate(program, bad, tol=1e-7).failures()


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gap_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(step_fraction=1.0)
    cfg = SolverConfig().replace(max_iterations=10)
    assert cfg.max_iterations == 10
    assert cfg.gap_tol == SolverConfig().gap_tol


def test_cone_program_dimension_check():
    with pytest.raises(DimensionError):
        ConeProgram(np.zeros(3), np.zeros((1, 3)), np.zeros(1), [Block('psd', 2)])


def test_builder_rejects_duplicates_and_bad_shapes():
    pb = ProgramBuilder()
    pb.hermitian_psd('X', 2)
    with pytest.raises(ValueError):
        pb.nonneg('X')
    with pytest.raises(DimensionError):
        pb.add_constraint({'X': np.eye(3)}, 1.0)


def test_dump_programs(tmp_path):
    path = tmp_path / 'programs.json'
    dump_programs([shifted_lp(), sigma_x_bound()], str(path))
    data = json.loads(path.read_text())
    assert data['schema'] == 1
    assert [p['name'] for p in data['programs']] == ['shifted_lp', 'sigma_x_bound']
    assert data['programs'][0]['b'] == [3.0]


@pytest.mark.parametrize('M, rhs, expected', [
    (np.array([[4.0, 1.0], [1.0, 3.0]]), np.array([5.0, 4.0]), np.array([1.0, 1.0])),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([2.0, 3.0]), np.array([3.0, 2.0])),
    (np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([2.0, 2.0]), np.array([1.0, 1.0])),
], ids=['cholesky', 'lu', 'least_squares'])
def test_normal_matrix_factorization_chain(M, rhs, expected):
    np.testing.assert_allclose(_factor(M)(rhs), expected, atol=1e-12)
