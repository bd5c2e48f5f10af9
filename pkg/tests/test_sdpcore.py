"""The dense SDP kernel against an independent bisection-feasibility oracle."""

import numpy as np
import pytest

from entsup.linops import part, single_cut_partitions
from entsup.qstate import Ket, basis_ket, density, ghz, qubit_register
from entsup.sdpcore import (
    SdpSolution,
    build_robustness_sdp,
    check_certificate,
    solve,
)

from conftest import random_pure_amplitudes
from oracles import robustness_by_bisection


def bell_problem():
    return build_robustness_sdp(density(ghz(2, 0.0)), [part(0)])


def test_build_robustness_sdp_shapes():
    problem = bell_problem()
    assert problem.variable_dim == 4
    assert len(problem.constraints) == 2
    assert problem.constraints[0].transposed == ()
    assert problem.constraints[1].transposed == (0,)

    ghz3 = density(ghz(3, 0.0))
    problem = build_robustness_sdp(ghz3, single_cut_partitions(ghz3.register))
    assert problem.variable_dim == 8
    assert len(problem.constraints) == 4

    with pytest.raises(ValueError):
        build_robustness_sdp(ghz3, [])


def test_solve_bell_state():
    solution = solve(bell_problem(), tol=1e-6)
    assert solution.status == "optimal"
    assert solution.primal_value == pytest.approx(1.0, abs=1e-5)
    assert solution.gap <= 1e-6


def test_solve_product_state():
    rho = density(basis_ket(qubit_register(2), (0, 1)))
    solution = solve(build_robustness_sdp(rho, [part(0)]), tol=1e-6)
    assert solution.status == "optimal"
    assert solution.primal_value == pytest.approx(0.0, abs=1e-6)


def test_solve_unbalanced_pure_state():
    amps = np.zeros(4, dtype=complex)
    amps[0], amps[3] = 0.6, 0.8
    rho = density(Ket(qubit_register(2), amps))
    solution = solve(build_robustness_sdp(rho, [part(0)]), tol=1e-6)
    assert solution.primal_value == pytest.approx(0.96, abs=1e-4)


def test_weak_duality_and_feasibility():
    for phi in (0.0, 1.0):
        rho = density(ghz(2, phi))
        problem = build_robustness_sdp(rho, [part(0)])
        solution = solve(problem, tol=1e-6)
        assert solution.dual_value <= solution.primal_value + 1e-8
        for con in problem.constraints:
            w = np.linalg.eigvalsh(con.apply(solution.x_opt, problem.dims))
            assert w[0] >= -1e-7


def test_constraint_order_invariance():
    rho = density(ghz(3, 0.3))
    cuts = single_cut_partitions(rho.register)
    a = solve(build_robustness_sdp(rho, cuts), tol=1e-6).primal_value
    b = solve(build_robustness_sdp(rho, cuts[::-1]), tol=1e-6).primal_value
    assert a == pytest.approx(b, abs=2e-6)


def test_certificate_accepts_optimal_solution():
    problem = bell_problem()
    solution = solve(problem, tol=1e-6)
    assert check_certificate(problem, solution, tol=1e-6)


def test_certificate_rejects_violated_constraint():
    problem = bell_problem()
    solution = solve(problem, tol=1e-6)
    spoiled = SdpSolution(
        x_opt=solution.x_opt - 0.1 * np.eye(4),
        primal_value=solution.primal_value - 0.4,
        dual_value=solution.dual_value - 0.4,
        gap=solution.gap,
        iterations=solution.iterations,
        status="optimal",
    )
    assert not check_certificate(problem, spoiled, tol=1e-6)


def test_certificate_rejects_large_gap():
    problem = bell_problem()
    solution = solve(problem, tol=1e-6)
    wide = SdpSolution(
        x_opt=solution.x_opt,
        primal_value=solution.primal_value,
        dual_value=solution.primal_value - 1e-5,
        gap=1e-5,
        iterations=solution.iterations,
        status="optimal",
    )
    assert not check_certificate(problem, wide, tol=1e-6)


def test_max_iter_status():
    solution = solve(bell_problem(), tol=1e-12, max_iter=30)
    assert solution.status == "max_iter"
    assert solution.dual_value <= solution.primal_value + 1e-8


def test_solve_matches_bisection_oracle(rng):
    reg = qubit_register(2)
    for trial in range(50):
        rho = density(Ket(reg, random_pure_amplitudes(rng, 4)))
        problem = build_robustness_sdp(rho, [part(0)])
        ours = solve(problem, tol=1e-6).primal_value
        oracle = robustness_by_bisection(rho.matrix, (2, 2), [[0]])
        assert ours == pytest.approx(oracle, abs=1e-4), f"trial {trial}"


def test_oracle_matches_schmidt_formula(rng):
    # Sanity-check the oracle itself: for two-qubit pure states the optimum
    # equals twice the product of the Schmidt coefficients.
    reg = qubit_register(2)
    for _ in range(5):
        amps = random_pure_amplitudes(rng, 4)
        rho = density(Ket(reg, amps))
        s = np.linalg.svd(amps.reshape(2, 2), compute_uv=False)
        expected = 2.0 * s[0] * s[1]
        oracle = robustness_by_bisection(rho.matrix, (2, 2), [[0]])
        assert oracle == pytest.approx(expected, abs=5e-5)
