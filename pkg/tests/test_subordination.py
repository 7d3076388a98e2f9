import numpy as np
import pytest

from freeconv import (
    CPMap,
    ScalarMeasure,
    SolverConfig,
    SubordinationProblem,
    phi_q,
    residual_h,
    scalar_to_model,
    solve_omega,
    solve_omega_alpha,
    solve_omega_stack,
    solve_vq,
)
from freeconv.algebra import imag_part, opnorm, real_part
from freeconv.transforms import semicircle_problem

from _oracles import point_gamma_omega, point_vq_at_zero
from helpers import random_hermitian, random_problem, random_upper


def point_gamma_problem(t: float = 1.0):
    model = scalar_to_model(ScalarMeasure.point(0.0))
    return semicircle_problem(model, CPMap.scaled_identity(t, 1))


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        SolverConfig(damping=1.0)


def test_omega_point_mass_plus_semicircle_closed_form():
    prob = point_gamma_problem()
    for z in (2j, 3j, 1.0 + 1.5j, -0.7 + 0.4j):
        rep = solve_omega(prob, np.array([[z]]))
        assert rep.converged
        assert abs(rep.value[0, 0] - point_gamma_omega(z)) < 5e-12
    # the classic value at 2i
    rep = solve_omega(prob, np.array([[2j]]))
    assert abs(rep.value[0, 0] - 1j * (1 + np.sqrt(2))) < 5e-12


def test_residual_h_vanishes_at_solution_only():
    prob = point_gamma_problem()
    b = np.array([[2j]])
    rep = solve_omega(prob, b)
    assert residual_h(prob, rep.value, b) <= 1e-11
    assert residual_h(prob, rep.value + 0.01 * 1j, b) > 1e-4


def test_solve_omega_validates_domain():
    prob = point_gamma_problem()
    with pytest.raises(ValueError, match="half-plane"):
        solve_omega(prob, np.array([[1.0 + 0j]]))
    with pytest.raises(ValueError, match="half-plane"):
        solve_omega(prob, np.array([[-2j]]))


def test_fixed_point_independent_of_damping_and_start():
    rng = np.random.default_rng(10)
    prob = random_problem(rng, n=2, m=2)
    b = random_upper(rng, 2)
    w0 = solve_omega(prob, b, SolverConfig(damping=0.0)).value
    w5 = solve_omega(prob, b, SolverConfig(damping=0.5)).value
    warm = solve_omega(prob, b, SolverConfig(start=w0 + 1e-3)).value
    assert opnorm(w0 - w5) < 1e-10
    assert opnorm(w0 - warm) < 1e-10


def test_imaginary_part_grows_under_subordination():
    rng = np.random.default_rng(11)
    for _ in range(8):
        prob = random_problem(rng)
        n = prob.model.base_dim
        b = random_upper(rng, n)
        w = solve_omega(prob, b).value
        gap = imag_part(w) - imag_part(b)
        assert np.linalg.eigvalsh(gap)[0] >= -1e-11


def test_level_consistency_of_subordination():
    rng = np.random.default_rng(12)
    prob = random_problem(rng, n=2, m=2)
    b = random_upper(rng, 2)
    w1 = solve_omega(prob, b).value
    w2 = solve_omega(prob, np.kron(np.eye(2), b)).value
    assert opnorm(w2 - np.kron(np.eye(2), w1)) < 1e-10


def test_stack_solve_matches_single_solves():
    rng = np.random.default_rng(13)
    prob = random_problem(rng, n=2, m=3)
    bs = np.stack([random_upper(rng, 2) for _ in range(4)])
    w, iters, res, ok = solve_omega_stack(prob, bs)
    assert ok.all() and (res <= 1e-12).all()
    for k in range(4):
        single = solve_omega(prob, bs[k])
        assert opnorm(w[k] - single.value) < 1e-10


def test_non_convergence_is_reported_not_raised():
    prob = point_gamma_problem()
    rep = solve_omega(prob, np.array([[2j]]), SolverConfig(max_iter=2))
    assert not rep.converged
    assert rep.iterations == 2
    assert np.isfinite(rep.residual)


def test_power_variant_validation():
    model = scalar_to_model(ScalarMeasure.symmetric_bernoulli())
    with pytest.raises(ValueError, match="completely positive"):
        SubordinationProblem.power(model, CPMap.scaled_identity(0.5, 1))
    with pytest.raises(ValueError):
        SubordinationProblem(model=model, alpha=CPMap.scaled_identity(2.0, 1),
                             eta=CPMap.scaled_identity(1.0, 2), variant="power")
    with pytest.raises(ValueError, match="eta map"):
        SubordinationProblem(model=model, variant="generic")


def test_power_fixed_point_bernoulli_alpha_two():
    # for the symmetric Bernoulli law h(w) = -1/w, so the alpha = 2 equation
    # is w = b - 1/w with solution w = (b + sqrt(b^2 - 4))/2
    model = scalar_to_model(ScalarMeasure.symmetric_bernoulli())
    rep = solve_omega_alpha(model, CPMap.scaled_identity(2.0, 1), np.array([[1j]]))
    assert rep.converged
    expected = 1j * (1 + np.sqrt(5)) / 2
    assert abs(rep.value[0, 0] - expected) < 5e-12


def test_power_h_map_matches_hand_value():
    model = scalar_to_model(ScalarMeasure.symmetric_bernoulli())
    prob = SubordinationProblem.power(model, CPMap.scaled_identity(2.0, 1))
    h = prob.h_map(np.array([[1j]]), 1)
    assert abs(h[0, 0] - 1j) < 1e-13  # (alpha - Id) h = h = -1/i = i


def test_vq_scalar_closed_form_and_positivity():
    prob = point_gamma_problem()
    rep = solve_vq(prob, np.array([[0.1]]), np.array([[0.0]]))
    assert rep.converged
    assert abs(rep.value[0, 0] - point_vq_at_zero(0.1)) < 1e-11
    rng = np.random.default_rng(14)
    for _ in range(5):
        gen = random_problem(rng, n=2, m=2)
        q = 0.05 + 0.5 * rng.random()
        u = random_hermitian(rng, 2)
        rep = solve_vq(gen, q * np.eye(2), u)
        assert rep.converged
        assert np.linalg.eigvalsh(real_part(rep.value))[0] > 0


def test_vq_validation():
    prob = point_gamma_problem()
    with pytest.raises(ValueError, match="strictly positive"):
        solve_vq(prob, np.array([[-0.1]]), np.array([[0.0]]))
    with pytest.raises(ValueError, match="matching shapes"):
        solve_vq(prob, np.array([[0.1]]), np.zeros((2, 2)))
    model = scalar_to_model(ScalarMeasure.symmetric_bernoulli())
    power = SubordinationProblem.power(model, CPMap.scaled_identity(2.0, 1))
    with pytest.raises(ValueError, match="generic-variant"):
        solve_vq(power, np.array([[0.1]]), np.array([[0.0]]))
    with pytest.raises(ValueError, match="generic-variant"):
        phi_q(power, np.array([[0.1]]), np.array([[0.0]]))


def test_graph_property_links_vq_to_omega():
    rng = np.random.default_rng(15)
    for _ in range(10):
        prob = random_problem(rng)
        n = prob.model.base_dim
        q = 0.05 + rng.random()
        r = random_hermitian(rng, n, scale=0.6)
        w = solve_omega(prob, r + 1j * q * np.eye(n)).value
        v = solve_vq(prob, q * np.eye(n), real_part(w)).value
        assert opnorm(v - imag_part(w)) < 1e-9


def test_phi_q_inverts_the_boundary_curve():
    rng = np.random.default_rng(16)
    for _ in range(10):
        prob = random_problem(rng, n=int(rng.integers(1, 3)))
        n = prob.model.base_dim
        q = 0.05 + rng.random()
        r = random_hermitian(rng, n, scale=0.6)
        w = solve_omega(prob, r + 1j * q * np.eye(n)).value
        back = phi_q(prob, q * np.eye(n), real_part(w))
        assert opnorm(back - r) < 1e-9
