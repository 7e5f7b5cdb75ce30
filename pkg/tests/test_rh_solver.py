"""Analytic solver: pipeline trace, linearity, homogeneous members."""

import numpy as np
import pytest

import rhbvp as R
from rhbvp.boundary_data import grid_nodes
from rhbvp.errors import ConfigurationError, DataError, DomainError
from rhbvp.rh_solver import (SolverParams, cr_residual, default_hom_points,
                             herglotz_term, homogeneous_family, solve_rh)

RNG = np.random.default_rng(1105)


def _interior(n):
    r = 0.92 * np.sqrt(RNG.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * RNG.uniform(0, 1, n))


def _normal_nu(N):
    return R.disk_inner_normal(N).field


def _const_nu(N):
    return R.DirectionField.from_samples(np.ones(N, dtype=complex))


# ----------------------------------------------------------------------
# pipeline trace: nu = inner normal, phi = cos  =>  f = -1 exactly
# ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def sol():
    N = 1024
    phi = R.build_boundary_function("cos(theta)", N)
    return solve_rh(_normal_nu(N), phi)


class TestNormalCosTrace:
    def test_argument_is_exact_sawtooth(self, sol):
        assert sol.alpha.winding == (1, 0.0)
        theta = grid_nodes(1024)
        np.testing.assert_allclose(sol.alpha.samples, theta - np.pi,
                                   atol=1e-12)

    def test_schwarz_of_argument_closed_form(self, sol):
        # A(z) = -2i*log(1 - z); at z = 1/2 that is 2i*log(2)
        got = sol.A(np.array([0.5 + 0j]))[0]
        assert abs(got - 2j * np.log(2.0)) < 1e-13

    def test_conjugate_closed_form_in_weight(self, sol):
        # |weight_boundary| = exp(H) with H = -2*log|2 sin(theta/2)|
        theta = grid_nodes(1024)[1:]
        H = np.log(np.abs(sol.weight_boundary.samples[1:]))
        np.testing.assert_allclose(H, -2 * np.log(2 * np.sin(theta / 2)),
                                   atol=1e-11)

    def test_clamp_note_at_the_cut_node(self, sol):
        assert any("clamped at 1 of 8192" in n for n in sol.notes)

    def test_weighted_data_is_a_trig_polynomial(self, sol):
        theta = grid_nodes(1024)
        want = -1 + 2 * np.cos(theta) - np.cos(2 * theta)
        np.testing.assert_allclose(sol.psi.samples[1:], want[1:], atol=1e-10)

    def test_series_coefficients(self, sol):
        c = sol.g.coefficients
        np.testing.assert_allclose(c[:3], [-1.0, 2.0, -1.0], atol=1e-9)
        assert np.max(np.abs(c[3:])) < 1e-9

    def test_solution_is_minus_one(self, sol):
        z = _interior(100)
        assert np.max(np.abs(sol.f(z) + 1.0)) < 1e-10

    def test_boundary_pairing_telescopes(self, sol):
        assert sol.boundary_pairing_residual() < 1e-12

    def test_cauchy_riemann(self, sol):
        assert cr_residual(sol, _interior(20)) < 1e-8


# ----------------------------------------------------------------------
# constant field: the solver reduces to the Schwarz integral
# ----------------------------------------------------------------------

def test_constant_field_cos_gives_identity():
    N = 256
    sol = solve_rh(_const_nu(N), R.build_boundary_function("cos(theta)", N))
    z = _interior(50)
    assert np.max(np.abs(sol.f(z) - z)) < 1e-12
    assert sol.alpha.winding == (0, 0.0)


def test_zero_data_zero_solution():
    N = 64
    sol = solve_rh(_normal_nu(N), R.build_boundary_function(0.0, N))
    assert np.max(np.abs(sol.f(_interior(30)))) < 1e-14


def test_superposition():
    N = 256
    nu = _normal_nu(N)
    p1 = R.build_boundary_function("cos(theta)", N)
    p2 = R.build_boundary_function("sin(2*theta) + 0.25", N)
    p12 = R.build_boundary_function(
        "cos(theta) + sin(2*theta) + 0.25", N)
    z = _interior(40)
    lhs = solve_rh(nu, p1).f(z) + solve_rh(nu, p2).f(z)
    rhs = solve_rh(nu, p12).f(z)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_scaling_by_two_is_exact():
    # doubling phi doubles psi and the FFT exactly (power-of-two scale)
    N = 256
    nu = _normal_nu(N)
    p = R.build_boundary_function("cos(theta)", N)
    p2 = R.build_boundary_function("2*cos(theta)", N)
    g1 = solve_rh(nu, p).g.coefficients
    g2 = solve_rh(nu, p2).g.coefficients
    assert np.array_equal(g2, 2.0 * g1)


# ----------------------------------------------------------------------
# homogeneous members
# ----------------------------------------------------------------------

def test_homogeneous_constant_member_constant_field():
    N = 128
    members = homogeneous_family(_const_nu(N), ())
    assert len(members) == 1
    z = _interior(30)
    assert np.max(np.abs(members[0].f(z) - 1j)) < 1e-13


def test_homogeneous_cayley_member():
    # single distinguished point at -1 under the constant field:
    # f = i * i(z - 1)/(-1 - z) = (z - 1)/(1 + z), imaginary on |z| = 1
    N = 128
    members = homogeneous_family(_const_nu(N), (np.pi,))
    z = _interior(30)
    want = (z - 1) / (1 + z)
    assert np.max(np.abs(members[1].f(z) - want)) < 1e-12
    zb = 0.999 * np.exp(1j * np.array([0.3, 2.0, 4.4]))
    assert np.max(np.abs(members[1].f(zb).real)) < 2e-2


def test_homogeneous_constant_member_with_winding():
    # nu = inner normal: f = i * exp(-iA) = i / (1 - z)^2
    N = 256
    members = homogeneous_family(_normal_nu(N), ())
    z = _interior(30)
    assert np.max(np.abs(members[0].f(z) - 1j / (1 - z) ** 2)) < 1e-10


def test_homogeneous_family_count_and_coeffs(hom_family_cos):
    assert len(hom_family_cos) == 11
    for j, m in enumerate(hom_family_cos):
        want = tuple(1.0 if i == j else 0.0 for i in range(11))
        assert m.hom_coeffs == want
        assert len(m.hom_points) == 10


def test_default_hom_points_distinct():
    pts = default_hom_points(7)
    assert len(set(pts)) == 7
    assert all(0 <= a < 2 * np.pi for a in pts)


def test_herglotz_term_boundary_real_part_vanishes():
    z = 0.9999 * np.exp(1j * np.linspace(0.2, 6.0, 11))
    p = herglotz_term((1.0, 3.5), (0.0, 2.0, -1.0), z)
    assert np.max(np.abs((1j * p).real)) < 1e-2


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------

def test_rejects_complex_data():
    N = 64
    bad = R.BoundaryFunction(samples=np.exp(1j * grid_nodes(N)),
                             kind="complex")
    with pytest.raises(DataError):
        solve_rh(_normal_nu(N), bad)


def test_rejects_grid_mismatch():
    with pytest.raises(ConfigurationError, match="different grids"):
        solve_rh(_normal_nu(64), R.build_boundary_function(1.0, 128))


def test_rejects_duplicate_hom_points():
    with pytest.raises(ConfigurationError, match="duplicate"):
        SolverParams(hom_points=(0.5, 0.5 + 2 * np.pi))


def test_rejects_coeff_length_mismatch():
    with pytest.raises(ConfigurationError, match="hom_coeffs"):
        SolverParams(hom_points=(0.5, 1.5), hom_coeffs=(1.0, 2.0))


def test_rejects_bad_refine():
    with pytest.raises(ConfigurationError, match="refine"):
        SolverParams(refine=3)


def test_rejects_evaluation_outside_disk():
    N = 64
    sol = solve_rh(_normal_nu(N), R.build_boundary_function(1.0, N))
    with pytest.raises(DomainError):
        sol.f(np.array([1.2 + 0j]))


def test_f_on_scales_matches_pointwise(neumann_step):
    sol = neumann_step.f_source
    scales = np.array([0.4, 0.85 * np.exp(0.1j)])
    V = 64
    got = sol.f_on_scales(scales, V)
    z = scales[:, None] * np.exp(2j * np.pi * np.arange(V) / V)[None, :]
    want = sol.f(z.ravel()).reshape(2, V)
    assert np.max(np.abs(got - want)) < 1e-10
