"""Classical orbits: Hamilton's equations, turning points, closure."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bertrand import (BertrandSpace, DegenerateOrbitError, NoBoundedOrbitError,
                      NoCircularOrbitError, TypeIParams, angular_momentum_sq,
                      apoapsis_state, apsidal_angle, bounded_orbit_grid,
                      circular_orbit, closure_check, equations_of_motion,
                      hamiltonian, integrate_orbit, measured_apsidal_angles,
                      preset, radial_orbit_data, radial_period, turning_points)


class TestHamiltonian:
    def test_flat_kepler_value(self):
        space = preset("euclidean_kc")
        q = np.array([2.0, 0.0, 0.0])
        p = np.array([0.0, 0.3, 0.0])
        # p^2/2 + A/r with A = -1
        assert hamiltonian(space, q, p) == pytest.approx(0.045 - 0.5, rel=1e-14)

    def test_flat_oscillator_value(self):
        space = preset("euclidean_oscillator")
        q = np.array([1.0, 1.0, 0.0])
        p = np.array([0.2, 0.0, 0.1])
        # p^2/2 + B r^2 with B = 1/2
        assert hamiltonian(space, q, p) == pytest.approx(0.025 + 1.0, rel=1e-14)

    @pytest.mark.parametrize("name", ["darboux_iii", "taub_nut",
                                      "sphere_hyperbolic_kc"])
    def test_equations_of_motion_are_hamiltonian_gradients(self, name):
        space = preset(name)
        q = np.array([0.9, 0.4, -0.2])
        p = np.array([0.15, -0.3, 0.25])
        qdot, pdot = equations_of_motion(space, q, p)
        h = 1e-6
        for i in range(3):
            dq = np.zeros(3); dq[i] = h
            dp = np.zeros(3); dp[i] = h
            dhdp = (hamiltonian(space, q, p + dp) - hamiltonian(space, q, p - dp)) / (2 * h)
            dhdq = (hamiltonian(space, q + dq, p) - hamiltonian(space, q - dq, p)) / (2 * h)
            assert qdot[i] == pytest.approx(dhdp, rel=1e-6, abs=1e-8)
            assert pdot[i] == pytest.approx(-dhdq, rel=1e-6, abs=1e-8)


class TestTurningPoints:
    def test_flat_kepler_quadratic_roots(self):
        space = preset("euclidean_kc")
        r_min, r_max = turning_points(space, -0.375, 1.0)
        # -0.375 = -1/r + 1/(2 r^2) has roots 2/3 and 2
        assert r_min == pytest.approx(2.0 / 3.0, rel=1e-10)
        assert r_max == pytest.approx(2.0, rel=1e-10)

    def test_flat_oscillator_roots(self):
        space = preset("euclidean_oscillator")
        e = math.sqrt(2.0)
        r_min, r_max = turning_points(space, e, 1.0)
        # r^2/2 + 1/(2 r^2) = E gives r^2 = E -/+ sqrt(E^2 - 1)
        assert r_min == pytest.approx(math.sqrt(e - 1.0), rel=1e-10)
        assert r_max == pytest.approx(math.sqrt(e + 1.0), rel=1e-10)

    def test_unbound_energy_is_rejected(self):
        with pytest.raises(NoBoundedOrbitError):
            radial_orbit_data(preset("euclidean_kc"), 0.5, 1.0)


class TestCircularOrbits:
    def test_flat_kepler_circular_orbit(self):
        orbit = circular_orbit(preset("euclidean_kc"), 1.5)
        assert orbit.radius == pytest.approx(1.5)
        assert orbit.L_sq == pytest.approx(1.5, rel=1e-12)
        assert orbit.energy == pytest.approx(-1.0 / 3.0, rel=1e-12)
        assert orbit.stable

    def test_repulsive_coupling_has_no_circular_orbit(self):
        with pytest.raises(NoCircularOrbitError):
            circular_orbit(preset("euclidean_kc", coupling_A=1.0), 1.5)

    def test_inverse_square_circular_family(self):
        # on the f = r metric every radius carries a stable circle
        orbit = circular_orbit(preset("inverse_square_kc"), 2.5)
        assert orbit.L_sq == pytest.approx(6.25, rel=1e-10)
        assert orbit.energy == pytest.approx(-0.08, rel=1e-10)
        assert orbit.stable

    def test_circular_data_is_degenerate_for_apsidal_angle(self):
        orbit = circular_orbit(preset("euclidean_kc"), 1.5)
        with pytest.raises(DegenerateOrbitError):
            apsidal_angle(preset("euclidean_kc"), orbit.energy, orbit.L_sq)


class TestApsidalAngles:
    def test_flat_kepler_half_turn(self):
        angle = apsidal_angle(preset("euclidean_kc"), -0.375, 1.0)
        assert angle == pytest.approx(math.pi, rel=1e-9)

    def test_flat_oscillator_quarter_turn(self):
        angle = apsidal_angle(preset("euclidean_oscillator"), 1.7, 1.0)
        assert angle == pytest.approx(math.pi / 2.0, rel=1e-9)

    @pytest.mark.parametrize("name,expected", [
        ("darboux_iii", math.pi / 2.0),
        ("taub_nut", math.pi),
        ("sphere_hyperbolic_kc", math.pi),
    ])
    def test_curved_presets_keep_their_apsidal_angle(self, name, expected):
        space = preset(name)
        e, l_sq = bounded_orbit_grid(space, n_momenta=1, n_energies=1)[0]
        assert apsidal_angle(space, e, l_sq) == pytest.approx(expected,
                                                              rel=1e-8)

    def test_apsidal_angle_independent_of_orbit(self):
        space = preset("sphere_hyperbolic_kc")
        angles = [apsidal_angle(space, e, l_sq)
                  for e, l_sq in bounded_orbit_grid(space, n_momenta=2,
                                                    n_energies=2)]
        assert np.ptp(angles) < 1e-9


class TestPeriodsAndIntegration:
    def test_flat_kepler_radial_period(self):
        e = -0.375
        period = radial_period(preset("euclidean_kc"), e, 1.0)
        # T = 2 pi (-2E)^(-3/2) for unit mass and A = -1
        assert period == pytest.approx(2 * math.pi * (-2 * e) ** -1.5, rel=1e-9)

    def test_integrated_orbit_conserves_energy_and_momentum(self):
        space = preset("darboux_iii")
        q0, p0 = apoapsis_state(space, 1.2, 0.5)
        period = radial_period(space, 1.2, 0.5)
        orbit = integrate_orbit(space, q0, p0, 5 * period, tol=1e-11)
        assert np.max(np.abs(orbit.energy_drift)) < 1e-9
        assert np.max(np.abs(orbit.l2_drift)) < 1e-9
        assert angular_momentum_sq(q0, p0) == pytest.approx(0.5, rel=1e-12)

    def test_measured_angles_agree_with_quadrature(self):
        space = preset("euclidean_kc")
        q0, p0 = apoapsis_state(space, -0.375, 1.0)
        orbit = integrate_orbit(space, q0, p0,
                                3 * radial_period(space, -0.375, 1.0),
                                tol=1e-11)
        angles = measured_apsidal_angles(orbit)
        assert np.mean(angles) == pytest.approx(math.pi, abs=1e-6)
        assert np.ptp(angles) < 1e-6


class TestClosure:
    def test_kepler_orbit_closes_in_one_turn(self):
        space = preset("euclidean_kc")
        q0, p0 = apoapsis_state(space, -0.375, 1.0)
        result = closure_check(space, q0, p0)
        assert result.closed
        assert result.ratio == Fraction(1)
        assert result.return_distance < 1e-7

    def test_three_halves_exponent_needs_three_periods(self):
        space = BertrandSpace(3, TypeIParams(beta=Fraction(3, 2), kappa=0.0))
        e, l_sq = bounded_orbit_grid(space, n_momenta=1, n_energies=1)[0]
        q0, p0 = apoapsis_state(space, e, l_sq)
        result = closure_check(space, q0, p0)
        # apsidal angle pi/beta = 2 pi/3, so closure after 3 radial periods
        assert result.ratio == Fraction(2, 3)
        assert result.periods == 3
        assert result.closed

    def test_oscillator_closes_in_two_periods(self):
        space = preset("euclidean_oscillator")
        q0, p0 = apoapsis_state(space, 1.7, 1.0)
        result = closure_check(space, q0, p0)
        assert result.ratio == Fraction(1, 2)
        assert result.periods == 2
        assert result.closed
