"""Conformal factors, domains, curvature, and radial potential data."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bertrand import (BertrandSpace, DomainViolationError, EmptyDomainError,
                      TypeIIParams, TypeIParams, as_exponent, conformal_factor,
                      green_function, green_function_derivative,
                      intrinsic_potentials, lorentzian_time_coefficient,
                      preset, scalar_curvature)
from bertrand.geometry import radial_terms, require_in_domain


def central_diff(fn, r, h=1e-6):
    return (fn(r + h) - fn(r - h)) / (2.0 * h)


class TestExponents:
    def test_accepts_common_spellings(self):
        assert as_exponent("3/2") == Fraction(3, 2)
        assert as_exponent(1.5) == Fraction(3, 2)
        assert as_exponent(2) == Fraction(2)
        assert as_exponent(Fraction(1, 2)) == Fraction(1, 2)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            TypeIParams(beta=0, kappa=0.0)
        with pytest.raises(ValueError):
            TypeIIParams(gamma=as_exponent(-1), lambda_sq=0.0, delta=0.0)


class TestFlatLimits:
    def test_type_i_flat_profile(self):
        space = preset("euclidean_kc")
        profile = conformal_factor(space)
        for r in (0.1, 1.0, 7.5, 40.0):
            assert profile.f(r) == 1.0
            assert profile.f_prime(r) == 0.0
            assert profile.f_double_prime(r) == 0.0
        assert profile.domain == (0.0, math.inf)

    def test_type_ii_flat_profile(self):
        space = preset("euclidean_oscillator")
        profile = conformal_factor(space)
        for r in (0.2, 1.0, 12.0):
            assert profile.f(r) == 1.0
        assert scalar_curvature(space, 1.3) == 0.0

    def test_flat_curvature_is_exactly_zero(self):
        assert scalar_curvature(preset("euclidean_kc"), 2.0) == 0.0


class TestDomains:
    def test_darboux_iii_window_ends_at_metric_wall(self):
        profile = conformal_factor(preset("darboux_iii"))
        lo, hi = profile.domain
        assert lo == 0.0
        assert hi == pytest.approx(math.sqrt(10.0), rel=1e-14)

    def test_negative_kappa_truncates_type_i_window(self):
        space = BertrandSpace(3, TypeIParams(beta=1, kappa=-0.04))
        lo, hi = conformal_factor(space).domain
        # s(r) = 1 + kappa r^2 vanishes at r = 1/sqrt(-kappa)
        assert hi == pytest.approx(5.0, rel=1e-14)

    def test_out_of_window_radius_is_rejected(self):
        profile = conformal_factor(preset("darboux_iii"))
        with pytest.raises(DomainViolationError):
            require_in_domain(4.0, profile.domain)
        require_in_domain(1.0, profile.domain)

    def test_nonfinite_parameters_give_empty_domain(self):
        space = BertrandSpace(3, TypeIIParams(gamma=1, lambda_sq=float("nan"),
                                              delta=0.05))
        with pytest.raises(EmptyDomainError):
            conformal_factor(space)


class TestProfileDerivatives:
    @pytest.mark.parametrize("name,radii", [
        ("darboux_iii", (0.4, 1.1, 2.6)),
        ("taub_nut", (0.3, 1.7, 6.0)),
        ("sphere_hyperbolic_kc", (0.5, 1.2, 2.4)),
    ])
    def test_derivatives_match_finite_differences(self, name, radii):
        profile = conformal_factor(preset(name))
        for r in radii:
            fd1 = central_diff(profile.f, r)
            fd2 = central_diff(profile.f_prime, r)
            assert profile.f_prime(r) == pytest.approx(fd1, rel=1e-7, abs=1e-9)
            assert profile.f_double_prime(r) == pytest.approx(fd2, rel=1e-6,
                                                              abs=1e-8)


class TestCurvature:
    def test_darboux_iii_closed_form(self):
        space = preset("darboux_iii")
        delta = 0.05
        for r in (0.3, 1.0, 2.0, 3.0):
            expected = 24 * delta * (1 - delta * r * r) / (1 - 2 * delta * r * r) ** 3
            assert scalar_curvature(space, r) == pytest.approx(expected, rel=1e-12)
        assert scalar_curvature(space, 3.0) == pytest.approx(660.0, rel=1e-12)

    @pytest.mark.parametrize("name", ["sphere_hyperbolic_kc",
                                      "sphere_hyperbolic_oscillator"])
    def test_constant_curvature_presets_are_constant(self, name):
        space = preset(name)
        rs = np.linspace(0.2, 3.0, 41)
        values = np.array([scalar_curvature(space, float(r)) for r in rs])
        spread = np.ptp(values) / abs(values.mean())
        assert spread < 1e-10


class TestGreenFunction:
    def test_flat_green_function_is_minus_inverse_r(self):
        for name in ("euclidean_kc", "euclidean_oscillator"):
            space = preset(name)
            for r in (0.5, 2.0, 9.0):
                assert green_function(space, r) == pytest.approx(-1.0 / r,
                                                                 rel=1e-12)

    def test_green_derivative_matches_finite_difference(self):
        space = preset("darboux_iii")
        for r in (0.6, 1.4, 2.5):
            fd = central_diff(lambda x: green_function(space, x), r)
            assert green_function_derivative(space, r) == pytest.approx(
                fd, rel=1e-6)

    def test_intrinsic_potentials_flat(self):
        space = preset("euclidean_kc")
        kc, osc = intrinsic_potentials(space, 2.0, kc_coupling=-1.0,
                                       osc_coupling=0.5)
        # U = -1/r, so A U = 0.5 and B/U^2 = 0.5 r^2 = 2 at r = 2
        assert kc == pytest.approx(0.5, rel=1e-12)
        assert osc == pytest.approx(2.0, rel=1e-12)


class TestRadialTerms:
    def test_terms_are_cached_per_space(self):
        space = preset("darboux_iii")
        assert radial_terms(space) is radial_terms(space)

    def test_time_coefficient_positive_inside_window(self):
        for name in ("euclidean_kc", "darboux_iii", "taub_nut"):
            space = preset(name)
            lo, hi = conformal_factor(space).domain
            hi = min(hi, 10.0)
            for r in np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 7):
                value = lorentzian_time_coefficient(space, float(r))
                assert np.isfinite(value) and value > 0.0
