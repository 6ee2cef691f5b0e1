"""Named presets and their closed-form Hamiltonians."""

import numpy as np
import pytest

from bertrand import (InvalidOverrideError, UnknownPresetError,
                      conformal_factor, describe, hamiltonian, preset,
                      preset_names)

ALL_PRESETS = ("euclidean_kc", "sphere_hyperbolic_kc", "inverse_square_kc",
               "type2b_kc", "taub_nut", "darboux_iv", "euclidean_oscillator",
               "darboux_iii", "sphere_hyperbolic_oscillator",
               "type2b2_oscillator")


def closed_form(space):
    """Hand-expanded (r, p^2) -> (kinetic, potential) for each preset."""
    fam = space.family
    if space.is_type_i:
        a, k = fam.coupling_A, fam.kappa
        if float(fam.beta) == 1.0:
            return lambda r, p2: ((1 + k * r * r) ** 2 * p2 / 2,
                                  a * (1 - k * r * r) / r)
        return lambda r, p2: ((1 + k * r ** 4) ** 2 * p2 / (2 * r * r),
                              a * (1 - k * r ** 4) / (r * r))
    b, l2, d = fam.coupling_B, fam.lambda_sq, fam.delta
    if float(fam.gamma) == 0.5:
        return lambda r, p2: (
            (1 - l2 * r * r) ** 2 * r * p2 / (2 * (1 + l2 * r * r - 2 * d * r)),
            b * r / (1 + l2 * r * r - 2 * d * r))
    return lambda r, p2: (
        (1 - l2 * r ** 4) ** 2 * p2 / (2 * (1 + l2 * r ** 4 - 2 * d * r * r)),
        b * r * r / (1 + l2 * r ** 4 - 2 * d * r * r))


SAMPLING_RANGES = {
    "darboux_iii": (0.05, 3.1),
    "sphere_hyperbolic_oscillator": (0.05, 3.1),
    "type2b2_oscillator": (0.05, 3.1),
    "taub_nut": (0.05, 9.5),
    "darboux_iv": (0.05, 9.5),
}


class TestClosedForms:
    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_preset_matches_expanded_hamiltonian(self, name):
        space = preset(name)
        form = closed_form(space)
        r_lo, r_hi = SAMPLING_RANGES.get(name, (0.1, 10.0))
        rng = np.random.default_rng(42)
        for _ in range(200):
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            r = rng.uniform(r_lo, r_hi)
            q = r * direction
            p = rng.normal(size=3)
            kinetic, potential = form(r, float(p @ p))
            value = hamiltonian(space, q, p)
            scale = abs(kinetic) + abs(potential)
            assert abs(value - (kinetic + potential)) / scale < 1e-12


class TestKineticIdentities:
    def test_sphere_oscillator_conformal_factor_simplifies(self):
        # with delta = lambda the factor collapses to 1/(1 + lambda r^2)
        space = preset("sphere_hyperbolic_oscillator")
        lam = np.sqrt(space.family.lambda_sq)
        assert space.family.delta == pytest.approx(lam)
        profile = conformal_factor(space)
        for r in np.linspace(0.1, 3.0, 17):
            assert profile.f(float(r)) == pytest.approx(
                1.0 / (1.0 + lam * r * r), rel=1e-13)

    def test_inverse_square_kinetic_coefficient(self):
        space = preset("inverse_square_kc")
        profile = conformal_factor(space)
        for r in (0.3, 1.0, 4.0):
            assert profile.f(r) == pytest.approx(r, rel=1e-13)


class TestCatalogSurface:
    def test_all_presets_are_listed(self):
        names = preset_names()
        for name in ALL_PRESETS:
            assert name in names

    def test_describe_reports_domain_and_angle(self):
        info = describe("darboux_iii")
        assert info["name"] == "darboux_iii"
        assert info["apsidal_angle"] == pytest.approx(np.pi / 2)
        assert info["domain"][1] == pytest.approx(np.sqrt(10.0))

    def test_unknown_preset(self):
        with pytest.raises(UnknownPresetError):
            preset("klein_gordon")

    def test_wrong_family_override(self):
        with pytest.raises(InvalidOverrideError):
            preset("darboux_iii", kappa=0.3)

    def test_override_changes_parameters(self):
        space = preset("darboux_iii", delta=0.02, hbar=0.5)
        assert space.family.delta == 0.02
        assert space.hbar == 0.5
