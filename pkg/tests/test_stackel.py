"""Coupling-constant duality between the two metric families."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bertrand import (StackelDescriptor, TypeIIParams, TypeIParams,
                      identity_residual, identity_residual_sweep, map_i_to_ii,
                      map_ii_to_i, stackel_pairs)


class TestParameterMaps:
    def test_forward_map(self):
        params_i = TypeIParams(beta=2, kappa=-0.04)
        params_ii = map_i_to_ii(params_i, B=1.0, C=-0.2)
        assert params_ii.gamma == Fraction(1)
        assert params_ii.lambda_sq == pytest.approx(0.04)
        assert params_ii.delta == pytest.approx(0.1)

    def test_round_trip_is_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            beta = Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 4)))
            params_i = TypeIParams(beta=beta, kappa=float(rng.normal(0, 0.2)),
                                   coupling_A=float(rng.normal(-1, 0.3)))
            b = float(rng.uniform(0.2, 2.0))
            c = float(rng.normal(0, 0.4))
            params_ii = map_i_to_ii(params_i, B=b, C=c)
            back, b_back, c_back = map_ii_to_i(params_ii, A=params_i.coupling_A)
            assert back.beta == params_i.beta
            assert back.kappa == params_i.kappa
            assert back.coupling_A == params_i.coupling_A
            assert b_back == b and c_back == c

    def test_zero_parameters_do_not_produce_negative_zero(self):
        params_ii = map_i_to_ii(TypeIParams(beta=1, kappa=0.0), B=1.0, C=0.0)
        assert not math.copysign(1.0, params_ii.lambda_sq) < 0
        assert not math.copysign(1.0, params_ii.delta) < 0


class TestIdentityResidual:
    def test_pointwise_residual_is_tiny(self):
        desc = StackelDescriptor.from_type_i(
            TypeIParams(beta=2, kappa=-0.04), B=1.0, C=-0.2)
        q = np.array([0.8, 0.3, -0.1])
        p = np.array([0.2, -0.4, 0.35])
        assert identity_residual(desc, q, p) < 1e-13

    def test_sweep_over_phase_space(self):
        desc = StackelDescriptor.from_type_i(
            TypeIParams(beta=2, kappa=-0.04), B=1.0, C=-0.2)
        assert identity_residual_sweep(desc, n_samples=500, seed=0) < 1e-12

    def test_sweep_is_deterministic(self):
        desc = StackelDescriptor.from_type_ii(
            TypeIIParams(gamma=1, lambda_sq=0.0, delta=0.05), A=-1.0)
        first = identity_residual_sweep(desc, n_samples=200, seed=3)
        second = identity_residual_sweep(desc, n_samples=200, seed=3)
        assert first == second

    def test_random_parameter_descriptors(self):
        rng = np.random.default_rng(11)
        betas = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2),
                 Fraction(3))
        for i in range(20):
            params_i = TypeIParams(beta=betas[i % len(betas)],
                                   kappa=float(rng.normal(0, 0.15)))
            desc = StackelDescriptor.from_type_i(
                params_i, B=float(rng.uniform(0.3, 1.5)),
                C=float(rng.normal(0, 0.3)))
            assert identity_residual_sweep(desc, n_samples=50,
                                           seed=i) < 1e-12


class TestCatalogPairs:
    def test_all_catalog_pairs_satisfy_the_identity(self):
        pairs = stackel_pairs()
        assert len(pairs) == 6
        for kc_name, osc_name, desc in pairs:
            assert identity_residual_sweep(desc, n_samples=200,
                                           seed=0) < 1e-12

    def test_pairs_link_matching_exponents(self):
        for kc_name, osc_name, desc in stackel_pairs():
            assert desc.type_i.beta == 2 * desc.type_ii.gamma
            assert desc.type_i.kappa == pytest.approx(-desc.type_ii.lambda_sq)
            assert desc.aux_C == pytest.approx(-2.0 * desc.type_ii.delta)
