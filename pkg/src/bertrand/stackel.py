"""Coupling-constant duality between the two Bertrand families.

The Stackel transform of a Type I Hamiltonian splits H_I = T_I + V_I,
shifts each piece by a constant, and takes the quotient

    H_II = (T_I + B) / (V_I / A + C).

With beta = 2 gamma, kappa = -lambda^2, C = -2 delta this is exactly the
Type II Hamiltonian with oscillator coupling B: the denominator equals the
Type II structure function D(r) = r^-2g + lam2 r^2g - 2 delta and the
kinetic factor matches term by term.  The map swaps energy and coupling
roles between the families; it is an algebraic involution on parameters.

Metric time-block shifts (xi, chi) do not enter either Hamiltonian, so
mapped parameter sets carry shift 0.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptyDomainError
from .geometry import (BertrandSpace, TypeIIParams, TypeIParams,
                       radial_terms)

_MAX_RESAMPLE_ROUNDS = 50


def map_i_to_ii(params_i: TypeIParams, B: float, C: float) -> TypeIIParams:
    """Type I (beta; kappa) -> Type II (beta/2; -kappa, -C/2) with
    oscillator coupling B."""
    return TypeIIParams(gamma=Fraction(params_i.beta) / 2,
                        lambda_sq=0.0 - params_i.kappa, delta=0.0 - C / 2.0, chi=0.0,
                        coupling_B=float(B))


def map_ii_to_i(params_ii: TypeIIParams, A: float) -> tuple:
    """Type II (gamma; lambda^2, delta) -> (Type I (2 gamma; -kappa), B, C)
    with C = -2 delta; exact inverse of map_i_to_ii."""
    if A == 0.0:
        raise ValueError("Type I coupling A must be nonzero")
    params_i = TypeIParams(beta=2 * Fraction(params_ii.gamma),
                           kappa=0.0 - params_ii.lambda_sq, xi=0.0,
                           coupling_A=float(A))
    return params_i, params_ii.coupling_B, 0.0 - 2.0 * params_ii.delta


@dataclass(frozen=True)
class StackelDescriptor:
    """A Type I parameter set, the transform constants (B, C), and the
    derived Type II dual."""

    type_i: TypeIParams
    aux_B: float
    aux_C: float
    type_ii: TypeIIParams

    def __post_init__(self):
        if self.type_i.coupling_A == 0.0:
            raise ValueError("Type I coupling A must be nonzero")
        expect = map_i_to_ii(self.type_i, self.aux_B, self.aux_C)
        if (expect.gamma != self.type_ii.gamma
                or expect.lambda_sq != self.type_ii.lambda_sq
                or expect.delta != self.type_ii.delta
                or expect.coupling_B != self.type_ii.coupling_B):
            raise ValueError("type_ii is not the dual of type_i under (B, C)")

    @classmethod
    def from_type_i(cls, params_i: TypeIParams, B: float,
                    C: float) -> "StackelDescriptor":
        return cls(type_i=params_i, aux_B=float(B), aux_C=float(C),
                   type_ii=map_i_to_ii(params_i, B, C))

    @classmethod
    def from_type_ii(cls, params_ii: TypeIIParams,
                     A: float) -> "StackelDescriptor":
        params_i, B, C = map_ii_to_i(params_ii, A)
        return cls(type_i=params_i, aux_B=float(B), aux_C=float(C),
                   type_ii=params_ii)


def _pair_terms(desc: StackelDescriptor, dim_N: int) -> tuple:
    t_i = radial_terms(BertrandSpace(dim_N, desc.type_i))
    t_ii = radial_terms(BertrandSpace(dim_N, desc.type_ii))
    return t_i, t_ii


def identity_residual(desc: StackelDescriptor, q, p) -> float:
    """(T_I + B)/(V_I/A + C) - H_II at one phase point; identically zero up
    to roundoff.  Raises ZeroDivisionError where V_I/A + C vanishes."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    t_i, t_ii = _pair_terms(desc, len(q))
    r = math.sqrt(float(np.dot(q, q)))
    p_sq = float(np.dot(p, p))
    denom = float(t_i.v(r)) / desc.type_i.coupling_A + desc.aux_C
    lhs = (0.5 * float(t_i.inv_f2(r)) * p_sq + desc.aux_B) / denom
    rhs = 0.5 * float(t_ii.inv_f2(r)) * p_sq + float(t_ii.v(r))
    return lhs - rhs


def _shared_sample_box(t_i, t_ii) -> tuple:
    lo = max(t_i.domain[0], t_ii.domain[0])
    hi = min(t_i.domain[1], t_ii.domain[1])
    if not lo < hi:
        raise EmptyDomainError("dual pair has no shared validity window")
    r_ref = t_ii.r_ref if lo < t_ii.r_ref < hi else math.sqrt(
        max(lo, 1e-6) * min(hi, 1e6))
    hi_c = hi if math.isfinite(hi) else 20.0 * r_ref
    lo_c = lo if lo > 0.0 else hi_c / 400.0
    l_lo, l_hi = math.log(lo_c), math.log(hi_c)
    pad = 0.05 * (l_hi - l_lo)
    return l_lo + pad, l_hi - pad


def identity_residual_sweep(desc: StackelDescriptor, n_samples: int = 1000,
                            seed: int = 0, dim_N: int = 3,
                            momentum_scale: float = 1.0) -> float:
    """Max residual over random phase points in the shared validity window,
    relative to |H_II| with absolute floor 1e-14.

    Points where the denominator nearly cancels (the Type II domain edge)
    are resampled; the identity itself is exact, so the residual measures
    floating-point noise only.
    """
    t_i, t_ii = _pair_terms(desc, dim_N)
    l_lo, l_hi = _shared_sample_box(t_i, t_ii)
    rng = np.random.default_rng(seed)
    g2 = 2.0 * float(desc.type_ii.gamma)

    worst = 0.0
    accepted = 0
    for _ in range(_MAX_RESAMPLE_ROUNDS):
        need = n_samples - accepted
        if need <= 0:
            break
        r = np.exp(rng.uniform(l_lo, l_hi, size=need))
        denom = t_i.v(r) / desc.type_i.coupling_A + desc.aux_C
        denom_scale = (r ** -g2 + abs(desc.type_ii.lambda_sq) * r ** g2
                       + 2.0 * abs(desc.type_ii.delta) + 1e-300)
        ok = np.abs(denom) >= 1e-6 * denom_scale
        r = r[ok]
        denom = denom[ok]
        if r.size == 0:
            continue
        p = momentum_scale * rng.standard_normal((r.size, dim_N))
        p_sq = np.sum(p * p, axis=-1)
        lhs = (0.5 * t_i.inv_f2(r) * p_sq + desc.aux_B) / denom
        rhs = 0.5 * t_ii.inv_f2(r) * p_sq + t_ii.v(r)
        res = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-14)
        worst = max(worst, float(np.max(res)))
        accepted += r.size
    if accepted < n_samples:
        raise EmptyDomainError(
            f"could not draw {n_samples} usable sample points "
            f"({accepted} accepted)")
    return worst
