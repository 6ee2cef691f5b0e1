"""Parametric construction of the two families of Bertrand spaces.

A Bertrand space is an N-dimensional conformally flat Riemannian manifold
g = f(r)^2 dq^2 whose geodesic/potential dynamics extends the classical
Bertrand theorem.  Two families exist:

* Type I (Kepler-Coulomb-like), parameters (beta; kappa, xi) with
  f(r)^2 = 1 / (r^2 (r^-beta + kappa r^beta)^2),
* Type II (oscillator-like), parameters (gamma; lambda^2, delta, chi) with
  f(r)^2 = (r^-2g + l2 r^2g - 2 delta) / (r^2 (r^-2g - l2 r^2g)^2).

This module builds closed-form evaluators for f and its derivatives, the
scalar curvature, the radial Green function U(r) and the intrinsic
Kepler-Coulomb / oscillator potentials, together with the validity window
(the maximal interval where f^2 is positive and finite).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .errors import DomainViolationError, EmptyDomainError, QuadratureFailureError

ArrayLike = Union[float, np.ndarray]


def as_exponent(value) -> Fraction:
    """Coerce ``value`` to a positive rational exponent (reduced fraction).

    Accepts Fraction, int, strings like "3/2", (num, den) pairs, and floats
    (floats go through ``limit_denominator`` so 1.5 -> 3/2).
    """
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, tuple):
        frac = Fraction(value[0], value[1])
    elif isinstance(value, float):
        frac = Fraction(value).limit_denominator(4096)
    else:
        frac = Fraction(value)
    if frac <= 0:
        raise ValueError(f"exponent must be positive, got {frac}")
    return frac


@dataclass(frozen=True)
class TypeIParams:
    """Type I family: rational exponent beta, curvature parameter kappa,
    metric-only shift xi, potential coupling A."""

    beta: Fraction
    kappa: float
    xi: float = 0.0
    coupling_A: float = -1.0

    def __post_init__(self):
        object.__setattr__(self, "beta", as_exponent(self.beta))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "coupling_A", float(self.coupling_A))


@dataclass(frozen=True)
class TypeIIParams:
    """Type II family: rational exponent gamma, real lambda^2 (may be
    negative), delta, metric-only shift chi, potential coupling B."""

    gamma: Fraction
    lambda_sq: float
    delta: float
    chi: float = 0.0
    coupling_B: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_exponent(self.gamma))
        object.__setattr__(self, "lambda_sq", float(self.lambda_sq))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "chi", float(self.chi))
        object.__setattr__(self, "coupling_B", float(self.coupling_B))


FamilyParams = Union[TypeIParams, TypeIIParams]


@dataclass(frozen=True)
class BertrandSpace:
    """Dimension, family parameters, and hbar (consumed by quantum code)."""

    dim_N: int
    family: FamilyParams
    hbar: float = 1.0

    def __post_init__(self):
        if self.dim_N < 2:
            raise ValueError(f"dim_N must be >= 2, got {self.dim_N}")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def type_i(cls, beta, kappa, xi=0.0, coupling_A=-1.0, dim_N=3, hbar=1.0):
        return cls(dim_N, TypeIParams(beta, kappa, xi, coupling_A), hbar)

    @classmethod
    def type_ii(cls, gamma, lambda_sq, delta, chi=0.0, coupling_B=0.5,
                dim_N=3, hbar=1.0):
        return cls(dim_N, TypeIIParams(gamma, lambda_sq, delta, chi, coupling_B), hbar)

    @property
    def is_type_i(self) -> bool:
        return isinstance(self.family, TypeIParams)

    @property
    def coupling(self) -> float:
        return (self.family.coupling_A if self.is_type_i
                else self.family.coupling_B)


@dataclass(frozen=True)
class RadialProfile:
    """Conformal factor f with closed-form derivatives on its validity window."""

    f: Callable[[ArrayLike], ArrayLike]
    f_prime: Callable[[ArrayLike], ArrayLike]
    f_double_prime: Callable[[ArrayLike], ArrayLike]
    domain: tuple
    r_ref: float

    def contains(self, r) -> bool:
        lo, hi = self.domain
        r = np.asarray(r, dtype=float)
        return bool(np.all((r > lo) & (r < hi)))


@dataclass(frozen=True)
class RadialTerms:
    """All closed-form radial evaluators for one space.

    ``inv_f2`` and its derivative are rational in r (no square roots), which
    keeps the Hamiltonian vector field finite up to the domain boundary.
    """

    domain: tuple
    r_ref: float
    f: Callable = field(repr=False)
    f_prime: Callable = field(repr=False)
    f_double_prime: Callable = field(repr=False)
    inv_f2: Callable = field(repr=False)
    d_inv_f2: Callable = field(repr=False)
    v: Callable = field(repr=False)
    v_prime: Callable = field(repr=False)
    v_double_prime: Callable = field(repr=False)
    green_integrand: Callable = field(repr=False)
    time_coefficient: Callable = field(repr=False)
    # sign of (r^-2g - lambda^2 r^2g) on the window; +1 for Type I
    branch_sign: float = 1.0


def require_in_domain(r, domain, what="r"):
    lo, hi = domain
    arr = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= lo) or np.any(arr >= hi):
        raise DomainViolationError(
            f"{what}={r!r} outside validity window ({lo:g}, {hi:g})")


def _pick_window(boundaries, is_valid):
    """Choose the positivity window: the one containing r=1 if valid,
    otherwise the first valid one (ordered by lower edge)."""
    edges = [0.0] + sorted(b for b in boundaries if b > 0.0) + [math.inf]
    windows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        mid = _window_probe(lo, hi)
        if is_valid(mid):
            windows.append((lo, hi))
    if not windows:
        raise EmptyDomainError("no r > 0 gives a positive finite conformal factor")
    for lo, hi in windows:
        if lo < 1.0 < hi:
            return lo, hi
    return windows[0]


def _window_probe(lo, hi):
    if math.isinf(hi):
        return 2.0 * lo if lo > 0.0 else 1.0
    return 0.5 * (lo + hi) if lo == 0.0 else math.sqrt(lo * hi)


def _reference_point(lo, hi):
    if lo < 1.0 < hi:
        return 1.0
    return _window_probe(lo, hi)


def _check_finite_params(*values):
    if not all(math.isfinite(v) for v in values):
        raise EmptyDomainError(f"non-finite space parameters: {values}")


def _flat_terms(space: BertrandSpace) -> RadialTerms:
    """Exact Euclidean evaluators for the flat parameter choices."""
    one = lambda r: np.ones_like(np.asarray(r, dtype=float)) if np.ndim(r) else 1.0
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float)) if np.ndim(r) else 0.0
    fam = space.family
    if isinstance(fam, TypeIParams):
        A, xi = fam.coupling_A, fam.xi
        v = lambda r: A / r
        vp = lambda r: -A / r ** 2
        vpp = lambda r: 2.0 * A / r ** 3
        tc = lambda r: 1.0 / r + xi
    else:
        B, chi = fam.coupling_B, fam.chi
        v = lambda r: B * r * r
        vp = lambda r: 2.0 * B * r
        vpp = lambda r: 2.0 * B + 0.0 * r
        tc = lambda r: r * r + chi
    return RadialTerms(
        domain=(0.0, math.inf), r_ref=1.0,
        f=one, f_prime=zero, f_double_prime=zero,
        inv_f2=one, d_inv_f2=zero,
        v=v, v_prime=vp, v_double_prime=vpp,
        green_integrand=lambda r: r ** -2.0,
        time_coefficient=tc,
    )


def _type_i_terms(space: BertrandSpace) -> RadialTerms:
    fam = space.family
    beta = float(fam.beta)
    kappa, A = fam.kappa, fam.coupling_A
    _check_finite_params(beta, kappa, A, fam.xi)
    if beta == 1.0 and kappa == 0.0:
        return _flat_terms(space)

    # positivity of s = r^(1-b) + kappa r^(1+b) <=> 1 + kappa r^(2b) > 0
    if kappa < 0.0:
        r_sing = (-1.0 / kappa) ** (1.0 / (2.0 * beta))
        lo, hi = _pick_window([r_sing], lambda r: 1.0 + kappa * r ** (2 * beta) > 0)
    else:
        lo, hi = 0.0, math.inf
    r_ref = _reference_point(lo, hi)

    def s(r):
        return r ** (1.0 - beta) + kappa * r ** (1.0 + beta)

    def sp(r):
        return (1.0 - beta) * r ** -beta + (1.0 + beta) * kappa * r ** beta

    def spp(r):
        return (-beta * (1.0 - beta) * r ** (-beta - 1.0)
                + beta * (1.0 + beta) * kappa * r ** (beta - 1.0))

    f = lambda r: 1.0 / s(r)
    fp = lambda r: -sp(r) / s(r) ** 2
    fpp = lambda r: (2.0 * sp(r) ** 2 - s(r) * spp(r)) / s(r) ** 3

    inv_f2 = lambda r: s(r) ** 2
    d_inv_f2 = lambda r: 2.0 * s(r) * sp(r)

    v = lambda r: A * (r ** -beta - kappa * r ** beta)
    vp = lambda r: -A * beta * (r ** (-beta - 1.0) + kappa * r ** (beta - 1.0))
    vpp = lambda r: A * beta * ((beta + 1.0) * r ** (-beta - 2.0)
                                - kappa * (beta - 1.0) * r ** (beta - 2.0))

    return RadialTerms(
        domain=(lo, hi), r_ref=r_ref,
        f=f, f_prime=fp, f_double_prime=fpp,
        inv_f2=inv_f2, d_inv_f2=d_inv_f2,
        v=v, v_prime=vp, v_double_prime=vpp,
        green_integrand=lambda r: s(r) / r ** 2,
        time_coefficient=lambda r: (r ** -beta - kappa * r ** beta) + fam.xi,
    )


def _type_ii_windows(gamma, lam2, delta):
    """Boundaries in x = r^(2 gamma): roots of D and of W.

    x D(x) = lam2 x^2 - 2 delta x + 1 and x W(x) = 1 - lam2 x^2.
    """
    boundaries = []
    if lam2 != 0.0:
        disc = delta * delta - lam2
        if disc >= 0.0:
            root = math.sqrt(disc)
            for x in ((delta - root) / lam2, (delta + root) / lam2):
                if x > 0.0:
                    boundaries.append(x)
        if lam2 > 0.0:
            boundaries.append(1.0 / math.sqrt(lam2))
    elif delta > 0.0:
        boundaries.append(1.0 / (2.0 * delta))

    def valid(x):
        d_num = lam2 * x * x - 2.0 * delta * x + 1.0
        w_num = 1.0 - lam2 * x * x
        return d_num > 0.0 and w_num != 0.0

    lo_x, hi_x = _pick_window(boundaries, valid)
    expo = 1.0 / (2.0 * gamma)
    lo = lo_x ** expo if lo_x > 0.0 else 0.0
    hi = hi_x ** expo if math.isfinite(hi_x) else math.inf
    return lo, hi


def _type_ii_terms(space: BertrandSpace) -> RadialTerms:
    fam = space.family
    g2 = 2.0 * float(fam.gamma)
    lam2, delta, B = fam.lambda_sq, fam.delta, fam.coupling_B
    _check_finite_params(g2, lam2, delta, B, fam.chi)
    if g2 == 2.0 and lam2 == 0.0 and delta == 0.0:
        return _flat_terms(space)

    lo, hi = _type_ii_windows(float(fam.gamma), lam2, delta)
    r_ref = _reference_point(lo, hi)

    def D(r):
        return r ** -g2 + lam2 * r ** g2 - 2.0 * delta

    def Dp(r):
        return g2 * (lam2 * r ** (g2 - 1.0) - r ** (-g2 - 1.0))

    def Dpp(r):
        return g2 * ((g2 + 1.0) * r ** (-g2 - 2.0)
                     + lam2 * (g2 - 1.0) * r ** (g2 - 2.0))

    def W(r):
        return r ** -g2 - lam2 * r ** g2

    # sigma makes S = sigma * r * W positive on the window
    sigma = 1.0 if W(r_ref) > 0.0 else -1.0

    def S(r):
        return sigma * (r ** (1.0 - g2) - lam2 * r ** (1.0 + g2))

    def Sp(r):
        return sigma * ((1.0 - g2) * r ** -g2 - (1.0 + g2) * lam2 * r ** g2)

    def Spp(r):
        return sigma * (-g2 * (1.0 - g2) * r ** (-g2 - 1.0)
                        - g2 * (1.0 + g2) * lam2 * r ** (g2 - 1.0))

    def f(r):
        return np.sqrt(D(r)) / S(r)

    def fp(r):
        d, s = D(r), S(r)
        sq = np.sqrt(d)
        return Dp(r) / (2.0 * sq * s) - sq * Sp(r) / s ** 2

    def fpp(r):
        d, s = D(r), S(r)
        dp, sp_ = Dp(r), Sp(r)
        sq = np.sqrt(d)
        return (Dpp(r) / (2.0 * sq * s)
                - dp ** 2 / (4.0 * d * sq * s)
                - dp * sp_ / (sq * s ** 2)
                + 2.0 * sq * sp_ ** 2 / s ** 3
                - sq * Spp(r) / s ** 2)

    inv_f2 = lambda r: S(r) ** 2 / D(r)

    def d_inv_f2(r):
        d, s = D(r), S(r)
        return (2.0 * s * Sp(r) * d - s ** 2 * Dp(r)) / d ** 2

    v = lambda r: B / D(r)
    vp = lambda r: -B * Dp(r) / D(r) ** 2
    vpp = lambda r: B * (2.0 * Dp(r) ** 2 - D(r) * Dpp(r)) / D(r) ** 3

    return RadialTerms(
        domain=(lo, hi), r_ref=r_ref,
        f=f, f_prime=fp, f_double_prime=fpp,
        inv_f2=inv_f2, d_inv_f2=d_inv_f2,
        v=v, v_prime=vp, v_double_prime=vpp,
        green_integrand=lambda r: S(r) / (r ** 2 * np.sqrt(D(r))),
        time_coefficient=lambda r: 1.0 / D(r) + fam.chi,
        branch_sign=sigma,
    )


@lru_cache(maxsize=None)
def radial_terms(space: BertrandSpace) -> RadialTerms:
    """Build (and cache) the closed-form evaluator bundle for a space."""
    if space.is_type_i:
        return _type_i_terms(space)
    return _type_ii_terms(space)


def conformal_factor(space: BertrandSpace) -> RadialProfile:
    """Conformal factor f (positive branch) with closed-form f', f''.

    The domain is the maximal interval around the reference point on which
    f^2 stays positive and finite; the window containing r=1 is preferred.
    """
    t = radial_terms(space)
    return RadialProfile(f=t.f, f_prime=t.f_prime, f_double_prime=t.f_double_prime,
                         domain=t.domain, r_ref=t.r_ref)


def scalar_curvature(space: BertrandSpace, r: ArrayLike) -> ArrayLike:
    """Scalar curvature of g = f^2 dq^2 at radius r (generally nonconstant)::

        R = -(N-1) [ (N-4) f'^2 + f (2 f'' + 2 (N-1) f'/r) ] / f^4
    """
    t = radial_terms(space)
    require_in_domain(r, t.domain)
    n = space.dim_N
    f, fp, fpp = t.f(r), t.f_prime(r), t.f_double_prime(r)
    return -(n - 1) * ((n - 4) * fp ** 2
                       + f * (2.0 * fpp + 2.0 * (n - 1) * fp / r)) / f ** 4


@lru_cache(maxsize=None)
def _green_anchor(space: BertrandSpace) -> float:
    """Integration constant: U(r_ref).

    Type II anchors so that gamma^2 U^2 = r^-2g + lam2 r^2g - 2 delta holds
    identically on the window.  Type I anchors at U(inf) = 0 when the tail
    integral converges (kappa = 0), else U(r_ref) = 0.
    """
    t = radial_terms(space)
    fam = space.family
    if isinstance(fam, TypeIIParams):
        g2 = 2.0 * float(fam.gamma)
        d_ref = t.r_ref ** -g2 + fam.lambda_sq * t.r_ref ** g2 - 2.0 * fam.delta
        return -t.branch_sign * math.sqrt(d_ref) / float(fam.gamma)
    if fam.kappa == 0.0:
        tail = _quad(t.green_integrand, t.r_ref, math.inf)
        return -tail
    return 0.0


def _quad(fn, a, b):
    out = integrate.quad(fn, a, b, epsabs=1e-12, epsrel=1e-12,
                         limit=200, full_output=1)
    if len(out) > 3:
        raise QuadratureFailureError(f"quadrature on ({a:g}, {b:g}): {out[3]}")
    return out[0]


def green_function(space: BertrandSpace, r: float) -> float:
    """Radial symmetric Green function U(r), with U'(r) = 1/(r^2 f(r)).

    Computed by adaptive quadrature from the domain reference point; the
    integration constant follows the module's anchor convention (see
    ``_green_anchor``).
    """
    t = radial_terms(space)
    require_in_domain(r, t.domain)
    return _green_anchor(space) + _quad(t.green_integrand, t.r_ref, float(r))


def green_function_derivative(space: BertrandSpace, r: ArrayLike) -> ArrayLike:
    """U'(r) = 1/(r^2 f(r)), exact."""
    t = radial_terms(space)
    require_in_domain(r, t.domain)
    return t.green_integrand(r)


def intrinsic_potentials(space: BertrandSpace, r: float,
                         kc_coupling: float = None,
                         osc_coupling: float = None) -> tuple:
    """Intrinsic Kepler-Coulomb and oscillator potentials (A U, B / U^2).

    Couplings default to the family coupling for the family's own branch
    (A for Type I, B for Type II) and to 1.0 for the other branch.
    """
    if kc_coupling is None:
        kc_coupling = space.family.coupling_A if space.is_type_i else 1.0
    if osc_coupling is None:
        osc_coupling = 1.0 if space.is_type_i else space.family.coupling_B
    u = green_function(space, r)
    if u == 0.0:
        raise ZeroDivisionError(f"U({r:g}) = 0: oscillator branch undefined")
    return kc_coupling * u, osc_coupling / u ** 2


def lorentzian_time_coefficient(space: BertrandSpace, r: ArrayLike) -> ArrayLike:
    """Denominator V(r) of the metric time block -dt^2 / V(r).

    Type I: (r^-beta - kappa r^beta) + xi.
    Type II: (r^-2g + lam2 r^2g - 2 delta)^-1 + chi.
    """
    t = radial_terms(space)
    require_in_domain(r, t.domain)
    coeff = t.time_coefficient(r)
    if np.any(np.asarray(coeff) == 0.0):
        raise ZeroDivisionError(f"metric time coefficient vanishes at r={r!r}")
    return coeff
