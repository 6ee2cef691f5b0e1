"""Classical dynamics on Bertrand spaces.

The natural Hamiltonian is H = |p|^2 / (2 f(r)^2) + V(r) with V the family
potential.  Central-force machinery: effective radial potential, turning
points, apsidal angle and radial period by endpoint-regularized quadrature,
symplectic-quality orbit integration, closure detection (every bounded orbit
closes after a rational number of radial periods), and circular-orbit data.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .errors import (DegenerateOrbitError, NoBoundedOrbitError,
                     NoCircularOrbitError, NotClosedWithinCapError,
                     QuadratureFailureError, StepSizeUnderflowError)
from .geometry import BertrandSpace, radial_terms, require_in_domain

_TINY_LO = 1e-280


def hamiltonian(space: BertrandSpace, q, p):
    """H(q, p) = |p|^2 / (2 f^2) + V(r); vectorized over leading axes."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    t = radial_terms(space)
    r = np.sqrt(np.sum(q * q, axis=-1))
    require_in_domain(r, t.domain)
    return 0.5 * t.inv_f2(r) * np.sum(p * p, axis=-1) + t.v(r)


def angular_momentum_sq(q, p) -> float:
    """L^2 = |q|^2 |p|^2 - (q . p)^2, conserved for any central H(r, |p|)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return float(np.dot(q, q) * np.dot(p, p) - np.dot(q, p) ** 2)


def angular_momentum(q, p) -> tuple:
    """Angular-momentum tensor L_ij = q_i p_j - q_j p_i and its square
    L^2 = (1/2) sum_ij L_ij^2 (equals |q|^2|p|^2 - (q.p)^2)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    l_tensor = np.outer(q, p) - np.outer(p, q)
    return l_tensor, 0.5 * float(np.sum(l_tensor * l_tensor))


def equations_of_motion(space: BertrandSpace, q, p) -> tuple:
    """Hamilton's equations: dq/dt = p / f^2, dp/dt = -(dH/dr) q / r."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    t = radial_terms(space)
    r = math.sqrt(float(np.dot(q, q)))
    require_in_domain(r, t.domain)
    grad = 0.5 * t.d_inv_f2(r) * float(np.dot(p, p)) + t.v_prime(r)
    return t.inv_f2(r) * p, (-grad / r) * q


def effective_potential(space: BertrandSpace, L_sq: float, r):
    """V_eff(r) = L^2 / (2 f^2 r^2) + V(r)."""
    t = radial_terms(space)
    require_in_domain(r, t.domain)
    r = np.asarray(r, dtype=float) if np.ndim(r) else float(r)
    return L_sq * t.inv_f2(r) / (2.0 * r ** 2) + t.v(r)


def _veff_callables(space, L_sq):
    t = radial_terms(space)

    def veff(r):
        return L_sq * t.inv_f2(r) / (2.0 * r ** 2) + t.v(r)

    def dveff(r):
        phi_p = t.d_inv_f2(r) / (2.0 * r ** 2) - t.inv_f2(r) / r ** 3
        return L_sq * phi_p + t.v_prime(r)

    return t, veff, dveff


def _scan_box(t):
    lo, hi = t.domain
    lo_s = lo * (1.0 + 1e-9) if lo > 0.0 else t.r_ref * 1e-6
    hi_s = hi * (1.0 - 1e-9) if math.isfinite(hi) else t.r_ref * 1e6
    return lo_s, hi_s


def _well_minimum(space, L_sq):
    """Radius of the effective-potential minimum, by sign scan + root polish."""
    t, veff, dveff = _veff_callables(space, L_sq)
    lo_s, hi_s = _scan_box(t)
    grid = np.geomspace(lo_s, hi_s, 512)
    # window edges can round to D=0 exactly; treat non-finite slopes as walls
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = dveff(grid)
    sign = np.where(np.isfinite(slope), np.sign(slope), 0.0)
    idx = np.nonzero((sign[:-1] < 0) & (sign[1:] > 0))[0]
    if len(idx) == 0:
        raise NoBoundedOrbitError(
            f"no effective-potential well for L^2={L_sq:g}")
    i = idx[0]
    r_c = brentq(dveff, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
    return r_c, veff, dveff


def turning_points(space: BertrandSpace, E: float, L_sq: float) -> tuple:
    """Roots r- < r+ of E = V_eff(r) bracketing the potential well."""
    t = radial_terms(space)
    r_c, veff, _ = _well_minimum(space, L_sq)
    e_min = veff(r_c)
    if E < e_min:
        raise NoBoundedOrbitError(f"E={E:g} below well minimum {e_min:g}")
    if E - e_min <= 1e-13 * max(1.0, abs(e_min)):
        raise DegenerateOrbitError(
            f"E={E:g} sits at the well minimum: circular orbit r={r_c:g}")

    g = lambda r: E - veff(r)
    lo, hi = t.domain
    # inner bracket: walk toward the lower edge until the barrier exceeds E
    a = r_c
    step = 0.5
    while True:
        a_new = lo + (a - lo) * step if lo > 0.0 else a * step
        if a_new <= lo + _TINY_LO or a_new < _TINY_LO:
            raise NoBoundedOrbitError("no inner turning point above r=0")
        if g(a_new) < 0.0:
            a = a_new
            break
        a = a_new
    r_minus = brentq(g, a, r_c, xtol=1e-15, rtol=8.9e-16)

    b = r_c
    while True:
        b_new = hi - (hi - b) * step if math.isfinite(hi) else b / step
        if not math.isfinite(hi) and b_new > 1e12 * t.r_ref:
            raise NoBoundedOrbitError(f"E={E:g} at or above escape energy")
        if math.isfinite(hi) and hi - b_new <= 1e-14 * hi:
            raise NoBoundedOrbitError(f"E={E:g} at or above the domain-edge barrier")
        if g(b_new) < 0.0:
            b = b_new
            break
        b = b_new
    r_plus = brentq(g, r_c, b, xtol=1e-15, rtol=8.9e-16)
    return r_minus, r_plus


def _radial_quadratures(space, E, L_sq, tol=1e-10, max_nodes=4096):
    """Apsidal angle and radial period in one endpoint-regular quadrature.

    Substituting r = c + a sin(theta) removes the inverse-square-root
    endpoint singularities; Gauss-Legendre in theta then converges fast.
    Nodes are doubled until two successive levels agree to ``tol``.
    """
    t = radial_terms(space)
    r_minus, r_plus = turning_points(space, E, L_sq)
    c = 0.5 * (r_plus + r_minus)
    a = 0.5 * (r_plus - r_minus)
    L = math.sqrt(L_sq)

    def level(n):
        x, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * math.pi * x
        r = c + a * np.sin(theta)
        pr_sq = (2.0 / t.inv_f2(r)) * (E - L_sq * t.inv_f2(r) / (2.0 * r ** 2)
                                       - t.v(r))
        q_fac = pr_sq / ((r - r_minus) * (r_plus - r))
        if np.any(q_fac <= 0.0):
            raise QuadratureFailureError(
                "radial momentum not positive inside the well")
        root = np.sqrt(q_fac)
        wt = 0.5 * math.pi * w
        angle = np.sum(wt * (L / r ** 2) / root)
        period = 2.0 * np.sum(wt * (1.0 / t.inv_f2(r)) / root)
        return angle, period

    n = 32
    prev = level(n)
    while n < max_nodes:
        n *= 2
        cur = level(n)
        if (abs(cur[0] - prev[0]) < tol * max(1.0, abs(cur[0]))
                and abs(cur[1] - prev[1]) < tol * max(1.0, abs(cur[1]))):
            return cur[0], cur[1], r_minus, r_plus
        prev = cur
    raise QuadratureFailureError(
        f"apsidal quadrature did not converge below {tol:g} by {max_nodes} nodes")


def apsidal_angle(space: BertrandSpace, E: float, L_sq: float,
                  tol: float = 1e-10) -> float:
    """Azimuth swept between inner and outer turning points:

        dphi = integral_{r-}^{r+} (L / r^2) / p_r dr.
    """
    return _radial_quadratures(space, E, L_sq, tol)[0]


def radial_period(space: BertrandSpace, E: float, L_sq: float,
                  tol: float = 1e-10) -> float:
    """Time for one full radial oscillation r+ -> r- -> r+."""
    return _radial_quadratures(space, E, L_sq, tol)[1]


@dataclass(frozen=True)
class RadialOrbitData:
    """Radial invariants of one bounded orbit."""
    energy: float
    l2: float
    r_min: float
    r_max: float
    apsidal_angle: float


def radial_orbit_data(space: BertrandSpace, E: float, L_sq: float,
                      tol: float = 1e-10) -> RadialOrbitData:
    """Turning radii and apsidal angle for the bounded orbit at (E, L^2)."""
    dphi, _, r_minus, r_plus = _radial_quadratures(space, E, L_sq, tol)
    return RadialOrbitData(energy=float(E), l2=float(L_sq), r_min=r_minus,
                           r_max=r_plus, apsidal_angle=dphi)


@dataclass(frozen=True)
class CircularOrbit:
    radius: float
    L_sq: float
    energy: float
    stable: bool


def circular_orbit(space: BertrandSpace, r0: float) -> CircularOrbit:
    """Angular momentum, energy, and linear stability of the circular orbit
    at radius r0 (solves V_eff'(r0) = 0 for L^2)."""
    t = radial_terms(space)
    require_in_domain(r0, t.domain)
    r0 = float(r0)
    f, fp, fpp = t.f(r0), t.f_prime(r0), t.f_double_prime(r0)
    u = t.inv_f2(r0)
    up = t.d_inv_f2(r0)
    upp = (6.0 * fp ** 2 - 2.0 * f * fpp) / f ** 4
    phi_p = up / (2.0 * r0 ** 2) - u / r0 ** 3
    if phi_p == 0.0:
        raise NoCircularOrbitError(f"centrifugal term stationary at r={r0:g}")
    L_sq = -t.v_prime(r0) / phi_p
    if L_sq <= 0.0:
        raise NoCircularOrbitError(
            f"no circular orbit at r={r0:g}: requires L^2 = {L_sq:g}")
    phi = u / (2.0 * r0 ** 2)
    phi_pp = upp / (2.0 * r0 ** 2) - 2.0 * up / r0 ** 3 + 3.0 * u / r0 ** 4
    energy = L_sq * phi + t.v(r0)
    stable = L_sq * phi_pp + t.v_double_prime(r0) > 0.0
    return CircularOrbit(radius=r0, L_sq=L_sq, energy=energy, stable=stable)


@dataclass
class OrbitResult:
    """Integrated trajectory with dense interpolant and per-node relative
    drift of the conserved quantities H and L^2."""
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy_drift: np.ndarray
    l2_drift: np.ndarray
    sol: object
    t_final: float

    def state(self, time):
        y = self.sol(time)
        n = y.shape[0] // 2
        return y[:n], y[n:]

    @property
    def max_energy_drift(self) -> float:
        return float(np.max(self.energy_drift))

    @property
    def max_l2_drift(self) -> float:
        return float(np.max(self.l2_drift))


def _drift_series(values: np.ndarray) -> np.ndarray:
    ref = values[0]
    scale = abs(ref) if ref != 0.0 else 1.0
    return np.abs(values - ref) / scale


def _rhs(space):
    t = radial_terms(space)
    v_prime = t.v_prime
    inv_f2 = t.inv_f2
    d_inv_f2 = t.d_inv_f2

    def rhs(_, y):
        n = y.shape[0] // 2
        q, p = y[:n], y[n:]
        r = math.sqrt(float(np.dot(q, q)))
        grad = 0.5 * d_inv_f2(r) * float(np.dot(p, p)) + v_prime(r)
        return np.concatenate((inv_f2(r) * p, (-grad / r) * q))

    return rhs


def integrate_orbit(space: BertrandSpace, q0, p0, t_final: float,
                    tol: float = 1e-10) -> OrbitResult:
    """Integrate Hamilton's equations with an order-8 adaptive scheme.

    ``tol`` bounds the relative drift of the conserved quantities: the local
    error controller runs a factor 256 below it because the local-to-global
    error amplification of an order-8 pair over ~10^3 periods eats roughly
    two orders of magnitude.  Reported drift stays below 100 x tol.

    Raises StepSizeUnderflowError if the solver stalls or the trajectory
    reaches the edge of the validity window (a curvature singularity).
    """
    q0 = np.asarray(q0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    t = radial_terms(space)
    require_in_domain(math.sqrt(float(np.dot(q0, q0))), t.domain)
    lo, hi = t.domain

    events = []

    def hit_inner(_, y):
        n = y.shape[0] // 2
        return math.sqrt(float(np.dot(y[:n], y[:n]))) - max(lo * (1 + 1e-12), _TINY_LO)

    hit_inner.terminal = True
    events.append(hit_inner)
    if math.isfinite(hi):
        def hit_outer(_, y):
            n = y.shape[0] // 2
            return hi * (1 - 1e-12) - math.sqrt(float(np.dot(y[:n], y[:n])))

        hit_outer.terminal = True
        events.append(hit_outer)

    # 2.3e-14 keeps rtol above the solver's 100*eps floor
    res = solve_ivp(_rhs(space), (0.0, float(t_final)),
                    np.concatenate((q0, p0)), method="DOP853",
                    rtol=max(tol / 256.0, 2.3e-14), atol=tol / 256.0,
                    dense_output=True, events=events)
    if res.status == -1:
        raise StepSizeUnderflowError(f"integrator stalled: {res.message}")
    if res.status == 1:
        raise StepSizeUnderflowError(
            "trajectory reached the validity-window boundary at "
            f"t={res.t[-1]:.6g}")
    n = len(q0)
    q, p = res.y[:n].T, res.y[n:].T
    h = hamiltonian(space, q, p)
    l2 = (np.sum(q * q, axis=-1) * np.sum(p * p, axis=-1)
          - np.sum(q * p, axis=-1) ** 2)
    return OrbitResult(t=res.t, q=q, p=p,
                       energy_drift=_drift_series(h),
                       l2_drift=_drift_series(l2),
                       sol=res.sol, t_final=float(t_final))


def apoapsis_state(space: BertrandSpace, E: float, L_sq: float) -> tuple:
    """Phase-space point at the outer turning point, orbit in the xy plane."""
    _, r_plus = turning_points(space, E, L_sq)
    n = space.dim_N
    q0 = np.zeros(n)
    p0 = np.zeros(n)
    q0[0] = r_plus
    p0[1] = math.sqrt(L_sq) / r_plus
    return q0, p0


def measured_apsidal_angles(orbit: OrbitResult, n_samples: int = 4000) -> np.ndarray:
    """Apsidal angles read off a planar trajectory: azimuth swept between
    successive sign changes of the radial momentum q . p."""
    ts = np.linspace(orbit.t[0], orbit.t[-1], n_samples)
    ys = orbit.sol(ts)
    n = ys.shape[0] // 2
    qp = np.sum(ys[:n] * ys[n:], axis=0)
    sign = np.sign(qp)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]

    def radial_mom(time):
        y = orbit.sol(time)
        return float(np.dot(y[:n], y[n:]))

    apsis_t = np.array([brentq(radial_mom, ts[i], ts[i + 1],
                               xtol=1e-13, rtol=8.9e-16) for i in flips])
    if len(apsis_t) < 2:
        return np.empty(0)
    ys_a = orbit.sol(apsis_t)
    phi = np.unwrap(np.arctan2(ys_a[1], ys_a[0]))
    return np.abs(np.diff(phi))


@dataclass(frozen=True)
class ClosureResult:
    """Rational apsidal ratio and the trajectory-level return test."""
    delta_phi: float
    ratio: Fraction          # delta_phi / pi as p/q, q <= cap
    periods: int             # radial periods until the orbit closes (= q)
    radial_period: float
    t_return: float
    return_distance: float   # min relative phase distance near t_return
    closed: bool


def closure_check(space: BertrandSpace, q0, p0, return_tol: float = 1e-5,
                  denominator_cap: int = 32, match_tol: float = 1e-6,
                  integrate_tol: float = 1e-12,
                  quad_tol: float = 1e-10) -> ClosureResult:
    """Detect orbit closure from an initial phase point: dphi/pi must be
    rational with a small denominator, and the trajectory must revisit the
    initial point after that many radial periods."""
    q0 = np.asarray(q0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    E = float(hamiltonian(space, q0, p0))
    L_sq = angular_momentum_sq(q0, p0)
    dphi, t_rad, _, _ = _radial_quadratures(space, E, L_sq, quad_tol)
    ratio = Fraction(dphi / math.pi).limit_denominator(denominator_cap)
    if ratio <= 0 or abs(dphi / math.pi - float(ratio)) > match_tol:
        raise NotClosedWithinCapError(
            f"dphi/pi = {dphi / math.pi:.12g} has no rational match with "
            f"denominator <= {denominator_cap}")
    periods = ratio.denominator
    t_return = periods * t_rad
    orbit = integrate_orbit(space, q0, p0, t_return + 0.55 * t_rad,
                            tol=integrate_tol)

    ref = np.concatenate((q0, p0))
    scale = math.sqrt(float(np.dot(ref, ref)))

    def miss(time):
        y = orbit.sol(time)
        return math.sqrt(float(np.dot(y - ref, y - ref))) / scale

    lo = max(t_return - 0.5 * t_rad, 0.0)
    hi = min(t_return + 0.5 * t_rad, orbit.t[-1])
    ts = np.linspace(lo, hi, 801)
    vals = np.array([miss(x) for x in ts])
    k = int(np.argmin(vals))
    b_lo, b_hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    best = minimize_scalar(miss, bounds=(b_lo, b_hi), method="bounded",
                           options={"xatol": 1e-12})
    dist = float(min(best.fun, vals[k]))
    return ClosureResult(delta_phi=dphi, ratio=ratio, periods=periods,
                         radial_period=t_rad, t_return=t_return,
                         return_distance=dist, closed=dist < return_tol)


def bounded_orbit_grid(space: BertrandSpace, n_momenta: int = 5,
                       n_energies: int = 5, radius_span: tuple = (0.6, 1.8),
                       energy_span: tuple = (0.15, 0.75)) -> list:
    """Deterministic grid of bounded-orbit invariants (E, L^2).

    Angular momenta come from stable circular orbits at radii spanning
    ``radius_span`` (relative to the reference point); for each L^2 the
    energies interpolate between the well minimum and the lowest escape or
    wall level, with the outer turning point capped at 50x the circular
    radius so orbits stay numerically reasonable.
    """
    t = radial_terms(space)
    lo, hi = t.domain
    r_a = radius_span[0] * t.r_ref
    r_b = radius_span[1] * t.r_ref
    if math.isfinite(hi):
        r_b = min(r_b, lo + 0.9 * (hi - lo))
    radii = np.geomspace(r_a, r_b, n_momenta)
    fracs = np.linspace(energy_span[0], energy_span[1], n_energies)
    out = []
    for r_c in radii:
        circ = circular_orbit(space, float(r_c))
        if not circ.stable:
            raise NoBoundedOrbitError(
                f"circular orbit at r={r_c:g} is unstable")
        cap_r = 50.0 * r_c
        if math.isfinite(hi):
            cap_r = min(cap_r, lo + 0.9 * (hi - lo))
        e_top = effective_potential(space, circ.L_sq, cap_r)
        if not e_top > circ.energy:
            raise NoBoundedOrbitError(
                f"no bounded energy band above the well at r={r_c:g}")
        for frac in fracs:
            out.append((float(circ.energy + frac * (e_top - circ.energy)),
                        float(circ.L_sq)))
    return out
