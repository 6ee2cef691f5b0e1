"""Radial quantum eigenproblem under three quantization prescriptions.

For a central Hamiltonian on g = f^2 dq^2 the radial equation in every
prescription is a Sturm-Liouville problem

    -(P psi')' + Q psi = E M psi,      psi(r_start) = psi(r_end) = 0,

with per-scheme weights (c = l (l + N - 2) is the angular eigenvalue):

  direct  P = h2/2 r^(N-1)            Q = [h2 c/(2r^2) + f^2 V] r^(N-1)
          M = f^2 r^(N-1)
  lb      P = h2/2 f^(N-2) r^(N-1)    Q = [h2 c f^(N-2)/(2r^2) + f^N V] r^(N-1)
          M = f^N r^(N-1)
  clb     lb plus the conformal curvature term
          h2 (N-2) R(r) / (8 (N-1)) times the lb mass weight on the diagonal

(h2 = hbar^2).  ``direct`` orders position factors to the left of p^2,
``lb`` is the Laplace-Beltrami operator, ``clb`` the conformally coupled
one.  ``direct`` and ``clb`` are related by the gauge psi -> f^((2-N)/2) psi
and share spectra; plain ``lb`` does not.

Discretization uses three-point fluxes with geometric-mean midpoint
coefficients P_{i+1/2} = sqrt(P_i P_{i+1}).  That choice makes the discrete
gauge conjugation of the clb matrix reproduce the direct matrix off-diagonal
entries to rounding (the gauge factor telescopes through the square root),
so the two prescriptions agree at the matrix level up to an O(h^2) diagonal
defect instead of drifting apart at O(h^2) everywhere.

A logarithmic grid (uniform in ln r) uses the transformed weights
P/r, Q r, M r and is preferred when f has a power-law singularity at r=0.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import (ConvergenceFailureError, IllConditionedError,
                     LengthMismatchError)
from .geometry import (BertrandSpace, RadialProfile, radial_terms,
                       scalar_curvature)


class QuantizationScheme(str, Enum):
    DIRECT = "direct"
    LAPLACE_BELTRAMI = "lb"
    CONFORMAL_LB = "clb"


def _coerce_scheme(scheme) -> "QuantizationScheme":
    if isinstance(scheme, QuantizationScheme):
        return scheme
    return QuantizationScheme(str(scheme))


_SPACINGS = {"uniform": "uniform", "log": "logarithmic",
             "logarithmic": "logarithmic"}


@dataclass(frozen=True)
class RadialGrid:
    """Dirichlet grid on [r_start, r_end] with n_nodes interior nodes.

    spacing "uniform": equally spaced in r.  spacing "logarithmic": equally
    spaced in ln r (requires r_start > 0).
    """

    r_start: float
    r_end: float
    n_nodes: int
    spacing: str = "uniform"
    x_all: np.ndarray = field(init=False, repr=False, compare=False)
    r_all: np.ndarray = field(init=False, repr=False, compare=False)
    jac_all: np.ndarray = field(init=False, repr=False, compare=False)
    h: float = field(init=False, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.r_start < self.r_end):
            raise ValueError(
                f"need 0 <= r_start < r_end, got {self.r_start}, {self.r_end}")
        if self.n_nodes < 64:
            raise ValueError(f"need n_nodes >= 64, got {self.n_nodes}")
        spacing = _SPACINGS.get(self.spacing)
        if spacing is None:
            raise ValueError(f"unknown grid spacing {self.spacing!r}")
        object.__setattr__(self, "spacing", spacing)
        if spacing == "logarithmic":
            if self.r_start <= 0.0:
                raise ValueError("logarithmic grid requires r_start > 0")
            x = np.linspace(math.log(self.r_start), math.log(self.r_end),
                            self.n_nodes + 2)
            r = np.exp(x)
            r[0], r[-1] = self.r_start, self.r_end
            jac = r.copy()
        else:
            x = np.linspace(self.r_start, self.r_end, self.n_nodes + 2)
            r = x
            jac = np.ones_like(x)
        object.__setattr__(self, "x_all", x)
        object.__setattr__(self, "r_all", r)
        object.__setattr__(self, "jac_all", jac)
        object.__setattr__(self, "h", float(x[1] - x[0]))

    @property
    def r(self) -> np.ndarray:
        """Interior nodes."""
        return self.r_all[1:-1]

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weight dr per interior node."""
        return self.h * self.jac_all[1:-1]


def default_grid(space: BertrandSpace, n_nodes: int = 2000,
                 spacing: str = None, r_start: float = None,
                 r_end: float = None) -> RadialGrid:
    """Grid spanning most of the validity window.

    Spacing defaults to logarithmic for Type I (the potential has an r^-beta
    singularity) and uniform for Type II.  An infinite window is truncated
    at 40 r_ref; a finite edge (metric singularity) is approached to within
    a 1e-6 r_ref offset.  The inner Dirichlet node defaults to 1e-6 r_ref,
    except on logarithmic grids where 1e-4 r_ref keeps the folded
    tridiagonal numerically sane (entries grow like 1/(h r_start)^2).
    """
    if spacing is None:
        spacing = "logarithmic" if space.is_type_i else "uniform"
    t = radial_terms(space)
    lo, hi = t.domain
    if r_start is None:
        if lo > 0.0:
            r_start = lo * 1.000001
        else:
            is_log = _SPACINGS.get(spacing) == "logarithmic"
            r_start = t.r_ref * (1e-4 if is_log else 1e-6)
    if r_end is None:
        if math.isfinite(hi):
            r_end = hi - 1e-6 * t.r_ref
        else:
            r_end = 40.0 * t.r_ref
    return RadialGrid(r_start=float(r_start), r_end=float(r_end),
                      n_nodes=n_nodes, spacing=spacing)


@dataclass(frozen=True)
class RadialEigenproblem:
    """Tridiagonal stiffness (diag, off_diag) and diagonal mass matrix for
    one (scheme, l) radial reduction."""

    scheme: QuantizationScheme
    l: int
    dim_N: int
    diag: np.ndarray
    off_diag: np.ndarray
    mass: np.ndarray
    grid: RadialGrid


def _node_weights(space, scheme, l, grid):
    """P on all nodes, (Q, M) on interior nodes, in the grid coordinate."""
    if l < 0 or l != int(l):
        raise ValueError(f"angular momentum index must be a nonneg integer, got {l}")
    t = radial_terms(space)
    lo, hi = t.domain
    if not (grid.r_all[0] > lo and grid.r_all[-1] < hi):
        raise ValueError(
            f"grid [{grid.r_all[0]:g}, {grid.r_all[-1]:g}] must sit inside "
            f"the validity window ({lo:g}, {hi:g})")
    n_dim = space.dim_N
    h2 = space.hbar ** 2
    c = l * (l + n_dim - 2)

    r_a = grid.r_all
    f_a = np.asarray(t.f(r_a), dtype=float)
    rp = r_a ** (n_dim - 1)
    p_all = 0.5 * h2 * rp
    if scheme is not QuantizationScheme.DIRECT:
        p_all = p_all * f_a ** (n_dim - 2)

    r_i = r_a[1:-1]
    f_i = f_a[1:-1]
    v_i = np.asarray(t.v(r_i), dtype=float)
    rp_i = rp[1:-1]
    if scheme is QuantizationScheme.DIRECT:
        mass = f_i ** 2 * rp_i
        q_int = 0.5 * h2 * c / r_i ** 2 * rp_i + f_i ** 2 * v_i * rp_i
    else:
        mass = f_i ** n_dim * rp_i
        q_int = (0.5 * h2 * c * f_i ** (n_dim - 2) / r_i ** 2 * rp_i
                 + f_i ** n_dim * v_i * rp_i)
        if scheme is QuantizationScheme.CONFORMAL_LB:
            curv = scalar_curvature(space, r_i)
            q_int = q_int + h2 * (n_dim - 2) / (8.0 * (n_dim - 1)) * curv * mass

    # transform to the grid coordinate: P/J, Q J, M J
    p_all = p_all / grid.jac_all
    q_int = q_int * grid.jac_all[1:-1]
    mass = mass * grid.jac_all[1:-1]
    return p_all, q_int, mass


def build_radial_operator(space: BertrandSpace, scheme, l: int,
                          grid: RadialGrid) -> RadialEigenproblem:
    """Assemble the Dirichlet Sturm-Liouville matrices for one (scheme, l)."""
    scheme = _coerce_scheme(scheme)
    p_all, q_int, mass = _node_weights(space, scheme, l, grid)
    if (not np.all(np.isfinite(p_all)) or not np.all(np.isfinite(q_int))
            or not np.all(np.isfinite(mass))):
        raise IllConditionedError("non-finite operator weights on this grid")
    if np.any(p_all <= 0.0) or np.any(mass <= 0.0):
        raise IllConditionedError("operator weights must be positive")
    h = grid.h
    flux = np.sqrt(p_all[:-1] * p_all[1:]) / h ** 2   # P_{i+1/2}, len n+1
    diag = flux[:-1] + flux[1:] + q_int
    off = -flux[1:-1]
    return RadialEigenproblem(scheme=scheme, l=int(l), dim_N=space.dim_N,
                              diag=diag, off_diag=off, mass=mass, grid=grid)


@dataclass(frozen=True)
class Spectrum:
    scheme: QuantizationScheme
    l: int
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray      # column j is the j-th eigenfunction
    grid: RadialGrid
    boundary: str = "dirichlet"


def solve_spectrum(problem: RadialEigenproblem, k: int) -> Spectrum:
    """Lowest k Dirichlet eigenpairs via symmetric tridiagonal reduction.

    The generalized problem K psi = E M psi is folded to standard form with
    the diagonal mass; eigenvalues come from bisection on Sturm sequences
    (LAPACK), so individual levels are reliable even in near-degenerate
    clusters.  Eigenfunctions are mass-orthonormal: sum psi_i psi_j M w = d_ij.
    """
    n = len(problem.diag)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    sqrt_m = np.sqrt(problem.mass)
    d = problem.diag / problem.mass
    e = problem.off_diag / (sqrt_m[:-1] * sqrt_m[1:])
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise IllConditionedError("mass-scaled operator is not finite")
    try:
        w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise ConvergenceFailureError(f"tridiagonal eigensolve failed: {exc}")
    psi = v / sqrt_m[:, None]
    # mass is already in the grid coordinate, so the measure is just h
    norms = np.sqrt(problem.grid.h
                    * np.sum(psi * psi * problem.mass[:, None], axis=0))
    psi = psi / norms
    # deterministic sign: positive at the node of largest magnitude
    peak = np.argmax(np.abs(psi), axis=0)
    signs = np.sign(psi[peak, np.arange(psi.shape[1])])
    signs[signs == 0.0] = 1.0
    psi = psi * signs
    return Spectrum(scheme=problem.scheme, l=problem.l, eigenvalues=w,
                    eigenfunctions=psi, grid=problem.grid)


def spectrum_for(space: BertrandSpace, scheme, l: int, k: int,
                 grid: RadialGrid) -> Spectrum:
    """Build and solve in one step."""
    return solve_spectrum(build_radial_operator(space, scheme, l, grid), k)


@dataclass(frozen=True)
class SpectrumComparison:
    """Per-level differences between two spectra and the verdict at tol."""

    eigenvalues_a: np.ndarray
    eigenvalues_b: np.ndarray
    abs_diff: np.ndarray
    rel_diff: np.ndarray
    tol: float
    passed: bool

    @property
    def max_abs_diff(self) -> float:
        return float(np.max(self.abs_diff))

    @property
    def max_rel_diff(self) -> float:
        return float(np.max(self.rel_diff))


def compare_spectra(a: Spectrum, b: Spectrum,
                    tol: float = 1e-6) -> SpectrumComparison:
    """Level-by-level comparison; ``passed`` means every |dE| < tol."""
    if len(a.eigenvalues) != len(b.eigenvalues):
        raise LengthMismatchError(
            f"spectra hold {len(a.eigenvalues)} vs {len(b.eigenvalues)} levels")
    if a.l != b.l:
        raise ValueError(f"comparing spectra at different l: {a.l} vs {b.l}")
    diff = np.abs(a.eigenvalues - b.eigenvalues)
    scale = np.maximum(np.abs(a.eigenvalues), np.abs(b.eigenvalues))
    scale[scale == 0.0] = 1.0
    return SpectrumComparison(eigenvalues_a=a.eigenvalues,
                              eigenvalues_b=b.eigenvalues,
                              abs_diff=diff, rel_diff=diff / scale,
                              tol=float(tol),
                              passed=bool(np.all(diff < tol)))


def gauge_factor(space: BertrandSpace, r) -> np.ndarray:
    """f(r)^((2-N)/2): multiplies a direct-prescription eigenfunction to
    give the conformal-LB one."""
    t = radial_terms(space)
    f = np.asarray(t.f(r), dtype=float)
    return f ** (0.5 * (2 - space.dim_N))


def gauge_transform_eigenfunction(phi, profile: RadialProfile, dim_N: int,
                                  r) -> np.ndarray:
    """Pointwise map phi -> f^((2-N)/2) phi at the given nodes."""
    f = np.asarray(profile.f(r), dtype=float)
    return np.asarray(phi, dtype=float) * f ** (0.5 * (2 - dim_N))


def eigenfunction_gauge_deviation(space: BertrandSpace, grid: RadialGrid,
                                  psi_direct: np.ndarray,
                                  psi_clb: np.ndarray) -> float:
    """Max relative deviation of psi_clb from (gauge factor) x psi_direct.

    The two eigenvectors come from independent solves, so the overall scale
    is fixed at the direct eigenfunction's peak; nodes below 1e-3 of the
    peak are excluded (the ratio is 0/0 noise there).
    """
    g = gauge_factor(space, grid.r)
    expected = g * psi_direct
    peak = np.argmax(np.abs(expected))
    scale = psi_clb[peak] / expected[peak]
    keep = np.abs(psi_direct) > 1e-3 * np.max(np.abs(psi_direct))
    dev = np.abs(psi_clb - scale * expected) / np.max(np.abs(psi_clb))
    return float(np.max(dev[keep]))


def _default_test_functions(grid: RadialGrid, count: int = 3) -> list:
    """Smooth bumps vanishing to all orders at the grid ends, with a few
    oscillations to exercise the kinetic term."""
    x = grid.x_all[1:-1]
    s = (x - grid.x_all[0]) / (grid.x_all[-1] - grid.x_all[0])
    bump = np.exp(-0.1 / (s * (1.0 - s)))
    return [bump * np.sin(j * math.pi * s) for j in range(1, count + 1)]


def _apply(problem: RadialEigenproblem, chi: np.ndarray) -> np.ndarray:
    """Operator action (M^-1 K) chi on node values."""
    y = problem.diag * chi
    y[:-1] += problem.off_diag * chi[1:]
    y[1:] += problem.off_diag * chi[:-1]
    return y / problem.mass


def operator_gauge_residual(space: BertrandSpace, l: int, grid: RadialGrid,
                            test_functions: list = None) -> float:
    """Action-level check that clb is the gauge conjugate of direct:

        max over tests of |H_clb chi - g H_dir(chi / g)| / |chi|,

    g = f^((2-N)/2), through the discrete operators.  Vanishes identically
    for flat spaces and N=2 and decays as O(h^2) otherwise.
    """
    op_d = build_radial_operator(space, QuantizationScheme.DIRECT, l, grid)
    op_c = build_radial_operator(space, QuantizationScheme.CONFORMAL_LB, l, grid)
    g = gauge_factor(space, grid.r)
    if test_functions is None:
        tests = _default_test_functions(grid)
    else:
        tests = [np.asarray(chi(grid.r), dtype=float) if callable(chi)
                 else np.asarray(chi, dtype=float) for chi in test_functions]
    worst = 0.0
    for chi in tests:
        resid = _apply(op_c, chi) - g * _apply(op_d, chi / g)
        worst = max(worst, float(np.linalg.norm(resid) / np.linalg.norm(chi)))
    return worst


def operator_gauge_defect(space: BertrandSpace, l: int,
                          grid: RadialGrid) -> dict:
    """Entrywise defect of G K_clb G - K_dir (G = diag gauge factor),
    scaled by the largest direct-matrix entry.

    With geometric-mean fluxes the off-diagonal and mass defects are pure
    rounding; the diagonal defect is the O(h^2) discretization mismatch
    between the conjugated curvature term and the flux difference.
    """
    op_d = build_radial_operator(space, QuantizationScheme.DIRECT, l, grid)
    op_c = build_radial_operator(space, QuantizationScheme.CONFORMAL_LB, l, grid)
    g = gauge_factor(space, grid.r)
    scale = float(np.max(np.abs(op_d.diag)))
    off = np.abs(g[:-1] * op_c.off_diag * g[1:] - op_d.off_diag)
    dia = np.abs(g * op_c.diag * g - op_d.diag)
    mas = np.abs(g * op_c.mass * g - op_d.mass)
    return {"off_diag": float(np.max(off)) / scale,
            "diag": float(np.max(dia)) / scale,
            "mass": float(np.max(mas)) / scale}


@dataclass(frozen=True)
class DegeneracyCluster:
    """Eigenvalues from different l that coincide within the tolerance."""

    energy: float                   # mean of the clustered eigenvalues
    spread: float                   # max - min within the cluster
    members: tuple                  # (n, l) pairs, sorted

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def l_values(self) -> tuple:
        return tuple(sorted({l for _, l in self.members}))


def degeneracy_report(spectra: list, tol: float) -> list:
    """Cluster eigenvalues across l: consecutive sorted eigenvalues whose
    gap is below ``tol`` join one cluster.  Returns clusters sorted by
    energy, each with its (n, l) membership pattern."""
    entries = []
    seen = set()
    for s in spectra:
        if s.l in seen:
            raise ValueError(f"duplicate spectrum for l={s.l}")
        seen.add(s.l)
        for n, e in enumerate(np.asarray(s.eigenvalues, dtype=float)):
            entries.append((float(e), int(n), int(s.l)))
    entries.sort()
    groups = []
    group = [entries[0]] if entries else []
    for cur in entries[1:]:
        if cur[0] - group[-1][0] < tol:
            group.append(cur)
        else:
            groups.append(group)
            group = [cur]
    if group:
        groups.append(group)
    out = []
    for grp in groups:
        energies = [e for e, _, _ in grp]
        members = tuple(sorted((n, l) for _, n, l in grp))
        out.append(DegeneracyCluster(energy=float(np.mean(energies)),
                                     spread=float(energies[-1] - energies[0]),
                                     members=members))
    return out


def degeneracy_pairs(spectra_by_l: dict, l_step: int) -> list:
    """Accidental-degeneracy partners: E(n, l) should match E(n-1, l+l_step).

    Returns records (l, n, E(n, l), E(n-1, l+l_step), gap).  l_step is 1 for
    Kepler-Coulomb-like towers and 2 for oscillator-like ones.
    """
    out = []
    for l, energies in sorted(spectra_by_l.items()):
        partner = spectra_by_l.get(l + l_step)
        if partner is None:
            continue
        e = np.asarray(energies)
        q = np.asarray(partner)
        for n in range(1, len(e)):
            if n - 1 < len(q):
                out.append((l, n, float(e[n]), float(q[n - 1]),
                            abs(float(e[n]) - float(q[n - 1]))))
    return out


def discretization_error(space: BertrandSpace, scheme, l: int, k: int,
                         grid: RadialGrid) -> np.ndarray:
    """Per-level error estimate: |E(grid) - E(grid with 2n+1 nodes)|.

    Doubling the interior resolution on the same span scales the O(h^2)
    error by 1/4, so this estimate is conservative within ~33%.
    """
    fine = RadialGrid(r_start=grid.r_start, r_end=grid.r_end,
                      n_nodes=2 * grid.n_nodes + 1, spacing=grid.spacing)
    e1 = spectrum_for(space, scheme, l, k, grid).eigenvalues
    e2 = spectrum_for(space, scheme, l, k, fine).eigenvalues
    return np.abs(e1 - e2)


def degeneracy_tolerance(space: BertrandSpace, scheme, l_list, k: int,
                         grid: RadialGrid) -> float:
    """Default clustering tolerance: 50x the worst estimated discretization
    error over the requested levels, so genuine degeneracy separates from
    grid noise."""
    worst = max(float(np.max(discretization_error(space, scheme, l, k, grid)))
                for l in l_list)
    return 50.0 * worst
