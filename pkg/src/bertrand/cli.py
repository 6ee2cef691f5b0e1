"""Command-line interface.

Subcommands map onto the library surface: catalog listing, geometry tables,
orbit integration, apsidal/closure analysis, the family duality residual,
radial spectra, the direct-vs-conformal gauge check, and accidental
degeneracy reports.

Conventions:
  * a space is selected by --preset (with overrides) or by raw parameters
    (--beta/--kappa for Type I, --gamma/--lambda-sq/--delta for Type II);
  * output is CSV (RFC 4180, floats at 17 significant digits) or a
    self-describing JSON document via --format json, to --output or stdout;
  * numeric sweeps use lo:hi:count ranges; --l accepts "2", "0:3", "0,2,4";
  * --config FILE supplies JSON defaults for the chosen subcommand, and
    explicit flags win over the file;
  * exit status 0 on success, 1 on invalid input, 2 on numerical failure,
    with a JSON error record on stderr;
  * output depends only on inputs (no timestamps, fixed default seeds).
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import catalog, dynamics, geometry, quantum, stackel
from .errors import (BertrandError, ConvergenceFailureError,
                     DegenerateOrbitError, DomainViolationError,
                     EmptyDomainError, IllConditionedError,
                     InvalidOverrideError, LengthMismatchError,
                     NoBoundedOrbitError, NoCircularOrbitError,
                     NotClosedWithinCapError, ParseError,
                     QuadratureFailureError, SchemaError,
                     StepSizeUnderflowError, UnknownPresetError)

_VALIDATION_ERRORS = (UnknownPresetError, InvalidOverrideError, ParseError,
                      SchemaError, DomainViolationError, EmptyDomainError,
                      LengthMismatchError, ValueError)
_NUMERICAL_ERRORS = (QuadratureFailureError, StepSizeUnderflowError,
                     NoBoundedOrbitError, DegenerateOrbitError,
                     NotClosedWithinCapError, NoCircularOrbitError,
                     IllConditionedError, ConvergenceFailureError,
                     ZeroDivisionError, FloatingPointError)


def parse_range(text: str) -> np.ndarray:
    """lo:hi:count -> inclusive linear sweep."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ParseError(f"range must be lo:hi:count, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ParseError(f"malformed range {text!r}") from None
    if count < 1 or (count == 1 and lo != hi):
        raise ParseError(f"bad range count in {text!r}")
    return np.linspace(lo, hi, count)


def parse_l_values(text: str) -> list:
    """'2' -> [2]; '0:3' -> [0, 1, 2, 3]; '0,2,4' -> [0, 2, 4]."""
    text = str(text)
    try:
        if ":" in text:
            lo_s, _, hi_s = text.partition(":")
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ParseError(f"empty l range {text!r}")
            return list(range(lo, hi + 1))
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ParseError(
            f"--l takes an integer, lo:hi, or a comma list; got {text!r}"
        ) from None


def parse_float_list(text: str) -> list:
    try:
        return [float(tok) for tok in str(text).split(",")]
    except ValueError:
        raise ParseError(f"expected comma-separated floats, got {text!r}") from None


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = str(item).partition("=")
        if not sep or not key:
            raise ParseError(f"override must look like key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ParseError(f"override value must be numeric: {item!r}") from None
    return out


@dataclass(frozen=True)
class RunConfig:
    """Option defaults read from a JSON config file; merged under explicit
    flags and validated against the selected subcommand's options."""

    path: str
    values: dict


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError(f"config {path!r} must hold a JSON object")
    return RunConfig(path=path, values=data)


def merge_config(args: argparse.Namespace, config: RunConfig) -> None:
    """Fill unset options from the config file; flags keep priority."""
    known = vars(args)
    for raw_key, value in config.values.items():
        key = str(raw_key).replace("-", "_")
        if key not in known or key in ("command", "config"):
            raise SchemaError(f"config key {raw_key!r} is not an option of "
                              f"the {args.command!r} command")
        if known[key] is None:
            setattr(args, key, value)


_PARAM_FLAGS = ("kappa", "xi", "A", "lambda_sq", "lam", "delta", "chi", "B")
_FLAG_TO_KEY = {"A": "coupling_A", "B": "coupling_B"}


def _flag_overrides(args) -> dict:
    out = {}
    for flag in _PARAM_FLAGS:
        value = getattr(args, flag, None)
        if value is not None:
            out[_FLAG_TO_KEY.get(flag, flag)] = float(value)
    return out


def _exponent(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"exponent must be rational like 2 or 3/2, "
                         f"got {text!r}") from None


def _space(args) -> geometry.BertrandSpace:
    overrides = parse_overrides(getattr(args, "set", None))
    for key, value in _flag_overrides(args).items():
        overrides[key] = value
    dim_N = 3 if getattr(args, "dim", None) is None else int(args.dim)
    hbar = 1.0 if getattr(args, "hbar", None) is None else float(args.hbar)

    beta = getattr(args, "beta", None)
    gamma = getattr(args, "gamma", None)
    if args.preset is not None:
        if beta is not None or gamma is not None:
            raise ParseError("--beta/--gamma select a raw space; "
                             "drop them or drop --preset")
        overrides["dim_N"] = dim_N
        overrides["hbar"] = hbar
        return catalog.preset(args.preset, **overrides)
    if beta is not None and gamma is not None:
        raise ParseError("give --beta (Type I) or --gamma (Type II), not both")
    if beta is not None:
        bad = set(overrides) - {"kappa", "xi", "coupling_A"}
        if bad:
            raise InvalidOverrideError(
                f"Type I space does not take {sorted(bad)}")
        return geometry.BertrandSpace.type_i(
            beta=_exponent(beta), kappa=overrides.get("kappa", 0.0),
            xi=overrides.get("xi", 0.0),
            coupling_A=overrides.get("coupling_A", -1.0),
            dim_N=dim_N, hbar=hbar)
    if gamma is not None:
        if "lam" in overrides:
            if "lambda_sq" in overrides:
                raise InvalidOverrideError(
                    "pass either lam or lambda_sq, not both")
            overrides["lambda_sq"] = overrides.pop("lam") ** 2
        bad = set(overrides) - {"lambda_sq", "delta", "chi", "coupling_B"}
        if bad:
            raise InvalidOverrideError(
                f"Type II space does not take {sorted(bad)}")
        return geometry.BertrandSpace.type_ii(
            gamma=_exponent(gamma),
            lambda_sq=overrides.get("lambda_sq", 0.0),
            delta=overrides.get("delta", 0.0),
            chi=overrides.get("chi", 0.0),
            coupling_B=overrides.get("coupling_B", 0.5),
            dim_N=dim_N, hbar=hbar)
    raise ParseError("select a space: --preset NAME, or --beta/--gamma "
                     "with raw parameters")


def _grid(space, args) -> quantum.RadialGrid:
    return quantum.default_grid(
        space,
        n_nodes=2000 if args.nodes is None else int(args.nodes),
        spacing=args.spacing,
        r_start=None if args.r_start is None else float(args.r_start),
        r_end=None if args.r_end is None else float(args.r_end))


def _space_meta(space) -> dict:
    fam = space.family
    meta = {"dim_N": space.dim_N, "hbar": space.hbar}
    if space.is_type_i:
        meta.update(family="type_i", beta=str(fam.beta), kappa=fam.kappa,
                    xi=fam.xi, coupling_A=fam.coupling_A)
    else:
        meta.update(family="type_ii", gamma=str(fam.gamma),
                    lambda_sq=fam.lambda_sq, delta=fam.delta, chi=fam.chi,
                    coupling_B=fam.coupling_B)
    return meta


def _grid_meta(grid) -> dict:
    return {"r_start": grid.r_start, "r_end": grid.r_end,
            "n_nodes": grid.n_nodes, "spacing": grid.spacing}


def _expected_apsidal(space) -> float:
    fam = space.family
    if space.is_type_i:
        return math.pi / float(fam.beta)
    return math.pi / (2.0 * float(fam.gamma))


def cmd_catalog(args):
    names = [args.name] if args.name else list(catalog.preset_names())
    columns = ["name", "family", "exponent", "domain_lo", "domain_hi",
               "apsidal_angle", "params", "description"]
    rows = []
    for name in names:
        info = catalog.describe(name)
        rows.append((info["name"], info["family"], info["exponent"],
                     info["domain"][0], info["domain"][1],
                     info["apsidal_angle"],
                     json.dumps(info["params"], sort_keys=True),
                     info["description"]))
    return columns, rows, {}, None


def cmd_curvature(args):
    space = _space(args)
    rs = parse_range(args.r)
    profile = geometry.conformal_factor(space)
    for r in rs:
        geometry.require_in_domain(float(r), profile.domain)
    columns = ["r", "f", "f_prime", "f_double_prime", "scalar_curvature",
               "green_u", "time_coefficient"]
    rows = []
    for r in rs:
        r = float(r)
        rows.append((r, float(profile.f(r)), float(profile.f_prime(r)),
                     float(profile.f_double_prime(r)),
                     float(geometry.scalar_curvature(space, r)),
                     geometry.green_function(space, r),
                     float(geometry.lorentzian_time_coefficient(space, r))))
    return columns, rows, {"space": _space_meta(space)}, None


def _initial_state(space, args):
    if args.q0 is not None or args.p0 is not None:
        if args.q0 is None or args.p0 is None:
            raise ParseError("--q0 and --p0 must be given together")
        q0 = np.asarray(parse_float_list(args.q0))
        p0 = np.asarray(parse_float_list(args.p0))
        if len(q0) != space.dim_N or len(p0) != space.dim_N:
            raise LengthMismatchError(
                f"--q0/--p0 must have {space.dim_N} components")
        return q0, p0
    if args.energy is None or args.l2 is None:
        raise ParseError("give --energy and --l2, or --q0/--p0")
    return dynamics.apoapsis_state(space, float(args.energy), float(args.l2))


def cmd_orbit(args):
    space = _space(args)
    tol = 1e-10 if args.tol is None else float(args.tol)
    samples = 1000 if args.samples is None else int(args.samples)
    q0, p0 = _initial_state(space, args)
    if args.t_final is None:
        raise ParseError("orbit needs --t-final")
    orbit = dynamics.integrate_orbit(space, q0, p0, float(args.t_final), tol)
    ts = np.linspace(0.0, orbit.t[-1], samples)
    ys = orbit.sol(ts)
    n = space.dim_N
    q, p = ys[:n].T, ys[n:].T
    r = np.sqrt(np.sum(q * q, axis=-1))
    energies = dynamics.hamiltonian(space, q, p)
    l2 = (np.sum(q * q, axis=-1) * np.sum(p * p, axis=-1)
          - np.sum(q * p, axis=-1) ** 2)
    e_drift = np.abs(energies - energies[0]) / (abs(energies[0]) or 1.0)
    l_drift = np.abs(l2 - l2[0]) / (abs(l2[0]) or 1.0)
    columns = (["t"] + [f"q{i}" for i in range(n)]
               + [f"p{i}" for i in range(n)]
               + ["r", "energy", "energy_drift", "l2_drift"])
    rows = [tuple(float(v) for v in (ts[j], *ys[:, j], r[j], energies[j],
                                     e_drift[j], l_drift[j]))
            for j in range(len(ts))]
    meta = {"space": _space_meta(space), "tol": tol,
            "max_energy_drift": orbit.max_energy_drift,
            "max_l2_drift": orbit.max_l2_drift}
    return columns, rows, meta, None


def cmd_apsidal(args):
    space = _space(args)
    if args.energy is None or args.l2 is None:
        raise ParseError("apsidal needs --energy and --l2")
    tol = 1e-10 if args.tol is None else float(args.tol)
    energies = (parse_range(args.energy) if ":" in str(args.energy)
                else [float(args.energy)])
    l2s = (parse_range(args.l2) if ":" in str(args.l2)
           else [float(args.l2)])
    columns = ["energy", "l_sq", "r_min", "r_max", "delta_phi",
               "delta_phi_over_pi", "radial_period", "expected_delta_phi"]
    rows = []
    for l2 in l2s:
        for e in energies:
            data = dynamics.radial_orbit_data(space, float(e), float(l2), tol)
            period = dynamics.radial_period(space, float(e), float(l2), tol)
            rows.append((data.energy, data.l2, data.r_min, data.r_max,
                         data.apsidal_angle, data.apsidal_angle / math.pi,
                         period, _expected_apsidal(space)))
    meta = {"space": _space_meta(space), "tol": tol}
    return columns, rows, meta, None


def cmd_closure(args):
    space = _space(args)
    if args.q0 is not None or args.energy is not None:
        points = [_initial_state(space, args)]
    else:
        pairs = dynamics.bounded_orbit_grid(
            space,
            n_momenta=5 if args.n_momenta is None else int(args.n_momenta),
            n_energies=5 if args.n_energies is None else int(args.n_energies))
        points = [dynamics.apoapsis_state(space, e, l2) for e, l2 in pairs]
    cap = 32 if args.cap is None else int(args.cap)
    tol = 1e-12 if args.tol is None else float(args.tol)
    return_tol = 1e-5 if args.return_tol is None else float(args.return_tol)
    columns = ["energy", "l_sq", "delta_phi", "ratio", "periods",
               "radial_period", "t_return", "return_distance", "closed"]
    rows = []
    for q0, p0 in points:
        res = dynamics.closure_check(space, q0, p0, return_tol=return_tol,
                                     denominator_cap=cap, integrate_tol=tol)
        rows.append((float(dynamics.hamiltonian(space, q0, p0)),
                     dynamics.angular_momentum_sq(q0, p0),
                     res.delta_phi, str(res.ratio), res.periods,
                     res.radial_period, res.t_return, res.return_distance,
                     res.closed))
    meta = {"space": _space_meta(space), "integrate_tol": tol,
            "return_tol": return_tol, "denominator_cap": cap}
    return columns, rows, meta, None


def cmd_duality(args):
    samples = 1000 if args.samples is None else int(args.samples)
    seed = 0 if args.seed is None else int(args.seed)
    b_val = 0.5 if args.B is None else float(args.B)
    a_val = -1.0 if args.A is None else float(args.A)
    if args.preset is not None:
        space = catalog.preset(args.preset, **parse_overrides(args.set))
        if space.is_type_i:
            raise InvalidOverrideError(
                "duality starts from an oscillator (Type II) preset")
        pairs = [("(induced)", args.preset,
                  stackel.StackelDescriptor.from_type_ii(space.family, a_val))]
    elif args.beta is not None:
        params_i = geometry.TypeIParams(beta=_exponent(args.beta),
                                        kappa=(0.0 if args.kappa is None
                                               else float(args.kappa)),
                                        coupling_A=a_val)
        c_val = 0.0 if args.C is None else float(args.C)
        desc = stackel.StackelDescriptor.from_type_i(params_i, b_val, c_val)
        pairs = [("(raw)", "(induced)", desc)]
    else:
        pairs = catalog.stackel_pairs(a_val)
    columns = ["kc_name", "osc_name", "beta", "kappa", "gamma", "lambda_sq",
               "delta", "coupling_A", "aux_B", "aux_C", "samples",
               "max_rel_residual"]
    rows = []
    for kc_name, osc_name, desc in pairs:
        res = stackel.identity_residual_sweep(desc, n_samples=samples,
                                              seed=seed)
        rows.append((kc_name, osc_name, str(desc.type_i.beta),
                     desc.type_i.kappa, str(desc.type_ii.gamma),
                     desc.type_ii.lambda_sq, desc.type_ii.delta,
                     desc.type_i.coupling_A, desc.aux_B, desc.aux_C,
                     samples, res))
    return columns, rows, {"seed": seed}, None


def _scheme_list(args):
    scheme = args.scheme or "direct"
    if scheme == "all":
        return [quantum.QuantizationScheme.DIRECT,
                quantum.QuantizationScheme.LAPLACE_BELTRAMI,
                quantum.QuantizationScheme.CONFORMAL_LB]
    return [quantum.QuantizationScheme(scheme)]


def cmd_spectrum(args):
    space = _space(args)
    grid = _grid(space, args)
    k = 5 if args.k is None else int(args.k)
    l_list = parse_l_values(args.l) if args.l is not None else [0]
    schemes = _scheme_list(args)
    columns = ["scheme", "l", "n", "energy"]
    rows = []
    blocks = {}
    for scheme in schemes:
        block_rows = []
        for l in l_list:
            spec = quantum.spectrum_for(space, scheme, l, k, grid)
            for n, e in enumerate(spec.eigenvalues):
                rows.append((scheme.value, l, n, float(e)))
                block_rows.append([l, n, float(e)])
        blocks[scheme.value] = {"columns": ["l", "n", "energy"],
                                "rows": block_rows}
    meta = {"space": _space_meta(space), "grid": _grid_meta(grid), "k": k,
            "l": list(l_list), "boundary": "dirichlet"}
    json_doc = dict(meta)
    json_doc["schemes"] = blocks
    return columns, rows, meta, json_doc


def cmd_gauge_check(args):
    space = _space(args)
    grid = _grid(space, args)
    k = 5 if args.k is None else int(args.k)
    tol = 1e-6 if args.tol is None else float(args.tol)
    l_list = parse_l_values(args.l) if args.l is not None else [0, 1, 2, 3]
    columns = ["l", "n", "energy_direct", "energy_clb", "abs_diff",
               "rel_diff", "within_tol", "eigfunc_deviation",
               "operator_residual"]
    rows = []
    all_pass = True
    for l in l_list:
        spec_d = quantum.spectrum_for(space, "direct", l, k, grid)
        spec_c = quantum.spectrum_for(space, "clb", l, k, grid)
        report = quantum.compare_spectra(spec_d, spec_c, tol)
        all_pass = all_pass and report.passed
        op_res = quantum.operator_gauge_residual(space, l, grid)
        for n in range(k):
            dev = quantum.eigenfunction_gauge_deviation(
                space, grid, spec_d.eigenfunctions[:, n],
                spec_c.eigenfunctions[:, n])
            rows.append((l, n, float(spec_d.eigenvalues[n]),
                         float(spec_c.eigenvalues[n]),
                         float(report.abs_diff[n]), float(report.rel_diff[n]),
                         bool(report.abs_diff[n] < tol), dev, op_res))
    meta = {"space": _space_meta(space), "grid": _grid_meta(grid), "k": k,
            "l": list(l_list), "tol": tol, "passed": all_pass}
    return columns, rows, meta, None


def cmd_degeneracy(args):
    space = _space(args)
    grid = _grid(space, args)
    scheme = args.scheme or "direct"
    k = 5 if args.k is None else int(args.k)
    l_list = parse_l_values(args.l) if args.l is not None else [0, 1, 2, 3]
    spectra = [quantum.spectrum_for(space, scheme, l, k, grid)
               for l in l_list]
    if args.tol is not None:
        tol = float(args.tol)
    else:
        tol = quantum.degeneracy_tolerance(space, scheme, l_list, k, grid)
    clusters = quantum.degeneracy_report(spectra, tol)
    columns = ["scheme", "cluster", "energy", "spread", "multiplicity",
               "l_values", "members"]
    rows = []
    for idx, cl in enumerate(clusters):
        rows.append((scheme, idx, cl.energy, cl.spread, cl.multiplicity,
                     ",".join(str(l) for l in cl.l_values),
                     json.dumps([list(m) for m in cl.members])))
    meta = {"space": _space_meta(space), "grid": _grid_meta(grid), "k": k,
            "l": list(l_list), "scheme": scheme, "tol": tol}
    return columns, rows, meta, None


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_cell(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Fraction):
        return str(value)
    return value


def emit(columns, rows, fmt: str, out, meta=None, json_doc=None) -> None:
    if fmt == "json":
        if json_doc is None:
            json_doc = dict(meta or {})
            json_doc["columns"] = list(columns)
            json_doc["rows"] = [[_json_cell(v) for v in row] for row in rows]
        json.dump(json_doc, out, indent=2, sort_keys=False)
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _add_space_options(sub):
    sub.add_argument("--preset", help="catalog preset name")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="parameter override (repeatable)")
    sub.add_argument("--dim", type=int, help="manifold dimension N (default 3)")
    sub.add_argument("--hbar", type=float, help="Planck constant (default 1)")
    sub.add_argument("--beta", help="Type I exponent (rational, e.g. 3/2)")
    sub.add_argument("--gamma", help="Type II exponent (rational)")
    sub.add_argument("--kappa", type=float, help="Type I curvature parameter")
    sub.add_argument("--xi", type=float, help="Type I metric shift")
    sub.add_argument("--A", type=float, help="Kepler-Coulomb coupling (-1)")
    sub.add_argument("--lambda-sq", dest="lambda_sq", type=float,
                     help="Type II lambda^2 (may be negative)")
    sub.add_argument("--lam", type=float, help="Type II lambda (sets lambda^2)")
    sub.add_argument("--delta", type=float, help="Type II delta")
    sub.add_argument("--chi", type=float, help="Type II metric shift")
    sub.add_argument("--B", type=float, help="oscillator coupling (1/2)")


def _add_grid_options(sub):
    sub.add_argument("--nodes", type=int, help="interior grid nodes (default 2000)")
    sub.add_argument("--spacing", choices=("uniform", "log", "logarithmic"),
                     help="grid spacing (default: log for Type I, uniform "
                          "for Type II)")
    sub.add_argument("--r-start", type=float, help="inner grid edge")
    sub.add_argument("--r-end", type=float, help="outer grid edge")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bertrand",
        description="Closed orbits, family duality, and radial quantum "
                    "spectra on Bertrand spaces.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default csv)")
    common.add_argument("--output", help="output path (default stdout)")
    subs = parser.add_subparsers(dest="command", required=True)

    def add_command(name, **kwargs):
        return subs.add_parser(name, parents=[common], **kwargs)

    sub = add_command("catalog", help="list the named presets")
    sub.add_argument("--name", help="show a single preset")

    sub = add_command("curvature", help="geometry table over a radial sweep")
    _add_space_options(sub)
    sub.add_argument("--r", required=True, metavar="LO:HI:COUNT",
                     help="radial sweep")

    sub = add_command("orbit", help="integrate a trajectory")
    _add_space_options(sub)
    sub.add_argument("--energy", type=float)
    sub.add_argument("--l2", type=float, help="angular momentum squared")
    sub.add_argument("--q0", help="initial position, comma-separated")
    sub.add_argument("--p0", help="initial momentum, comma-separated")
    sub.add_argument("--t-final", type=float)
    sub.add_argument("--tol", type=float, help="integration tolerance (1e-10)")
    sub.add_argument("--samples", type=int, help="output samples (1000)")

    sub = add_command("apsidal", help="turning points and apsidal angle")
    _add_space_options(sub)
    sub.add_argument("--energy", help="energy value or lo:hi:count sweep")
    sub.add_argument("--l2", help="L^2 value or lo:hi:count sweep")
    sub.add_argument("--tol", type=float, help="quadrature tolerance (1e-10)")

    sub = add_command("closure", help="rational-closure check of bounded orbits")
    _add_space_options(sub)
    sub.add_argument("--energy", type=float)
    sub.add_argument("--l2", type=float)
    sub.add_argument("--q0", help="initial position, comma-separated")
    sub.add_argument("--p0", help="initial momentum, comma-separated")
    sub.add_argument("--cap", type=int, help="denominator cap (32)")
    sub.add_argument("--tol", type=float, help="integration tolerance (1e-12)")
    sub.add_argument("--return-tol", type=float,
                     help="phase-space return threshold (1e-5)")
    sub.add_argument("--n-momenta", type=int, help="L^2 grid size (5)")
    sub.add_argument("--n-energies", type=int, help="energy grid size (5)")

    sub = add_command("duality", help="Stackel-pair identity residuals")
    sub.add_argument("--preset", help="oscillator-side preset (default: all pairs)")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE")
    sub.add_argument("--beta", help="raw Type I exponent (rational)")
    sub.add_argument("--kappa", type=float, help="raw Type I curvature")
    sub.add_argument("--A", type=float, help="Kepler-Coulomb coupling (-1)")
    sub.add_argument("--B", type=float, help="oscillator coupling (1/2)")
    sub.add_argument("--C", type=float, help="potential shift constant (0)")
    sub.add_argument("--samples", type=int, help="phase-space samples (1000)")
    sub.add_argument("--seed", type=int, help="sampling seed (0)")

    sub = add_command("spectrum", help="radial eigenvalues")
    _add_space_options(sub)
    _add_grid_options(sub)
    sub.add_argument("--scheme", choices=("direct", "lb", "clb", "all"))
    sub.add_argument("--l", help="angular momentum: n, lo:hi, or comma list (0)")
    sub.add_argument("--k", type=int, help="levels per l (5)")

    sub = add_command("gauge-check",
                          help="direct vs conformal Laplace-Beltrami comparison")
    _add_space_options(sub)
    _add_grid_options(sub)
    sub.add_argument("--l", help="angular momentum: n, lo:hi, or comma list (0:3)")
    sub.add_argument("--k", type=int, help="levels per l (5)")
    sub.add_argument("--tol", type=float, help="level-match tolerance (1e-6)")

    sub = add_command("degeneracy", help="cross-l eigenvalue clusters")
    _add_space_options(sub)
    _add_grid_options(sub)
    sub.add_argument("--scheme", choices=("direct", "lb", "clb"))
    sub.add_argument("--l", help="angular momentum: n, lo:hi, or comma list (0:3)")
    sub.add_argument("--k", type=int, help="levels per l (5)")
    sub.add_argument("--tol", type=float,
                     help="cluster tolerance (50x discretization error)")

    return parser


_HANDLERS = {
    "catalog": cmd_catalog,
    "curvature": cmd_curvature,
    "orbit": cmd_orbit,
    "apsidal": cmd_apsidal,
    "closure": cmd_closure,
    "duality": cmd_duality,
    "spectrum": cmd_spectrum,
    "gauge-check": cmd_gauge_check,
    "degeneracy": cmd_degeneracy,
}


def _error_record(exc) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            merge_config(args, load_config(args.config))
        columns, rows, meta, json_doc = _HANDLERS[args.command](args)
        meta = {"command": args.command, **meta}
        if json_doc is not None:
            json_doc = {"command": args.command, **json_doc}
        fmt = args.format or "csv"
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                emit(columns, rows, fmt, fh, meta, json_doc)
        else:
            emit(columns, rows, fmt, sys.stdout, meta, json_doc)
        return 0
    except _VALIDATION_ERRORS as exc:
        sys.stderr.write(_error_record(exc) + "\n")
        return 1
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(_error_record(exc) + "\n")
        return 2
    except BertrandError as exc:
        sys.stderr.write(_error_record(exc) + "\n")
        return 2


def main(argv=None) -> int:
    try:
        return run(argv)
    except BrokenPipeError:
        # downstream consumer (head, less) closed the pipe; not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
