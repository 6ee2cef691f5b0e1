"""Named presets for the classically solvable members of both families.

Each preset fixes an exponent and a curvature-parameter pattern; the
remaining knobs (couplings, curvature strengths, dimension, hbar) can be
overridden by keyword.  Defaults follow the usual survey values: kappa=0.1,
lambda=0.1, delta=0.05, A=-1, B=1/2, N=3, hbar=1.

The ``sphere_hyperbolic_oscillator`` preset lives on the constraint
delta = lambda, so it takes a single ``lam`` override instead of
independent (lambda_sq, delta).
"""

import math
from fractions import Fraction

from .errors import InvalidOverrideError, UnknownPresetError
from .geometry import BertrandSpace, TypeIIParams, TypeIParams, radial_terms
from .stackel import StackelDescriptor

_COMMON_KEYS = {"dim_N", "hbar"}
_TYPE_I_KEYS = {"kappa", "xi", "coupling_A"}
_TYPE_II_KEYS = {"lambda_sq", "delta", "chi", "coupling_B"}

_PRESETS = {
    "euclidean_kc": dict(
        family="i", beta=Fraction(1), kappa=0.0, fixed=("kappa",),
        doc="flat Kepler-Coulomb: H = p^2/2 + A/r"),
    "sphere_hyperbolic_kc": dict(
        family="i", beta=Fraction(1), kappa=0.1,
        doc="intrinsic Kepler-Coulomb on the sphere (kappa > 0) or "
            "hyperboloid (kappa < 0)"),
    "inverse_square_kc": dict(
        family="i", beta=Fraction(2), kappa=0.0, fixed=("kappa",),
        doc="inverse-square radial metric with Coulomb-type potential A/r^2"),
    "type2b_kc": dict(
        family="i", beta=Fraction(2), kappa=0.1,
        doc="beta=2 curved Kepler-Coulomb, kinetic factor (1 + kappa r^4)^2 / r^2"),
    "euclidean_oscillator": dict(
        family="ii", gamma=Fraction(1), lambda_sq=0.0, delta=0.0,
        fixed=("lambda_sq", "delta"),
        doc="flat isotropic oscillator: H = p^2/2 + B r^2"),
    "darboux_iii": dict(
        family="ii", gamma=Fraction(1), lambda_sq=0.0, delta=0.05,
        fixed=("lambda_sq",),
        doc="Darboux III oscillator: H = (p^2/2 + B r^2) / (1 - 2 delta r^2)"),
    "taub_nut": dict(
        family="ii", gamma=Fraction(1, 2), lambda_sq=0.0, delta=0.05,
        fixed=("lambda_sq",),
        doc="Euclidean Taub-NUT oscillator: H = (r p^2/2 + B r) / (1 - 2 delta r)"),
    "darboux_iv": dict(
        family="ii", gamma=Fraction(1, 2), lambda_sq=0.01, delta=0.05,
        doc="Darboux IV family, gamma=1/2 with both curvature knobs"),
    "sphere_hyperbolic_oscillator": dict(
        family="ii", gamma=Fraction(1), lambda_sq=0.01, delta=0.1,
        lam_locked=True,
        doc="intrinsic oscillator on the sphere/hyperboloid: delta = lambda, "
            "H = (1 + lam r^2)^2 p^2/2 + B r^2/(1 - lam r^2)^2"),
    "type2b2_oscillator": dict(
        family="ii", gamma=Fraction(1), lambda_sq=0.01, delta=0.05,
        doc="gamma=1 oscillator with independent lambda^2 and delta"),
}


def preset_names() -> tuple:
    return tuple(sorted(_PRESETS))


def _lookup(name: str) -> dict:
    try:
        return _PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; valid names: {', '.join(preset_names())}"
        ) from None


def preset(name: str, **overrides) -> BertrandSpace:
    """Build a catalog space, applying parameter overrides.

    Raises UnknownPresetError for a bad name and InvalidOverrideError for
    keys that do not belong to the preset's family, keys that would change
    the preset's defining pattern, or a ``lam`` override combined with the
    parameters it determines.
    """
    spec = _lookup(name)
    over = dict(overrides)
    dim_N = int(over.pop("dim_N", 3))
    hbar = float(over.pop("hbar", 1.0))

    if spec.get("lam_locked"):
        lam = over.pop("lam", None)
        if lam is not None:
            if over.keys() & {"lambda_sq", "delta"}:
                raise InvalidOverrideError(
                    f"{name}: 'lam' fixes lambda_sq and delta; do not pass them too")
            over["lambda_sq"] = float(lam) ** 2
            over["delta"] = float(lam)
    elif "lam" in over:
        if "lambda_sq" in over:
            raise InvalidOverrideError(
                f"{name}: pass either 'lam' or 'lambda_sq', not both")
        over["lambda_sq"] = float(over.pop("lam")) ** 2

    allowed = _TYPE_I_KEYS if spec["family"] == "i" else _TYPE_II_KEYS
    bad = set(over) - allowed
    if bad:
        raise InvalidOverrideError(
            f"{name}: invalid override(s) {sorted(bad)}; allowed: "
            f"{sorted(allowed | _COMMON_KEYS)}")
    frozen = set(spec.get("fixed", ())) & set(over)
    if frozen:
        raise InvalidOverrideError(
            f"{name}: {sorted(frozen)} define this preset and cannot be overridden")

    if spec["family"] == "i":
        params = TypeIParams(
            beta=spec["beta"],
            kappa=over.get("kappa", spec["kappa"]),
            xi=over.get("xi", 0.0),
            coupling_A=over.get("coupling_A", -1.0))
    else:
        params = TypeIIParams(
            gamma=spec["gamma"],
            lambda_sq=over.get("lambda_sq", spec["lambda_sq"]),
            delta=over.get("delta", spec["delta"]),
            chi=over.get("chi", 0.0),
            coupling_B=over.get("coupling_B", 0.5))
    return BertrandSpace(dim_N=dim_N, family=params, hbar=hbar)


def describe(name: str) -> dict:
    """Static facts about a preset: family, exponent, defaults, and the
    apsidal angle its closed orbits must show (pi/beta or pi/(2 gamma))."""
    spec = _lookup(name)
    space = preset(name)
    fam = space.family
    if isinstance(fam, TypeIParams):
        exponent = fam.beta
        apsidal = math.pi / float(fam.beta)
        params = {"beta": str(fam.beta), "kappa": fam.kappa, "xi": fam.xi,
                  "coupling_A": fam.coupling_A}
    else:
        exponent = fam.gamma
        apsidal = math.pi / (2.0 * float(fam.gamma))
        params = {"gamma": str(fam.gamma), "lambda_sq": fam.lambda_sq,
                  "delta": fam.delta, "chi": fam.chi,
                  "coupling_B": fam.coupling_B}
    t = radial_terms(space)
    return {
        "name": name,
        "family": "type_i" if isinstance(fam, TypeIParams) else "type_ii",
        "exponent": str(exponent),
        "params": params,
        "domain": list(t.domain),
        "apsidal_angle": apsidal,
        "description": spec["doc"],
    }


# Type II preset -> the Type I preset its Stackel transform lands on;
# flat/special oscillators share a Kepler-Coulomb partner pattern
_DUAL_OF = (
    ("taub_nut", "euclidean_kc"),
    ("darboux_iv", "sphere_hyperbolic_kc"),
    ("euclidean_oscillator", "inverse_square_kc"),
    ("darboux_iii", "inverse_square_kc"),
    ("sphere_hyperbolic_oscillator", "type2b_kc"),
    ("type2b2_oscillator", "type2b_kc"),
)


def stackel_pairs(kc_coupling_A: float = -1.0) -> list:
    """The catalog dual pairs as (kc_name, osc_name, descriptor).

    Each descriptor's Type I parameter set is induced from the Type II
    preset (beta = 2 gamma, kappa = -lambda^2, C = -2 delta), so it realizes
    the named Kepler-Coulomb preset's pattern, generally with a different
    curvature value than that preset's default.
    """
    out = []
    for osc_name, kc_name in _DUAL_OF:
        desc = StackelDescriptor.from_type_ii(preset(osc_name).family,
                                              kc_coupling_A)
        out.append((kc_name, osc_name, desc))
    return out
