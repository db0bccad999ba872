"""Run configuration: YAML schema, unit parsing and validation.

A config is a key-value tree with a body section, a csl section and one
section per subcommand.  Lengths accept plain floats (meters) or strings
with a unit suffix (nm, um, mm, m); the reference mass accepts kilograms or
the form "amu:<N>".  Unknown keys anywhere are rejected with the offending
dotted path, before any computation starts.
"""

from __future__ import annotations

import math
import re

import numpy as np
import yaml

from .bodies import Atoms, Cylinder, Sphere, Spheroid
from .params import AMU, MATERIAL_DENSITIES, CslParams


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


class _FloatSafeLoader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats like 1e-10 (YAML 1.2)."""


_FloatSafeLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+][0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


_LENGTH_UNITS = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}


def parse_length(value, key: str) -> float:
    """Length in meters from a float or a '<number> <unit>' string."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        result = float(value)
    elif isinstance(value, str):
        text = value.strip()
        for suffix in sorted(_LENGTH_UNITS, key=len, reverse=True):
            if text.endswith(suffix):
                number = text[: -len(suffix)].strip()
                try:
                    result = float(number) * _LENGTH_UNITS[suffix]
                except ValueError:
                    raise ConfigError(
                        f"{key}: cannot parse length {value!r}") from None
                break
        else:
            try:
                result = float(text)
            except ValueError:
                raise ConfigError(
                    f"{key}: cannot parse length {value!r}") from None
    else:
        raise ConfigError(f"{key}: expected a length, got {value!r}")
    if not math.isfinite(result) or result <= 0:
        raise ConfigError(f"{key}: length must be positive, got {value!r}")
    return result


def parse_mass_reference(value, key: str) -> float:
    """Reference mass in kg from a float or 'amu:<N>'."""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("amu:"):
            try:
                return float(text[4:]) * AMU
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {value!r}") from None
        raise ConfigError(f"{key}: expected kg or 'amu:<N>', got {value!r}")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(f"{key}: expected kg or 'amu:<N>', got {value!r}")


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return node


def _reject_unknown(node: dict, allowed, path: str):
    for key in node:
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key}" if path
                              else f"unknown key {key}")


def _get(node: dict, key: str, path: str, required=True, default=None):
    if key not in node:
        if required:
            raise ConfigError(f"missing key {path}.{key}")
        return default
    return node[key]


def build_body(node, path: str = "body"):
    node = _require_mapping(node, path)
    _reject_unknown(node, {"shape", "length", "radius", "density", "mass",
                           "material", "atoms"}, path)
    shape = _get(node, "shape", path)
    if shape not in ("cylinder", "spheroid", "sphere", "atoms"):
        raise ConfigError(f"{path}.shape: unknown shape {shape!r}")

    if shape == "atoms":
        atoms = _get(node, "atoms", path)
        if not isinstance(atoms, list) or not atoms:
            raise ConfigError(f"{path}.atoms: expected a nonempty list of "
                              "[mass_kg, x_m, y_m, z_m] rows")
        try:
            masses = [float(row[0]) for row in atoms]
            positions = [tuple(float(x) for x in row[1:4]) for row in atoms]
        except (TypeError, ValueError, IndexError):
            raise ConfigError(f"{path}.atoms: rows must be "
                              "[mass_kg, x_m, y_m, z_m]") from None
        return Atoms(masses=tuple(masses), positions=tuple(positions))

    density = node.get("density")
    mass = node.get("mass")
    material = node.get("material")
    if material is not None:
        if material not in MATERIAL_DENSITIES:
            raise ConfigError(f"{path}.material: unknown material "
                              f"{material!r}")
        if density is not None:
            raise ConfigError(f"{path}: give material or density, not both")
        density = MATERIAL_DENSITIES[material]
    if (density is None) == (mass is None):
        raise ConfigError(f"{path}: specify exactly one of density/material "
                          "or mass")
    radius = parse_length(_get(node, "radius", path), f"{path}.radius")
    if shape == "sphere":
        if "length" in node:
            raise ConfigError(f"{path}.length: a sphere has no length")
        return Sphere(radius, density=density, mass_total=mass)
    length = parse_length(_get(node, "length", path), f"{path}.length")
    cls = Cylinder if shape == "cylinder" else Spheroid
    return cls(length=length, radius=radius, density=density, mass_total=mass)


def build_csl(node, path: str = "csl") -> CslParams:
    node = _require_mapping(node, path)
    _reject_unknown(node, {"lambda_c", "r_c", "m0"}, path)
    lambda_c = _get(node, "lambda_c", path)
    if not isinstance(lambda_c, (int, float)) or isinstance(lambda_c, bool):
        raise ConfigError(f"{path}.lambda_c: expected a rate in 1/s")
    r_c = parse_length(_get(node, "r_c", path), f"{path}.r_c")
    m0 = node.get("m0", AMU)
    try:
        return CslParams(lambda_c=float(lambda_c), r_c=r_c,
                         m0=parse_mass_reference(m0, f"{path}.m0"))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _grid(node, path: str, length_units: bool):
    node = _require_mapping(node, path)
    _reject_unknown(node, {"start", "stop", "num", "spacing"}, path)
    conv = (lambda v, k: parse_length(v, k)) if length_units else \
        (lambda v, k: float(v))
    start = conv(_get(node, "start", path), f"{path}.start")
    stop = conv(_get(node, "stop", path), f"{path}.stop")
    num = _get(node, "num", path)
    if not isinstance(num, int) or isinstance(num, bool) or num <= 0:
        raise ConfigError(f"{path}.num: expected a positive integer")
    spacing = node.get("spacing", "log" if length_units else "linear")
    if spacing not in ("log", "linear"):
        raise ConfigError(f"{path}.spacing: expected 'log' or 'linear'")
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError(f"{path}: log spacing needs positive bounds")
        return np.logspace(math.log10(start), math.log10(stop), num)
    return np.linspace(start, stop, num)


_SECTION_KEYS = {
    "formfactor": {"k_max", "num", "directions"},
    "locrate": {"alphas", "r_c_values", "normalized"},
    "diffusion": {"r_c_grid", "method"},
    "planar": {"sigma_alpha", "d_rot", "times", "n_alpha", "m_max",
               "inertia"},
    "exclude": {"gamma_cm", "gamma_rot", "rel_error", "r_c_grid",
                "search_range"},
}

_TOP_KEYS = {"body", "csl"} | set(_SECTION_KEYS)


def load_config(path) -> dict:
    """Parse and validate a YAML config file into a raw tree."""
    try:
        with open(path) as fh:
            tree = yaml.load(fh, Loader=_FloatSafeLoader)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    if tree is None:
        tree = {}
    tree = _require_mapping(tree, "")
    _reject_unknown(tree, _TOP_KEYS, "")
    for section in _SECTION_KEYS:
        if section in tree:
            sec = _require_mapping(tree[section], section)
            _reject_unknown(sec, _SECTION_KEYS[section], section)
    return tree


def section(tree: dict, name: str) -> dict:
    if name not in tree:
        raise ConfigError(f"missing section {name}")
    return tree[name]


def grid_from(node, path: str, length_units: bool = True):
    return _grid(node, path, length_units)
