"""Command-line interface: every computation as a subcommand.

    cslrotor <command> --config cfg.yml [--out DIR] [--check] [--tol REL]

Commands: formfactor | locrate | diffusion | planar | exclude.  Outputs are
CSV files (plus a JSON twin for exclude) with a commented provenance header
(version, command, config hash, tolerance), byte-identical across reruns of
the same config.  Exit codes: 0 success, 2 config error, 3 convergence
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bodies import Atoms, Cylinder, Spheroid
from .config import (ConfigError, build_body, build_csl, grid_from,
                     load_config, parse_length, section)
from .diffusion import diffusion_coefficients, diffusion_curve
from .exclusion import (HeatingMeasurement, IntersectionError,
                        exclusion_curve, forward_heating, intersect,
                        lambda_bound)
from .formfactor import form_factor
from .localization import (_golden_max, loc_rate_axis_angle, loc_rate_small)
from .params import HBAR, CslParams
from .planar import (PlanarParams, TruncationError, evolve_exact, evolve_ode,
                     initial_cos_squeezed, marginals, snapshot_csv,
                     suppression_factor, variance_csl, variance_free)
from .quadrature import (QuadratureConvergenceError, QuadratureSpec,
                         integrate_box, integrate_radial_angular)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _header_lines(command: str, config_path: Path, tol: float):
    digest = hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
    return [
        f"# cslrotor {__version__}",
        f"# command = {command}",
        f"# config_sha256 = {digest}",
        f"# rel_tol = {_fmt(tol)}",
    ]


def _write_csv(path: Path, header_lines, columns, rows):
    lines = list(header_lines)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _check_report(name: str, deviation: float, tol: float) -> int:
    status = "ok" if deviation <= tol else "FAIL"
    print(f"check {name}: max deviation {deviation:.3e} "
          f"(tol {tol:.1e}) {status}")
    return EXIT_OK if deviation <= tol else EXIT_CONVERGENCE


def cmd_formfactor(tree, out: Path, args) -> int:
    body = build_body(section(tree, "body"))
    ff = form_factor(body)
    sec = section(tree, "formfactor")
    k_max = sec.get("k_max")
    if not isinstance(k_max, (int, float)) or k_max <= 0:
        raise ConfigError("formfactor.k_max: expected a positive 1/m value")
    k_max = float(k_max)
    num = sec.get("num", 200)
    if not isinstance(num, int) or num <= 1:
        raise ConfigError("formfactor.num: expected an integer > 1")
    directions = sec.get("directions", [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    if not isinstance(directions, list) or not directions:
        raise ConfigError("formfactor.directions: expected a nonempty list")

    if args.check:
        dev = _check_formfactor(body, ff)
        return _check_report("formfactor", dev, args.tol)

    k_values = np.linspace(0.0, k_max, num)
    rows = []
    for ray, direction in enumerate(directions):
        d = np.asarray(direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0:
            raise ConfigError("formfactor.directions: zero direction")
        d = d / n
        kvecs = k_values[:, None] * d[None, :]
        vals = np.asarray(ff.value_vector(kvecs), dtype=complex)
        for k, v in zip(k_values, vals):
            rows.append((ray, float(k), float(v.real), float(v.imag)))
    _write_csv(out / "formfactor.csv",
               _header_lines("formfactor", args.config, args.tol),
               ["ray", "k_per_m", "ff_re_kg", "ff_im_kg"], rows)
    return EXIT_OK


def _check_formfactor(body, ff) -> float:
    """Direct volume Fourier integral vs the closed form, plus rho(0) = M."""
    dev = abs(float(np.asarray(ff.value_vector(np.zeros(3)))) / body.mass - 1.0)
    if isinstance(body, Atoms):
        return dev
    k_perp, k_par = 2.0 / body.radius, 1.0 / body.length
    radius, half_len = body.radius, body.length / 2.0

    if isinstance(body, Cylinder):
        def integrand(rho, z, phi):
            return rho * np.cos(k_perp * rho * np.cos(phi) + k_par * z)
        lows = (0.0, -half_len, 0.0)
        highs = (radius, half_len, 2.0 * math.pi)
    else:
        # smooth spheroid chart: rho = R cos(psi) s, z = (L/2) sin(psi)
        def integrand(s, psi, phi):
            rho = radius * np.cos(psi) * s
            z = half_len * np.sin(psi)
            jac = rho * radius * np.cos(psi) * half_len * np.cos(psi)
            return jac * np.cos(k_perp * rho * np.cos(phi) + k_par * z)
        lows = (0.0, -math.pi / 2.0, 0.0)
        highs = (1.0, math.pi / 2.0, 2.0 * math.pi)

    spec = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10 * body.mass)
    direct, _ = integrate_box(integrand, lows, highs, spec)
    closed = float(ff.value_axial(k_perp, k_par))
    return max(dev, abs(body.mass_density * direct / closed - 1.0))


def cmd_locrate(tree, out: Path, args) -> int:
    body = build_body(section(tree, "body"))
    if not body.azimuthally_symmetric:
        raise ConfigError("locrate requires an azimuthally symmetric body")
    csl = build_csl(section(tree, "csl"))
    sec = section(tree, "locrate")
    alphas = grid_from(section(sec, "alphas"), "locrate.alphas",
                       length_units=False)
    if alphas.size == 0:
        raise ConfigError("locrate.alphas: empty grid")
    r_c_values = sec.get("r_c_values")
    if r_c_values is not None:
        if not isinstance(r_c_values, list) or not r_c_values:
            raise ConfigError("locrate.r_c_values: expected a nonempty list")
        r_cs = [parse_length(v, "locrate.r_c_values") for v in r_c_values]
    else:
        r_cs = [csl.r_c]
    normalized = bool(sec.get("normalized", True))
    ff = form_factor(body)
    kind = "cylinder" if isinstance(body, Cylinder) else "spheroid"

    if args.check:
        csl0 = csl.with_r_c(r_cs[0])
        value, _ = integrate_radial_angular(
            _mirror_integrand(ff, math.pi / 3), csl0.r_c,
            phi_symmetry="mirror")
        full, _ = integrate_radial_angular(
            _mirror_integrand(ff, math.pi / 3), csl0.r_c,
            phi_symmetry="none")
        return _check_report("locrate symmetry-path", abs(value / full - 1.0),
                             args.tol)

    rows = []
    for r_c in r_cs:
        csl_i = csl.with_r_c(r_c)
        rates = [loc_rate_axis_angle(ff, csl_i, float(a)) for a in alphas]
        _, rate_max = _golden_max(
            lambda a: loc_rate_axis_angle(ff, csl_i, a), 0.0, math.pi / 2.0)
        for a, rate in zip(alphas, rates):
            small = loc_rate_small(kind, csl_i, body.mass, body.radius,
                                   body.length, float(a))
            rows.append((float(r_c), float(a), rate,
                         rate / rate_max if normalized else float("nan"),
                         small))
    _write_csv(out / "locrate.csv",
               _header_lines("locrate", args.config, args.tol),
               ["r_c_m", "alpha_rad", "rate_per_s", "rate_normalized",
                "rate_small_per_s"], rows)
    return EXIT_OK


def _mirror_integrand(ff, alpha):
    def integrand(k, theta, phi):
        st = np.sin(theta)
        ct = np.cos(theta)
        kp2 = k * (st * np.cos(phi) * math.sin(alpha) + ct * math.cos(alpha))
        kperp2 = np.sqrt(np.maximum((k * st) ** 2 + (k * ct) ** 2
                                    - kp2 ** 2, 0.0))
        delta = ff.value_axial(k * st, k * ct) - ff.value_axial(kperp2, kp2)
        return delta ** 2
    return integrand


def cmd_diffusion(tree, out: Path, args) -> int:
    body = build_body(section(tree, "body"))
    csl = build_csl(section(tree, "csl"))
    sec = section(tree, "diffusion")
    r_c_grid = grid_from(section(sec, "r_c_grid"), "diffusion.r_c_grid")
    method = sec.get("method", "auto")
    if method not in ("auto", "closed", "tensors"):
        raise ConfigError(f"diffusion.method: unknown method {method!r}")

    if args.check:
        if isinstance(body, Cylinder):
            a = diffusion_coefficients(body, csl, method="closed")
            b = diffusion_coefficients(body, csl,
                                       QuadratureSpec(rel_tol=args.tol / 30),
                                       method="tensors")
        else:
            a = diffusion_coefficients(body, csl, method="tensors")
            b = diffusion_coefficients(body, csl)
        dev = max(abs(a.d_par / b.d_par - 1.0), abs(a.d_perp / b.d_perp - 1.0),
                  abs(a.d_rot / b.d_rot - 1.0) if b.d_rot else 0.0)
        return _check_report("diffusion closed-vs-quadrature", dev, args.tol)

    table = diffusion_curve(body, csl, r_c_grid, method=method)
    _write_csv(out / "diffusion.csv",
               _header_lines("diffusion", args.config, args.tol),
               ["r_c_m", "d_par", "d_perp", "d_rot"],
               [tuple(row) for row in table])
    return EXIT_OK


def cmd_planar(tree, out: Path, args) -> int:
    sec = section(tree, "planar")
    sigma_alpha = sec.get("sigma_alpha")
    if not isinstance(sigma_alpha, (int, float)) or sigma_alpha <= 0:
        raise ConfigError("planar.sigma_alpha: expected a positive angle")
    d_rot_nat = sec.get("d_rot")
    if not isinstance(d_rot_nat, (int, float)) or d_rot_nat < 0:
        raise ConfigError("planar.d_rot: expected a rate in hbar^3/I units")
    times = sec.get("times")
    if not isinstance(times, list) or not times:
        raise ConfigError("planar.times: expected a nonempty list of times "
                          "in I/hbar units")
    n_alpha = sec.get("n_alpha", 512)
    m_max = sec.get("m_max", 128)
    inertia = sec.get("inertia")
    if inertia is not None and (not isinstance(inertia, (int, float))
                                or inertia <= 0):
        raise ConfigError("planar.inertia: expected kg m^2")
    # natural-unit commands are inertia-free; any I > 0 gives identical
    # dimensionless output, so default to I/hbar = 1 s
    inertia = float(inertia) if inertia is not None else HBAR * 1.0
    params = PlanarParams.natural(float(d_rot_nat), inertia,
                                  times_natural=[float(t) for t in times])
    w0 = initial_cos_squeezed(float(sigma_alpha), n_alpha=int(n_alpha),
                              m_max=int(m_max))

    if args.check:
        t_check = min(t for t in params.times if t > 0)
        exact = evolve_exact(w0, t_check, params)
        rate = params.d_rot / HBAR ** 2
        dt = t_check / max(64, int(40.0 * rate * t_check))
        ode = evolve_ode(w0, t_check, params, dt=dt)
        dev = float(np.abs(exact.values - ode.values).max()
                    / np.abs(exact.values).max())
        return _check_report("planar exact-vs-ode", dev, args.tol)

    header = _header_lines("planar", args.config, args.tol)
    var_rows = []
    for idx, (t_nat, t) in enumerate(zip(times, params.times)):
        w = evolve_exact(w0, t, params) if t > 0 else w0
        snap_header = {
            "t_over_I_per_hbar": _fmt(float(t_nat)),
            "d_rot_hbar3_per_I": _fmt(float(d_rot_nat)),
            "sigma_alpha": _fmt(float(sigma_alpha)),
            "n_alpha": n_alpha,
            "m_max": m_max,
        }
        snapshot_csv(w, out / f"snapshot_t{idx}.csv", snap_header)
        p_alpha, p_m = marginals(w)
        _write_csv(out / f"p_alpha_t{idx}.csv", header,
                   ["alpha_rad", "p_alpha"],
                   list(zip(w.alpha_grid, p_alpha)))
        _write_csv(out / f"p_m_t{idx}.csv", header, ["m", "p_m"],
                   list(zip(w.m_values.tolist(), p_m)))
        var_rows.append((float(t_nat), t, variance_free(w0, t, params),
                         variance_csl(w0, t, params),
                         suppression_factor(t, params)))
    _write_csv(out / "variance.csv", header,
               ["t_over_I_per_hbar", "t_s", "sigma0_sq", "sigmaC_sq",
                "suppression"], var_rows)
    return EXIT_OK


def cmd_exclude(tree, out: Path, args) -> int:
    body = build_body(section(tree, "body"))
    sec = section(tree, "exclude")
    for key in ("gamma_cm", "gamma_rot"):
        v = sec.get(key)
        if not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"exclude.{key}: expected a positive K/s rate")
    rel_error = sec.get("rel_error", 0.0)
    if not isinstance(rel_error, (int, float)) or not 0 <= rel_error < 1:
        raise ConfigError("exclude.rel_error: expected a fraction in [0, 1)")
    r_c_grid = grid_from(section(sec, "r_c_grid"), "exclude.r_c_grid")
    search = sec.get("search_range", ["1 nm", "10 um"])
    if not isinstance(search, list) or len(search) != 2:
        raise ConfigError("exclude.search_range: expected [low, high]")
    lo = parse_length(search[0], "exclude.search_range")
    hi = parse_length(search[1], "exclude.search_range")
    meas = HeatingMeasurement(gamma_cm=float(sec["gamma_cm"]),
                              gamma_rot=float(sec["gamma_rot"]),
                              rel_error=float(rel_error), body=body)
    result = intersect(meas, r_c_range=(lo, hi))

    if args.check:
        csl_star = CslParams(lambda_c=result.lambda_c, r_c=result.r_c)
        repro = forward_heating(body, csl_star)
        dev = max(abs(repro.gamma_cm / meas.gamma_cm - 1.0),
                  abs(repro.gamma_rot / meas.gamma_rot - 1.0))
        return _check_report("exclude round-trip", dev, args.tol)

    cm = exclusion_curve(meas, r_c_grid, "cm")
    rot = exclusion_curve(meas, r_c_grid, "rot")
    header = _header_lines("exclude", args.config, args.tol)
    summary = [
        f"# intersection_r_c_m = {_fmt(result.r_c)}",
        f"# intersection_lambda_c_per_s = {_fmt(result.lambda_c)}",
        f"# r_c_interval_m = {_fmt(result.r_c_interval[0])} "
        f"{_fmt(result.r_c_interval[1])}",
        f"# lambda_interval_per_s = {_fmt(result.lambda_interval[0])} "
        f"{_fmt(result.lambda_interval[1])}",
    ]
    rows = list(zip(r_c_grid, cm.lambda_bound, rot.lambda_bound,
                    cm.band_low, cm.band_high, rot.band_low, rot.band_high))
    _write_csv(out / "exclusion.csv", header + summary,
               ["r_c_m", "lambda_cm_bound", "lambda_rot_bound",
                "cm_band_low", "cm_band_high", "rot_band_low",
                "rot_band_high"], rows)
    payload = {
        "version": __version__,
        "intersection": {
            "r_c_m": result.r_c,
            "lambda_c_per_s": result.lambda_c,
            "r_c_interval_m": list(result.r_c_interval),
            "lambda_interval_per_s": list(result.lambda_interval),
        },
        "curves": {
            "r_c_m": [float(x) for x in r_c_grid],
            "lambda_cm_bound": [float(x) for x in cm.lambda_bound],
            "lambda_rot_bound": [float(x) for x in rot.lambda_bound],
            "cm_band_low": [float(x) for x in cm.band_low],
            "cm_band_high": [float(x) for x in cm.band_high],
            "rot_band_low": [float(x) for x in rot.band_low],
            "rot_band_high": [float(x) for x in rot.band_high],
        },
    }
    (out / "exclusion.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


_COMMANDS = {
    "formfactor": cmd_formfactor,
    "locrate": cmd_locrate,
    "diffusion": cmd_diffusion,
    "planar": cmd_planar,
    "exclude": cmd_exclude,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cslrotor",
        description="Collapse-induced decoherence observables of rigid "
                    "rotors")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path,
                       help="YAML config file")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory")
        p.add_argument("--check", action="store_true",
                       help="run the built-in oracle comparison instead of "
                            "writing outputs")
        p.add_argument("--tol", type=float, default=1e-6,
                       help="relative tolerance for --check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tree = load_config(args.config)
        out = Path(args.out)
        if not args.check:
            out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](tree, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureConvergenceError, IntersectionError,
            TruncationError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
