"""Command-line front end.

Subcommands expose the library with reproducible CSV/JSON/OBJ outputs:

    sphere    profile table, area/volume, limit-profile comparison
    verify    invariant suite with a machine-readable pass/fail report
    meridian  integrate a pole-to-pole geodesic, export polyline
    isoperim  random volume-preserving competitor suite

Floats are written with repr (shortest round-trip decimal), so outputs
are bit-stable for a fixed seed and configuration.  Options may also be
given in a flat key-value config file (`--config`); command-line flags
win over the file, the file wins over defaults.  Exit codes: 0 ok,
1 check failed, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .ambient import ModelParams, Point
from .curvature import (
    assemble_corrected_shape,
    corrected_shape,
    principal_angle,
    second_fundamental_form,
    tangent_frame,
)
from .errors import ContractError, DomainError, NumericsError
from .foliation import (
    CylinderSpec,
    calibration_divergence,
    foliation_constants,
    leaf_label_grid,
    vertical_label_bound,
)
from .isoperimetry import deficit_report, jacobi_residual, make_competitor
from .meridians import (
    integrate_meridian,
    meridian_geodesic_residual,
    pansu_meridian_field,
)
from .sphere import (
    SphereSpec,
    euclidean_profile,
    graph_mean_curvature_fd,
    pansu_profile,
    profile_height,
    profile_height_R,
    profile_height_r,
    sphere_area,
    sphere_volume,
)
from .sphere import _f
from .ambient import curvature_operator, vertical_component
from .sphere import outer_normal

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _load_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, val = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise DomainError(f"malformed config line: {line!r}")
                key, val = parts
            out[key.strip()] = val.strip()
    return out


def _resolve(args: argparse.Namespace, defaults: dict[str, float]) -> None:
    """Fill unset options from the config file, then from defaults."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    for key, default in defaults.items():
        if getattr(args, key, None) is None:
            if key in cfg:
                setattr(args, key, type(default)(cfg[key]))
            else:
                setattr(args, key, default)


def _spec_from(args: argparse.Namespace) -> SphereSpec:
    return SphereSpec(ModelParams(args.epsilon, args.sigma), args.R)


# ------------------------------------------------------------------- sphere


def cmd_sphere(args: argparse.Namespace) -> int:
    _resolve(args, {"epsilon": 1.0, "sigma": 1.0, "n": 200})
    spec = _spec_from(args)
    n = int(args.n)
    # open grid: the radial derivative diverges at the rim r = R
    rs = spec.R * np.arange(n) / n
    rows = [
        (r, profile_height(spec, r), profile_height_r(spec, r), profile_height_R(spec, r))
        for r in rs
    ]
    if args.out:
        _write_csv(args.out, ["r", "f", "f_r", "f_R"], rows)
    if args.limits_out:
        lim_rows = [
            (
                r,
                profile_height(spec, r),
                euclidean_profile(spec.R, r),
                pansu_profile(args.sigma, spec.R, r),
            )
            for r in rs
        ]
        _write_csv(args.limits_out, ["r", "f", "euclidean", "pansu"], lim_rows)
    if args.curvature_out:
        curv_rows = []
        for r in rs:
            t = float(profile_height(spec, r))
            q = Point(r, 0.0, t)
            sd = second_fundamental_form(spec, q)
            k0 = corrected_shape(spec, q).k0_norm if r > 0.0 else 0.0
            curv_rows.append((r, sd.kappa1, sd.kappa2, k0))
        _write_csv(args.curvature_out, ["r", "kappa1", "kappa2", "k0_norm"], curv_rows)
    if args.sweep_out:
        r_lo = args.sweep_min if args.sweep_min is not None else 0.5 * spec.R
        r_hi = args.sweep_max if args.sweep_max is not None else 2.0 * spec.R
        sweep = []
        for R in np.linspace(r_lo, r_hi, int(args.sweep_n)):
            s = SphereSpec(spec.params, float(R))
            sweep.append((R, sphere_area(s), sphere_volume(s)))
        _write_csv(args.sweep_out, ["R", "area", "volume"], sweep)
    summary = {
        "epsilon": args.epsilon,
        "sigma": args.sigma,
        "tau": spec.params.tau,
        "R": spec.R,
        "H": spec.H,
        "area": sphere_area(spec),
        "volume": sphere_volume(spec),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


# ------------------------------------------------------------------- verify


def _sample_sphere_points(spec: SphereSpec, rng: np.random.Generator, n: int,
                          lo: float = 0.02, hi: float = 0.98):
    for _ in range(n):
        r = rng.uniform(lo, hi) * spec.R
        th = rng.uniform(0.0, 2.0 * math.pi)
        sg = 1.0 if rng.uniform() < 0.5 else -1.0
        t = sg * float(profile_height(spec, r))
        yield Point(r * math.cos(th), r * math.sin(th), t)


def _check_cmc(spec: SphereSpec, rng: np.random.Generator, n: int = 30) -> float:
    rs = rng.uniform(0.05, 0.9, size=n) * spec.R
    h_fd = graph_mean_curvature_fd(
        spec.params, lambda x: _f(spec.params, x, spec.R), rs, 1e-3 * spec.R
    )
    return float(np.max(np.abs(h_fd - spec.H) / spec.H))


def _check_k0(spec: SphereSpec, rng: np.random.Generator, perturb: float, n: int = 40) -> float:
    worst = 0.0
    for q in _sample_sphere_points(spec, rng, n):
        shape = second_fundamental_form(spec, q)
        frame = tangent_frame(spec, q)
        h = shape.h.copy()
        h[0, 0] += perturb
        data = assemble_corrected_shape(spec.H, spec.params.tau, h, frame.c)
        worst = max(worst, data.k0_norm)
    return worst


def _check_principal(spec: SphereSpec, rng: np.random.Generator, n: int = 40) -> float:
    worst = 0.0
    beta_ref = principal_angle(spec.H, spec.params.tau)
    for q in _sample_sphere_points(spec, rng, n):
        shape = second_fundamental_form(spec, q)
        cb, sb = math.cos(shape.beta), math.sin(shape.beta)
        for kvec, kap in (((cb, sb), shape.kappa1), ((-sb, cb), shape.kappa2)):
            res = shape.h @ np.array(kvec) - kap * np.array(kvec)
            worst = max(worst, float(np.max(np.abs(res))))
        worst = max(worst, abs(shape.beta - beta_ref))
    return worst


def _check_curvature_identity(spec: SphereSpec, rng: np.random.Generator, n: int = 40) -> float:
    params = spec.params
    tau = params.tau
    worst = 0.0
    for q in _sample_sphere_points(spec, rng, n):
        frame = tangent_frame(spec, q)
        nvec = outer_normal(spec, q)
        psi = rng.uniform(0.0, 2.0 * math.pi)
        scale = math.sqrt(rng.uniform(0.5, 2.0))
        v1 = scale * (math.cos(psi) * frame.X1 + math.sin(psi) * frame.X2)
        v2 = scale * (-math.sin(psi) * frame.X1 + math.cos(psi) * frame.X2)
        energy = scale * scale
        lhs = curvature_operator(params, v2, v1, nvec).dot(v2)
        rhs = 4.0 * tau * tau * energy * vertical_component(v1) * vertical_component(nvec)
        den = max(abs(rhs), 0.01 * (1.0 + tau * tau) * energy)
        worst = max(worst, abs(lhs - rhs) / den)
    return worst


def _check_calibration(spec: SphereSpec, deltas=(0.0, 0.3), n: int = 40) -> float:
    worst_violation = -np.inf
    for delta in deltas:
        if not delta < spec.R:
            continue
        cyl = CylinderSpec(spec, delta)
        consts = foliation_constants(spec)
        f0 = float(profile_height(spec, 0.0))
        rs = np.linspace(0.0, cyl.r_cut * 0.995, n)
        f_rs = np.array([float(profile_height(spec, r)) for r in rs])
        depths = np.linspace(0.0, 0.999, n)[None, :] * (f_rs[:, None] - cyl.t_cut)
        ts = f_rs[:, None] - depths
        labels = leaf_label_grid(cyl, np.broadcast_to(rs[:, None], ts.shape), ts)
        if delta < 1e-14:
            floor = depths**2 / (4.0 * spec.R * consts.k**2 + f0 * f0)
        else:
            floor = math.sqrt(delta) * depths / (spec.R * consts.k + f0)
        margin = (1.0 - spec.R / labels) - floor
        worst_violation = max(worst_violation, float(-margin.min()))
    return worst_violation


def cmd_verify(args: argparse.Namespace) -> int:
    _resolve(args, {"epsilon": 1.0, "sigma": 1.0, "R": 1.0, "seed": 12345,
                    "perturb_h": 0.0, "delta": 0.3})
    rng = np.random.default_rng(int(args.seed))
    if args.grid:
        specs = [
            SphereSpec(ModelParams(e, s), R)
            for e in (0.5, 1.0, 2.0)
            for s in (0.5, 1.0, 2.0)
            for R in (0.5, 1.0, 2.0)
        ]
    else:
        specs = [_spec_from(args)]

    checks = []

    def run(name: str, fun, tol: float) -> None:
        measured = max(fun(spec) for spec in specs)
        checks.append(
            {"name": name, "measured": measured, "tolerance": tol, "passed": bool(measured <= tol)}
        )

    run("cmc_constancy", lambda sp: _check_cmc(sp, rng), 1e-6)
    run("traceless_correction", lambda sp: _check_k0(sp, rng, float(args.perturb_h)), 1e-10)
    run("principal_directions", lambda sp: _check_principal(sp, rng), 1e-12)
    run("curvature_identity", lambda sp: _check_curvature_identity(sp, rng), 1e-10)
    run("calibration_bounds", lambda sp: _check_calibration(sp), 1e-12)
    # mesh-convergence check: its absolute tolerance is calibrated at the
    # base parameters (the truncation error scales with tau^2), so it does
    # not sweep the grid
    base = _spec_from(args)
    checks.append({
        "name": "jacobi_residual",
        "measured": max(jacobi_residual(base, w, n=400) for w in ("x", "y", "t")),
        "tolerance": 1e-3,
    })
    checks[-1]["passed"] = bool(checks[-1]["measured"] <= checks[-1]["tolerance"])

    if args.foliation_out:
        spec0 = specs[0]
        fol_rows = []
        for delta in (0.0, float(args.delta)):
            cyl = CylinderSpec(spec0, delta)
            for r in np.linspace(0.05, 0.9, 10) * cyl.r_cut:
                f_here = float(profile_height(spec0, r))
                for frac in np.linspace(0.15, 0.85, 8):
                    depth = frac * (f_here - cyl.t_cut)
                    q = Point(r, 0.0, f_here - depth)
                    try:
                        div, _ = calibration_divergence(cyl, q)
                        vb = vertical_label_bound(cyl, r, depth)
                    except DomainError:
                        continue
                    fol_rows.append(
                        (delta, r, q.t, vb.label, 0.5 * div, vb.deficit - vb.floor)
                    )
        _write_csv(args.foliation_out,
                   ["delta", "r", "t", "u", "half_div_V", "bound_slack"], fol_rows)

    report = {
        "grid": bool(args.grid),
        "n_specs": len(specs),
        "seed": int(args.seed),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    text = json.dumps(report, indent=2)
    if args.json == "-" or args.json is None:
        print(text)
    else:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
        for c in checks:
            status = "pass" if c["passed"] else "FAIL"
            print(f"{status}  {c['name']}: {c['measured']:.3e} (tol {c['tolerance']:.0e})")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# ------------------------------------------------------------------ meridian


def cmd_meridian(args: argparse.Namespace) -> int:
    if args.figure1:
        args.epsilon, args.sigma, args.R = 0.5, 0.5, 2.0
    _resolve(args, {"epsilon": 1.0, "sigma": 1.0, "R": 1.0,
                    "start_radius_frac": 0.02, "step_frac": 5e-4})
    spec = _spec_from(args)
    r0 = float(args.start_radius_frac) * spec.R
    start = Point(r0, 0.0, float(profile_height(spec, r0)))
    curve = integrate_meridian(spec, start, step=float(args.step_frac) * spec.R)

    drift = 0.0
    for px, py, pt in curve.points:
        r = math.hypot(px, py)
        drift = max(drift, abs(abs(pt) - float(profile_height(spec, min(r, spec.R)))))
    resid = meridian_geodesic_residual(spec, curve)

    dev = 0.0
    e = spec.params.epsilon
    for (px, py, pt), m in zip(curve.points[:: max(1, len(curve) // 200)],
                               curve.velocities[:: max(1, len(curve) // 200)]):
        r = math.hypot(px, py)
        if not 0.1 * spec.R < r < 0.95 * spec.R:
            continue
        bar = pansu_meridian_field(spec.params.sigma, Point(px, py, pt))
        scaled = np.array([m[0], m[1], e**3 * m[2]])
        dev = max(dev, float(np.linalg.norm(scaled - bar.as_array())))

    if args.out_prefix:
        _write_csv(
            args.out_prefix + ".csv",
            ["s", "x", "y", "t", "vX", "vY", "vT"],
            (
                (curve.s[i], *curve.points[i], *curve.velocities[i])
                for i in range(len(curve))
            ),
        )
        with open(args.out_prefix + ".obj", "w") as fh:
            for px, py, pt in curve.points:
                fh.write(f"v {_fmt(px)} {_fmt(py)} {_fmt(pt)}\n")
            indices = " ".join(str(i + 1) for i in range(len(curve)))
            fh.write(f"l {indices}\n")
        with open(args.out_prefix + ".json", "w") as fh:
            json.dump(
                {
                    "R": curve.R,
                    "s": [float(v) for v in curve.s],
                    "points": curve.points.tolist(),
                    "velocities": curve.velocities.tolist(),
                },
                fh,
            )
            fh.write("\n")

    summary = {
        "epsilon": args.epsilon,
        "sigma": args.sigma,
        "R": args.R,
        "samples": len(curve),
        "length": float(curve.s[-1]),
        "max_leaf_drift": drift,
        "geodesic_residual": resid,
        "final_r": math.hypot(curve.points[-1, 0], curve.points[-1, 1]),
        "final_t": float(curve.points[-1, 2]),
        "pansu_deviation": dev,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


# ------------------------------------------------------------------ isoperim


def cmd_isoperim(args: argparse.Namespace) -> int:
    _resolve(args, {"epsilon": 1.0, "sigma": 1.0, "R": 1.0, "delta": 0.3,
                    "n": 20, "seed": 7})
    spec = _spec_from(args)
    cyl = CylinderSpec(spec, float(args.delta))
    rng = np.random.default_rng(int(args.seed))
    rows = []
    reports = []
    for i in range(int(args.n)):
        comp = make_competitor(spec, cyl, rng)
        rep = deficit_report(comp)
        reports.append((comp, rep))
        rows.append((i, rep.symdiff, rep.deficit, rep.bound, rep.slack))
    min_slack = min(r.slack for _, r in reports)

    base = reports[0][0]
    scales = np.geomspace(2e-4, 2e-3, 6)
    defs = [deficit_report(base.scaled(s / base.amp_add)).deficit for s in scales]
    exponent = float(np.polyfit(np.log(scales), np.log(defs), 1)[0])

    if args.out_prefix:
        _write_csv(args.out_prefix + ".csv",
                   ["index", "symdiff", "deficit", "bound", "slack"], rows)
    report = {
        "params": {"epsilon": args.epsilon, "sigma": args.sigma, "R": args.R},
        "delta": float(args.delta),
        "n_competitors": int(args.n),
        "seed": int(args.seed),
        "min_slack": min_slack,
        "exponent_fit": exponent,
        "passed": bool(min_slack >= 0.0 and abs(exponent - 2.0) <= 0.1),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# --------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisenberg-cmc",
        description="CMC spheres in the Riemannian Heisenberg group: "
        "evaluation and verification tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, need_R: bool = False) -> None:
        p.add_argument("--epsilon", type=float, default=None, help="frame scale (> 0)")
        p.add_argument("--sigma", type=float, default=None, help="vertical twist")
        if need_R:
            p.add_argument("--R", type=float, required=True, help="sphere parameter (> 0)")
        else:
            p.add_argument("--R", type=float, default=None, help="sphere parameter (> 0)")
        p.add_argument("--config", default=None,
                       help="flat key-value config file; flags override it")

    p_sphere = sub.add_parser("sphere", help="profile table, area and volume")
    common(p_sphere, need_R=True)
    p_sphere.add_argument("--n", type=int, default=None, help="rows in the profile table")
    p_sphere.add_argument("--out", default=None,
                          help="CSV path for columns r (radius), f (profile height), "
                               "f_r (radial derivative), f_R (derivative in R)")
    p_sphere.add_argument("--limits-out", dest="limits_out", default=None,
                          help="CSV path comparing f with the Euclidean and "
                               "sub-Riemannian limit profiles")
    p_sphere.add_argument("--curvature-out", dest="curvature_out", default=None,
                          help="CSV path for r, principal curvatures kappa1/kappa2, "
                               "and the norm of the traceless corrected operator")
    p_sphere.add_argument("--sweep-out", dest="sweep_out", default=None,
                          help="CSV path for an (R, area, volume) sweep")
    p_sphere.add_argument("--sweep-min", dest="sweep_min", type=float, default=None)
    p_sphere.add_argument("--sweep-max", dest="sweep_max", type=float, default=None)
    p_sphere.add_argument("--sweep-n", dest="sweep_n", type=int, default=9)
    p_sphere.set_defaults(func=cmd_sphere)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    common(p_verify)
    p_verify.add_argument("--grid", action="store_true",
                          help="verify over the (epsilon, sigma, R) grid {0.5,1,2}^3")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--perturb-h", dest="perturb_h", type=float, default=None,
                          help="inject an artificial perturbation into the shape "
                               "operator (negative control; makes the traceless "
                               "check fail)")
    p_verify.add_argument("--json", default=None,
                          help="write the JSON report here ('-' for stdout)")
    p_verify.add_argument("--delta", type=float, default=None,
                          help="cylinder cut used by --foliation-out (besides 0)")
    p_verify.add_argument("--foliation-out", dest="foliation_out", default=None,
                          help="CSV path for a (r, t, leaf label, div V / 2, "
                               "bound slack) grid below the sphere")
    p_verify.set_defaults(func=cmd_verify)

    p_meridian = sub.add_parser("meridian", help="integrate a pole-to-pole geodesic")
    common(p_meridian)
    p_meridian.add_argument("--figure1", action="store_true",
                            help="use the preset R=2, epsilon=0.5, sigma=0.5")
    p_meridian.add_argument("--start-radius-frac", dest="start_radius_frac",
                            type=float, default=None,
                            help="starting radius as a fraction of R")
    p_meridian.add_argument("--step-frac", dest="step_frac", type=float, default=None,
                            help="arclength step as a fraction of R")
    p_meridian.add_argument("--out-prefix", dest="out_prefix", default=None,
                            help="write <prefix>.csv (samples) and <prefix>.obj (polyline)")
    p_meridian.set_defaults(func=cmd_meridian)

    p_iso = sub.add_parser("isoperim", help="random competitor suite")
    common(p_iso)
    p_iso.add_argument("--delta", type=float, default=None, help="cylinder cut parameter")
    p_iso.add_argument("--n", type=int, default=None, help="number of competitors")
    p_iso.add_argument("--seed", type=int, default=None)
    p_iso.add_argument("--out-prefix", dest="out_prefix", default=None,
                       help="write <prefix>.csv with per-competitor results")
    p_iso.set_defaults(func=cmd_isoperim)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
