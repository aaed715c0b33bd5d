"""Command-line interface.

Lengths are given in nm and angles in degrees on the command line; they are
converted to radians before reaching the library. Exit codes: 0 success,
2 invalid input, 3 infeasible design, 4 no convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from pcwdesign import __version__
from pcwdesign.compound import (
    CSV_COLUMNS,
    RNG_IDENTITY,
    CompoundDesign,
    PerturbationConfig,
    build_compound,
    run_perturbation,
)
from pcwdesign.constants import deg_to_rad
from pcwdesign.errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    InfeasibleDesignError,
    PCWError,
)
from pcwdesign.geometry import export_compound, export_uniform
from pcwdesign.heuristic import (
    Conventions,
    LatticeSpec,
    design_curve,
    design_radius,
)
from pcwdesign.slab_optics import GAAS, load_material, vertical_cavity

SCHEMA_VERSION = 1

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_NONCONVERGENCE = 0, 2, 3, 4

CURVE_COLUMNS = ("a_nm", "r_nm", "c1_nm", "c2", "theta_wg_rad", "F_PCW", "beta", "feasible")

PERTURB_KEYS = {
    "a1": 238.0,
    "a2": 238.0,
    "lambda1": 925.0,
    "lambda2": 925.0,
    "h": 160.0,
    "theta_gr_deg": 60.0,
    "material": None,
    "seed": 0,
    "n_runs": 100,
    "delta_r_max": 10.0,
    "holes_per_half": 100,
    "mode": "per-hole-mean",
    "success_window": 1.5,
    "bracket_halfwidth": 100.0,
    "bias_a": 0.0,
    "bias_r": 0.0,
    "conventions": {},
}


class ValidationError(DomainError):
    pass


def _positive(args, *names):
    for name in names:
        v = getattr(args, name)
        if v is None or not math.isfinite(v) or v <= 0:
            raise ValidationError(f"{name.replace('_', '-')} must be positive")


def _material(path):
    return GAAS if path is None else load_material(path)


def _conventions(args) -> Conventions:
    return Conventions(
        mean_x_units=args.mean_x,
        fresnel_wavelength=args.fresnel_wavelength,
        bragg_angle=args.bragg_angle,
        group_index=args.group_index,
    )


def _envelope(kind: str, config: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "version": __version__,
        "config": config,
        "result": result,
    }


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_fp(args) -> int:
    _positive(args, "h", "lambda_")
    if not args.n > 1:
        raise ValidationError("n must exceed 1")
    cav = vertical_cavity(args.h, args.n, args.lambda_)
    cfg = {"h_nm": args.h, "n": args.n, "lambda_nm": args.lambda_}
    _emit(_envelope("vertical_cavity", cfg, cav.to_dict()), args.out)
    return EXIT_OK


def _design_config(args, material, conv) -> dict:
    return {
        "a_nm": args.a,
        "lambda_nm": args.lambda_,
        "h_nm": args.h,
        "theta_gr_deg": args.theta_gr,
        "r0_nm": args.r0,
        "material": material.to_dict(),
        "conventions": conv.to_dict(),
    }


def cmd_design(args) -> int:
    _positive(args, "a", "lambda_", "h", "theta_gr")
    material, conv = _material(args.material), _conventions(args)
    res = design_radius(
        args.a,
        args.lambda_,
        args.h,
        material,
        deg_to_rad(args.theta_gr),
        r0=args.r0,
        conventions=conv,
    )
    _emit(_envelope("design", _design_config(args, material, conv), res.to_dict()), args.out)
    return EXIT_OK


def _grid(lo: float, hi: float, step: float) -> list[float]:
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + k * step for k in range(n + 1)]


def cmd_curve(args) -> int:
    _positive(args, "lambda_", "h", "a_min", "a_max", "a_step", "theta_gr")
    if args.a_max < args.a_min:
        raise ValidationError("a-max must not be below a-min")
    material, conv = _material(args.material), _conventions(args)
    points = design_curve(
        args.lambda_,
        args.h,
        material,
        deg_to_rad(args.theta_gr),
        _grid(args.a_min, args.a_max, args.a_step),
        conventions=conv,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for p in points:
            if p.result is None:
                w.writerow([repr(p.a)] + [""] * 6 + [0])
                continue
            d = p.result
            w.writerow(
                [repr(v) for v in (p.a, d.r, d.c1, d.c2, d.theta_wg, d.F_PCW, d.beta)] + [1]
            )
    n_ok = sum(p.feasible for p in points)
    print(f"wrote {len(points)} rows ({n_ok} feasible) to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_compound(args) -> int:
    _positive(args, "a1", "a2", "lambda1", "lambda2", "h", "theta_gr")
    material, conv = _material(args.material), _conventions(args)
    design = build_compound(
        args.a1, args.a2, args.lambda1, args.lambda2, args.h, material, deg_to_rad(args.theta_gr), conv
    )
    cfg = {
        "a1_nm": args.a1,
        "a2_nm": args.a2,
        "lambda1_nm": args.lambda1,
        "lambda2_nm": args.lambda2,
        "h_nm": args.h,
        "theta_gr_deg": args.theta_gr,
        "material": material.to_dict(),
        "conventions": conv.to_dict(),
    }
    _emit(_envelope("compound", cfg, design.to_dict()), args.out)
    return EXIT_OK


def load_perturb_config(path: str | None) -> dict:
    cfg = dict(PERTURB_KEYS)
    if path is None:
        return cfg
    try:
        user = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(user, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(user) - set(PERTURB_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    cfg.update(user)
    return cfg


def cmd_perturb(args) -> int:
    cfg = load_perturb_config(args.config)
    for key in ("seed", "delta_r_max", "n_runs", "mode", "success_window", "holes_per_half"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    for key in ("a1", "a2", "lambda1", "lambda2", "h", "theta_gr_deg"):
        if not isinstance(cfg[key], (int, float)) or not cfg[key] > 0:
            raise ValidationError(f"{key} must be positive")
    material = _material(cfg["material"])
    conv = Conventions.from_dict(cfg["conventions"])
    design = build_compound(
        cfg["a1"],
        cfg["a2"],
        cfg["lambda1"],
        cfg["lambda2"],
        cfg["h"],
        material,
        deg_to_rad(cfg["theta_gr_deg"]),
        conv,
    )
    pcfg = PerturbationConfig(
        delta_r_max=cfg["delta_r_max"],
        n_runs=cfg["n_runs"],
        seed=cfg["seed"],
        holes_per_half=cfg["holes_per_half"],
        mode=cfg["mode"],
        success_window=cfg["success_window"],
        bracket_halfwidth=cfg["bracket_halfwidth"],
        bias_a=cfg["bias_a"],
        bias_r=cfg["bias_r"],
    )
    report = run_perturbation(design, pcfg, conv)
    resolved = dict(cfg, material=material.to_dict(), conventions=conv.to_dict(), rng=RNG_IDENTITY)
    payload = _envelope("perturbation_report", resolved, report.to_dict())
    out = Path(args.out)
    _emit(payload, str(out))
    out.with_suffix(".csv").write_text(report.to_csv(), encoding="utf-8", newline="\n")
    s = report.to_dict()["summary"]
    print(
        f"{s['n_runs']} runs, success_fraction={s['success_fraction']:.3f}, "
        f"mean_shift={s['mean_shift_nm']:.3f} nm, std_shift={s['std_shift_nm']:.3f} nm",
        file=sys.stderr,
    )
    return EXIT_OK


def _specs_from_payload(payload: dict) -> tuple[str, list[LatticeSpec]]:
    kind = payload.get("kind")
    result = payload.get("result", payload)
    if kind == "design" or "spec" in result:
        return "uniform", [LatticeSpec.from_dict(result["spec"])]
    if kind == "compound" or "half_1" in result:
        d = CompoundDesign.from_dict(result)
        return "compound", [d.half_1, d.half_2]
    raise ValidationError("design file must be the JSON output of `design` or `compound`")


def cmd_export_geometry(args) -> int:
    try:
        payload = json.loads(Path(args.design).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read design {args.design}: {exc}") from exc
    kind, specs = _specs_from_payload(payload)
    if kind == "uniform":
        geom = export_uniform(specs[0], args.rows, args.cols)
    else:
        geom = export_compound(specs[0], specs[1], args.rows, args.cols)
    geom.write(args.out)
    print(f"wrote {len(geom.holes)} holes to {args.out}", file=sys.stderr)
    return EXIT_OK


def _add_model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta-gr", type=float, default=60.0, help="lattice angle in degrees (default 60)")
    p.add_argument("--material", help="two-column refractive index table (wavelength_nm n)")
    g = p.add_argument_group("model conventions")
    g.add_argument("--mean-x", choices=["period", "um"], default="period",
                   help="unit of the axial coordinate in the intensity falloff")
    g.add_argument("--fresnel-wavelength", choices=["vacuum", "medium"], default="vacuum")
    g.add_argument("--bragg-angle", choices=["half", "full"], default="half")
    g.add_argument("--group-index", type=float, default=None,
                   help="group index for v_g = c/n_g (default: material index)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcwdesign",
        description="Heuristic photonic crystal waveguide design (lengths in nm, angles in degrees).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fp", help="vertical Fabry-Perot Purcell factor of the membrane")
    p.add_argument("--h", type=float, required=True, help="membrane thickness (nm)")
    p.add_argument("--n", type=float, required=True, help="refractive index")
    p.add_argument("--lambda", dest="lambda_", type=float, required=True, help="wavelength (nm)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_fp)

    p = sub.add_parser("design", help="solve the hole radius for a period and target wavelength")
    p.add_argument("--a", type=float, required=True, help="lattice period (nm)")
    p.add_argument("--lambda", dest="lambda_", type=float, required=True, help="target wavelength (nm)")
    p.add_argument("--h", type=float, required=True, help="membrane thickness (nm)")
    p.add_argument("--r0", type=float, default=None, help="initial radius guess (nm, default a/3)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    _add_model_options(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser(
        "curve",
        help="design locus r(a) at a fixed wavelength, as CSV",
        epilog="CSV columns: " + ", ".join(CURVE_COLUMNS)
        + ". Infeasible rows have feasible=0 and empty numeric cells.",
    )
    p.add_argument("--lambda", dest="lambda_", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--a-step", type=float, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    _add_model_options(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("compound", help="design the two halves of a compound crystal")
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--a2", type=float, required=True)
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--out", help="write JSON here instead of stdout")
    _add_model_options(p)
    p.set_defaults(func=cmd_compound)

    p = sub.add_parser(
        "perturb",
        help="seeded Monte Carlo of hole-radius errors on a compound crystal",
        epilog="Writes the JSON report to --out and per-run rows to the same path with a .csv "
        "suffix. CSV columns: " + ", ".join(CSV_COLUMNS) + ". Config keys: "
        + ", ".join(PERTURB_KEYS),
    )
    p.add_argument("--config", help="JSON file with run parameters")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--delta-r-max", type=float)
    p.add_argument("--n-runs", type=int)
    p.add_argument("--holes-per-half", type=int)
    p.add_argument("--mode", choices=["per-hole-mean", "per-half-single"])
    p.add_argument("--success-window", type=float)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("export-geometry", help="hole list for an external simulator")
    p.add_argument("--design", required=True, help="JSON output of `design` or `compound`")
    p.add_argument("--rows", type=int, required=True, help="odd number of lattice rows")
    p.add_argument("--cols", type=int, required=True, help="columns (per half for compound)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_geometry)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (DomainError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PCWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
