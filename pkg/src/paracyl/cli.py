"""Command-line front end.

Subcommands: brjuno | orbit | basin | coords | limitset | verify | render.
Exit codes: 0 pass, 1 infrastructure error, 2 config error, 3 check failure.
All outputs (CSV, JSON, P6 images) are bit-identical across runs with the
same config and seed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, coords, regions, rotation, verify
from .config import RunConfig, load_config
from .errors import ConfigError, ParacylError
from .germ import default_perturbed_family, model_family, orbit_up


def _write_json(path: Path, obj) -> None:
    path.write_text(verify.canonical_json(obj) + "\n")


def write_p6(path: Path, rgb: np.ndarray) -> None:
    """Binary portable pixmap: the simplest bit-exact raster format."""
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def _mask_to_rgb(mask: np.ndarray) -> np.ndarray:
    rgb = np.empty(mask.shape + (3,), dtype=np.uint8)
    rgb[...] = (20, 24, 40)
    rgb[mask] = (230, 180, 60)
    return rgb


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {}
    if args.out is not None:
        updates["out"] = Path(args.out)
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.n is not None:
        updates["n"] = args.n
    if args.tol is not None:
        updates["tol"] = args.tol
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _family(cfg: RunConfig, which: str):
    if which == "model":
        return model_family(cfg.rot, cfg.l)
    return default_perturbed_family(cfg.rot, cfg.l, cfg.a, cfg.b)


def _resolve_params(cfg: RunConfig, fam) -> regions.BasinParams:
    if cfg.r is not None:
        return regions.BasinParams(cfg.r, cfg.theta, cfg.beta)
    r0 = regions.find_r0(fam, cfg.theta, cfg.beta, cfg.r_hi, seed=cfg.seed).r0
    return regions.BasinParams(r0, cfg.theta, cfg.beta)


def cmd_brjuno(cfg: RunConfig, args) -> int:
    N = min(args.n if args.n else 12, 24)
    rep = rotation.brjuno_report(cfg.rot, N)
    out = cfg.out / "brjuno.csv"
    cfg.out.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", "omega", "partial_sum"])
        for nu, (om, s) in enumerate(zip(rep.omegas, rep.partial_sums), start=1):
            writer.writerow([nu, repr(om), repr(s) if math.isfinite(s) else "inf"])
            if om == 0.0:
                break
    print(f"wrote {out}")
    print(f"verdict: {rep.verdict} (tail increment {rep.tail_increment:.3e})")
    if rep.verdict == "divergent (rational)":
        print("note: a small divisor vanished; the weighted sum diverges")
    return 0


def cmd_orbit(cfg: RunConfig, args) -> int:
    fam = _family(cfg, args.family)
    rec = orbit_up(fam, (complex(args.x0), complex(args.y0)), args.n or cfg.n)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / "orbit.csv"
    rec.to_csv(out)
    print(f"wrote {out} ({rec.n_steps} steps"
          + (f", stopped early: {rec.stop_reason})" if rec.stopped_early else ")"))
    return 0


def cmd_basin(cfg: RunConfig, args) -> int:
    fam = _family(cfg, args.family)
    witness = None
    if cfg.r is not None:
        params = regions.BasinParams(cfg.r, cfg.theta, cfg.beta)
    else:
        witness = regions.find_r0(fam, cfg.theta, cfg.beta, cfg.r_hi, seed=cfg.seed)
        params = regions.BasinParams(witness.r0, cfg.theta, cfg.beta)
    rep = analysis.invariance_suite(fam, params, 1000, seed=cfg.seed + 1)
    report = {
        "family": args.family,
        "r0": params.r,
        "theta": params.theta,
        "beta": params.beta,
        "search_trace": list(witness.trace) if witness else None,
        "invariance": rep.to_json(),
    }
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / "basin.json"
    _write_json(out, report)
    print(f"wrote {out} (r0 = {params.r:g})")
    return 0


def cmd_coords(cfg: RunConfig, args) -> int:
    fam = _family(cfg, args.family)
    p = (complex(args.x0), complex(args.y0))
    c = coords.estimate_c(fam, p)
    report = {
        "point": [p[0].real, p[0].imag, p[1].real, p[1].imag],
        "c": [c.real, c.imag],
        "psi": coords.psi(fam, p, tol=cfg.tol, c=c).to_json(),
        "sigma": coords.sigma(fam, p, tol=cfg.tol, c=c).to_json(),
        "tau": coords.tau(fam, p, tol=cfg.tol, c=c).to_json(),
    }
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / "coords.json"
    _write_json(out, report)
    print(f"wrote {out}")
    return 0


def cmd_limitset(cfg: RunConfig, args) -> int:
    fam = _family(cfg, args.family)
    tol = 1e-8 if args.family == "model" else 1e-5
    rep = analysis.limit_circle(
        fam, (complex(args.x0), complex(args.y0)), N=max(cfg.n, 10**4), tau_tol=tol
    )
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / "limitset.json"
    _write_json(out, rep.to_json())
    print(f"wrote {out}")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    report = verify.run_acceptance_twice(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = cfg.out / "verify.json"
    _write_json(out, report)
    for name in sorted(report["criteria"]):
        status = "pass" if report["criteria"][name]["pass"] else "FAIL"
        print(f"{name}: {status}")
    print(f"wrote {out}")
    if not report["all_pass"]:
        print("failing checks: " + ", ".join(report["failing"]), file=sys.stderr)
        return 3
    return 0


def cmd_render(cfg: RunConfig, args) -> int:
    if args.slice <= 0:
        raise ConfigError(f"slice must be > 0, got {args.slice}")
    fam = _family(cfg, args.family)
    params = _resolve_params(cfg, fam)
    panel1, panel2 = regions.membership_image(
        params, args.slice, width=args.width, height=args.height
    )
    if not panel1.any() and not panel2.any():
        print("warning: region is empty at this slice", file=sys.stderr)
    cfg.out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, mask in (("render_band.ppm", panel1), ("render_angles.ppm", panel2)):
        path = cfg.out / name
        write_p6(path, _mask_to_rgb(mask))
        paths.append(str(path))
    print("wrote " + " and ".join(paths))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paracyl",
        description="Numerical experiments around an attracting region of a "
        "plane map tangent to a rotation, its Fatou-type coordinates, and "
        "the circles its orbits accumulate on.",
    )
    parser.add_argument("--config", type=Path, default=None, help="INI config file")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("brjuno", help="small divisors and weighted partial sums")
    for name, help_text in (
        ("orbit", "iterate the lift and dump the orbit to CSV"),
        ("coords", "Fatou-type coordinate estimates at a point"),
        ("limitset", "limit-circle radius and equidistribution report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--x0", default="0.5")
        p.add_argument("--y0", default="0.1")
        p.add_argument("--family", choices=["model", "perturbed"], default="model")
    p = sub.add_parser("basin", help="radius search and invariance experiment")
    p.add_argument("--family", choices=["model", "perturbed"], default="perturbed")
    sub.add_parser("verify", help="run the full acceptance suite twice")
    p = sub.add_parser("render", help="membership rasters of a |y| slice")
    p.add_argument("--slice", type=float, default=0.1)
    p.add_argument("--width", type=int, default=400)
    p.add_argument("--height", type=int, default=300)
    p.add_argument("--family", choices=["model", "perturbed"], default="perturbed")
    return parser


_HANDLERS = {
    "brjuno": cmd_brjuno,
    "orbit": cmd_orbit,
    "basin": cmd_basin,
    "coords": cmd_coords,
    "limitset": cmd_limitset,
    "verify": cmd_verify,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ParacylError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
