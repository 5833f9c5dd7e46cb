"""
Command-line entry point: python -m app.cli <subcommand> ...

Global flags --config (JSON RunConfig file), --threads and --out (output
directory) precede the subcommand. JSON goes to stdout unless an output file
or directory is given; CSV subcommands always write a file.
"""
import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from app import io
from app.asymptotics import AsymptoticPipeline
from app.config import RunConfig, settings
from app.exceptions import DomainError, ToolkitError
from app.pde import CoupledState, FieldHistory, evolve
from app.scattering import ScatteringData, sample_scattering
from app.soliton import SolitonField, SolitonSeed
from app.spectral import signature_grid, stationary_points
from app.transforms import build_transforms
from app.validation import ValidationMode, validate

logger = logging.getLogger(__name__)


def _output_path(args, default_name: str) -> Optional[Path]:
    target = getattr(args, "output", None)
    base = Path(args.out_dir) if args.out_dir else None
    if target:
        path = Path(target)
        return base / path if base and not path.is_absolute() else path
    return base / default_name if base else None


def _emit_json(args, payload, default_name: str):
    path = _output_path(args, default_name)
    if path is None:
        print(json.dumps(io.to_jsonable(payload), indent=2))
    else:
        io.write_json(path, payload)


def _csv_path(args, default_name: str) -> Path:
    return _output_path(args, default_name) or Path(args.config_obj.output_dir) / default_name


# Subcommands

def cmd_phase(args, config: RunConfig):
    geometry = stationary_points(args.xi)
    _emit_json(args, {"xi": geometry.xi, "region": geometry.region.value, "points": list(geometry.points)},
               "phase.json")


def cmd_signature(args, config: RunConfig):
    nx, ny = io.parse_grid(args.grid)
    re, im, signs = signature_grid(args.xi, args.t, nx, ny, io.parse_window(args.window))
    io.write_csv(_csv_path(args, "signature.csv"), ["re", "im", "sign"], zip(re, im, signs.astype(int)),
                 header={"xi": args.xi, "t": args.t})


def cmd_scatter(args, config: RunConfig):
    datum = io.read_initial_csv(args.initial)
    data = sample_scattering(datum, config, with_spectrum=not args.no_spectrum)
    _emit_json(args, data.to_dict(), "scatter.json")


def cmd_transforms(args, config: RunConfig):
    data = ScatteringData.from_dict(io.read_json(args.scatter), config)
    transforms = build_transforms(data, args.xi, config, args.delta0)
    points = io.parse_complex_list(args.eval) if args.eval else []
    _emit_json(args, transforms.summary(points), "transforms.json")


def _load_seed(args) -> SolitonSeed:
    if args.seed:
        return SolitonSeed.from_dict(io.read_json(args.seed))
    if args.omega:
        return SolitonSeed.imaginary_pair(args.omega)
    raise DomainError("pass --seed <json> or --omega <f>")


def cmd_soliton(args, config: RunConfig):
    seed = _load_seed(args)
    x = io.parse_range(args.x)
    q = SolitonField(seed).q(x, args.t)
    io.write_field_csv(_csv_path(args, "soliton.csv"), x, q, args.t, seed.sigma, seed.q_minus)


def cmd_asym(args, config: RunConfig):
    data = ScatteringData.from_dict(io.read_json(args.scatter), config)
    pipeline = AsymptoticPipeline(data, args.xi, config, args.delta0)
    times = io.parse_range(args.t)
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        expansions = list(pool.map(pipeline.expand, times))
    rows = ((e.t, e.x, e.value.real, e.value.imag, e.envelope) for e in expansions)
    io.write_csv(_csv_path(args, "asym.csv"), ["t", "x", "re_q", "im_q", "envelope"], rows,
                 header={"xi": args.xi, "exponent": pipeline.exponent, "branch": pipeline.report.branch})


def cmd_evolve(args, config: RunConfig):
    grid, t0, sigma = io.read_field_csv(args.initial, args.sigma)
    state = CoupledState.from_field(grid, sigma)
    state.t = t0
    out = evolve(state, args.t, args.dt, config)
    io.write_field_csv(_csv_path(args, "evolve.csv"), out.x, out.u, out.t, sigma, out.q_minus)


def cmd_residual(args, config: RunConfig):
    snapshots = [io.read_field_csv(path, args.sigma) for path in args.field]
    sigma = snapshots[0][2]
    history = FieldHistory([t for _, t, _ in snapshots], [grid for grid, _, _ in snapshots])
    h = args.h or snapshots[0][0].h
    rows = history.residual_rows(h, sigma)
    io.write_csv(_csv_path(args, "residual.csv"), ["t", "x", "residual"], rows, header={"h": h})
    logger.info(f"Largest residual {max(r for _, _, r in rows):.3e} over {len(rows)} points")


def cmd_validate(args, config: RunConfig):
    report = validate(args.mode, config)
    _emit_json(args, report, f"validate_{args.mode}.json")
    return 0 if report["passed"] else 1


COMMANDS = {
    "phase": cmd_phase,
    "signature": cmd_signature,
    "scatter": cmd_scatter,
    "transforms": cmd_transforms,
    "soliton": cmd_soliton,
    "asym": cmd_asym,
    "evolve": cmd_evolve,
    "residual": cmd_residual,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="app.cli", description=settings.api_description)
    parser.add_argument("--config", default=None, help="JSON file with RunConfig fields")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for sweeps")
    parser.add_argument("--out", dest="out_dir", default=None, help="Output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase", help="Stationary points and region for a ray")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--output", default=None)

    p = sub.add_parser("signature", help="Sign table of Re(2it theta) as CSV")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--grid", default="101x101")
    p.add_argument("--window", default="-3,3,-3,3")
    p.add_argument("--output", default=None)

    p = sub.add_parser("scatter", help="Forward scattering of an initial datum")
    p.add_argument("--initial", required=True, help="CSV (x, q0) with sigma and q_minus header keys")
    p.add_argument("--no-spectrum", action="store_true", help="Skip the discrete spectrum search")
    p.add_argument("--output", default=None)

    p = sub.add_parser("transforms", help="nu, delta and T for stored scattering data")
    p.add_argument("--scatter", required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--eval", default="", help="Comma-separated complex points, e.g. 2+1j,0.5")
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("soliton", help="Reflectionless field q on an x grid")
    p.add_argument("--seed", default=None, help="Seed JSON with poles, constants, sigma and q_minus")
    p.add_argument("--omega", type=float, default=None, help="Imaginary-pair seed {i omega, -i/omega}")
    p.add_argument("--x", required=True, help="x0:x1:n")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--output", default=None)

    p = sub.add_parser("asym", help="Long-time expansion along x = xi t")
    p.add_argument("--scatter", required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--t", required=True, help="t0:t1:n")
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("evolve", help="Integrate the coupled local system")
    p.add_argument("--initial", required=True)
    p.add_argument("--sigma", type=int, choices=(-1, 1), default=None)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dt", type=float, default=None, help="Time step (default PDE_DT)")
    p.add_argument("--output", default=None)

    p = sub.add_parser("residual", help="Equation residual of tabulated snapshots")
    p.add_argument("--field", nargs="+", required=True, help="Snapshot CSVs with a t header key")
    p.add_argument("--sigma", type=int, choices=(-1, 1), default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("validate", help="Acceptance checks")
    p.add_argument("--mode", choices=[m.value for m in ValidationMode], required=True)
    p.add_argument("--output", default=None)
    return parser


def load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else settings
    overrides: Dict = {}
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out_dir is not None:
        overrides["output_dir"] = args.out_dir
    return config.with_overrides(**overrides) if overrides else config


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        args.config_obj = config
        status = COMMANDS[args.command](args, config)
    except ToolkitError as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(json.dumps(io.to_jsonable(exc.report()), indent=2), file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
