"""Command-line front end.

Subcommands: regime, scatter, sweep, simulate, images. Exit status is 0 on
success, 2 for invalid input, 3 for numerical failure and 4 for I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .core import BeamEnergy, PhysicalSetup, Regime, classify_regime, effective_momenta
from .errors import (
    EmptySweep,
    InvalidConfig,
    InvalidInput,
    KleinError,
    NoPropagatingBeam,
    NumericalBlowup,
    PacketNeverSeparated,
    PacketTooClose,
)
from .images import ImageProblem, boundary_residual, plane_potential_grid, potential_charge_above_plane
from .lattice import LatticeConfig, PacketSpec, run_scattering_experiment, write_snapshot
from .planewave import reflection_transmission, solve_left_incident, solve_right_incident
from .resolution import T_G_LABEL, resolve

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

CSV_COLUMNS = (
    "energy", "regime", "k1", "re_k2", "im_k2",
    "re_A", "im_A", "re_B", "im_B", "re_C", "im_C", "re_D", "im_D",
    "R", "T", "R_w", "T_w", "R_G", "T_G", "error",
    # appended after the fixed schema
    "mass", "potential", "virtual",
)

METADATA = {
    "units": "natural (hbar = c = 1)",
    "virtual": "C, D, R_w, T_w belong to the virtual right-incident beam; not observable",
    "T_G": f"{T_G_LABEL}: T_u + R_w, not part of the original virtual-beam construction",
}

# relative to max(1, |R|): below that the identities are not representable in doubles
VALIDATION_TOL = 1e-12


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def regime_rule(setup: PhysicalSetup, energy: float, regime: Regime) -> str:
    m, v, e = setup.mass, setup.barrier_height, energy
    if regime is Regime.NO_INCIDENT:
        return f"NoIncident: E <= m (E={e!r}, m={m!r})"
    if regime is Regime.DEGENERATE_BOUNDARY:
        if e == m:
            return f"DegenerateBoundary: E == m (E={e!r})"
        if abs(v - e) == m:
            return f"DegenerateBoundary: |V - E| == m (V={v!r}, E={e!r}, m={m!r})"
        return f"DegenerateBoundary: k1 == k2 (V={v!r}, E={e!r}; requires V != 0 and V != 2E)"
    return ""


def build_record(setup: PhysicalSetup, energy: float) -> dict:
    """One RunRecord as an ordered dict keyed by CSV_COLUMNS; absent values are None."""
    rec = dict.fromkeys(CSV_COLUMNS)
    beam = BeamEnergy(energy)
    regime = classify_regime(setup, beam)
    rec.update(energy=beam.energy, regime=regime.value, mass=setup.mass, potential=setup.barrier_height)
    if beam.energy > setup.mass:
        mom = effective_momenta(setup, beam)
        rec.update(k1=mom.k1, re_k2=mom.k2.real, im_k2=mom.k2.imag)
    if regime in (Regime.NO_INCIDENT, Regime.DEGENERATE_BOUNDARY):
        rec["error"] = regime_rule(setup, beam.energy, regime)
        return rec

    left = solve_left_incident(setup, beam)
    coeff = reflection_transmission(left)
    rec.update(
        re_A=left.reflected_amp.real, im_A=left.reflected_amp.imag,
        re_B=left.transmitted_amp.real, im_B=left.transmitted_amp.imag,
        R=coeff.R, T=coeff.T,
    )
    if regime is Regime.KLEIN_ZONE:
        right = solve_right_incident(setup, beam)
        glob = resolve(setup, beam)
        rec.update(
            re_C=right.reflected_amp.real, im_C=right.reflected_amp.imag,
            re_D=right.transmitted_amp.real, im_D=right.transmitted_amp.imag,
            R_w=glob.R_w, T_w=glob.T_w, R_G=glob.R_G, T_G=glob.T_G,
            virtual=True,
        )
    rec["error"] = validate_record(rec)
    return rec


def validate_record(rec: dict) -> str | None:
    problems = []
    scale = max(1.0, abs(rec["R"])) if rec["R"] is not None else 1.0
    checks = [("R+T", rec["R"], rec["T"]), ("R_w+T_w", rec["R_w"], rec["T_w"])]
    for name, a, b in checks:
        if a is not None and b is not None and abs(a + b - 1.0) > VALIDATION_TOL * scale:
            problems.append(f"{name}={a + b!r}")
    for name in ("R_G", "T_G"):
        if rec[name] is not None and abs(rec[name] - 1.0) > VALIDATION_TOL * scale:
            problems.append(f"{name}={rec[name]!r}")
    return ("validation failed: " + ", ".join(problems)) if problems else None


def records_to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([fmt(rec[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def records_to_json(records: list[dict]) -> str:
    return json.dumps({"metadata": METADATA, "records": records}, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _render(records: list[dict], form: str) -> str:
    return records_to_json(records) if form == "json" else records_to_csv(records)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise CliError(f"missing required option(s): {flags}", EXIT_INVALID)


def _setup(args) -> PhysicalSetup:
    return PhysicalSetup(args.mass, args.potential)


# -- commands -----------------------------------------------------------------


def cmd_regime(args) -> int:
    _need(args, "mass", "potential", "energy")
    setup = _setup(args)
    regime = classify_regime(setup, BeamEnergy(args.energy))
    print(regime.value)
    rule = regime_rule(setup, args.energy, regime)
    if rule:
        print(rule)
    return EXIT_OK


def cmd_scatter(args) -> int:
    _need(args, "mass", "potential", "energy")
    setup = _setup(args)
    rec = build_record(setup, args.energy)
    if rec["regime"] in (Regime.NO_INCIDENT.value, Regime.DEGENERATE_BOUNDARY.value):
        raise CliError(rec["error"], EXIT_INVALID)
    print(f"regime      {rec['regime']}")
    print(f"k1, k2      {fmt(rec['k1'])}, {fmt(complex(rec['re_k2'], rec['im_k2']))}")
    print(f"A, B        {fmt(complex(rec['re_A'], rec['im_A']))}, {fmt(complex(rec['re_B'], rec['im_B']))}")
    print(f"R, T        {fmt(rec['R'])}, {fmt(rec['T'])}")
    if rec["R_G"] is not None:
        print(f"C, D        {fmt(complex(rec['re_C'], rec['im_C']))}, {fmt(complex(rec['re_D'], rec['im_D']))}  (virtual)")
        print(f"R_w, T_w    {fmt(rec['R_w'])}, {fmt(rec['T_w'])}  (virtual)")
        print(f"R_G         {fmt(rec['R_G'])}")
        print(f"T_G         {fmt(rec['T_G'])}  ({T_G_LABEL})")
    if rec["error"]:
        print(f"error       {rec['error']}")
    if args.out:
        _write(args.out, _render([rec], args.format))
    return EXIT_OK


def cmd_sweep(args) -> int:
    _need(args, "mass", "potential", "energy_min", "energy_max", "samples")
    setup = _setup(args)
    lo, hi, n = args.energy_min, args.energy_max, args.samples
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise CliError(f"need finite energy_min < energy_max, got {lo!r}, {hi!r}", EXIT_INVALID)
    if n < 1:
        raise CliError(f"samples must be >= 1, got {n!r}", EXIT_INVALID)
    energies = np.linspace(lo, hi, n)
    records = [build_record(setup, float(e)) for e in energies]
    usable = [r for r in records if r["regime"] not in (Regime.NO_INCIDENT.value, Regime.DEGENERATE_BOUNDARY.value)]
    if not usable:
        warnings.warn("every sweep sample is NoIncident or DegenerateBoundary", EmptySweep, stacklevel=1)
        print("warning: empty sweep, writing header only", file=sys.stderr)
        records = []
    _write(args.out, _render(records, args.format))
    return EXIT_OK


def cmd_simulate(args) -> int:
    _need(args, "mass", "potential", "energy")
    setup = _setup(args)
    try:
        config = LatticeConfig(
            domain_half_width=args.half_width,
            num_points=args.grid_points,
            time_step_factor=args.time_step_factor,
            total_time=args.total_time,
            stencil_order=args.stencil_order,
        )
    except InvalidConfig as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    spec = PacketSpec(carrier_energy=args.energy, center=args.center, width=args.sigma)
    if args.snapshot_every is not None and args.snapshot_every < 1:
        raise CliError(f"--snapshot-every must be >= 1, got {args.snapshot_every!r}", EXIT_INVALID)

    snap_dir = Path(args.snapshot_dir)
    params = {"energy": args.energy, "sigma": args.sigma, "center": args.center}

    def on_snapshot(state):
        try:
            snap_dir.mkdir(parents=True, exist_ok=True)
            write_snapshot(snap_dir / f"snapshot_{state.steps:07d}.txt", state, setup, params)
        except OSError as exc:
            raise CliError(f"cannot write snapshot: {exc}", EXIT_IO) from exc

    result = run_scattering_experiment(
        config, setup, spec,
        snapshot_every=args.snapshot_every,
        on_snapshot=on_snapshot if args.snapshot_every else None,
    )
    beam = BeamEnergy(args.energy)
    regime = classify_regime(setup, beam)
    analytic = None
    if regime in (Regime.KLEIN_ZONE, Regime.TRANSMITTING, Regime.EVANESCENT):
        analytic = reflection_transmission(solve_left_incident(setup, beam))
    print(f"regime        {regime.value}")
    print(f"R_num         {fmt(result.R_num)}")
    print(f"T_num         {fmt(result.T_num)}")
    print(f"charge_drift  {fmt(result.charge_drift)}")
    print(f"final_time    {fmt(result.final_time)}  ({result.steps} steps)")
    if analytic is not None:
        print(f"R analytic    {fmt(analytic.R)}  (rel. dev. {fmt((result.R_num - analytic.R) / analytic.R)})")
        print(f"T analytic    {fmt(analytic.T)}")
    if args.out:
        row = {
            "energy": args.energy, "regime": regime.value,
            "R_num": result.R_num, "T_num": result.T_num, "charge_drift": result.charge_drift,
            "final_time": result.final_time, "steps": result.steps,
            "R_analytic": analytic.R if analytic else None, "T_analytic": analytic.T if analytic else None,
        }
        if args.format == "json":
            text = json.dumps(row, indent=2) + "\n"
        else:
            text = ",".join(row) + "\n" + ",".join(fmt(v) for v in row.values()) + "\n"
        _write(args.out, text)
    return EXIT_OK


def cmd_images(args) -> int:
    if args.grid < 1:
        raise CliError(f"--grid must be >= 1, got {args.grid!r}", EXIT_INVALID)
    if not (math.isfinite(args.extent) and args.extent > 0):
        raise CliError(f"--extent must be > 0, got {args.extent!r}", EXIT_INVALID)
    try:
        problem = ImageProblem(args.charge, args.height)
    except InvalidInput as exc:
        raise CliError(f"invalid geometry: {exc}", EXIT_INVALID) from exc
    d = problem.height
    res = boundary_residual(problem, args.extent, args.grid)
    print(f"boundary_residual  {fmt(res)}  (max |V| on z=0, {args.grid}x{args.grid} grid, extent {fmt(args.extent)})")
    for point in ((0.0, 0.0, 2.0 * d), (d, 0.0, d), (0.0, 0.0, 0.5 * d)):
        print(f"V{point}  {fmt(potential_charge_above_plane(problem, point))}")
    if args.out:
        gx, gy, v = plane_potential_grid(problem, args.extent, args.grid)
        lines = ["x,y,V"] + [f"{fmt(a)},{fmt(b)},{fmt(c)}" for a, b, c in zip(gx.ravel(), gy.ravel(), v.ravel())]
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# -- parsing ------------------------------------------------------------------


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; keys are CLI flag names with or without dashes."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}", EXIT_INVALID)
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kleinparadox", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--out", help="output path (default: stdout for tables)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    physics = argparse.ArgumentParser(add_help=False)
    physics.add_argument("--mass", type=float)
    physics.add_argument("--potential", type=float)

    p = sub.add_parser("regime", parents=[common, physics], help="classify (m, V, E)")
    p.add_argument("--energy", type=float)
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("scatter", parents=[common, physics], help="single-energy plane-wave analysis")
    p.add_argument("--energy", type=float)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("sweep", parents=[common, physics], help="energy sweep written as a table")
    p.add_argument("--energy-min", type=float)
    p.add_argument("--energy-max", type=float)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common, physics], help="time-domain wavepacket run")
    p.add_argument("--energy", type=float)
    p.add_argument("--grid-points", type=int, default=8001)
    p.add_argument("--half-width", type=float, default=400.0)
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--center", type=float, default=-100.0)
    p.add_argument("--total-time", type=float, default=400.0)
    p.add_argument("--time-step-factor", type=float, default=0.25)
    p.add_argument("--stencil-order", type=int, choices=(2, 4), default=4)
    p.add_argument("--snapshot-every", type=int, help="write a field snapshot every N steps")
    p.add_argument("--snapshot-dir", default="snapshots")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("images", parents=[common], help="grounded-plane image-charge verifier")
    p.add_argument("--charge", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--extent", type=float, default=10.0)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_images)
    parser.set_defaults(_commands=sub.choices)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        sub = args._commands[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known - {"config"})
        if unknown:
            raise CliError(f"unknown key(s) in {args.config}: {', '.join(unknown)}", EXIT_INVALID)
        values.pop("config", None)
        # string defaults go through each option's type conversion on re-parse
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NumericalBlowup, PacketNeverSeparated) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInput, InvalidConfig, PacketTooClose, NoPropagatingBeam) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KleinError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
