"""Exposure models for targeted attacks on onion-routing users: closed forms, exact MLE, simulations.

    targeting analytic|bridging|mle|sim-mtor|sim-capture|figures
        [--scenario PATH] [--seed N] [--trials N] [--out DIR] [--svg]
        [--workers N] [--dump-trials] [--killed-circuits K]

Exit codes: 0 success, 1 validation error, 2 resource cap, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from . import tables
from .model import (
    RNG_ALGORITHM,
    RNG_VERSION,
    AdversaryParams,
    CabalScenario,
    CaptureScenario,
    ClientGroup,
    ResourceCapError,
    ValidationError,
    load_document,
    scenario_from_dict,
)
from .sim import capture as capture_sim
from .sim import mtor as mtor_sim
from .sim.engine import DEFAULT_SEED, write_csv

log = logging.getLogger("targeting")

SUBCOMMANDS = ("analytic", "bridging", "mle", "sim-mtor", "sim-capture", "figures")
DEFAULT_TRIALS = 10_000
EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    scenario: str | None = None
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    out: str = "out"
    emit_svg: bool = False
    workers: int = 1
    dump_trials: bool = False
    killed_circuits: int = 0

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ValidationError(f"unknown subcommand {self.subcommand!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if self.killed_circuits < 0:
            raise ValidationError("killed_circuits must be >= 0")


def _section(manifest: RunManifest, name: str) -> dict:
    if not manifest.scenario:
        return {}
    doc = load_document(manifest.scenario)
    if "kind" in doc:
        return doc
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ValidationError(f"section {name!r} must be an object")
    return sec


def _out(manifest: RunManifest) -> Path:
    out = Path(manifest.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(out: Path, name: str, table) -> Path:
    cols, rows = table
    path = out / name
    write_csv(cols, rows, path)
    log.info("wrote %s (%d rows)", path, len(rows))
    return path


def _write_manifest(out: Path, manifest: RunManifest, files: list[Path]) -> None:
    doc = {**asdict(manifest), "rng_algorithm": RNG_ALGORITHM, "rng_version": RNG_VERSION,
           "files": sorted(p.name for p in files)}
    (out / f"manifest-{manifest.subcommand}.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _tuple(sec: dict, key: str, default):
    return tuple(sec.get(key, default))


def cmd_analytic(manifest: RunManifest) -> list[Path]:
    sec = _section(manifest, "analytic")
    out = _out(manifest)
    Bs = _tuple(sec, "middle_fractions", tables.FINE_B)
    files = [
        _write(out, "analytic_min_meetings.csv", tables.min_meetings_rows(
            Bs, _tuple(sec, "cabal_sizes", tables.MIN_MEETINGS_C),
            _tuple(sec, "failure_thresholds", tables.MIN_MEETINGS_T))),
        _write(out, "analytic_max_cabal.csv", tables.max_cabal_rows(
            _tuple(sec, "failure_threshold_axis", tables.FINE_T),
            _tuple(sec, "max_cabal_fractions", tables.MAX_CABAL_B),
            _tuple(sec, "max_cabal_meetings", tables.MAX_CABAL_M))),
        _write(out, "analytic_identified_fraction.csv", tables.identified_fraction_rows(
            _tuple(sec, "fraction_curves", tables.FRACTION_B),
            _tuple(sec, "meetings_axis", tables.FRACTION_M))),
        _write(out, "analytic_dedup.csv", tables.dedup_rows()),
        _write(out, "analytic_collisions.csv", tables.collision_rows()),
        _write(out, "analytic_mr_selection.csv", tables.mr_selection_rows()),
    ]
    _write_manifest(out, manifest, files)
    return files


def cmd_bridging(manifest: RunManifest) -> list[Path]:
    sec = _section(manifest, "bridging")
    out = _out(manifest)
    killed = int(sec.get("killed_circuits", manifest.killed_circuits))
    guards = _tuple(sec, "guards_per_client", tables.BRIDGE_GUARDS)
    pbs = _tuple(sec, "bridge_probs", tables.BRIDGE_PB)
    files = [
        _write(out, "bridging_vs_B.csv", tables.bridging_vs_b_rows(
            guards, pbs, _tuple(sec, "meetings_curves", tables.BRIDGE_M_CURVES),
            _tuple(sec, "fraction_axis", tables.BRIDGE_B_AXIS), killed)),
        _write(out, "bridging_vs_m.csv", tables.bridging_vs_m_rows(
            guards, pbs, _tuple(sec, "fraction_curves", tables.BRIDGE_B_CURVES),
            _tuple(sec, "meetings_axis", tables.BRIDGE_M_AXIS), killed)),
    ]
    _write_manifest(out, manifest, files)
    return files


def cmd_mle(manifest: RunManifest) -> list[Path]:
    sec = _section(manifest, "mle")
    out = _out(manifest)
    dist, err = tables.mle_rows(
        _tuple(sec, "middle_fractions", tables.MLE_B),
        _tuple(sec, "meetings", tables.MLE_M),
        _tuple(sec, "true_sizes", tables.MLE_C),
        int(sec.get("max_theta", 100)),
        sec.get("state_cap"),
    )
    files = [_write(out, "mle_distribution.csv", dist), _write(out, "mle_error.csv", err)]
    _write_manifest(out, manifest, files)
    return files


def _scenario_fields(sec: dict) -> dict:
    skip = {"sweep", "adversary"}
    return {k: v for k, v in sec.items() if k not in skip}


def cmd_sim_mtor(manifest: RunManifest) -> list[Path]:
    sec = _section(manifest, "sim-mtor")
    out = _out(manifest)
    fields = _scenario_fields(sec)
    if fields:
        scenario = scenario_from_dict({"kind": "cabal", **fields})
        if not isinstance(scenario, CabalScenario):
            raise ValidationError("sim-mtor needs a cabal scenario")
    else:
        scenario = CabalScenario(cabal_size=25, meetings=100)
    grid = [mtor_sim.MtorPoint(*p) for p in sec.get("sweep", [])] or mtor_sim.default_mtor_grid()
    res = mtor_sim.run_mtor_sweep(scenario, grid, manifest.trials, manifest.seed, manifest.workers)
    path = out / "sim_mtor.csv"
    res.to_csv(path)
    files = [path]
    if manifest.emit_svg:
        from . import plots

        svg = out / "sim_mtor.svg"
        plots.mtor_lines(res.rows, svg)
        files.append(svg)
    _write_manifest(out, manifest, files)
    return files


def capture_grid_from_section(sec: dict) -> list[capture_sim.CapturePoint]:
    fields = _scenario_fields(sec)
    base = scenario_from_dict({"kind": "capture", **fields}) if fields else CaptureScenario()
    if not isinstance(base, CaptureScenario):
        raise ValidationError("sim-capture needs a capture scenario")
    B = float(sec.get("adversary", {}).get("middle_fraction", capture_sim.DEFAULT_B))
    sweep = sec.get("sweep")
    if sweep is None:
        return capture_sim.default_capture_grid(base, B)
    adv = AdversaryParams(B)
    pts = [capture_sim.CapturePoint("default", base, adv)]
    for b in sweep.get("middle_fraction", []):
        pts.append(capture_sim.CapturePoint("middle_fraction", base, AdversaryParams(b)))
    for t in sweep.get("threshold", []):
        pts.append(capture_sim.CapturePoint("threshold", replace(base, threshold=t), adv))
    for mix in sweep.get("client_mix", []):
        groups = tuple(ClientGroup(*g) for g in mix)
        pts.append(capture_sim.CapturePoint("client_mix", replace(base, client_groups=groups), adv))
    for k in sweep.get("guards_per_client", []):
        pts.append(capture_sim.CapturePoint("guards_per_client", replace(base, guards_per_client=k), adv))
    return pts


def cmd_sim_capture(manifest: RunManifest) -> list[Path]:
    sec = _section(manifest, "sim-capture")
    out = _out(manifest)
    grid = capture_grid_from_section(sec)
    res = capture_sim.run_capture_sweep(grid, manifest.trials, manifest.seed, manifest.workers)
    path = out / "sim_capture.csv"
    res.to_csv(path)
    files = [path]
    if manifest.dump_trials:
        rows = [r for _, (p, rec) in sorted(res.samples.items())
                for r in capture_sim.trial_rows(p, rec)]
        files.append(_write(out, "sim_capture_trials.csv", (capture_sim.TRIAL_COLUMNS, rows)))
    if manifest.emit_svg:
        from . import plots

        svg = out / "sim_capture.svg"
        samples = [
            (p.panel, f"{p.adversary.middle_fraction:g}/{p.scenario.threshold}/"
                      f"{capture_sim.mix_label(p.scenario)}/{p.scenario.guards_per_client}",
             rec["estimate"])
            for _, (p, rec) in sorted(res.samples.items())
        ]
        plots.capture_violins(samples, svg, target=grid[0].scenario.target_size)
        files.append(svg)
    _write_manifest(out, manifest, files)
    return files


def cmd_figures(manifest: RunManifest) -> list[Path]:
    files = []
    for name, fn in (("analytic", cmd_analytic), ("bridging", cmd_bridging), ("mle", cmd_mle),
                     ("sim-mtor", cmd_sim_mtor), ("sim-capture", cmd_sim_capture)):
        files += fn(replace(manifest, subcommand=name))
    return files


COMMANDS = {
    "analytic": cmd_analytic,
    "bridging": cmd_bridging,
    "mle": cmd_mle,
    "sim-mtor": cmd_sim_mtor,
    "sim-capture": cmd_sim_capture,
    "figures": cmd_figures,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as a resource-cap failure
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="targeting", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--scenario", metavar="PATH", help="JSON scenario/config file")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"default {DEFAULT_SEED}")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--out", default="out", metavar="DIR")
    p.add_argument("--svg", action="store_true", help="also render SVG charts for simulations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump-trials", action="store_true", help="write per-trial capture samples")
    p.add_argument("--killed-circuits", type=int, default=0,
                   help="shift bridging curves by K extra observed circuits")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        manifest = RunManifest(
            subcommand=args.subcommand, scenario=args.scenario, seed=args.seed,
            trials=args.trials, out=args.out, emit_svg=args.svg, workers=args.workers,
            dump_trials=args.dump_trials, killed_circuits=args.killed_circuits,
        )
        COMMANDS[manifest.subcommand](manifest)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except json.JSONDecodeError as exc:
        print(f"validation error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
