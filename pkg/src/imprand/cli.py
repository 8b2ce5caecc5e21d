"""Command-line front end.

    imprand simulate --manifest exp.toml --out results/
    imprand audit    --manifest exp.toml --fail-on-refute
    imprand scan     --manifest exp.toml --grid 20
    imprand expect   --manifest exp.toml
    imprand lawful   --manifest exp.toml

Every run is fully determined by the manifest plus the explicit overrides
(--seed, --mode, --grid); reports are byte-identical across runs.  The only
environment knob is OUTPUT_DIR, the default for --out.  Exit status: 0 done,
1 error, 2 refuted verdict under --fail-on-refute.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import audit as auditmod
from . import pathsim
from .expectation import HorizonGamble, lower_expectation_fh, upper_expectation_fh
from .lawfulness import LawAlgorithm, check_lawful_for
from .manifest import Manifest, ManifestError, parse_manifest
from .selections import bit_echo, every_step, parity
from .systems import ForecastingSystem, build_system


def _load_manifest(path: str) -> Manifest:
    return parse_manifest(Path(path).read_text())


def _system_from(manifest: Manifest) -> ForecastingSystem:
    section = dict(manifest.require("system"))
    return build_system(section)


def _path_from(manifest: Manifest, phi, seed_override=None):
    section = manifest.require("path")
    source = section.get("source", "simulate")
    if source == "file":
        fname = section["file"]
        fmt = section.get("format", "ascii01")
        bits = pathsim.ingest_bits(fname, format=fmt)
        return bits, {"source": fname, "format": fmt}
    length = section["length"]
    seed = seed_override if seed_override is not None else section.get("seed", 0)
    pol = pathsim.policy(section.get("policy", "precise-as-given"))
    bits = pathsim.sample_path(phi, pol, length, seed)
    return bits, {"source": "simulate", "seed": seed, "policy": pol.kind}


def _battery_from(manifest: Manifest, phi):
    section = manifest.sections.get("battery", {})
    preset = section.get("preset", "default")
    if preset != "default":
        raise ValueError(f"unknown battery preset {preset!r}")
    eps_grid = list(auditmod.DEFAULT_EPS_GRID)
    eps_min = section.get("eps-min")
    if eps_min is not None:
        eps_min = Fraction(eps_min) if not isinstance(eps_min, float) else eps_min
        while eps_grid[-1] > eps_min:
            eps_grid.append(eps_grid[-1] / 2)
    include_div = section.get("divergence", "on") != "off"
    return auditmod.default_battery(
        phi, eps_grid=tuple(eps_grid), include_divergence=include_div
    )


def _out_dir(args) -> Path:
    base = args.out or os.environ.get("OUTPUT_DIR") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _report_json(path_meta, mode, battery, verdict, witnesses, filter_block):
    return {
        "path_meta": path_meta,
        "mode": mode,
        "battery": battery,
        "verdict": verdict,
        "witnesses": witnesses,
        "filter": filter_block,
    }


def cmd_simulate(args) -> int:
    manifest = _load_manifest(args.manifest)
    phi = _system_from(manifest)
    bits, meta = _path_from(manifest, phi, args.seed)
    out = _out_dir(args)
    pathsim.write_bits_ascii(bits, out / "bits.txt")
    meta = {"length": len(bits), **meta, "system": phi.describe()}
    _write_json(out / "simulate.json", _report_json(meta, None, [], None, [], None))
    print(f"wrote {len(bits)} bits to {out / 'bits.txt'}")
    return 0


def _write_trajectories(path: Path, bits, battery):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "bit", "strategy", "log_capital"])
        for st in battery:
            logs = auditmod.trajectory_logs(st, bits)
            for k in range(1, len(logs)):
                writer.writerow([k, bits[k - 1], st.name, repr(float(logs[k]))])


def cmd_audit(args) -> int:
    manifest = _load_manifest(args.manifest)
    phi = _system_from(manifest)
    bits, meta = _path_from(manifest, phi, args.seed)
    battery = _battery_from(manifest, phi)
    section = manifest.sections.get("audit", {})
    mode = args.mode or section.get("mode", "bounded")
    threshold = float(section.get("threshold", auditmod.DEFAULT_THRESHOLD))
    tail = float(section.get("tail-window", 0.5))
    church = [every_step(), parity("even"), parity("odd"), bit_echo(0), bit_echo(1)]
    report = auditmod.audit(
        bits,
        phi,
        battery,
        threshold=threshold,
        mode=mode,
        tail_window=tail,
        church_selections=church,
        path_meta=meta,
    )
    out = _out_dir(args)
    payload = report.as_dict()
    _write_json(
        out / "audit.json",
        _report_json(
            payload["path_meta"],
            payload["mode"],
            payload["battery"],
            payload["verdict"],
            payload["witnesses"],
            None,
        )
        | {"church": payload["church"], "battery_version": payload["battery_version"]},
    )
    _write_trajectories(out / "trajectories.csv", bits, battery)
    print(f"verdict: {report.verdict}" + (f" (witness {report.witnesses[0]})" if report.witnesses else ""))
    if report.refuted and args.fail_on_refute:
        return 2
    return 0


def cmd_scan(args) -> int:
    manifest = _load_manifest(args.manifest)
    phi = _system_from(manifest)
    bits, meta = _path_from(manifest, phi, args.seed)
    section = manifest.sections.get("scan", {})
    grid = args.grid or int(section.get("grid", 20))
    mode = args.mode or section.get("mode", "bounded")
    threshold = float(section.get("threshold", auditmod.DEFAULT_THRESHOLD))
    tail = float(section.get("tail-window", 0.5))
    result = auditmod.filter_scan(
        bits, grid, mode=mode, threshold=threshold, tail_window=tail
    )
    out = _out_dir(args)
    meta = {"length": len(bits), **meta, "system": phi.describe()}
    _write_json(
        out / "scan.json",
        _report_json(meta, mode, [], None, [], result.as_dict()),
    )
    hull = result.hull
    print(
        f"{len(result.survivors())} of {len(result.cells)} grid intervals survive; "
        f"hull [{float(hull[0])}, {float(hull[1])}]"
    )
    refuted_any = any(c.verdict == auditmod.REFUTED for c in result.cells)
    if refuted_any and args.fail_on_refute:
        return 2
    return 0


def _exact_str(value) -> str:
    if isinstance(value, Fraction):
        return (
            str(value.numerator)
            if value.denominator == 1
            else f"{value.numerator}/{value.denominator}"
        )
    return repr(value) if isinstance(value, float) else str(value)


def cmd_expect(args) -> int:
    manifest = _load_manifest(args.manifest)
    phi = _system_from(manifest)
    section = manifest.require("expect")
    horizon = section["horizon"]
    kind = section.get("gamble", "ones-count")
    if kind == "ones-count":
        g = HorizonGamble.ones_count(horizon)
    elif kind == "prefix-indicator":
        prefix = section["prefix"]
        event = [
            prefix + tail
            for tail in _all_strings(horizon - len(prefix))
        ]
        g = HorizonGamble.indicator(horizon, event)
    else:
        raise ValueError(f"unknown gamble kind {kind!r}")
    side = section.get("side", "both")
    results = {}
    if side in ("upper", "both"):
        results["upper"] = upper_expectation_fh(phi, g)
    if side in ("lower", "both"):
        results["lower"] = lower_expectation_fh(phi, g)
    for name, value in results.items():
        print(f"{name} = {_exact_str(value)}")
    out = _out_dir(args)
    _write_json(
        out / "expect.json",
        {
            "system": phi.describe(),
            "horizon": horizon,
            "gamble": kind,
            **{k: _exact_str(v) for k, v in results.items()},
        },
    )
    return 0


def _all_strings(n: int):
    if n < 0:
        raise ValueError("prefix longer than the horizon")
    out = [""]
    for _ in range(n):
        out = [s + b for s in out for b in "01"]
    return out


def cmd_lawful(args) -> int:
    manifest = _load_manifest(args.manifest)
    phi = _system_from(manifest) if "system" in manifest.sections else None
    bits, meta = _path_from(manifest, phi, args.seed)
    section = manifest.require("lawful")
    alg = LawAlgorithm(section["n"], section["r"])
    report = check_lawful_for(bits, alg, section["m-max"])
    out = _out_dir(args)
    _write_json(
        out / "lawful.json",
        {"path_meta": {"length": len(bits), **meta}, **report.as_dict()},
    )
    if report.ok:
        print(f"lawful for {report.algorithm} at every m <= {report.m_checked}")
    else:
        f = report.failure
        print(f"condition ({f.condition}) fails at m = {f.m}: {f.detail}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "audit": cmd_audit,
    "scan": cmd_scan,
    "expect": cmd_expect,
    "lawful": cmd_lawful,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imprand",
        description="betting-strategy randomness audits against interval forecasts",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--manifest", required=True, help="experiment manifest file")
    parser.add_argument("--seed", type=int, default=None, help="override [path] seed")
    parser.add_argument("--out", default=None, help="output directory (default OUTPUT_DIR or .)")
    parser.add_argument("--fail-on-refute", action="store_true")
    parser.add_argument("--mode", choices=["bounded", "schnorr"], default=None)
    parser.add_argument("--grid", type=int, choices=list(auditmod.GRID_CHOICES), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ManifestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
