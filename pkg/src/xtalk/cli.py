"""Command-line front end.

Exit codes: 0 on success, 1 for invalid input (config, arguments, dataset),
2 for numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, defense, protocols
from .config import RunConfig, parse_grid_text
from .dynamics import victim_channel
from .errors import NumericalError, ValidationError
from .fit import fit_channel
from .io import bundled_dataset_path, complex_matrix, load_dataset, write_csv, write_json, write_matrix
from .pulse import PulseShape
from .svg import render_svg
from .tomo import channel_kraus, chi_from_choi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _timing_choices():
    return [t.value for t in protocols.ScenarioTiming]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xtalk", description="Crosstalk attack simulation, tomography and model fitting.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="strict JSON run configuration (defaults if omitted)")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        return p

    add("scan", "influence norm for every (coupling, q0 pulse shape) pair")
    add("qpt", "reconstruct the victim channel: Choi, chi and Kraus operators")
    add("fit", "fit the single-angle model to the victim channel")
    p = add("coin", "biased-coin protocol over a grid of angles")
    p.add_argument("--lambda-grid", help="start:stop:step in degrees, e.g. 0:90:5")
    p.add_argument("--timing", choices=_timing_choices())
    p = add("xor", "XOR circuit truth table with and without the attack")
    p.add_argument("--timing", choices=_timing_choices())
    p = add("sqqnn", "train the single-qubit classifier and test it under attack")
    p.add_argument("--dataset", help="CSV with header f1,f2,f3,f4,label (bundled Iris subset by default)")
    p = add("sweep", "fit results over a drive-amplitude grid")
    p.add_argument("--target", choices=[t.value for t in analysis.SweepTarget] + ["driver", "catalyst"])
    p = add("detuning", "fit results over a detuning grid applied to both pulses")
    p.add_argument("--shape", help="pulse shape, or 'all'")
    p = add("detect", "canary-circuit anomaly check")
    p.add_argument("--timing", choices=_timing_choices())
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p = add("contain", "attack impact with and without reset containment")
    p.add_argument("--protocol", choices=[p.value for p in defense.Protocol], default="coin")
    p.add_argument("--dataset", help="dataset for the sqqnn protocol")
    return parser


def _dataset(cfg: RunConfig, override: str | None):
    path = override or cfg.data["protocol"]["dataset"] or bundled_dataset_path()
    return load_dataset(path)


def _trained(cfg: RunConfig, dataset: str | None):
    x, y = _dataset(cfg, dataset)
    p = cfg.data["protocol"]
    train, test = protocols.train_test_split(len(y), p["sqqnn_train_fraction"], p["sqqnn_seed"])
    model = protocols.sqqnn_train(x[train], y[train], p["sqqnn_degree"])
    return model, x, y, train, test


def _svg(cfg: RunConfig, records, kind, path: Path, title: str, field=None):
    if cfg.data["output"]["emit_svg"] and records:
        render_svg(records, kind, path, field=field, title=title)


def cmd_scan(cfg: RunConfig, args, out: Path) -> str:
    s = cfg.data["sweep"]
    records = analysis.coupling_scan(s["scan_couplings"], s["scan_shapes"], cfg.attack_config())
    rows = [(*r.config_id.split("/"), r.influence_norm) for r in records]
    write_csv(out / "scan.csv", ["coupling", "shape", "influence_norm"], rows, cfg.data)
    _svg(cfg, records, "line", out / "scan.svg", "influence norm by rank", "influence_norm")
    top = records[0]
    return f"scan: {len(records)} rows, strongest {top.config_id} = {top.influence_norm:.6g}"


def cmd_qpt(cfg: RunConfig, args, out: Path) -> str:
    ch = victim_channel(cfg.attack_config())
    chi = chi_from_choi(ch)
    kraus = channel_kraus(ch)
    result = {
        "choi": complex_matrix(ch.choi),
        "chi": complex_matrix(chi.chi),
        "kraus": [complex_matrix(k) for k in kraus],
        "clip": ch.clip,
    }
    write_json(out / "qpt.json", result, cfg.data)
    write_matrix(out / "choi.txt", ch.choi, cfg.data)
    return f"qpt: clip magnitude {ch.clip:.3g}"


def cmd_fit(cfg: RunConfig, args, out: Path) -> str:
    res = fit_channel(channel_kraus(victim_channel(cfg.attack_config())))
    write_json(out / "fit.json", res.to_dict(), cfg.data)
    return f"fit: theta = {res.theta:.12g}, loss = {res.loss:.6g}, converged = {res.converged}"


def cmd_coin(cfg: RunConfig, args, out: Path) -> str:
    if args.lambda_grid:
        parse_grid_text(args.lambda_grid)  # validates the triple
        cfg = cfg.override("protocol.lambda_grid_deg", [float(v) for v in args.lambda_grid.split(":")])
    if args.timing:
        cfg = cfg.override("protocol.timing", args.timing)
    timing = cfg.timing()
    channel = None if timing is protocols.ScenarioTiming.NO_ATTACK else victim_channel(cfg.attack_config())
    rows, records = [], []
    for deg in cfg.lambda_grid_deg():
        lam = math.radians(deg)
        ideal = protocols.coin_flip_p1(lam)
        attacked = protocols.coin_flip_p1(lam, timing, channel)
        rows.append((deg, ideal, attacked))
        records.append(analysis.SweepRecord("coin", "lambda_deg", deg, accuracy=attacked))
    write_csv(out / "coin.csv", ["lambda_deg", "p1_ideal", "p1_attacked"], rows, cfg.data)
    _svg(cfg, records, "line", out / "coin.svg", f"P(1), {timing.value}", "accuracy")
    dev = max(abs(a - i) for _, i, a in rows)
    return f"coin: {len(rows)} angles, max deviation {dev:.6g} ({timing.value})"


def cmd_xor(cfg: RunConfig, args, out: Path) -> str:
    if args.timing:
        cfg = cfg.override("protocol.timing", args.timing)
    timing = cfg.timing()
    channel = None if timing is protocols.ScenarioTiming.NO_ATTACK else victim_channel(cfg.attack_config())
    rows = []
    for x1 in (0, 1):
        for x2 in (0, 1):
            rows.append((x1, x2, *protocols.xor_probs(x1, x2), *protocols.xor_probs(x1, x2, timing, channel)))
    header = ["x1", "x2", "p0_ideal", "p1_ideal", "p0_attacked", "p1_attacked"]
    write_csv(out / "xor.csv", header, rows, cfg.data)
    delta = protocols.xor_delta_max(timing, channel)
    return f"xor: delta_max = {delta:.6g} ({timing.value})"


def cmd_sqqnn(cfg: RunConfig, args, out: Path) -> str:
    model, x, y, train, test = _trained(cfg, args.dataset)
    channel = victim_channel(cfg.attack_config())
    result = {
        "coefficients": model.coefficients,
        "degree": model.degree,
        "n_train": len(train),
        "n_test": len(test),
        "train_accuracy": protocols.sqqnn_accuracy(model, x[train], y[train]),
    }
    for timing in protocols.ScenarioTiming:
        ch = None if timing is protocols.ScenarioTiming.NO_ATTACK else channel
        result[f"test_accuracy_{timing.value}"] = protocols.sqqnn_accuracy(model, x[test], y[test], timing, ch)
    write_json(out / "sqqnn.json", result, cfg.data)
    return "sqqnn: " + ", ".join(
        f"{t.value} {result[f'test_accuracy_{t.value}']:.3f}" for t in protocols.ScenarioTiming
    )


def _sweep_rows(records):
    return [(r.swept_name, r.swept_value, r.theta, r.loss, r.converged) for r in records]


SWEEP_HEADER = ["swept_name", "swept_value", "theta", "loss", "converged"]


def cmd_sweep(cfg: RunConfig, args, out: Path) -> str:
    if args.target:
        cfg = cfg.override("sweep.target", analysis.SweepTarget.parse(args.target).value)
    target = analysis.SweepTarget.parse(cfg.data["sweep"]["target"])
    records = analysis.amplitude_sweep(target, cfg.data["sweep"]["amplitudes"], cfg.attack_config())
    write_csv(out / f"sweep_{target.value}.csv", SWEEP_HEADER, _sweep_rows(records), cfg.data)
    _svg(cfg, records, "line", out / f"sweep_{target.value}_theta.svg", f"theta vs {target.value}", "theta")
    _svg(cfg, records, "line", out / f"sweep_{target.value}_loss.svg", f"loss vs {target.value}", "loss")
    return f"sweep: {target.value}, theta range {analysis.value_range(records):.6g}"


def cmd_detuning(cfg: RunConfig, args, out: Path) -> str:
    if args.shape and args.shape != "all":
        cfg = cfg.override("sweep.detuning_shape", PulseShape.parse(args.shape).value)
    shapes = [s.value for s in PulseShape] if args.shape == "all" else [cfg.data["sweep"]["detuning_shape"]]
    grid = cfg.detuning_grid()
    lines = []
    for shape in shapes:
        records = analysis.detuning_sweep(shape, grid, cfg.attack_config())
        write_csv(out / f"detuning_{shape}.csv", SWEEP_HEADER, _sweep_rows(records), cfg.data)
        _svg(cfg, records, "line", out / f"detuning_{shape}.svg", f"loss vs detuning ({shape})", "loss")
        lines.append((shape, float(np.var([r.theta for r in records])), float(np.var([r.loss for r in records]))))
    write_csv(out / "detuning_variance.csv", ["shape", "var_theta", "var_loss"], lines, cfg.data)
    return "detuning: " + ", ".join(f"{s} var_loss {v:.3g}" for s, _, v in lines)


def cmd_detect(cfg: RunConfig, args, out: Path) -> str:
    overrides = {"protocol.timing": args.timing, "defense.shots": args.shots, "defense.seed": args.seed}
    for key, value in overrides.items():
        if value is not None:
            cfg = cfg.override(key, value)
    timing = cfg.timing()
    d = cfg.data["defense"]
    channel = None if timing is protocols.ScenarioTiming.NO_ATTACK else victim_channel(cfg.attack_config())
    report = defense.canary_check(d["shots"], d["seed"], d["threshold"], channel, timing)
    write_json(out / "detect.json", report.to_dict(), cfg.data)
    return f"detect: p_hat = {report.p_hat:.4f}, z = {report.z_score:.3f}, flagged = {report.flagged}"


def cmd_contain(cfg: RunConfig, args, out: Path) -> str:
    channel = victim_channel(cfg.attack_config())
    grid = [math.radians(d) for d in cfg.lambda_grid_deg()]
    if args.protocol == "sqqnn":
        model, x, y, _, test = _trained(cfg, args.dataset)
        report = defense.containment_compare(channel, "sqqnn", model=model, features=x[test], labels=y[test])
    else:
        report = defense.containment_compare(channel, "coin", lambdas=grid)
    write_json(out / f"contain_{report.protocol}.json", report.to_dict(), cfg.data)
    return (
        f"contain: {report.protocol} attacker-first impact {report.attacker_first_impact:.6g}, "
        f"post-reset impact {report.post_reset_impact:.6g}"
    )


COMMANDS = {
    "scan": cmd_scan,
    "qpt": cmd_qpt,
    "fit": cmd_fit,
    "coin": cmd_coin,
    "xor": cmd_xor,
    "sqqnn": cmd_sqqnn,
    "sweep": cmd_sweep,
    "detuning": cmd_detuning,
    "detect": cmd_detect,
    "contain": cmd_contain,
}


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig.load(args.config)
        out = Path(args.out or cfg.data["output"]["directory"])
        if args.out:
            cfg = cfg.override("output.directory", str(args.out))
        print(COMMANDS[args.command](cfg, args, out))
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
