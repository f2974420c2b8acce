"""Command-line surface: reproducible runs driven by JSON configs.

Commands::

    lobeq shape     --config cfg.json --out DIR
    lobeq spread    --config cfg.json --out DIR
    lobeq simulate  --config cfg.json --out DIR [--seed N]
    lobeq signature --config cfg.json --out DIR
    lobeq sweep     --config cfg.json --out DIR

Flags only select the command, config path, output directory and an
optional seed override; everything else lives in the config document so a
run can be reproduced from its manifest alone.  Every command writes
``manifest.json`` echoing the fully resolved config.  Numeric CSV output
is rendered with 17 significant digits so values round-trip exactly.

``LOB_LOG_LEVEL`` in {error, info, debug} controls verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .equilibrium import (
    JumpSource,
    ModelParams,
    MultiSourceParams,
    SolverError,
    UnfillableLevelError,
    ZeroSpreadRegime,
    book_curves,
    shape_continuous,
    shape_multi,
    shape_tick,
    shape_toxic,
    spread_continuous,
    spread_tick,
    spread_toxic,
    theta_bar,
)
from .laws import jump_law_from_config, volume_law_from_config
from .mbo import MboParseError, MboReplayError, parse as parse_mbo, reconstruct, write_csv
from .signature import (
    ClusterSpec,
    QuoteSeries,
    build_trade_records,
    classify,
    signature_curves,
)
from .simulator import SimConfig, export_mbo, run as run_sim

log = logging.getLogger("lobeq")

RESIDUAL_GATE = 1e-9


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.17g}"
    return str(value)


def _require(cfg: dict, key: str, context: str) -> object:
    if key not in cfg:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return cfg[key]


def params_from_config(cfg: dict) -> ModelParams:
    known = {"r", "f", "jump", "volume", "lambda_i", "lambda_u",
             "theta", "rho", "tick", "offset_d"}
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"params: unknown keys {sorted(extra)}")
    try:
        return ModelParams(
            r=cfg.get("r"),
            f=float(_require(cfg, "f", "params")),
            jump=jump_law_from_config(_require(cfg, "jump", "params")),
            volume=volume_law_from_config(_require(cfg, "volume", "params")),
            lambda_i=cfg.get("lambda_i"),
            lambda_u=cfg.get("lambda_u"),
            theta=float(cfg.get("theta", 0.0)),
            rho=float(cfg.get("rho", 0.0)),
            tick=float(cfg.get("tick", 0.0)),
            offset_d=float(cfg.get("offset_d", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None


def multi_from_config(cfg: dict) -> MultiSourceParams:
    sources = _require(cfg, "sources", "multi")
    volume = volume_law_from_config(_require(cfg, "volume", "multi"))
    try:
        specs = tuple(
            JumpSource(r=float(_require(s, "r", "multi source")),
                       f=float(_require(s, "f", "multi source")),
                       jump=jump_law_from_config(_require(s, "jump", "multi source")))
            for s in sources
        )
        return MultiSourceParams(sources=specs, volume=volume)
    except ValueError as exc:
        raise ConfigError(f"multi: {exc}") from None


def _grid_from_config(cfg: dict, context: str) -> np.ndarray:
    if "x_grid" in cfg:
        grid = np.asarray([float(x) for x in cfg["x_grid"]], dtype=float)
    else:
        lo = float(_require(cfg, "x_min", context))
        hi = float(_require(cfg, "x_max", context))
        n = int(_require(cfg, "n_points", context))
        if not (0.0 < lo < hi and n >= 2):
            raise ConfigError(f"{context}: need 0 < x_min < x_max and n_points >= 2")
        grid = np.linspace(lo, hi, n)
    if np.any(grid <= 0.0):
        raise ConfigError(f"{context}: grid distances must be positive")
    return grid


def _write_manifest(out: Path, command: str, cfg: dict, seed, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "package_version": __version__,
        "seed": seed,
        "config": cfg,
        "outputs": outputs,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv_rows(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_shape(cfg: dict, out: Path, seed) -> list[str]:
    shape_cfg = _require(cfg, "shape", "config")
    variant = _require(shape_cfg, "variant", "shape")

    if variant == "multi":
        mp = multi_from_config(_require(cfg, "multi", "config"))
        grid = _grid_from_config(shape_cfg, "shape")
        book = shape_multi(mp, grid)
    else:
        params = params_from_config(_require(cfg, "params", "config"))
        if variant == "tick":
            book = shape_tick(params, int(_require(shape_cfg, "n_levels", "shape")))
        elif variant == "continuous":
            book = shape_continuous(params, _grid_from_config(shape_cfg, "shape"))
        elif variant == "toxic":
            book = shape_toxic(params, _grid_from_config(shape_cfg, "shape"))
        else:
            raise ConfigError(f"shape: unknown variant {variant!r}")

    header = ["x", "informed", "noise", "effective"]
    columns = [book.grid, book.informed, book.noise, book.effective]
    if book.per_level is not None:
        header.append("per_level")
        columns.append(book.per_level)
    if book.source_books is not None:
        for k, src in enumerate(book.source_books):
            header.append(f"source_{k}")
            columns.append(src)
    rows = [[float(col[i]) for col in columns] for i in range(len(book.grid))]
    _write_csv_rows(out / "shape.csv", header, rows)

    doc = {name: [float(v) for v in col] for name, col in zip(header, columns)}
    doc["tick"] = book.tick
    doc["offset_d"] = book.offset_d
    with open(out / "shape.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return ["shape.csv", "shape.json"]


def _solve_spread(params: ModelParams):
    if params.theta > 0.0 and params.tick > 0.0:
        raise ConfigError("spread: set either theta > 0 or tick > 0, not both")
    if params.theta > 0.0:
        return spread_toxic(params)
    if params.tick > 0.0:
        return spread_tick(params)
    return spread_continuous(params)


def _check_residual(sol) -> None:
    if not sol.residual <= RESIDUAL_GATE:
        raise SolverError(f"spread residual {sol.residual} exceeds {RESIDUAL_GATE}")


def cmd_spread(cfg: dict, out: Path, seed) -> list[str]:
    params = params_from_config(_require(cfg, "params", "config"))
    sol = _solve_spread(params)
    _check_residual(sol)
    doc = {
        "phi": sol.phi,
        "mu": sol.mu,
        "phi_theta": sol.phi_theta,
        "k_d": sol.k_d,
        "spread_tick": sol.spread_tick,
        "solver_iters": sol.solver_iters,
        "residual": sol.residual,
        "theta_bar": theta_bar(params),
    }
    with open(out / "spread.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return ["spread.json"]


def cmd_simulate(cfg: dict, out: Path, seed) -> list[str]:
    params = params_from_config(_require(cfg, "params", "config"))
    sim_cfg = _require(cfg, "simulate", "config")
    known = {"n_events", "seed", "n_levels", "record_log", "volume_scale", "p0"}
    extra = set(sim_cfg) - known
    if extra:
        raise ConfigError(f"simulate: unknown keys {sorted(extra)}")
    use_seed = seed if seed is not None else sim_cfg.get("seed")
    if use_seed is None:
        raise ConfigError("simulate: a seed is required (config or --seed)")
    try:
        sc = SimConfig(
            params=params,
            n_events=int(_require(sim_cfg, "n_events", "simulate")),
            seed=int(use_seed),
            record_log=bool(sim_cfg.get("record_log", False)),
            n_levels=int(sim_cfg.get("n_levels", 10)),
            volume_scale=int(sim_cfg.get("volume_scale", 1_000_000)),
            p0=float(sim_cfg.get("p0", 100.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"simulate: {exc}") from None
    result = run_sim(sc)

    rows = [
        [p.maker, p.level, p.n_fills, p.mean_gain, p.std_err]
        for p in result.pnl
    ]
    _write_csv_rows(out / "pnl.csv", ["maker_type", "level", "n_fills", "mean_gain", "std_err"], rows)
    with open(out / "summary.json", "w") as fh:
        json.dump(result.summary, fh, indent=2)
        fh.write("\n")
    outputs = ["pnl.csv", "summary.json"]
    if sc.record_log:
        write_csv(export_mbo(result), out / "mbo.csv")
        outputs.append("mbo.csv")
    return outputs


def cmd_signature(cfg: dict, out: Path, seed) -> list[str]:
    sig_cfg = _require(cfg, "signature", "config")
    input_path = _require(sig_cfg, "input", "signature")
    tick = sig_cfg.get("tick")
    reference = sig_cfg.get("reference", "micro")
    horizons_s = _require(sig_cfg, "horizons_s", "signature")
    horizons_ns = [int(round(float(h) * 1e9)) for h in horizons_s]

    events = parse_mbo(input_path, tick=float(tick) if tick else None)
    if not any(ev.action == "execute" for ev in events):
        raise ConfigError(f"signature: log {input_path} contains no executions")
    replay = reconstruct(events)
    quotes = QuoteSeries.from_replay(replay)
    aggressive, passive = build_trade_records(replay)

    outputs = []
    for i, spec_cfg in enumerate(_require(sig_cfg, "clusters", "signature")):
        try:
            spec = ClusterSpec(
                metric=_require(spec_cfg, "metric", "cluster"),
                thresholds=tuple(_require(spec_cfg, "thresholds", "cluster")),
                side=_require(spec_cfg, "side", "cluster"),
            )
        except ValueError as exc:
            raise ConfigError(f"signature cluster {i}: {exc}") from None
        records = aggressive if spec.side == "aggressive" else passive
        eps = 1 if spec.side == "aggressive" else -1
        labels = classify(records, spec)
        curve = signature_curves(records, labels, horizons_ns, eps, reference, quotes)
        rows = []
        for cid in curve.cluster_ids:
            for k, value in zip(curve.horizons_ns, curve.values[cid]):
                rows.append([k / 1e9, cid, value, curve.counts[cid]])
        name = f"signature_{i}_{spec.metric}.csv"
        _write_csv_rows(out / name, ["horizon", "cluster_id", "st_value", "n_trades"], rows)
        outputs.append(name)
    return outputs


def _sweep_cell(jump_cfg, volume_cfg, tick, offset_d, rho, probe_x, r, f, theta):
    params = ModelParams(
        r=r, f=f,
        jump=jump_law_from_config(jump_cfg),
        volume=volume_law_from_config(volume_cfg),
        theta=theta, rho=rho, tick=tick, offset_d=offset_d,
    )
    row = [r, f, theta]
    try:
        sol = spread_toxic(params) if theta > 0.0 else (
            spread_tick(params) if tick > 0.0 else spread_continuous(params))
        _check_residual(sol)
        row += [sol.phi, sol.mu, sol.phi_theta, sol.k_d, sol.spread_tick]
    except ZeroSpreadRegime:
        row += [0.0, None, None, None, None]
    informed, _noise = book_curves(params, np.asarray(probe_x, dtype=float))
    row += [float(v) for v in informed]
    return row


def cmd_sweep(cfg: dict, out: Path, seed) -> list[str]:
    sweep_cfg = _require(cfg, "sweep", "config")
    r_values = [float(v) for v in _require(sweep_cfg, "r_values", "sweep")]
    f_values = [float(v) for v in _require(sweep_cfg, "f_values", "sweep")]
    theta_values = [float(v) for v in sweep_cfg.get("theta_values", [0.0])]
    probe_x = [float(v) for v in sweep_cfg.get("probe_x", [])]
    jump_cfg = _require(sweep_cfg, "jump", "sweep")
    volume_cfg = _require(sweep_cfg, "volume", "sweep")
    tick = float(sweep_cfg.get("tick", 0.0))
    offset_d = float(sweep_cfg.get("offset_d", 0.0))
    rho = float(sweep_cfg.get("rho", 0.0))
    workers = int(sweep_cfg.get("workers", os.cpu_count() or 1))

    cells = [(r, f, theta)
             for r in r_values for f in f_values for theta in theta_values]
    log.info("sweep over %d cells", len(cells))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(
            lambda cell: _sweep_cell(jump_cfg, volume_cfg, tick, offset_d, rho,
                                     probe_x, *cell),
            cells,
        ))
    header = ["r", "f", "theta", "phi", "mu", "phi_theta", "k_d", "spread_tick"]
    header += [f"L_at_{_fmt(x)}" for x in probe_x]
    _write_csv_rows(out / "sweep.csv", header, rows)
    return ["sweep.csv"]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

COMMANDS = {
    "shape": cmd_shape,
    "spread": cmd_spread,
    "simulate": cmd_simulate,
    "signature": cmd_signature,
    "sweep": cmd_sweep,
}


def _setup_logging() -> None:
    level = os.environ.get("LOB_LOG_LEVEL", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise ConfigError(f"LOB_LOG_LEVEL must be one of {sorted(levels)}, got {level!r}")
    logging.basicConfig(level=levels[level], format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lobeq",
        description="Equilibrium order-book shapes, spreads, simulation and signatures",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    args = parser.parse_args(argv)

    try:
        _setup_logging()
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a JSON object")
        out_dir = args.out or cfg.get("out")
        if not out_dir:
            raise ConfigError("an output directory is required (--out or config 'out')")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        seed = args.seed if args.seed is not None else cfg.get("seed")

        resolved = dict(cfg)
        if seed is not None:
            resolved["seed"] = seed
        outputs = COMMANDS[args.command](resolved, out, seed)
        _write_manifest(out, args.command, resolved, seed, outputs)
        log.info("wrote %s", ", ".join(outputs + ["manifest.json"]))
        return 0
    except (ConfigError, ZeroSpreadRegime, SolverError, UnfillableLevelError,
            MboParseError, MboReplayError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"lobeq {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
