"""Command-line interface: train, static-map, run, compare.

Exit codes: 0 success, 2 configuration or usage error, 3 output conflict
(file exists and --force not given), 4 numerical divergence (partial CSV is
still written to --out and flagged on stderr).
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import Config, ConfigError, load as load_config
from .experiments import (
    compute_metrics,
    convexity_score,
    format_metrics,
    load_static_map,
    map_minimum,
    run_closed_loop,
    save_metrics_csv,
    save_runlog,
    save_static_map,
    static_map,
    train,
)
from .lifting import KoopmanFitError, load_model, save_model
from .plant import SimulationDivergence


class OutputConflict(Exception):
    def __init__(self, path):
        super().__init__(f"output file {path} exists; pass --force to overwrite")
        self.path = path


def _fail(message, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_cfg(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    if getattr(args, "seed", None) is not None:
        cfg.set("seed", args.seed)
    return cfg


def _prepare_out(path: str, force: bool) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    if os.path.exists(path) and not force:
        raise OutputConflict(path)


def _default_out(cfg: Config, name: str) -> str:
    return os.path.join(cfg["out_dir"], name)


def _require_model(args, mode: str):
    if mode == "lifted":
        if not args.model:
            raise ConfigError("lifted mode requires --model")
        return load_model(args.model)
    return None


def _print_mode_table(model) -> None:
    selected = set(model.dominant_indices)
    print(f"{'idx':>4} {'re(lambda)':>18} {'im(lambda)':>18} "
          f"{'|lambda|':>12} {'energy':>14} selected")
    for j in range(model.p):
        lam = model.eigenvalues[j]
        mark = "yes" if j in selected else "no"
        print(f"{j:>4} {lam.real:>18.10e} {lam.imag:>18.10e} "
              f"{abs(lam):>12.6f} {model.energies[j]:>14.6e} {mark}")


def _resolve_r_star(cfg: Config, plant, interf, model, mode, map_path):
    window = cfg["metrics.smoothing_window"]
    if map_path:
        theta, r = load_static_map(map_path)
    else:
        print(f"no --map given; sweeping the {mode} static map for r_star "
              "(takes a while)", file=sys.stderr)
        theta, r = _sweep(cfg, plant, interf, model, mode)
    return map_minimum(theta, r, window)[1]


def _sweep(cfg: Config, plant, interf, model, mode):
    return static_map(
        plant, interf, model, mode,
        theta_from=cfg["map.theta_from"],
        theta_to=cfg["map.theta_to"],
        sweep_duration=cfg["map.sweep_duration"],
        log_start=cfg["map.log_start"],
        x0=cfg["run.x0"],
        y0=cfg["run.y0"],
        det=cfg.detector_config(),
    )


def _run(cfg: Config, plant, interf, model, mode):
    return run_closed_loop(
        plant, interf, model, mode,
        relay_cfg=cfg.relay_config(),
        det_cfg=cfg.detector_config(),
        duration=cfg["run.duration"],
        log_start=cfg["run.log_start"],
        x0=cfg["run.x0"],
        y0=cfg["run.y0"],
    )


def _metrics(cfg: Config, plant, log, r_star):
    return compute_metrics(
        log,
        theta_star=plant.theta_star,
        r_star=r_star,
        tol=cfg["metrics.tol"],
        tail_frac=cfg["metrics.tail_frac"],
    )


def cmd_train(args) -> int:
    cfg = _load_cfg(args)
    out = args.out or _default_out(cfg, "model.txt")
    _prepare_out(out, args.force)
    model = train(
        cfg.training_config(),
        cfg.plant_params(),
        cfg.interference_params(),
        n_modes=cfg["n_modes"],
        svd_cutoff=cfg["svd_cutoff"],
    )
    save_model(model, out)
    _print_mode_table(model)
    print(f"model written to {out}")
    return 0


def cmd_static_map(args) -> int:
    cfg = _load_cfg(args)
    plant = cfg.plant_params()
    interf = cfg.interference_params()
    model = _require_model(args, args.mode)
    out = args.out or _default_out(cfg, f"map_{args.mode}.csv")
    _prepare_out(out, args.force)
    try:
        theta, r = _sweep(cfg, plant, interf, model, args.mode)
    except SimulationDivergence as exc:
        theta, r = exc.partial_map
        save_static_map(theta, r, out)
        print(f"error: {exc}; partial map ({len(theta)} rows) written to {out}",
              file=sys.stderr)
        return 4
    save_static_map(theta, r, out)
    window = cfg["metrics.smoothing_window"]
    theta_argmin, r_min = map_minimum(theta, r, window)
    score = convexity_score(theta, r, window)
    summary = (
        f"theta_argmin={theta_argmin:.12g}\n"
        f"r_min={r_min:.12g}\n"
        f"convexity_score={score:.12g}\n"
        f"smoothing_window={window}\n"
    )
    with open(os.path.splitext(out)[0] + ".summary", "w", encoding="utf-8") as fh:
        fh.write(summary)
    print(summary, end="")
    print(f"map written to {out}")
    return 0


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    plant = cfg.plant_params()
    interf = cfg.interference_params()
    model = _require_model(args, args.mode)
    out = args.out or _default_out(cfg, f"run_{args.mode}.csv")
    _prepare_out(out, args.force)
    try:
        log = _run(cfg, plant, interf, model, args.mode)
    except SimulationDivergence as exc:
        save_runlog(exc.partial_log, out)
        print(f"error: {exc}; partial log ({len(exc.partial_log)} rows) "
              f"written to {out}", file=sys.stderr)
        return 4
    save_runlog(log, out)
    r_star = _resolve_r_star(cfg, plant, interf, model, args.mode, args.map)
    metrics = _metrics(cfg, plant, log, r_star)
    save_metrics_csv(metrics, os.path.splitext(out)[0] + ".metrics.csv")
    print(format_metrics(metrics), end="")
    print(f"run log written to {out}")
    return 0


def _fmt_hit(t_hit) -> str:
    return "not_reached" if t_hit is None else f"{t_hit:.12g}"


def cmd_compare(args) -> int:
    cfg = _load_cfg(args)
    plant = cfg.plant_params()
    interf = cfg.interference_params()
    if not args.model:
        raise ConfigError("compare requires --model")
    model = load_model(args.model)
    out = args.out or _default_out(cfg, "compare.csv")
    _prepare_out(out, args.force)
    rows = {}
    for mode, map_path in (("raw", args.map_raw), ("lifted", args.map_lifted)):
        m = model if mode == "lifted" else None
        log = _run(cfg, plant, interf, m, mode)
        r_star = _resolve_r_star(cfg, plant, interf, m, mode, map_path)
        rows[mode] = _metrics(cfg, plant, log, r_star)
    raw, lifted = rows["raw"], rows["lifted"]
    # raw t_hit may not be reached on this horizon; the ratio is then a lower
    # bound computed against the horizon end and marked with >=
    if raw.t_hit is None:
        horizon = float(cfg["run.duration"])
        hit_ratio = f">={horizon / lifted.t_hit:.6g}" if lifted.t_hit else "undefined"
    elif lifted.t_hit is None:
        hit_ratio = "undefined"
    else:
        hit_ratio = f"{raw.t_hit / lifted.t_hit:.6g}"
    lines = ["method,iae,ise,t_hit,e_ss"]
    for mode, m in rows.items():
        lines.append(f"{mode},{m.iae:.12g},{m.ise:.12g},"
                     f"{_fmt_hit(m.t_hit)},{m.e_ss:.12g}")
    lines.append(f"ratio_raw_over_lifted,{raw.iae / lifted.iae:.6g},"
                 f"{raw.ise / lifted.ise:.6g},{hit_ratio},"
                 f"{raw.e_ss / lifted.e_ss:.6g}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"comparison written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koopesc",
        description="Koopman-lifted relay extremum seeking on a forced Van der Pol plant",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (defaults built in)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output path (default under out_dir)")
        p.add_argument("--force", action="store_true",
                       help="overwrite an existing output file")

    p = sub.add_parser("train", help="fit the lifted model and write it to disk")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("static-map", help="sweep theta and record the cost map")
    common(p)
    p.add_argument("--model", help="model file (required for --mode lifted)")
    p.add_argument("--mode", choices=("raw", "lifted"), required=True)
    p.set_defaults(func=cmd_static_map)

    p = sub.add_parser("run", help="closed-loop relay ESC run")
    common(p)
    p.add_argument("--model", help="model file (required for --mode lifted)")
    p.add_argument("--mode", choices=("raw", "lifted"), required=True)
    p.add_argument("--map", help="static-map CSV used for r_star (else re-swept)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run both modes and tabulate the metrics")
    common(p)
    p.add_argument("--model", help="model file for the lifted half")
    p.add_argument("--map-raw", help="raw static-map CSV for r_star")
    p.add_argument("--map-lifted", help="lifted static-map CSV for r_star")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OutputConflict as exc:
        return _fail(exc, 3)
    except ConfigError as exc:
        return _fail(exc, 2)
    except KoopmanFitError as exc:
        return _fail(exc, 2)
    except (ValueError, OSError) as exc:
        return _fail(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
