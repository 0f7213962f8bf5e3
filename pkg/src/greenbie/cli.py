"""Experiment runner: ``greenbie run|compare|eval|oracle``.

Configs are INI files; a ``[experiment]`` section names a preset and/or the
other sections override its fields.  All outputs are plain CSV / JSON so
any plotting tool can reproduce the figures.
"""

import argparse
import configparser
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments, geometry, green_solver, network, oracle, potentials, training
from .errors import TrainingDiverged

_SCHEMA_VERSION = 1


def _parse_value(text):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if ";" in text or ("," in text and "(" not in text):
        # vertex / tuple lists: "x1,y1; x2,y2; ..." or "a,b,c,d"
        parts = [p for p in text.replace(";", " ").split() if p]
        try:
            tuples = [tuple(float(v) for v in p.split(",")) for p in parts]
        except ValueError:
            return text
        if all(len(t) == 1 for t in tuples):
            return tuple(t[0] for t in tuples)
        return tuples
    return text


def load_config(path, seed=None, smoke=False):
    """Read an INI config, expanding its preset and applying overrides."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read config file {path}")
    exp = dict(parser["experiment"]) if parser.has_section("experiment") else {}
    preset = exp.get("preset")
    if preset:
        cfg = experiments.preset_config(preset)
    else:
        cfg = {"geometry": {}, "operator": {}, "training": {}, "evaluation": []}
    for section in ("geometry", "operator", "training"):
        if parser.has_section(section):
            for key, val in parser[section].items():
                cfg[section][key] = _parse_value(val)
    if parser.has_section("evaluation"):
        # a single inline evaluation spec replaces the preset's list
        cfg["evaluation"] = [
            {k: _parse_value(v) for k, v in parser["evaluation"].items()}
        ]
    if "seed" in exp:
        cfg["seed"] = int(exp["seed"])
    if "out_dir" in exp:
        cfg["out_dir"] = exp["out_dir"]
    if seed is not None:
        cfg["seed"] = seed
    cfg.setdefault("seed", 0)
    if smoke:
        cfg = experiments.apply_smoke(cfg)
    _validate(cfg)
    return cfg


def _validate(cfg):
    tr = cfg["training"]
    if not tr:
        raise ValueError("config has no [training] section and no preset")
    if int(tr.get("epochs", 0)) <= 0:
        raise ValueError("training.epochs must be a positive integer")
    for key in ("n_x", "n1", "n2", "blocks", "width"):
        if key in tr and int(tr[key]) <= 0:
            raise ValueError(f"training.{key} must be positive")
    if tr.get("mode", "bi") not in ("bi", "db"):
        raise ValueError("training.mode must be 'bi' or 'db'")
    for ev in cfg["evaluation"]:
        if ev.get("kind") not in experiments._EVALUATORS:
            raise ValueError(f"unknown evaluation kind {ev.get('kind')!r}")


def _write_outputs(out_dir, cfg, model, metrics):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "loss_trace.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "loss", "wall_time_s"])
        w.writerows(model.loss_trace)
    nets = model.densities if model.mode == "bi" else (model.db_network,)
    for i, net in enumerate(nets):
        network.save_checkpoint(net, out / f"density_{i}.gbnet")
    payload = {
        "schema_version": _SCHEMA_VERSION,
        "preset": cfg.get("preset"),
        "seed": cfg.get("seed", 0),
        "smoke": bool(cfg.get("smoke", False)),
        "mode": model.mode,
        "final_loss": model.loss_trace[-1][1],
        "metrics": metrics,
    }
    with open(out / "metrics.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_slices(out, cfg, model)
    return out / "metrics.json"


def _write_slices(out, cfg, model):
    slices = cfg.get("slices") or []
    if not slices:
        return
    ev0 = cfg["evaluation"][0] if cfg["evaluation"] else {"grid_step": 0.1}
    step = ev0.get("grid_step", 0.1)
    grid = experiments.evaluation_grid(model.domain, model.eval_curves, step)
    for i, x in enumerate(slices):
        x = np.asarray(x, dtype=float)
        sel = grid[np.linalg.norm(grid - x, axis=1) > 0.05]
        vals = green_solver.eval_green_grid(model, x, sel)
        green_solver.EvaluationGrid(points=sel, values=vals).to_csv(
            out / f"green_slice_{i}.csv"
        )


def cmd_run(args):
    try:
        cfg = load_config(args.config, seed=args.seed, smoke=args.smoke) \
            if args.config else experiments.preset_config(
                args.preset, seed=args.seed or 0, smoke=args.smoke)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out or cfg.get("out_dir")
    if not out_dir:
        print("config error: no output directory (--out or [experiment] out_dir)",
              file=sys.stderr)
        return 2
    try:
        model = experiments.train_from_config(cfg)
    except TrainingDiverged as exc:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "loss_trace.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "loss", "wall_time_s"])
            w.writerows(exc.trace)
        print(f"training diverged: {exc}", file=sys.stderr)
        return 3
    metrics = experiments.run_evaluations(model, cfg)
    path = _write_outputs(out_dir, cfg, model, metrics)
    print(f"wrote {path}")
    return 0


def _flatten(prefix, obj, into):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, into)
    elif isinstance(obj, (int, float, str)) or obj is None:
        into[prefix] = obj


def cmd_compare(args):
    if len(args.run_dirs) < 2:
        print("compare needs at least two run directories", file=sys.stderr)
        return 2
    rows = []
    for d in args.run_dirs:
        mpath = Path(d) / "metrics.json"
        if not mpath.exists():
            print(f"missing metrics file: {mpath}", file=sys.stderr)
            return 2
        with open(mpath) as fh:
            payload = json.load(fh)
        flat = {}
        _flatten("", payload.get("metrics", {}), flat)
        flat["final_loss"] = payload.get("final_loss")
        rows.append((d, payload.get("preset") or payload.get("mode"), flat))
    keys = sorted({k for _, _, flat in rows for k in flat
                   if isinstance(flat[k], (int, float))})
    header = ["run", "preset"] + keys
    table = [[d, name] + [f"{flat.get(k, ''):.6g}" if isinstance(flat.get(k), (int, float))
                          else "" for k in keys] for d, name, flat in rows]
    widths = [max(len(str(r[i])) for r in [header] + table) for i in range(len(header))]
    for row in [header] + table:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(table)
    return 0


def _load_model_from_run(run_dir):
    run = Path(run_dir)
    with open(run / "metrics.json") as fh:
        payload = json.load(fh)
    preset = payload.get("preset")
    if not preset:
        raise ValueError("run has no preset recorded; cannot rebuild geometry")
    cfg = experiments.preset_config(preset, seed=payload.get("seed", 0),
                                    smoke=payload.get("smoke", False))
    domain, eval_curves = experiments.build_domain(cfg["geometry"])
    op = experiments.build_operator(cfg["operator"])
    nets = []
    for i in range(8):
        p = run / f"density_{i}.gbnet"
        if not p.exists():
            break
        nets.append(network.load_checkpoint(p))
    schemes = tuple(potentials.make_scheme(c) for c in domain.curves)
    if payload["mode"] == "db":
        model = training.GreenModel(op=op, domain=domain, schemes=schemes,
                                    densities=(), mode="db", db_network=nets[0])
    else:
        model = training.GreenModel(op=op, domain=domain, schemes=schemes,
                                    densities=tuple(nets), mode="bi")
    model.eval_curves = eval_curves
    return model, cfg


def cmd_eval(args):
    model, cfg = _load_model_from_run(args.run_dir)
    x = np.array([float(v) for v in args.x.split(",")])
    grid = experiments.evaluation_grid(model.domain, model.eval_curves, args.grid_step)
    sel = grid[np.linalg.norm(grid - x, axis=1) > 0.05]
    vals = green_solver.eval_green_grid(model, x, sel)
    green_solver.EvaluationGrid(points=sel, values=vals).to_csv(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_oracle(args):
    cfg = experiments.preset_config(args.preset, seed=0, smoke=False)
    domain, eval_curves = experiments.build_domain(cfg["geometry"])
    op = experiments.build_operator(cfg["operator"])
    eval_domain = geometry.DomainSpec(domain.kind, eval_curves,
                                      sampling_box=domain.sampling_box)
    x = np.array([float(v) for v in args.x.split(",")])
    grid = experiments.evaluation_grid(domain, eval_curves, args.grid_step)
    sel = grid[np.linalg.norm(grid - x, axis=1) > 0.05]
    if cfg["geometry"]["name"] == "disc" and op.family == "poisson" and args.closed_form:
        vals = oracle.disc_green_exact(x, sel)
    else:
        ref = oracle.NystromReference(op, eval_domain).solve_for(x)
        if domain.kind == "interface":
            labels = geometry.label_regions(eval_domain, sel)
            vals = np.zeros(len(sel), dtype=complex)
            for region in (1, 2):
                m = labels == region
                if m.any():
                    vals[m] = ref.g_at(sel[m], region)
        else:
            vals = ref.g_at(sel)
    green_solver.EvaluationGrid(points=sel, values=vals).to_csv(args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="greenbie",
        description="Learn Green's functions via boundary-integral networks "
                    "and use them as solution operators.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="train a preset/config and evaluate it")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--preset", help="preset name (alternative to --config)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--smoke", action="store_true", help="seconds-scale budget")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("compare", help="tabulate metrics of completed runs")
    p.add_argument("run_dirs", nargs="*")
    p.add_argument("--csv", help="also write the table as CSV")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("eval", help="re-evaluate a checkpoint on a new grid")
    p.add_argument("run_dir")
    p.add_argument("--x", required=True, help="source point 'x1,x2'")
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("oracle", help="emit a reference Green's-function field")
    p.add_argument("--preset", required=True)
    p.add_argument("--x", required=True, help="source point 'x1,x2'")
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--closed-form", action="store_true",
                   help="use the closed-form disc solution where available")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_oracle)

    args = parser.parse_args(argv)
    if args.cmd == "run" and not (args.config or args.preset):
        parser.error("run needs --config or --preset")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
