"""Command-line interface: generate, moments, gme, train, evaluate, export.

Every command writes a config.json into its output directory so a run can
be reproduced exactly. Exit codes: 0 success, 2 configuration error,
3 missing or malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .backend import backend_name
from .dataset import (DEFAULT_Q_MAX, gen_squeezed, generate_subsets,
                      read_manifest, read_records, split_dataset,
                      write_manifest, write_records)
from .errors import SchemaError, WehrlGmeError
from .gme import gme_reference
from .metrics import (RESOLUTION_THRESHOLD, compare_methods,
                      write_predictions_csv, write_report_csv)
from .mlp import TrainConfig, load_model, save_model, train, write_history_csv
from .moments import moments_dicke
from .states import SymmetricState

PRESETS = {
    "desk": {"per_subset": 2000, "epochs": 500, "batch_size": 100,
             "squeezed_total": 3000},
    "paper": {"per_subset": 20000, "epochs": 5000, "batch_size": 500,
              "squeezed_total": 30000},
}

RANDOM_SUBSETS = ("uniform", "degenerate", "ghz_dicke")


def _write_config(out_dir: Path, args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["version"] = __version__
    cfg["backend"] = backend_name()
    (out_dir / "config.json").write_text(
        json.dumps(cfg, indent=2, sort_keys=True, default=str) + "\n")


def _load_state(path: str) -> SymmetricState:
    obj = json.loads(Path(path).read_text())
    if "dicke_re" not in obj or "dicke_im" not in obj:
        raise SchemaError("state file needs dicke_re and dicke_im arrays")
    import numpy as np

    d = np.asarray(obj["dicke_re"], dtype=float) \
        + 1j * np.asarray(obj["dicke_im"], dtype=float)
    return SymmetricState.from_dicke(d)


def cmd_generate(args) -> int:
    preset = PRESETS[args.preset]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    subsets = args.subsets.split(",")
    bad = [s for s in subsets if s not in RANDOM_SUBSETS + ("squeezed",)]
    if bad:
        print(f"unknown subsets: {bad}", file=sys.stderr)
        return 2

    sizes = {}
    records = []
    random_subsets = [s for s in subsets if s != "squeezed"]
    if random_subsets:
        per = args.per_subset or preset["per_subset"]
        sizes = {name: per for name in random_subsets}
        records = generate_subsets(sizes, args.n_qubits, args.seed,
                                   q_max=args.q_max)
        train_recs, test_recs = split_dataset(records, args.seed)
    else:
        train_recs, test_recs = [], []

    if "squeezed" in subsets:
        total = args.squeezed_total or preset["squeezed_total"]
        n_traj = math.ceil(total / args.steps)
        squeezed = gen_squeezed(n_traj, args.n_qubits, args.seed,
                                steps=args.steps, dt=args.dt,
                                q_max=args.q_max, id_base=len(records))
        sizes["squeezed"] = len(squeezed)
        # generalization set: squeezed states are never used for training
        test_recs = test_recs + squeezed

    if train_recs:
        write_records(out / "train.jsonl", train_recs)
    write_records(out / "test.jsonl", test_recs)
    write_manifest(out / "manifest.json", {
        "seed": args.seed, "n_qubits": args.n_qubits, "q_max": args.q_max,
        "sizes": sizes, "subsets": subsets, "preset": args.preset,
        "steps": args.steps, "dt": args.dt,
        "generator_version": __version__,
        "n_train": len(train_recs), "n_test": len(test_recs),
    })
    _write_config(out, args)
    print(f"wrote {len(train_recs)} train / {len(test_recs)} test records to {out}")
    return 0


def cmd_moments(args) -> int:
    state = _load_state(args.input)
    seq = moments_dicke(state, args.q_max)
    payload = json.dumps({"n_qubits": state.n_qubits, "q_max": seq.q_max,
                          "moments": seq.moments.tolist(),
                          "ratios": seq.ratios.tolist()}, indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_gme(args) -> int:
    state = _load_state(args.input)
    est = gme_reference(state)
    payload = json.dumps({"n_qubits": state.n_qubits, "value": est.value,
                          "method": est.method,
                          "theta": est.maximizer.theta,
                          "phi": est.maximizer.phi}, indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_train(args) -> int:
    data = Path(args.data)
    manifest = read_manifest(data / "manifest.json")
    if args.q_max > manifest["q_max"]:
        print(f"dataset stores q_max={manifest['q_max']}, requested {args.q_max}",
              file=sys.stderr)
        return 2
    train_recs = read_records(data / "train.jsonl")
    test_recs = read_records(data / "test.jsonl")
    preset = PRESETS[args.preset]
    cfg = TrainConfig(batch_size=args.batch_size or preset["batch_size"],
                      epochs=args.epochs or preset["epochs"],
                      seed=args.seed)
    model, history = train(train_recs, args.q_max, cfg, test_records=test_recs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / f"model_q{args.q_max}.json", model)
    write_history_csv(out / f"loss_q{args.q_max}.csv", history)
    _write_config(out, args)
    print(f"trained q_max={args.q_max} for {cfg.epochs} epochs; "
          f"final train loss {model.meta['final_train_loss']:.3e}")
    return 0


def cmd_evaluate(args) -> int:
    data = Path(args.data)
    read_manifest(data / "manifest.json")
    test_recs = read_records(data / "test.jsonl")
    methods = args.methods.split(",")
    models = {}
    for path in args.model or []:
        model = load_model(path)
        models[model.meta["q_max"]] = model
    q_values = [int(tok) for tok in args.q_max.split(",")]
    if "ann" in methods:
        missing = [q for q in q_values if q not in models]
        if missing:
            print(f"no model provided for q_max in {missing}", file=sys.stderr)
            return 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = compare_methods(test_recs, models, q_values, methods,
                              keep_deltas=True,
                              exclude_below=args.exclude_below)
    write_report_csv(out / "reports.csv", reports)
    for rep in reports:
        write_predictions_csv(out / f"predictions_{rep.method}_q{rep.q_max}.csv",
                              rep)
    _write_config(out, args)
    for rep in reports:
        print(f"{rep.method:6s} q_max={rep.q_max}: MRE={rep.mre:.4f} "
              f"(+{rep.err_high:.4f}/-{rep.err_low:.4f}, "
              f"n={rep.n_used}, excluded={rep.n_excluded})")
    return 0


def cmd_export(args) -> int:
    rows = Path(args.reports).read_text().strip().splitlines()
    header = rows[0].split(",")
    idx = {name: i for i, name in enumerate(header)}
    table = {}
    methods = []
    for line in rows[1:]:
        cells = line.split(",")
        method, q_max = cells[idx["method"]], int(cells[idx["q_max"]])
        table.setdefault(q_max, {})[method] = cells[idx["mre"]]
        if method not in methods:
            methods.append(method)
    lines = ["q_max," + ",".join(methods)]
    for q_max in sorted(table):
        lines.append(f"{q_max}," + ",".join(table[q_max].get(m, "")
                                            for m in methods))
    payload = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        print(payload, end="")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-qubits", type=int, default=4)
    parser.add_argument("--q-max", type=int, default=DEFAULT_Q_MAX)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    parser.add_argument("--deterministic", action="store_true",
                        help="cap BLAS threads at 1 for bitwise-stable reductions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wehrlgme",
        description="Wehrl moments and geometric entanglement of symmetric "
                    "multiqubit states")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate datasets")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--subsets", default="uniform,degenerate,ghz_dicke")
    p.add_argument("--per-subset", type=int, default=0,
                   help="override preset states per subset")
    p.add_argument("--squeezed-total", type=int, default=0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--dt", type=float, default=0.1)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("moments", help="moments of one state")
    _add_common(p)
    p.add_argument("--input", required=True,
                   help="JSON file with dicke_re/dicke_im arrays")
    p.add_argument("--out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("gme", help="reference GME of one state")
    _add_common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gme)

    p = sub.add_parser("train", help="train the regressor")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=0,
                   help="override preset epochs")
    p.add_argument("--batch-size", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="compare estimators on a test split")
    p.add_argument("--q-max", default="4",
                   help="comma-separated truncation orders, e.g. 3,4,8")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--methods", default="ratio,accel,ann")
    p.add_argument("--model", action="append",
                   help="model JSON (repeatable, q_max read from meta)")
    p.add_argument("--exclude-below", type=float, default=RESOLUTION_THRESHOLD,
                   help="drop states whose reference GME is below this value "
                        "from the error statistics (the moment ratios cannot "
                        "resolve entanglement below about N/(N*q_max+1))")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", help="pivot a reports.csv into a q_max table")
    p.add_argument("--reports", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limiter = None
    if getattr(args, "deterministic", False):
        try:
            from threadpoolctl import threadpool_limits
            limiter = threadpool_limits(limits=1)
        except ImportError:
            print("warning: --deterministic needs threadpoolctl "
                  "(pip install wehrlgme[determinism]); BLAS threads uncapped",
                  file=sys.stderr)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 3
    except SchemaError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 3
    except WehrlGmeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if limiter is not None:
            limiter.unregister()


if __name__ == "__main__":
    sys.exit(main())
