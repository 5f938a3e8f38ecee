"""Command line entry points: build, experiment, serve.

    cdss build --pima data/pima.csv --out casebase.json
    cdss experiment --pima data/pima.csv --train-size 512 --probes-pos 10 \
        --probes-neg 10 --k 5 --seed 1 --format table
    cdss serve --casebase casebase.json --port 8000
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import casebase as cb_mod
from . import evaluation, similarity, store
from .config import EngineConfig, default_criteria_config
from .electre import load_criteria_config
from .errors import CdssError
from .service import ServiceConfig, serve


def _build(args) -> int:
    cb = cb_mod.load_case_base(args.pima)
    counts = cb_mod.class_counts(cb)
    schema = cb_mod.default_schema(bin_count=args.bins)
    discretized = cb_mod.discretize(cb, schema)
    model = similarity.fit_vdm(discretized, alpha=args.alpha, q=args.q)
    store.save_case_base(discretized, args.out, model)
    print(f"built case-base: {len(cb)} cases "
          f"({', '.join(f'class {c}: {n}' for c, n in counts.items())}) -> {args.out}")
    return 0


def _experiment(args) -> int:
    cb = cb_mod.load_case_base(args.pima)
    report = evaluation.run_split_experiment(
        cb,
        train_size=args.train_size,
        n_pos=args.probes_pos,
        n_neg=args.probes_neg,
        k=args.k,
        seed=args.seed,
        split_seed=args.split_seed,
    )
    if args.out:
        evaluation.emit_report(report, args.format, args.out)
        print(f"report written to {args.out}")
    else:
        sys.stdout.write(evaluation.render_report(report, args.format))
    return 0


def _serve(args) -> int:
    engine = EngineConfig(
        k=args.k,
        criteria_config=(
            load_criteria_config(args.criteria) if args.criteria
            else default_criteria_config()),
    )
    config = ServiceConfig(
        casebase_path=Path(args.casebase),
        host=args.host,
        port=args.port,
        k_default=args.k,
        engine=engine,
        audit_path=Path(args.audit) if args.audit else None,
        static_dir=Path(args.ui) if args.ui else None,
    )
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdss", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="convert a raw corpus file into a case-base file")
    p_build.add_argument("--pima", required=True, help="raw corpus CSV (9 fields per line, no header)")
    p_build.add_argument("--out", required=True, help="destination case-base JSON file")
    p_build.add_argument("--bins", type=int, default=cb_mod.DEFAULT_BIN_COUNT)
    p_build.add_argument("--alpha", type=float, default=1.0)
    p_build.add_argument("--q", type=float, default=1.0)
    p_build.set_defaults(func=_build)

    p_exp = sub.add_parser("experiment", help="run the probe experiment on a train/test split")
    p_exp.add_argument("--pima", default="data/pima.csv")
    p_exp.add_argument("--train-size", type=int, default=512)
    p_exp.add_argument("--probes-pos", type=int, default=10)
    p_exp.add_argument("--probes-neg", type=int, default=10)
    p_exp.add_argument("--k", type=int, default=5)
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--split-seed", type=int, default=None)
    p_exp.add_argument("--format", choices=["table", "structured"], default="table")
    p_exp.add_argument("--out", default=None, help="write the report here instead of stdout")
    p_exp.set_defaults(func=_experiment)

    p_serve = sub.add_parser("serve", help="serve the HTTP API over a case-base file")
    p_serve.add_argument("--casebase", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--k", type=int, default=5)
    p_serve.add_argument("--criteria", default=None, help="criteria configuration JSON")
    p_serve.add_argument("--audit", default=None, help="audit log path")
    p_serve.add_argument("--ui", default=None, help="static console directory to mount at /ui")
    p_serve.set_defaults(func=_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CdssError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
