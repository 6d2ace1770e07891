"""Command-line entry point: ``smote-enc {resample,evaluate,compare,generate}``.

Exit codes: 0 success, 1 usage error, 2 data or sampler precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .encoding import fit_encoding
from .errors import DataError, SamplerError
from .evalharness import ALPHA, CVConfig, ComparisonReport, compare_methods
from .forest import ForestParams
from .metrics import curve_csv
from .samplers import SamplerConfig, normalize_method, resample
from .tabular import (
    GeneratorSpec,
    atomic_write_text,
    generate_synthetic,
    load_csv,
    read_schema,
    schema_to_dict,
    write_csv,
)

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def _load(args):
    columns, target, minority = read_schema(args.schema)
    if args.minority_label is not None:
        minority = args.minority_label
    return load_csv(args.input, columns, target, minority, auto_minority=args.auto_minority)


def _sampler_config(args, method: str) -> SamplerConfig:
    return SamplerConfig(
        method=method,
        k=args.k,
        ratio=args.ratio if args.ratio is not None else 1.0,
        percent=args.percent,
        seed=args.seed,
        raw_one_hot=getattr(args, "raw_one_hot", None) is not None,
    )


def _method(name: str) -> str:
    try:
        return normalize_method(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -------------------------------------------------------------- subcommands


def cmd_resample(args) -> int:
    dataset = _load(args)
    config = _sampler_config(args, _method(args.method))
    if args.dump_encoding:
        _dump_json(args.dump_encoding, fit_encoding(dataset).to_dict())
    result = resample(dataset, config, trace=bool(args.dump_neighbors))
    write_csv(result.dataset, args.output)
    if args.dump_provenance:
        _dump_json(args.dump_provenance, {
            "n_original": result.n_original,
            "n_synthetic": len(result.provenance),
            **result.provenance.to_dict(),
        })
    if args.dump_neighbors:
        _dump_json(args.dump_neighbors, result.trace)
    if args.raw_one_hot and result.raw_matrix is not None:
        lines = [",".join(repr(float(v)) for v in row) for row in result.raw_matrix]
        atomic_write_text(args.raw_one_hot, "\n".join(lines) + "\n")
    print(f"{config.label}: {dataset.s} rows in, {result.dataset.s} rows out "
          f"({len(result.provenance)} synthetic); minority {dataset.t} -> {result.dataset.t}")
    return 0


def _forest_params(args) -> ForestParams:
    return ForestParams(n_trees=args.n_trees, max_depth=args.max_depth,
                        min_samples_leaf=args.min_samples_leaf, seed=args.seed)


def _cv_config(args) -> CVConfig:
    return CVConfig(folds=args.folds, repeats=args.repeats, seed=args.seed,
                    threshold=args.threshold, beta=args.beta, jobs=args.jobs)


def _write_curves(report: ComparisonReport, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    for m in report.methods:
        if not m.ok:
            continue
        (roc_t, fpr, tpr), _, (pr_t, rec, prec), _, _ = m.curves()
        atomic_write_text(os.path.join(directory, f"roc_{m.name}.csv"), curve_csv(roc_t, fpr, tpr, "fpr", "tpr"))
        atomic_write_text(os.path.join(directory, f"pr_{m.name}.csv"), curve_csv(pr_t, rec, prec, "recall", "precision"))


def _style(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") is not None:
        return text
    return f"\033[{code}m{text}\033[0m"


def print_table(report: dict, out=sys.stdout) -> None:
    cols = ("precision", "recall", "f_beta", "roc_auc", "pr_auc")
    header = f"{'method':<16}" + "".join(f"{c:>18}" for c in cols)
    print(_style(header, "1"), file=out)
    for name, m in report["methods"].items():
        if m["status"] != "ok":
            print(f"{name:<16}NA  ({m['error']})", file=out)
            continue
        cells = "".join(f"{m['summary'][c]['mean']:>10.4f} ±{m['summary'][c]['std']:.4f}" for c in cols)
        print(f"{name:<16}{cells}", file=out)
    for t in report["tests"]:
        verdict = "significant" if t["significant"] else "not significant"
        line = f"{t['a']} vs {t['b']} [{t['metric']}]: t={t['t']:.4f} p={t['p_value']:.4g} -> {verdict} at {ALPHA}"
        print(_style(line, "33") if t["significant"] else line, file=out)


def _run_comparison(args, methods: list[str]) -> tuple[ComparisonReport, dict]:
    dataset = _load(args)
    configs = [_sampler_config(args, m) for m in methods]
    report = compare_methods(dataset, configs, _forest_params(args), _cv_config(args))
    as_dict = report.to_dict()
    _dump_json(args.report, as_dict)
    if args.curves:
        _write_curves(report, args.curves)
    print_table(as_dict)
    return report, as_dict


def cmd_evaluate(args) -> int:
    report, _ = _run_comparison(args, [_method(args.method)])
    m = report.methods[0]
    if not m.ok:
        print(f"error: {m.error}", file=sys.stderr)
        return EXIT_DATA
    return 0


def cmd_compare(args) -> int:
    methods = [_method(m) for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise UsageError("--methods needs at least one method")
    _run_comparison(args, methods)
    return 0


def cmd_generate(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read generator spec {args.spec}: {exc}") from None
    if args.seed is not None:
        raw["seed"] = args.seed
    dataset = generate_synthetic(GeneratorSpec.from_dict(raw))
    write_csv(dataset, args.output)
    if args.schema_out:
        _dump_json(args.schema_out, schema_to_dict(dataset))
    print(f"generated {dataset.s} rows ({dataset.t} minority) -> {args.output}")
    return 0


# ------------------------------------------------------------------- parser


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _data_args(p):
    p.add_argument("--input", required=True, help="input CSV")
    p.add_argument("--schema", required=True, help="schema sidecar JSON")
    p.add_argument("--minority-label", help="override the schema's minority label")
    p.add_argument("--auto-minority", action="store_true", help="use the less frequent target value as minority")


def _sampler_args(p):
    p.add_argument("--k", type=_positive_int, default=5, help="nearest neighbours (default 5)")
    amount = p.add_mutually_exclusive_group()
    amount.add_argument("--ratio", type=float, help="target minority/majority ratio (default 1.0)")
    amount.add_argument("--percent", type=float, help="synthesize PERCENT%% of the minority count")
    p.add_argument("--seed", type=int, default=0)


def _eval_args(p):
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=_positive_int, default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n-trees", type=_positive_int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples-leaf", type=_positive_int, default=1)
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes; results do not depend on it")
    p.add_argument("--report", required=True, help="output report JSON")
    p.add_argument("--curves", help="directory for ROC/PR curve CSVs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smote-enc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("resample", help="oversample the minority class of a CSV")
    _data_args(p)
    p.add_argument("--method", default="smote-enc", help="smote-enc | smote-nc | smote | one-hot-smote")
    _sampler_args(p)
    p.add_argument("--output", required=True)
    p.add_argument("--dump-encoding", help="write the fitted label encoding as JSON")
    p.add_argument("--dump-provenance", help="write per-synthetic-row seed/neighbour/lambda as JSON")
    p.add_argument("--dump-neighbors", help="write minority pairwise distances and k-NN lists as JSON")
    p.add_argument("--raw-one-hot", help="one-hot-smote only: write the unrounded indicator matrix CSV")
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("evaluate", help="cross-validate one sampler + random forest")
    _data_args(p)
    p.add_argument("--method", default="smote-enc")
    _sampler_args(p)
    _eval_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="cross-validate several samplers on shared folds")
    _data_args(p)
    p.add_argument("--methods", default="smote-enc,smote-nc", help="comma-separated methods")
    _sampler_args(p)
    _eval_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="draw a synthetic dataset from a generator spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.add_argument("--schema-out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"smote-enc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, SamplerError, ValueError) as exc:
        print(f"smote-enc: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"smote-enc: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
