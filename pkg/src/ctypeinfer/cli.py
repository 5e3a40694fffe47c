"""Command-line entry point: extract, train, predict, evaluate, report."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._validation import SEGMENTATION_MODES, check_min_items
from .evaluation import (LENGTH_BUCKETS, evaluate_lopo, format_confusion,
                         format_length_histogram, format_metrics, format_ranked,
                         report_length_histogram, report_top_expressions)
from .extract import (Occurrence, ScanDiagnostics, format_counts, read_jsonl,
                      refeaturize, scan_project, tabulate_counts, write_jsonl)
from .features import featurize_expr, top_words
from .frontend import JavaSyntaxError, parse_expression
from .learn import (LearnerConfig, classify, id3_train, Sample, tree_from_json,
                    tree_to_json, tree_to_rules)
from .registry import CTYPES, FormatError, load_registry

log = logging.getLogger("ctypeinfer")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    registry_path: Optional[Path] = None
    min_items: int = 10
    segmentation_mode: str = "literal"
    output_dir: Path = Path(".")
    project_specs: list[tuple[str, Path]] = field(default_factory=list)

    def __post_init__(self):
        check_min_items(self.min_items)
        names = [n for n, _ in self.project_specs]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValueError(f"duplicate project names: {', '.join(dupes)}")


def parse_project_spec(text: str) -> tuple[str, Path]:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected name=path, got {text!r}")
    return name, Path(path)


def read_manifest(path: Path) -> list[tuple[str, Path]]:
    specs = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        name, sep, root = line.partition("\t")
        if not sep or not name.strip() or not root.strip():
            raise ValueError(f"{path}:{lineno}: expected name<TAB>path")
        specs.append((name.strip(), Path(root.strip())))
    return specs


def _start_log(out: Path, command: str) -> logging.Handler:
    out.mkdir(parents=True, exist_ok=True)
    logfile = out / f"{command}.log"
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    logfile.write_text(f"# ctypeinfer {__version__} {command} {stamp}\n", encoding="utf-8")
    handler = logging.FileHandler(logfile, encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    logging.getLogger().addHandler(handler)
    return handler


def _load_occurrences(paths: Sequence[Path], mode: str) -> list[Occurrence]:
    occs: list[Occurrence] = []
    for p in paths:
        occs.extend(read_jsonl(p))
    return refeaturize(occs, mode)


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")


# -- subcommands ---------------------------------------------------------------------


def cmd_extract(args) -> int:
    specs = list(args.projects)
    if args.manifest:
        specs += read_manifest(args.manifest)
    if not specs:
        log.error("no projects given")
        return EXIT_USAGE
    config = RunConfig(args.registry, args.min_items, args.segmentation, args.out, specs)
    registry = load_registry(config.registry_path)
    handler = _start_log(config.output_dir, "extract")
    try:
        all_occ: list[Occurrence] = []
        ok_projects = []
        for name, root in config.project_specs:
            diag = ScanDiagnostics()
            try:
                occ = scan_project(root, registry, name, config.segmentation_mode,
                                   jobs=args.jobs, diagnostics=diag)
            except OSError as exc:
                log.error("project %s failed: %s", name, exc)
                continue
            write_jsonl(occ, config.output_dir / f"{name}.jsonl")
            log.info("project %s: %d files parsed, %d skipped, %d occurrences",
                     name, diag.parsed, len(diag.failed), len(occ))
            ok_projects.append(name)
            all_occ.extend(occ)
        if not ok_projects:
            log.error("every project failed")
            return EXIT_FAILED
        table = tabulate_counts(all_occ, ok_projects)
        _write(config.output_dir / "counts.tsv", format_counts(table, tsv=True))
        _write(config.output_dir / "counts.txt", format_counts(table))
        return EXIT_OK
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


def cmd_train(args) -> int:
    handler = _start_log(args.out, "train")
    try:
        occs = _load_occurrences(args.occurrences, args.segmentation)
        if not occs:
            log.error("no training data")
            return EXIT_FAILED
        tree = id3_train([Sample(o.features, o.label) for o in occs],
                         LearnerConfig(args.min_items))
        _write(args.out / "tree.json", tree_to_json(tree))
        _write(args.out / "rules.txt", tree_to_rules(tree))
        log.info("trained on %d samples", len(occs))
        return EXIT_OK
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


def cmd_predict(args) -> int:
    tree = tree_from_json(args.tree.read_text(encoding="utf-8"))
    lines = []
    if args.expr is not None:
        try:
            expr = parse_expression(args.expr)
        except JavaSyntaxError as exc:
            print(f"error: cannot parse expression: {exc}", file=sys.stderr)
            return EXIT_FAILED
        lines.append(classify(tree, featurize_expr(expr, args.segmentation)).label)
    else:
        if not args.occurrences:
            print("error: give --expr or occurrence files", file=sys.stderr)
            return EXIT_USAGE
        for occ in _load_occurrences(args.occurrences, args.segmentation):
            pred = classify(tree, occ.features)
            row = f"{occ.project}\t{occ.file}:{occ.line}\t{occ.arg_pos}\t{occ.expr_text}\t{pred.label}"
            if pred != occ.label:
                row += f"\tMISMATCH recorded={occ.label.label}"
            lines.append(row)
    text = "".join(line + "\n" for line in lines)
    if args.out_file:
        _write(args.out_file, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    handler = _start_log(args.out, "evaluate")
    try:
        occs = _load_occurrences(args.occurrences, args.segmentation)
        projects = sorted({o.project for o in occs})
        if len(projects) < 2:
            log.error("leave-one-project-out needs at least two projects, got %d", len(projects))
            return EXIT_USAGE
        ev = evaluate_lopo(occs, LearnerConfig(args.min_items), args.segmentation)
        if ev.report is None:
            log.error("no fold produced predictions")
            return EXIT_FAILED
        _write(args.out / "metrics.tsv", format_metrics(ev.report, tsv=True))
        _write(args.out / "metrics.txt", format_metrics(ev.report))
        _write(args.out / "confusion.tsv", format_confusion(ev.matrix, tsv=True))
        _write(args.out / "confusion.txt", format_confusion(ev.matrix))
        fold_rows = ["project\ttest_size\tcorrect\tflag"]
        for f in ev.folds:
            correct = sum(t == p for t, p in f.pairs)
            fold_rows.append(f"{f.project}\t{len(f.pairs)}\t{correct}\t{'empty' if f.empty else ''}")
        _write(args.out / "folds.tsv", "\n".join(fold_rows) + "\n")
        log.info("%d folds, macro F %.3f", len(ev.folds), ev.report.macro_f)
        return EXIT_OK
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


def cmd_report(args) -> int:
    handler = _start_log(args.out, "report")
    try:
        occs = _load_occurrences(args.occurrences, args.segmentation)
        table = tabulate_counts(occs)
        _write(args.out / "counts.txt", format_counts(table))
        parts = []
        for c in CTYPES:
            ranked = report_top_expressions(occs, c, args.top)
            if ranked["*"]:
                parts.append(format_ranked(c.label, ranked))
        _write(args.out / "top_expressions.txt", "".join(parts))
        hist = report_length_histogram(occs)
        _write(args.out / "lengths.tsv", format_length_histogram(hist, tsv=True))
        _write(args.out / "lengths.txt", format_length_histogram(hist))
        rows = ["ctype\twords"]
        for c in CTYPES:
            words = top_words(occs, c, args.top)
            if words:
                rows.append(c.label + "\t" + ", ".join(f"{w} ({n})" for w, n in words))
        _write(args.out / "top_words.tsv", "\n".join(rows) + "\n")
        log.info("report over %d occurrences, buckets %s", len(occs), ",".join(LENGTH_BUCKETS))
        return EXIT_OK
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


def cmd_generate(args) -> int:
    from .generator import generate_corpus, write_manifest
    projects = generate_corpus(args.out, args.projects, args.seed)
    write_manifest(projects, args.out / "manifest.tsv")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", type=Path, default=None,
                        help="registry file (default: bundled)")
    common.add_argument("--min-items", type=int, default=10,
                        help="smallest node ID3 will split (default 10)")
    common.add_argument("--segmentation", choices=SEGMENTATION_MODES, default="literal")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ctypeinfer", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="scan projects for c-type arguments")
    p.add_argument("projects", nargs="*", type=parse_project_spec, metavar="NAME=PATH")
    p.add_argument("--manifest", type=Path, help="file of name<TAB>path lines")
    p.add_argument("--jobs", type=int, default=1, help="parallel parser processes")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", parents=[common], help="train an ID3 tree")
    p.add_argument("occurrences", nargs="+", type=Path)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="classify expressions")
    p.add_argument("--tree", type=Path, required=True)
    p.add_argument("--expr", help="a single Java expression")
    p.add_argument("--out-file", type=Path, help="write predictions here instead of stdout")
    p.add_argument("occurrences", nargs="*", type=Path)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="leave-one-project-out evaluation")
    p.add_argument("occurrences", nargs="+", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common], help="corpus statistics")
    p.add_argument("occurrences", nargs="+", type=Path)
    p.add_argument("--top", type=int, default=3)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("generate", parents=[common], help="write the synthetic corpus")
    p.add_argument("--projects", type=int, default=4)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", force=True)
    try:
        check_min_items(args.min_items)
        return args.func(args)
    except (FormatError, ValueError, TypeError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
