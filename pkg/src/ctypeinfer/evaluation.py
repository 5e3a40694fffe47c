"""Leave-one-project-out evaluation, metrics and corpus reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .extract import Occurrence
from .features import featurize_expr
from .frontend import component_count
from .learn import LearnerConfig, Sample, classify, id3_train
from .registry import CTYPES, LABEL_ORDER, CType

LENGTH_BUCKETS = ("1", "2", "3", "4", "5", "6", ">=7")


@dataclass(frozen=True)
class Fold:
    project: str
    train: tuple[Occurrence, ...]
    test: tuple[Occurrence, ...]

    @property
    def empty(self) -> bool:
        return not self.test


def lopo_folds(occurrences: Iterable[Occurrence],
               projects: Sequence[str] = ()) -> list[Fold]:
    """One fold per project; ``projects`` may name projects with no occurrences."""
    occs = list(occurrences)
    names = sorted(set(projects) | {o.project for o in occs})
    if len(names) < 2:
        raise ValueError("leave-one-project-out needs at least two projects")
    folds = []
    for name in names:
        test = tuple(o for o in occs if o.project == name)
        train = tuple(o for o in occs if o.project != name)
        folds.append(Fold(name, train, test))
    return folds


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f_score: float


@dataclass(frozen=True)
class MetricsReport:
    per_ctype: dict[CType, LabelScore]
    support: dict[CType, int]
    macro_precision: float
    macro_recall: float
    macro_f: float


def _f(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def score(pairs: Sequence[tuple[CType, CType]]) -> MetricsReport:
    """Per-label scores; macro means over the c-types present in the truth."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("cannot score an empty prediction list")
    truth = Counter(t for t, _ in pairs)
    predicted = Counter(p for _, p in pairs)
    hits = Counter(t for t, p in pairs if t == p)
    per, support = {}, {}
    for c in LABEL_ORDER:
        prec = hits[c] / predicted[c] if predicted[c] else 0.0
        rec = hits[c] / truth[c] if truth[c] else 0.0
        per[c] = LabelScore(prec, rec, _f(prec, rec))
        support[c] = truth[c]
    scored = [c for c in CTYPES if support[c]]
    if scored:
        macro_p = sum(per[c].precision for c in scored) / len(scored)
        macro_r = sum(per[c].recall for c in scored) / len(scored)
        macro_f = sum(per[c].f_score for c in scored) / len(scored)
    else:
        macro_p = macro_r = macro_f = 0.0
    return MetricsReport(per, support, macro_p, macro_r, macro_f)


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # [true, predicted] in LABEL_ORDER

    def cell(self, true: CType, pred: CType) -> int:
        return int(self.counts[true.index, pred.index])

    def row_sums(self) -> dict[CType, int]:
        return {c: int(self.counts[c.index].sum()) for c in LABEL_ORDER}

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(pairs: Iterable[tuple[CType, CType]]) -> ConfusionMatrix:
    counts = np.zeros((len(LABEL_ORDER), len(LABEL_ORDER)), dtype=np.int64)
    for t, p in pairs:
        counts[t.index, p.index] += 1
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class FoldResult:
    project: str
    pairs: tuple[tuple[CType, CType], ...]
    empty: bool


@dataclass(frozen=True)
class Evaluation:
    folds: tuple[FoldResult, ...]
    report: Optional[MetricsReport]
    matrix: ConfusionMatrix

    @property
    def pairs(self) -> list[tuple[CType, CType]]:
        return [p for f in self.folds for p in f.pairs]


def _sample(occ: Occurrence, mode: str) -> Sample:
    fv = occ.features if occ.features is not None else featurize_expr(occ.expr, mode)
    return Sample(fv, occ.label)


def evaluate_lopo(occurrences: Iterable[Occurrence], config: LearnerConfig = LearnerConfig(),
                  mode: str = "literal", projects: Sequence[str] = ()) -> Evaluation:
    """Train on all-but-one project, test on the held-out one, pool predictions."""
    results = []
    for fold in lopo_folds(occurrences, projects):
        pairs: tuple = ()
        if fold.test and fold.train:
            tree = id3_train([_sample(o, mode) for o in fold.train], config)
            pairs = tuple((o.label, classify(tree, _sample(o, mode).features))
                          for o in fold.test)
        results.append(FoldResult(fold.project, pairs, not fold.test))
    all_pairs = [p for r in results for p in r.pairs]
    report = score(all_pairs) if all_pairs else None
    return Evaluation(tuple(results), report, confusion(all_pairs))


# -- corpus reports ------------------------------------------------------------------------


_VALUE_KINDS = {"var_ref", "field_access", "method_call", "new_object"}


def is_constant_only(occ: Occurrence) -> bool:
    return not any(n.kind in _VALUE_KINDS for n in occ.expr.walk())


def _rank(texts: Iterable[str], k: int) -> list[tuple[str, int]]:
    counts = Counter(texts)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:max(k, 0)]


def report_top_expressions(occurrences: Iterable[Occurrence], label: CType, k: int
                           ) -> dict[str, list[tuple[str, int]]]:
    """Top-k non-constant expression texts, overall (key "*") and per project."""
    chosen = [o for o in occurrences if o.label == label and not is_constant_only(o)]
    out = {"*": _rank((o.expr_text for o in chosen), k)}
    for project in sorted({o.project for o in chosen}):
        out[project] = _rank((o.expr_text for o in chosen if o.project == project), k)
    return out


def length_bucket(n: int) -> int:
    return min(max(n, 1), 7) - 1


def report_length_histogram(occurrences: Iterable[Occurrence]) -> dict[CType, list[float]]:
    """Percentage of expressions per component-count bucket, per label."""
    counts: dict[CType, list[int]] = {}
    for occ in occurrences:
        row = counts.setdefault(occ.label, [0] * len(LENGTH_BUCKETS))
        row[length_bucket(component_count(occ.expr))] += 1
    out = {}
    for c in LABEL_ORDER:
        if c in counts:
            total = sum(counts[c])
            out[c] = [100.0 * n / total for n in counts[c]]
    return out


# -- formatting -------------------------------------------------------------------------------


def _table(rows: list[list[str]], tsv: bool) -> str:
    if tsv:
        return "\n".join("\t".join(r) for r in rows) + "\n"
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def format_metrics(report: MetricsReport, tsv: bool = False) -> str:
    rows = [["C-Type", "Precision", "Recall", "F-score", "Support"]]
    for c in CTYPES:
        s = report.per_ctype[c]
        rows.append([c.label, f"{s.precision:.3f}", f"{s.recall:.3f}",
                     f"{s.f_score:.3f}", str(report.support[c])])
    rows.append(["Average", f"{report.macro_precision:.3f}", f"{report.macro_recall:.3f}",
                 f"{report.macro_f:.3f}", str(sum(report.support[c] for c in CTYPES))])
    s = report.per_ctype[CType.OTHER]
    rows.append(["OTHER", f"{s.precision:.3f}", f"{s.recall:.3f}",
                 f"{s.f_score:.3f}", str(report.support[CType.OTHER])])
    return _table(rows, tsv)


def format_confusion(matrix: ConfusionMatrix, tsv: bool = False) -> str:
    labels = [c.label for c in LABEL_ORDER]
    rows = [["true\\pred"] + labels]
    for c in LABEL_ORDER:
        rows.append([c.label] + [str(int(v)) for v in matrix.counts[c.index]])
    return _table(rows, tsv)


def format_length_histogram(hist: dict[CType, list[float]], tsv: bool = False) -> str:
    rows = [["C-Type"] + [f"n={b}" if b.isdigit() else f"n{b}" for b in LENGTH_BUCKETS]]
    for c, row in hist.items():
        rows.append([c.label] + [f"{v:.1f}%" for v in row])
    return _table(rows, tsv)


def format_ranked(title: str, ranked: dict[str, list[tuple[str, int]]]) -> str:
    lines = [title]
    for key, items in ranked.items():
        name = "(all)" if key == "*" else key
        shown = ", ".join(f"{text} ({n})" for text, n in items)
        lines.append(f"  {name}: {shown}")
    return "\n".join(lines) + "\n"
