"""Aggregate corpus results into R/P/U tables, usage counts and length curves."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import PairResult
from .mutops import OPERATOR_SETS, OperatorName

PERCENTILES = tuple(range(5, 101, 5))
PROGRESS_BUCKETS = 10
OPSET_ORDER = ("pitest", "extended")

PAIRS_COLUMNS = ("id", "project", "status", "k", "initial_diff", "remaining_diff",
                 "progress", "expansions", "wall_time", "excluded")
PER_PROJECT_COLUMNS = ("project", "opset", "R", "P", "U", "excluded", "R_pct", "P_pct", "U_pct")
OPERATOR_USAGE_COLUMNS = ("operator", "count_pitest", "count_extended")
LENGTH_HISTOGRAM_COLUMNS = ("opset", "status", "k", "count")
EXTRAPOLATION_COLUMNS = ("opset", "percentile", "expected_k")
CSV_FILES = ("pairs.csv", "per_project.csv", "operator_usage.csv", "length_histogram.csv", "extrapolation.csv")


class EmptyInput(ValueError):
    """No fully or partially reproduced pair to extrapolate from."""


@dataclass
class SummaryTables:
    per_project: list[dict] = field(default_factory=list)
    operator_usage: list[dict] = field(default_factory=list)
    length_histogram: list[dict] = field(default_factory=list)
    progress_histogram: list[dict] = field(default_factory=list)
    extrapolation: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _opsets_in(results: Iterable[PairResult]) -> list[str]:
    present = {r.opset for r in results}
    return [o for o in OPSET_ORDER if o in present] + sorted(present - set(OPSET_ORDER))


def _percentages(counts: Sequence[int]) -> list[float]:
    total = sum(counts)
    if not total:
        return [0.0 for _ in counts]
    return [round(100.0 * c / total, 1) for c in counts]


def extrapolate_expected_lengths(results: Sequence[PairResult]) -> list[tuple[int, int]]:
    """Nearest-rank percentile curve over R lengths and doubled P lengths.

    Doubling assumes a partial path covers about half of the mutations the
    bug needs, which gives an upper estimate of the full length.
    """
    lengths = sorted(
        [r.k for r in results if not r.excluded and r.status == "R"]
        + [2 * r.k for r in results if not r.excluded and r.status == "P"]
    )
    if not lengths:
        raise EmptyInput("need at least one R or P result")
    n = len(lengths)
    return [(p, lengths[max(1, -(-p * n // 100)) - 1]) for p in PERCENTILES]


def summarize(results: Sequence[PairResult]) -> SummaryTables:
    tables = SummaryTables()
    if not results:
        return tables
    opsets = _opsets_in(results)
    included = [r for r in results if not r.excluded]

    for opset in opsets:
        rows = [r for r in results if r.opset == opset]
        for project in sorted({r.project for r in rows}):
            mine = [r for r in rows if r.project == project]
            counts = Counter(r.status for r in mine if not r.excluded)
            rpu = [counts["R"], counts["P"], counts["U"]]
            pct = _percentages(rpu)
            tables.per_project.append({
                "project": project, "opset": opset,
                "R": rpu[0], "P": rpu[1], "U": rpu[2],
                "excluded": sum(r.excluded for r in mine),
                "R_pct": pct[0], "P_pct": pct[1], "U_pct": pct[2],
            })

    usage: dict[str, Counter] = defaultdict(Counter)
    for r in included:
        usage[r.opset].update(r.operator_usage)
    for op in OperatorName:
        row: dict = {"operator": op.value}
        for opset in OPSET_ORDER:
            available = opset in opsets and op in OPERATOR_SETS[opset].names
            row[f"count_{opset}"] = usage[opset][op.value] if available else None
        tables.operator_usage.append(row)

    for opset in opsets:
        rows = [r for r in included if r.opset == opset]
        for status in ("R", "P"):
            hist = Counter(r.k for r in rows if r.status == status)
            for k in sorted(hist):
                tables.length_histogram.append({"opset": opset, "status": status, "k": k, "count": hist[k]})
        buckets = Counter(min(int(r.progress * PROGRESS_BUCKETS), PROGRESS_BUCKETS - 1)
                          for r in rows if r.status == "P")
        for b in range(PROGRESS_BUCKETS):
            lo, hi = b * 100 // PROGRESS_BUCKETS, (b + 1) * 100 // PROGRESS_BUCKETS
            tables.progress_histogram.append({"opset": opset, "bucket": f"{lo}-{hi}", "count": buckets[b]})
        try:
            curve = extrapolate_expected_lengths(rows)
        except EmptyInput:
            continue
        tables.extrapolation.extend({"opset": opset, "percentile": p, "expected_k": k} for p, k in curve)
    return tables


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}".rstrip("0").rstrip(".") if value != int(value) else f"{value:.1f}"
    return str(value)


def _csv_text(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _pair_row(r: PairResult, timings: bool) -> dict:
    return {
        "id": r.id, "project": r.project, "status": r.status or "", "k": r.k,
        "initial_diff": r.initial_diff, "remaining_diff": r.remaining_diff,
        "progress": round(r.progress, 6), "expansions": r.expansions,
        "wall_time": round(r.wall_time, 6) if timings else "", "excluded": r.excluded,
    }


def emit(tables: SummaryTables, results: Sequence[PairResult], out_dir: str | Path,
         formats: Iterable[str] = ("csv", "json"), timings: bool = False) -> list[Path]:
    """Write report files; output bytes depend only on the inputs.

    Wall-clock times vary between runs, so they are only written when
    ``timings`` is set; otherwise the column is left blank.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats = set(formats)
    unknown = formats - {"csv", "json"}
    if unknown:
        raise ValueError(f"unknown report formats: {sorted(unknown)}")
    written = []
    if "csv" in formats:
        files = {
            "pairs.csv": _csv_text(PAIRS_COLUMNS, (_pair_row(r, timings) for r in results)),
            "per_project.csv": _csv_text(PER_PROJECT_COLUMNS, tables.per_project),
            "operator_usage.csv": _csv_text(OPERATOR_USAGE_COLUMNS, tables.operator_usage),
            "length_histogram.csv": _csv_text(LENGTH_HISTOGRAM_COLUMNS, tables.length_histogram),
            "extrapolation.csv": _csv_text(EXTRAPOLATION_COLUMNS, tables.extrapolation),
        }
        for name in CSV_FILES:
            path = out / name
            path.write_text(files[name], encoding="utf-8")
            written.append(path)
    if "json" in formats:
        pairs = []
        for r in results:
            d = r.to_dict()
            d["wall_time"] = round(r.wall_time, 6) if timings else None
            pairs.append(d)
        doc = {"pairs": pairs, "summary": tables.to_dict()}
        path = out / "results.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    return written
