"""Bug-pair corpora: manifest loading, seeded bugs, and whole-corpus runs."""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .minilang import Ast, ParseError, parse, pretty_print
from .mutops import OperatorName, OperatorSet, apply, build_pool, enumerate_applications, operator_set
from .search import MutationPath, SearchBudget, classify, find_mutation_path
from .treediff import SizeLimit

log = logging.getLogger(__name__)


class ManifestError(Exception):
    """The manifest document does not follow the expected schema."""


class NoSites(Exception):
    """No mutation operator applies to the program being seeded."""


@dataclass(frozen=True)
class PairEntry:
    id: str
    project: str
    fixed_path: Path
    buggy_path: Path
    fixed_source: str | None = None
    buggy_source: str | None = None
    excluded: bool = False
    reason: str = ""

    @property
    def fixed(self) -> Ast:
        return parse(self.fixed_source)

    @property
    def buggy(self) -> Ast:
        return parse(self.buggy_source)


@dataclass(frozen=True)
class CorpusManifest:
    pairs: tuple[PairEntry, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def excluded(self) -> list[PairEntry]:
        return [p for p in self.pairs if p.excluded]


_PAIR_KEYS = {"id", "fixed", "buggy", "project"}


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a JSON manifest; unreadable or unparseable pairs are marked excluded."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("pairs"), list):
        raise ManifestError(f"{path}: expected an object with a 'pairs' array")
    project = doc.get("project", "")
    if not isinstance(project, str):
        raise ManifestError(f"{path}: 'project' must be text")
    base = path.parent
    seen: set[str] = set()
    entries = []
    for i, raw in enumerate(doc["pairs"]):
        if not isinstance(raw, dict) or not {"id", "fixed", "buggy"} <= raw.keys() or raw.keys() - _PAIR_KEYS:
            raise ManifestError(f"{path}: pair #{i} needs exactly id, fixed, buggy (and optionally project)")
        if not all(isinstance(raw[k], str) for k in raw):
            raise ManifestError(f"{path}: pair #{i} fields must be text")
        pid = raw["id"]
        if pid in seen:
            raise ManifestError(f"{path}: duplicate pair id {pid!r}")
        seen.add(pid)
        entries.append(_load_pair(pid, raw.get("project", project), base / raw["fixed"], base / raw["buggy"]))
    meta = {k: v for k, v in doc.items() if k not in ("pairs", "project")}
    meta["project"] = project
    return CorpusManifest(tuple(entries), meta)


def _load_pair(pid: str, project: str, fixed_path: Path, buggy_path: Path) -> PairEntry:
    sources = []
    for p in (fixed_path, buggy_path):
        try:
            text = p.read_text(encoding="utf-8")
            parse(text)
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("excluding %s: %s", pid, exc)
            return PairEntry(pid, project, fixed_path, buggy_path, excluded=True, reason=f"unreadable: {p.name}")
        except ParseError as exc:
            log.warning("excluding %s: %s: %s", pid, p.name, exc)
            return PairEntry(pid, project, fixed_path, buggy_path, excluded=True, reason=f"parse error in {p.name}: {exc}")
        sources.append(text)
    return PairEntry(pid, project, fixed_path, buggy_path, sources[0], sources[1])


def write_manifest(path: str | Path, project: str, pairs: Sequence[tuple[str, str, str]]) -> None:
    """Write ``(id, fixed, buggy)`` relative paths as a manifest file."""
    doc = {"project": project, "pairs": [{"id": i, "fixed": f, "buggy": b} for i, f, b in pairs]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# --- seeded bugs -----------------------------------------------------------


@dataclass(frozen=True)
class SeededBug:
    fixed: Ast
    buggy: Ast
    truth_path: MutationPath
    seed: int
    k: int

    def truth_dict(self) -> dict:
        return {"seed": self.seed, "k": self.k, "path": [s.to_dict() for s in self.truth_path]}


def seed_bug(fixed: Ast, k: int, seed: int, opset: OperatorSet) -> SeededBug:
    """Apply ``k`` uniformly drawn applications, never revisiting a tree.

    Candidate values for the open-ended operators come from ``fixed`` itself.
    Stops early (and reports the shorter ``k``) when every remaining
    application would recreate an earlier tree.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = random.Random(seed)
    pool = build_pool(fixed, fixed)
    current = fixed
    seen = {fixed.digest}
    steps = []
    for step in range(k):
        apps = enumerate_applications(opset, current, pool)
        if step == 0 and not apps:
            raise NoSites("no operator applies to this program")
        fresh = []
        for app in apps:
            child = apply(app, current)
            if child.digest not in seen:
                fresh.append((app, child))
        if not fresh:
            break
        app, current = rng.choice(fresh)
        seen.add(current.digest)
        steps.append(app)
    return SeededBug(fixed, current, MutationPath(tuple(steps)), seed, len(steps))


# --- corpus runs -----------------------------------------------------------


@dataclass(frozen=True)
class PairResult:
    id: str
    project: str
    opset: str
    status: str | None  # R / P / U; None when excluded
    k: int
    initial_diff: int
    remaining_diff: int
    progress: float
    operator_usage: dict[str, int]
    expansions: int
    wall_time: float = field(compare=False)
    excluded: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _excluded(entry: PairEntry, opset: str, reason: str) -> PairResult:
    return PairResult(entry.id, entry.project, opset, None, 0, 0, 0, 0.0, {}, 0, 0.0, True, reason)


def run_pair(entry: PairEntry, opset: OperatorSet, budget: SearchBudget) -> PairResult:
    if entry.excluded:
        return _excluded(entry, opset.name, entry.reason)
    try:
        result = find_mutation_path(entry.fixed, entry.buggy, opset, budget)
    except SizeLimit as exc:
        return _excluded(entry, opset.name, f"size limit: {exc}")
    counts = Counter(step.operator for step in result.path)
    usage = {op.value: counts[op] for op in OperatorName if counts[op]}
    return PairResult(
        entry.id,
        entry.project,
        opset.name,
        classify(result),
        result.k,
        result.initial_diff,
        result.remaining_diff,
        round(float(result.progress), 6),
        usage,
        result.expansions,
        result.wall_time,
    )


def _run_job(job: tuple[PairEntry, str, SearchBudget]) -> PairResult:
    entry, opset_name, budget = job
    return run_pair(entry, operator_set(opset_name), budget)


def run_corpus(manifest: CorpusManifest, opsets: OperatorSet | Sequence[OperatorSet],
               budget: SearchBudget | None = None, parallelism: int = 1) -> list[PairResult]:
    """Search every pair under every operator set; output is opset-major, manifest order."""
    if isinstance(opsets, OperatorSet):
        opsets = [opsets]
    budget = budget or SearchBudget()
    jobs = [(entry, ops.name, budget) for ops in opsets for entry in manifest.pairs]
    if parallelism <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_job, jobs))


def write_seeded_corpus(out_dir: str | Path, programs: Sequence[Ast], k: int, seed: int,
                        opset: OperatorSet, project: str = "seeded") -> list[SeededBug]:
    """Seed one bug per program and write fixed/buggy files plus manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bugs, rows = [], []
    for i, program in enumerate(programs):
        bug = seed_bug(program, k, seed + i, opset)
        pid = f"{project}-{i:03d}"
        (out / f"{pid}.fixed.mini").write_text(pretty_print(bug.fixed), encoding="utf-8")
        (out / f"{pid}.buggy.mini").write_text(pretty_print(bug.buggy), encoding="utf-8")
        rows.append((pid, f"{pid}.fixed.mini", f"{pid}.buggy.mini"))
        bugs.append(bug)
    write_manifest(out / "manifest.json", project, rows)
    return bugs
