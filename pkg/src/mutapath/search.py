"""Best-first (A*) search for a shortest mutation path between two ASTs.

States are ASTs, edges are mutation applications, every edge costs 1, and the
remaining cost is estimated by the tree edit distance to the target. Because a
single mutation can delete or replace a whole subtree, that estimate is not
admissible in general; ``SearchBudget.heuristic_scale`` divides it down when a
provably shortest path is needed.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .minilang.nodes import Ast, NodeKind
from .mutops import (
    MutationApplication,
    OperatorSet,
    apply,
    build_pool,
    enumerate_applications,
    touched_size,
)
from .treediff import DistanceTo, tree_distance


class Status(str, Enum):
    FULL = "Full"
    PARTIAL = "Partial"
    UNREPRODUCIBLE = "Unreproducible"

    def __str__(self) -> str:
        return self.value


class Exhausted(Exception):
    """The breadth-first oracle visited more states than its cap allows."""


@dataclass(frozen=True)
class MutationPath:
    steps: tuple[MutationApplication, ...] = ()

    @property
    def order(self) -> int:
        return len(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def replay(self, start: Ast) -> Ast:
        ast = start
        for step in self.steps:
            ast = apply(step, ast)
        return ast


@dataclass(frozen=True)
class SearchBudget:
    max_expansions: int = 50_000
    max_frontier: int = 200_000
    time_limit: float = 60.0
    heuristic_scale: Fraction = Fraction(1)
    # stop after this many expansions without a new best-h node (None: never)
    stall_limit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "heuristic_scale", Fraction(self.heuristic_scale))
        if min(self.max_expansions, self.max_frontier) <= 0 or self.time_limit <= 0 or self.heuristic_scale <= 0:
            raise ValueError("search budget values must be positive")
        if self.stall_limit is not None and self.stall_limit <= 0:
            raise ValueError("stall_limit must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: Status
    path: MutationPath
    initial_diff: int
    remaining_diff: int
    progress: Fraction
    expansions: int
    wall_time: float = field(compare=False)

    @property
    def k(self) -> int:
        return len(self.path)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "k": self.k,
            "path": [step.to_dict() for step in self.path],
            "initial_diff": self.initial_diff,
            "remaining_diff": self.remaining_diff,
            "progress": float(self.progress),
            "expansions": self.expansions,
            "wall_time": self.wall_time,
        }


def classify(result: SearchResult) -> str:
    """Map a search outcome to the R / P / U bucket."""
    return {Status.FULL: "R", Status.PARTIAL: "P", Status.UNREPRODUCIBLE: "U"}[result.status]


def _scaled(h: int, scale: Fraction) -> int:
    if scale == 1:
        return h
    return math.ceil(Fraction(h) / scale)


def find_mutation_path(fixed: Ast, buggy: Ast, opset: OperatorSet,
                       budget: SearchBudget | None = None) -> SearchResult:
    """A* from ``fixed`` towards ``buggy``.

    The open list is ordered by ``g + ceil(h / heuristic_scale)``, then by
    smaller ``h``, then by insertion order. The node with the smallest ``h``
    seen so far (ties: smaller ``g``) is kept as the partial answer when the
    budget or the frontier runs out, or when ``budget.stall_limit`` expansions
    pass without that node improving.
    """
    budget = budget or SearchBudget()
    started = time.perf_counter()
    distance = DistanceTo(buggy)
    d0 = distance(fixed)
    if d0 == 0:
        return SearchResult(Status.FULL, MutationPath(), 0, 0, Fraction(1), 0, time.perf_counter() - started)

    pool = build_pool(fixed, buggy)
    scale = budget.heuristic_scale
    counter = itertools.count()

    # parents[id] = (parent id, application); the start has id 0
    states: list[Ast] = [fixed]
    parents: list[tuple[int, MutationApplication | None]] = [(-1, None)]
    g_of: list[int] = [0]
    h_of: list[int] = [d0]
    best_g: dict[bytes, int] = {fixed.digest: 0}
    open_heap: list[tuple[int, int, int, int]] = [(_scaled(d0, scale), d0, next(counter), 0)]
    best = 0
    expansions = 0
    improved_at = 0
    stall = budget.stall_limit
    goal = None

    while open_heap:
        if expansions >= budget.max_expansions or len(open_heap) > budget.max_frontier:
            break
        if stall is not None and expansions - improved_at >= stall:
            break
        if time.perf_counter() - started > budget.time_limit:
            break
        _, h, _, sid = heapq.heappop(open_heap)
        ast = states[sid]
        g = g_of[sid]
        if best_g.get(ast.digest, g) < g:
            continue  # superseded by a cheaper rediscovery
        if h == 0:
            goal = sid
            break
        expansions += 1
        for app in enumerate_applications(opset, ast, pool):
            child = apply(app, ast)
            digest = child.digest
            cg = g + 1
            seen = best_g.get(digest)
            if seen is not None and seen <= cg:
                continue
            best_g[digest] = cg
            ch = distance(child)
            cid = len(states)
            states.append(child)
            parents.append((sid, app))
            g_of.append(cg)
            h_of.append(ch)
            heapq.heappush(open_heap, (cg + _scaled(ch, scale), ch, next(counter), cid))
            if (ch, cg) < (h_of[best], g_of[best]):
                if ch < h_of[best]:
                    improved_at = expansions
                best = cid

    end = goal if goal is not None else best
    path = _trace(parents, end)
    remaining = h_of[end]
    elapsed = time.perf_counter() - started
    if remaining == 0:
        status = Status.FULL
    elif remaining < d0:
        status = Status.PARTIAL
    else:
        status, path, remaining = Status.UNREPRODUCIBLE, MutationPath(), d0
    progress = Fraction(d0 - remaining, d0)
    return SearchResult(status, path, d0, remaining, progress, expansions, elapsed)


def _trace(parents: list[tuple[int, MutationApplication | None]], sid: int) -> MutationPath:
    steps = []
    while sid > 0:
        sid, app = parents[sid]
        steps.append(app)
    return MutationPath(tuple(reversed(steps)))


def bfs_oracle(fixed: Ast, buggy: Ast, opset: OperatorSet, max_depth: int,
               state_cap: int = 2_000_000) -> int | None:
    """Exact shortest path length by exhaustive breadth-first enumeration.

    Returns None when no path of length ``<= max_depth`` exists; raises
    Exhausted once more than ``state_cap`` distinct states have been seen.
    """
    target = buggy.digest
    if fixed.digest == target:
        return 0
    pool = build_pool(fixed, buggy)
    seen = {fixed.digest}
    frontier = deque([fixed])
    for depth in range(1, max_depth + 1):
        nxt: deque[Ast] = deque()
        for ast in frontier:
            for app in enumerate_applications(opset, ast, pool):
                child = apply(app, ast)
                d = child.digest
                if d == target:
                    return depth
                if d in seen:
                    continue
                seen.add(d)
                if len(seen) > state_cap:
                    raise Exhausted(f"more than {state_cap} states within depth {depth}")
                if depth < max_depth:
                    nxt.append(child)
        frontier = nxt
    return None


def admissible_scale(fixed: Ast, buggy: Ast, opset: OperatorSet, max_depth: int) -> int:
    """A heuristic scale under which ``ceil(h / scale)`` never overestimates.

    One application moves the edit distance by at most its touched size. The
    subtrees an operator can remove or replace are calls, call statements and
    return values; a rename can make any call replaceable later, so all of
    them count. Only negation wraps grow a tree, one node per step, hence the
    ``max_depth`` slack.
    """
    pool = build_pool(fixed, buggy)
    largest = max((touched_size(a, fixed) for a in enumerate_applications(opset, fixed, pool)), default=1)
    for path, node in fixed.walk():
        if node.kind in (NodeKind.CALL, NodeKind.EXPR_STMT) or node.kind is NodeKind.RETURN and node.children:
            largest = max(largest, node.size + 1)
    return largest + max_depth


def path_diff(fixed: Ast, buggy: Ast, path: MutationPath) -> int:
    """Distance from the end of ``path`` (replayed on ``fixed``) to ``buggy``."""
    return tree_distance(path.replay(fixed), buggy)
