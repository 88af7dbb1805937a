"""Ordered labeled tree edit distance (Zhang-Shasha) with edit-script recovery.

Unit costs for insert, delete and relabel. A relabel is only possible between
nodes of the same kind; nodes of different kinds cost a delete plus an insert.
Moves are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .minilang.nodes import Ast, Node, NodeKind

DEFAULT_SIZE_LIMIT = 4_000_000
# below this many node pairs the interpreted kernel beats JIT dispatch
JIT_MIN_PAIRS = 256


class SizeLimit(Exception):
    """The node-pair product of two trees exceeds the configured bound."""


class InvalidScript(Exception):
    """An edit script addresses a node that does not exist."""


@dataclass(frozen=True)
class EditOp:
    """One unit edit.

    ``site`` addresses a node in the forest being edited: ``site[0]`` picks the
    top-level tree (0 for an ordinary single-rooted tree) and the rest are
    child indices. ``Insert`` places a new node at ``site`` that adopts the
    ``adopt`` consecutive siblings currently starting at that position;
    ``Delete`` splices the node's children into its place.
    """

    kind: str  # "Insert" | "Delete" | "Relabel"
    site: tuple[int, ...]
    node_kind: str = ""
    label: str = ""
    adopt: int = 0

    def to_dict(self) -> dict:
        out = {"op": self.kind, "site": list(self.site)}
        if self.kind == "Insert":
            out.update(node_kind=self.node_kind, label=self.label, adopt=self.adopt)
        elif self.kind == "Relabel":
            out.update(label=self.label)
        return out


@dataclass(frozen=True)
class DiffResult:
    distance: int
    script: tuple[EditOp, ...] | None = field(default=None, compare=False)


# Interned ids; never shrink, shared by every tree in the process.
_LABEL_IDS: dict[tuple[NodeKind, str], int] = {}
_KIND_IDS: dict[NodeKind, int] = {k: i for i, k in enumerate(NodeKind)}


def _label_id(kind: NodeKind, label: str) -> int:
    key = (kind, label)
    lid = _LABEL_IDS.get(key)
    if lid is None:
        lid = _LABEL_IDS[key] = len(_LABEL_IDS)
    return lid


class _Postorder:
    """Flat postorder view of a tree: labels, kinds, leftmost leaves, keyroots."""

    __slots__ = ("nodes", "labels", "kinds", "lml", "keyroots", "parent")

    def __init__(self, root: Node):
        nodes: list[Node] = []
        lml: list[int] = []
        parent: list[int] = []
        self._build(root, nodes, lml, parent)
        self.nodes = nodes
        self.lml = np.asarray(lml, dtype=np.int64)
        self.labels = np.fromiter((_label_id(n.kind, n.label) for n in nodes), dtype=np.int64, count=len(nodes))
        self.kinds = np.fromiter((_KIND_IDS[n.kind] for n in nodes), dtype=np.int64, count=len(nodes))
        last_for_leaf: dict[int, int] = {}
        for i, leaf in enumerate(lml):
            last_for_leaf[leaf] = i
        self.keyroots = np.asarray(sorted(last_for_leaf.values()), dtype=np.int64)
        self.parent = parent

    @staticmethod
    def _build(root: Node, nodes: list, lml: list, parent: list) -> None:
        # frame: [node, next child index]; child_slots collects finished child indices
        frames = [[root, 0]]
        child_slots: list[list[int]] = [[]]
        while frames:
            frame = frames[-1]
            node, ci = frame
            if ci < len(node.children):
                frame[1] += 1
                frames.append([node.children[ci], 0])
                child_slots.append([])
                continue
            frames.pop()
            kids = child_slots.pop()
            idx = len(nodes)
            nodes.append(node)
            lml.append(lml[kids[0]] if kids else idx)
            parent.append(-1)
            for k in kids:
                parent[k] = idx
            if child_slots:
                child_slots[-1].append(idx)

    def __len__(self) -> int:
        return len(self.nodes)


def _zs_core(l1, lab1, kind1, kr1, l2, lab2, kind2, kr2, td):
    n1 = l1.shape[0]
    n2 = l2.shape[0]
    fd = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    for a in range(kr1.shape[0]):
        i = kr1[a]
        li = l1[i]
        m = i - li + 2
        for b in range(kr2.shape[0]):
            j = kr2[b]
            lj = l2[j]
            n = j - lj + 2
            fd[0, 0] = 0
            for x in range(1, m):
                fd[x, 0] = fd[x - 1, 0] + 1
            for y in range(1, n):
                fd[0, y] = fd[0, y - 1] + 1
            for x in range(1, m):
                ix = li + x - 1
                lix = l1[ix]
                for y in range(1, n):
                    jy = lj + y - 1
                    ljy = l2[jy]
                    best = fd[x - 1, y] + 1
                    ins = fd[x, y - 1] + 1
                    if ins < best:
                        best = ins
                    if lix == li and ljy == lj:
                        if lab1[ix] == lab2[jy]:
                            c = 0
                        elif kind1[ix] == kind2[jy]:
                            c = 1
                        else:
                            c = 2
                        sub = fd[x - 1, y - 1] + c
                        if sub < best:
                            best = sub
                        fd[x, y] = best
                        td[ix, jy] = best
                    else:
                        sub = fd[lix - li, ljy - lj] + td[ix, jy]
                        if sub < best:
                            best = sub
                        fd[x, y] = best
    return td[n1 - 1, n2 - 1]


_jitted = None


def _kernel(pairs: int):
    """The DP kernel to use for a problem of ``pairs`` node pairs.

    numba is imported and the kernel compiled (or loaded from its cache) on
    first use, so small inputs never pay for it.
    """
    global _jitted
    if pairs < JIT_MIN_PAIRS:
        return _zs_core
    if _jitted is None:
        try:
            from numba import njit
        except ImportError:  # pragma: no cover
            _jitted = _zs_core
        else:
            _jitted = njit(cache=True, nogil=True)(_zs_core)
    return _jitted


def _check_limit(n1: int, n2: int, limit: int) -> None:
    if n1 * n2 > limit:
        raise SizeLimit(f"tree sizes {n1} x {n2} exceed the node-pair limit {limit}")


def _root(tree: Ast | Node) -> Node:
    return tree.root if isinstance(tree, Ast) else tree


def tree_distance(a: Ast | Node, b: Ast | Node, size_limit: int = DEFAULT_SIZE_LIMIT) -> int:
    """Edit distance only; no script."""
    ra, rb = _root(a), _root(b)
    if ra.digest == rb.digest:
        return 0
    _check_limit(ra.size, rb.size, size_limit)
    pa, pb = _Postorder(ra), _Postorder(rb)
    td = np.zeros((len(pa), len(pb)), dtype=np.int64)
    core = _kernel(len(pa) * len(pb))
    return int(core(pa.lml, pa.labels, pa.kinds, pa.keyroots, pb.lml, pb.labels, pb.kinds, pb.keyroots, td))


class DistanceTo:
    """Distance from many trees to one fixed target, memoized by digest."""

    def __init__(self, target: Ast | Node, size_limit: int = DEFAULT_SIZE_LIMIT):
        self.target = _root(target)
        self.size_limit = size_limit
        self._post = _Postorder(self.target)
        self._cache: dict[bytes, int] = {self.target.digest: 0}

    def __call__(self, tree: Ast | Node) -> int:
        root = _root(tree)
        hit = self._cache.get(root.digest)
        if hit is not None:
            return hit
        _check_limit(root.size, self.target.size, self.size_limit)
        pa, pb = _Postorder(root), self._post
        td = np.zeros((len(pa), len(pb)), dtype=np.int64)
        core = _kernel(len(pa) * len(pb))
        d = int(core(pa.lml, pa.labels, pa.kinds, pa.keyroots, pb.lml, pb.labels, pb.kinds, pb.keyroots, td))
        self._cache[root.digest] = d
        return d


# --- mapping recovery (pure Python; only used when a script is requested) ---


def _cost(pa: _Postorder, i: int, pb: _Postorder, j: int) -> int:
    if pa.labels[i] == pb.labels[j]:
        return 0
    return 1 if pa.kinds[i] == pb.kinds[j] else 2


def _mapping(pa: _Postorder, pb: _Postorder) -> tuple[int, list[tuple[int, int]]]:
    n1, n2 = len(pa), len(pb)
    td = np.zeros((n1, n2), dtype=np.int64)
    dist = int(_kernel(len(pa) * len(pb))(pa.lml, pa.labels, pa.kinds, pa.keyroots, pb.lml, pb.labels, pb.kinds, pb.keyroots, td))
    l1, l2 = pa.lml, pb.lml

    def forest(i: int, j: int) -> np.ndarray:
        li, lj = l1[i], l2[j]
        m, n = i - li + 2, j - lj + 2
        fd = np.zeros((m, n), dtype=np.int64)
        fd[:, 0] = np.arange(m)
        fd[0, :] = np.arange(n)
        for x in range(1, m):
            ix = li + x - 1
            for y in range(1, n):
                jy = lj + y - 1
                best = min(fd[x - 1, y] + 1, fd[x, y - 1] + 1)
                if l1[ix] == li and l2[jy] == lj:
                    best = min(best, fd[x - 1, y - 1] + _cost(pa, ix, pb, jy))
                else:
                    best = min(best, fd[l1[ix] - li, l2[jy] - lj] + td[ix, jy])
                fd[x, y] = best
        return fd

    pairs: list[tuple[int, int]] = []
    stack = [(n1 - 1, n2 - 1)]
    while stack:
        i, j = stack.pop()
        li, lj = l1[i], l2[j]
        fd = forest(i, j)
        x, y = i, j
        while x >= li or y >= lj:
            fx, fy = x - li + 1, y - lj + 1
            if x < li:
                y -= 1
            elif y < lj:
                x -= 1
            elif fd[fx, fy] == fd[fx - 1, fy] + 1:
                x -= 1
            elif fd[fx, fy] == fd[fx, fy - 1] + 1:
                y -= 1
            elif l1[x] == li and l2[y] == lj:
                pairs.append((x, y))
                x -= 1
                y -= 1
            else:
                stack.append((x, y))
                x, y = l1[x] - 1, l2[y] - 1
    return dist, pairs


class _MNode:
    __slots__ = ("kind", "label", "children", "tag")

    def __init__(self, kind: NodeKind, label: str, children: list, tag):
        self.kind = kind
        self.label = label
        self.children = children
        self.tag = tag


def _to_mutable(root: Node) -> _MNode:
    return _MNode(root.kind, root.label, [_to_mutable(c) for c in root.children], None)


def _freeze(m: _MNode) -> Node:
    return Node(m.kind, m.label, [_freeze(c) for c in m.children])


def _locate(forest: list[_MNode], tag) -> tuple[tuple[int, ...], list[_MNode], int]:
    stack = [((i,), forest, i) for i in range(len(forest) - 1, -1, -1)]
    while stack:
        path, container, idx = stack.pop()
        node = container[idx]
        if node.tag == tag:
            return path, container, idx
        for k in range(len(node.children) - 1, -1, -1):
            stack.append((path + (k,), node.children, k))
    raise KeyError(tag)


def _script(pa: _Postorder, pb: _Postorder, pairs: list[tuple[int, int]]) -> list[EditOp]:
    # Kind-mismatched pairs cost the same as unmapping both nodes.
    mapping = {i: j for i, j in pairs if pa.kinds[i] == pb.kinds[j]}

    n1 = len(pa)
    mnodes = [_MNode(n.kind, n.label, [], ("a", i)) for i, n in enumerate(pa.nodes)]
    roots_a = []
    for i in range(n1):
        p = pa.parent[i]
        if p < 0:
            roots_a.append(mnodes[i])
        else:
            mnodes[p].children.append(mnodes[i])
    forest = roots_a
    ops: list[EditOp] = []

    for i, j in sorted(mapping.items()):
        new_label = pb.nodes[j].label
        if pa.nodes[i].label != new_label:
            path, container, idx = _locate(forest, ("a", i))
            ops.append(EditOp("Relabel", path, label=new_label))
            container[idx].label = new_label

    # reverse preorder keeps earlier paths valid while deleting
    pre_a = _preorder_ranks(pa)
    for i in sorted((i for i in range(n1) if i not in mapping), key=lambda k: -pre_a[k]):
        path, container, idx = _locate(forest, ("a", i))
        ops.append(EditOp("Delete", path))
        node = container[idx]
        container[idx:idx + 1] = node.children

    # retag surviving nodes with their b counterparts
    stack = list(forest)
    while stack:
        node = stack.pop()
        node.tag = ("b", mapping[node.tag[1]])
        stack.extend(node.children)

    pre_b = _preorder_ranks(pb)
    n2 = len(pb)
    mapped_b = set(mapping.values())
    for j in sorted((j for j in range(n2) if j not in mapped_b), key=lambda k: pre_b[k]):
        p = pb.parent[j]
        if p < 0:
            container, base = forest, ()
        else:
            path, pcont, pidx = _locate(forest, ("b", p))
            container, base = pcont[pidx].children, path
        lo, hi = pb.lml[j], j  # postorder span of j's subtree
        start = None
        count = 0
        before = 0
        for k, node in enumerate(container):
            jb = node.tag[1]
            if lo <= jb <= hi:
                if start is None:
                    start = k
                count += 1
            elif pre_b[jb] < pre_b[j]:
                before += 1
        at = start if start is not None else before
        nb = pb.nodes[j]
        ops.append(EditOp("Insert", base + (at,), node_kind=nb.kind.value, label=nb.label, adopt=count))
        new = _MNode(nb.kind, nb.label, container[at:at + count], ("b", j))
        container[at:at + count] = [new]
    return ops


def _preorder_ranks(p: _Postorder) -> list[int]:
    ranks = [0] * len(p)
    children: list[list[int]] = [[] for _ in range(len(p))]
    roots = []
    for i, par in enumerate(p.parent):
        (roots if par < 0 else children[par]).append(i)
    stack = list(reversed(roots))
    r = 0
    while stack:
        i = stack.pop()
        ranks[i] = r
        r += 1
        stack.extend(reversed(children[i]))
    return ranks


def ast_diff(a: Ast | Node, b: Ast | Node, with_script: bool = False,
             size_limit: int = DEFAULT_SIZE_LIMIT) -> DiffResult:
    """Minimum unit-cost edit distance between two ordered labeled trees.

    Raises SizeLimit when ``|a| * |b|`` exceeds ``size_limit``.
    """
    ra, rb = _root(a), _root(b)
    _check_limit(ra.size, rb.size, size_limit)
    if not with_script:
        return DiffResult(tree_distance(ra, rb, size_limit))
    pa, pb = _Postorder(ra), _Postorder(rb)
    dist, pairs = _mapping(pa, pb)
    script = tuple(_script(pa, pb, pairs))
    assert len(script) == dist, (len(script), dist)
    return DiffResult(dist, script)


def replay(script: Sequence[EditOp], a: Ast | Node) -> Ast | Node:
    """Apply an edit script to ``a``; returns the same type that was passed in."""
    forest = [_to_mutable(_root(a))]
    for op in script:
        if not op.site:
            raise InvalidScript(f"empty site in {op}")
        container = forest
        for idx in op.site[:-1]:
            if not 0 <= idx < len(container):
                raise InvalidScript(f"unreachable site {op.site}")
            container = container[idx].children
        last = op.site[-1]
        if op.kind == "Insert":
            if not 0 <= last <= len(container) or last + op.adopt > len(container) or op.adopt < 0:
                raise InvalidScript(f"unreachable site {op.site}")
            new = _MNode(NodeKind(op.node_kind), op.label, container[last:last + op.adopt], None)
            container[last:last + op.adopt] = [new]
            continue
        if not 0 <= last < len(container):
            raise InvalidScript(f"unreachable site {op.site}")
        if op.kind == "Delete":
            container[last:last + 1] = container[last].children
        elif op.kind == "Relabel":
            container[last].label = op.label
        else:
            raise InvalidScript(f"unknown edit {op.kind}")
    if len(forest) != 1:
        raise InvalidScript(f"script leaves {len(forest)} top-level trees")
    out = _freeze(forest[0])
    return Ast(out) if isinstance(a, Ast) else out
