"""Independent reference implementations used to freeze expected values.

Nothing here imports the distance or search code under test.
"""

from __future__ import annotations

import random

from mutapath.minilang import Node, NodeKind


def _flatten(root: Node) -> tuple[list[Node], list[frozenset[int]]]:
    """Preorder node list plus, for each node, the set of its ancestors' indices."""
    nodes: list[Node] = []
    ancestors: list[frozenset[int]] = []

    def visit(node: Node, above: frozenset[int]) -> None:
        me = len(nodes)
        nodes.append(node)
        ancestors.append(above)
        for child in node.children:
            visit(child, above | {me})

    visit(root, frozenset())
    return nodes, ancestors


def brute_force_distance(a: Node, b: Node) -> int:
    """Minimum edit cost over every valid ordered mapping between ``a`` and ``b``.

    A mapping is a partial matching of nodes that keeps ancestry and
    left-to-right order; each unmapped node costs one insert or delete and
    each mapped pair with different labels costs one relabel. Only nodes of
    the same kind may be mapped. Every such mapping is enumerated.
    """
    na, anc_a = _flatten(a)
    nb, anc_b = _flatten(b)
    best = len(na) + len(nb)

    def extend(i: int, pairs: list[tuple[int, int]], relabels: int) -> None:
        nonlocal best
        if i == len(na):
            cost = len(na) + len(nb) - 2 * len(pairs) + relabels
            best = min(best, cost)
            return
        extend(i + 1, pairs, relabels)
        lo = pairs[-1][1] + 1 if pairs else 0
        for j in range(lo, len(nb)):
            if na[i].kind != nb[j].kind:
                continue
            # i comes after every mapped i2 in preorder, so i2 is either an
            # ancestor of i or entirely to its left; j must relate to j2 alike.
            if all((i2 in anc_a[i]) == (j2 in anc_b[j]) for i2, j2 in pairs):
                pairs.append((i, j))
                extend(i + 1, pairs, relabels + (na[i].label != nb[j].label))
                pairs.pop()

    extend(0, [], 0)
    return best


_KINDS = (NodeKind.BINARY_EXPR, NodeKind.IDENTIFIER, NodeKind.LITERAL, NodeKind.BLOCK)
_LABELS = ("", "a", "b", "+")


def random_tree(rng: random.Random, max_nodes: int = 8) -> Node:
    """A random ordered labeled tree (not necessarily valid MiniLang) of 1..max_nodes nodes."""
    target = rng.randint(1, max_nodes)

    def grow(budget: int) -> Node:
        # budget >= 1 nodes for this subtree, itself included
        kind = rng.choice(_KINDS)
        label = rng.choice(_LABELS)
        children = []
        left = budget - 1
        while left > 0:
            take = rng.randint(1, left)
            children.append(grow(take))
            left -= take
        return Node(kind, label, children)

    return grow(target)
