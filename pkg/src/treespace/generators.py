"""Constructors for named tree families and exhaustive enumeration of T_n.

All generators label leaves "1".."n" left to right, so leaf index i carries
label str(i+1).  Leaf vertices get ids 0..n-1 and internal vertices n and up,
purely for reproducibility; nothing downstream depends on the ids.
"""

from __future__ import annotations

import enum
import random
from typing import Iterator

from .errors import RangeError, TooManyLeaves
from .metrics import perfect_form
from .tree_core import MAX_LEAVES, Edge, PhyloTree, build_tree, require_leaves


class TreeFamily(enum.Enum):
    CATERPILLAR = "caterpillar"
    COMPLETE = "complete"
    PERFECT = "perfect"
    RANDOM = "random"


def _names(n: int) -> dict[int, str]:
    return {i: str(i + 1) for i in range(n)}


def _check_cap(n: int) -> None:
    if n > MAX_LEAVES:
        raise TooManyLeaves(f"tree construction is capped at {MAX_LEAVES} leaves, got {n}")


def caterpillar(n: int) -> PhyloTree:
    """The spine tree: internal vertices in a path, every one holding a leaf.

    Leaves attach in label order, giving cherries {1,2} and {n-1,n}.
    """
    require_leaves(n)
    _check_cap(n)
    spine = [n + j for j in range(n - 2)]
    edges: list[Edge] = [(0, spine[0]), (1, spine[0])]
    for i in range(2, n - 2):
        edges.append((i, spine[i - 1]))
    edges.extend([(n - 2, spine[-1]), (n - 1, spine[-1])])
    edges.extend((spine[j], spine[j + 1]) for j in range(n - 3))
    return build_tree(edges, _names(n))


class _Builder:
    """Accumulates edges while handing out fresh internal vertex ids."""

    def __init__(self, n: int):
        self.edges: list[Edge] = []
        self.next_id = n

    def fresh(self) -> int:
        v = self.next_id
        self.next_id += 1
        return v

    def balanced(self, leaves: list[int]) -> int:
        """Perfectly balanced rooted subtree; len(leaves) must be a power of 2."""
        if len(leaves) == 1:
            return leaves[0]
        root = self.fresh()
        mid = len(leaves) // 2
        self.edges.append((root, self.balanced(leaves[:mid])))
        self.edges.append((root, self.balanced(leaves[mid:])))
        return root

    def complete_rooted(self, leaves: list[int]) -> int:
        """Maximally balanced rooted subtree on an arbitrary leaf count.

        For m >= 3 the root splits off a perfectly balanced block of 2^j
        leaves, where j is the unique index with 3*2^(j-1) <= m < 3*2^j,
        and recurses on the remainder.
        """
        m = len(leaves)
        if m == 1:
            return leaves[0]
        if m == 2:
            root = self.fresh()
            self.edges.append((root, leaves[0]))
            self.edges.append((root, leaves[1]))
            return root
        j = (m // 3).bit_length()
        block = 1 << j
        root = self.fresh()
        self.edges.append((root, self.balanced(leaves[:block])))
        self.edges.append((root, self.complete_rooted(leaves[block:])))
        return root


def complete(n: int) -> PhyloTree:
    """The maximally balanced tree on n leaves.

    With k such that 3*2^k <= n < 3*2^(k+1), a perfectly balanced subtree on
    2^(k+1) leaves is joined by a bridge edge to the recursively built
    remainder; every cluster then splits into a power-of-two part and a
    near-balanced part.
    """
    require_leaves(n)
    _check_cap(n)
    b = _Builder(n)
    k = (n // 3).bit_length() - 1
    half = 1 << (k + 1)
    left = b.balanced(list(range(half)))
    right = b.complete_rooted(list(range(half, n)))
    b.edges.append((left, right))
    return build_tree(b.edges, _names(n))


def perfect(n: int) -> PhyloTree:
    """The fully balanced tree; exists only for n = 2^k or n = 3*2^(k-1).

    n = 2^k gives two-fold symmetry about a central edge, n = 3*2^(k-1)
    three-fold symmetry about a central vertex.
    """
    form, k = perfect_form(n)
    _check_cap(n)
    b = _Builder(n)
    if form == "two_fold":
        left = b.balanced(list(range(n // 2)))
        right = b.balanced(list(range(n // 2, n)))
        b.edges.append((left, right))
    else:
        center = b.fresh()
        third = n // 3
        for i in range(3):
            b.edges.append((center, b.balanced(list(range(i * third, (i + 1) * third)))))
    return build_tree(b.edges, _names(n))


def random_tree(n: int, seed: int) -> PhyloTree:
    """A uniform draw from T_n, deterministic per seed.

    Grown by sequential insertion: leaf i+1 subdivides an edge chosen
    uniformly among the 2i-3 edges of the current i-leaf tree, which makes
    every labelled topology equally likely.
    """
    require_leaves(n)
    _check_cap(n)
    rng = random.Random(seed)
    edges = [(0, n), (1, n), (2, n)]
    for leaf in range(3, n):
        u, v = edges.pop(rng.randrange(len(edges)))
        w = n + leaf - 2
        edges.extend([(u, w), (w, v), (w, leaf)])
    return build_tree(edges, _names(n))


def all_trees(n: int) -> Iterator[PhyloTree]:
    """Every labelled topology on n leaves exactly once; (2n-5)!! trees.

    The same insertion recursion as random_tree, enumerated exhaustively in
    a fixed order.  Capped at n = 9 (135135 trees).
    """
    if not 4 <= n <= 9:
        raise RangeError(f"exhaustive enumeration supports 4 <= n <= 9, got {n}")
    names = _names(n)

    def grow(edges: list[Edge], leaf: int) -> Iterator[PhyloTree]:
        if leaf == n:
            yield build_tree(edges, names)
            return
        w = n + leaf - 2
        for i in range(len(edges)):
            u, v = edges[i]
            rest = edges[:i] + edges[i + 1 :] + [(u, w), (w, v), (w, leaf)]
            yield from grow(rest, leaf + 1)

    yield from grow([(0, n), (1, n), (2, n)], 3)


def tree_count(n: int) -> int:
    """|T_n| = (2n-5)!! for n >= 3."""
    count = 1
    for i in range(3, 2 * n - 4, 2):
        count *= i
    return count


def generate(family: TreeFamily | str, n: int, seed: int | None = None) -> PhyloTree:
    """Dispatch helper used by the command-line interface."""
    family = TreeFamily(family)
    if family is TreeFamily.CATERPILLAR:
        return caterpillar(n)
    if family is TreeFamily.COMPLETE:
        return complete(n)
    if family is TreeFamily.PERFECT:
        return perfect(n)
    return random_tree(n, 0 if seed is None else seed)
