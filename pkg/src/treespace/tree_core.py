"""Representation and split machinery for unrooted binary phylogenetic trees.

A phylogenetic tree here is an unrooted tree whose vertices all have degree
1 or 3, with a unique label on every degree-1 vertex (leaf).  Leaves are
addressed by an integer index assigned from the sorted label order, so every
bipartition of the leaf set fits in one integer bitmask.  The sorted set of
edge bitmasks is a complete fingerprint of the labelled tree: two trees on
the same leaf set are identical exactly when their split sets are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    Cyclic,
    DegreeViolation,
    Disconnected,
    DuplicateLabel,
    EmptyLabel,
    TooFewLeaves,
    TooManyLeaves,
    UnknownLeaf,
)

#: Structural cap so that one split always fits a 64-bit mask.  Closed-form
#: size functions in :mod:`treespace.metrics` are not subject to this cap.
MAX_LEAVES = 64

Edge = tuple[int, int]


def _ordered_names(names: Iterable[str]) -> tuple[str, ...]:
    """Sort labels numerically when all of them are integer literals.

    Trees generated in this package label leaves "1".."n"; numeric-aware
    ordering keeps leaf index i attached to label str(i+1) past n = 9.
    """
    names = list(names)
    try:
        return tuple(sorted(names, key=lambda s: (int(s), s)))
    except ValueError:
        return tuple(sorted(names))


@dataclass(frozen=True, order=True)
class Split:
    """A bipartition of the leaf set, induced by deleting one edge.

    ``mask`` holds the side that does not contain leaf index 0, one bit per
    leaf index.  Construction normalizes: a mask with bit 0 set is replaced
    by its complement.
    """

    mask: int
    n: int

    def __post_init__(self) -> None:
        if not 0 < self.n:
            raise ValueError("split needs a positive leaf count")
        full = (1 << self.n) - 1
        mask = self.mask
        if mask & 1:
            mask ^= full
            object.__setattr__(self, "mask", mask)
        if not 0 < mask <= full:
            raise ValueError(f"mask {self.mask:#x} is not a proper bipartition of {self.n} leaves")

    @property
    def a(self) -> int:
        """Size of the side stored in ``mask``."""
        return self.mask.bit_count()

    @property
    def b(self) -> int:
        """Size of the complementary side (the one containing leaf 0)."""
        return self.n - self.a

    @property
    def is_trivial(self) -> bool:
        return self.a == 1 or self.b == 1

    @property
    def complement_mask(self) -> int:
        return self.mask ^ ((1 << self.n) - 1)

    def side_a(self) -> tuple[int, ...]:
        """Leaf indices on the ``mask`` side."""
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def side_b(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if not self.mask >> i & 1)


@dataclass(frozen=True, order=True)
class Cluster:
    """One side of a split: a leaf subset cut off by a single edge."""

    mask: int
    n: int

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def leaf_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)


@dataclass(frozen=True)
class LeafLabel:
    """A leaf name together with its index in the sorted label order."""

    name: str
    index: int


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Order-independent fingerprint of a labelled tree.

    Holds the sorted tuple of all edge split masks plus the sorted leaf
    labels.  Equal forms mean equal labelled trees, independent of vertex
    ids and edge order.
    """

    split_masks: tuple[int, ...]
    leaf_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.leaf_names)


class PhyloTree:
    """An immutable unrooted binary tree on uniquely labelled leaves.

    Vertices are opaque integer ids supplied by the caller; only the leaf
    labels carry meaning.  All derived structure (leaf indices, per-edge
    split masks, the canonical form) is computed once and cached.  Instances
    are safe to share between threads; every mutation-like operation returns
    a new tree.
    """

    def __init__(self, adjacency: Mapping[int, Iterable[int]], leaf_names: Mapping[int, str]):
        adj: dict[int, tuple[int, ...]] = {}
        edges: set[Edge] = set()
        for v, nbrs in adjacency.items():
            nbrs = tuple(sorted(set(nbrs)))
            adj[v] = nbrs
            for w in nbrs:
                if w == v:
                    raise Cyclic(f"self-loop at vertex {v}")
                edges.add((v, w) if v < w else (w, v))
        for u, w in edges:
            if u not in adj or w not in adj[u] or u not in adj.get(w, ()):
                raise Disconnected(f"edge {u}-{w} is not symmetric in the adjacency")

        self._adj = adj
        self._edges: tuple[Edge, ...] = tuple(sorted(edges))
        self._leaf_name: dict[int, str] = dict(leaf_names)
        self._validate()

    # -- validation -----------------------------------------------------

    def _validate(self) -> None:
        adj = self._adj
        if not adj:
            raise Disconnected("tree has no vertices")
        n_vertices = len(adj)
        if len(self._edges) > n_vertices - 1:
            raise Cyclic(f"{len(self._edges)} edges on {n_vertices} vertices")
        if len(self._edges) < n_vertices - 1:
            raise Disconnected(f"{len(self._edges)} edges cannot connect {n_vertices} vertices")

        # BFS connectivity; with |E| = |V| - 1 this also certifies acyclicity.
        start = next(iter(adj))
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        if len(seen) != n_vertices:
            raise Disconnected(f"only {len(seen)} of {n_vertices} vertices reachable")

        leaves = set()
        for v, nbrs in adj.items():
            d = len(nbrs)
            if d == 0 and n_vertices == 1:
                leaves.add(v)
            elif d == 1:
                leaves.add(v)
            elif d != 3:
                raise DegreeViolation(f"vertex {v} has degree {d}")

        names = self._leaf_name
        for v in leaves:
            if v not in names:
                raise EmptyLabel(f"leaf vertex {v} has no label")
        for v, name in names.items():
            if v not in leaves:
                raise DegreeViolation(f"label {name!r} attached to internal vertex {v}")
            if not isinstance(name, str) or not name:
                raise EmptyLabel(f"leaf vertex {v} has an empty label")
        if len(set(names.values())) != len(names):
            counts: dict[str, int] = {}
            for name in names.values():
                counts[name] = counts.get(name, 0) + 1
            dup = next(name for name, c in counts.items() if c > 1)
            raise DuplicateLabel(f"label {dup!r} occurs more than once")
        if len(leaves) > MAX_LEAVES:
            raise TooManyLeaves(f"{len(leaves)} leaves exceed the cap of {MAX_LEAVES}")
        self._leaf_vertices = frozenset(leaves)

    # -- basic accessors ------------------------------------------------

    @property
    def n(self) -> int:
        """Number of leaves."""
        return len(self._leaf_vertices)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def is_leaf(self, v: int) -> bool:
        return v in self._leaf_vertices

    def leaf_name(self, v: int) -> str:
        return self._leaf_name[v]

    @cached_property
    def leaf_order(self) -> tuple[str, ...]:
        """Leaf labels in index order (index i is ``leaf_order[i]``)."""
        return _ordered_names(self._leaf_name.values())

    @cached_property
    def _index_by_name(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.leaf_order)}

    @cached_property
    def _vertex_by_index(self) -> tuple[int, ...]:
        by_name = {name: v for v, name in self._leaf_name.items()}
        return tuple(by_name[name] for name in self.leaf_order)

    @cached_property
    def _index_by_vertex(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self._vertex_by_index)}

    def leaf_index(self, name: str) -> int:
        try:
            return self._index_by_name[name]
        except KeyError:
            raise UnknownLeaf(f"no leaf labelled {name!r}") from None

    def leaf_vertex(self, index: int) -> int:
        return self._vertex_by_index[index]

    def vertex_leaf_index(self, v: int) -> int:
        """Leaf index of a leaf vertex id."""
        return self._index_by_vertex[v]

    def leaf_labels(self) -> tuple[LeafLabel, ...]:
        return tuple(LeafLabel(name, i) for i, name in enumerate(self.leaf_order))

    def leaf_set_mask(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.leaf_index(name)
        return mask

    # -- split machinery -------------------------------------------------

    @cached_property
    def _edge_below(self) -> dict[Edge, tuple[int, int]]:
        """Per edge: (vertex on the far side from leaf 0, mask of that side).

        Computed by one DFS rooted at the leaf with index 0, so no mask ever
        contains bit 0 and the masks are born normalized.
        """
        if self.n <= 1:
            return {}
        root = self._vertex_by_index[0]
        index_of = self._index_by_vertex
        adj = self._adj
        start = adj[root][0]
        parent = {start: root}
        order = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w != parent[v]:
                    parent[w] = v
                    order.append(w)
                    stack.append(w)
        mask_of: dict[int, int] = {}
        below: dict[Edge, tuple[int, int]] = {}
        for v in reversed(order):
            if v in self._leaf_vertices:
                m = 1 << index_of[v]
            else:
                m = 0
                for w in adj[v]:
                    if w != parent[v]:
                        m |= mask_of[w]
            mask_of[v] = m
            p = parent[v]
            below[(v, p) if v < p else (p, v)] = (v, m)
        return below

    @cached_property
    def split_masks(self) -> tuple[int, ...]:
        """Sorted masks of all 2n-3 splits (normalized: bit 0 never set)."""
        return tuple(sorted(m for _, m in self._edge_below.values()))

    @cached_property
    def _edge_by_mask(self) -> dict[int, Edge]:
        return {m: e for e, (_, m) in self._edge_below.items()}

    def splits(self) -> frozenset[Split]:
        """All splits of the tree, one per edge."""
        if self.n < 3:
            raise TooFewLeaves(f"splits need n >= 3, got n = {self.n}")
        return frozenset(Split(m, self.n) for m in self.split_masks)

    def edge_split(self, edge: Edge) -> Split:
        u, v = edge
        key = (u, v) if u < v else (v, u)
        return Split(self._edge_below[key][1], self.n)

    def edge_with_mask(self, mask: int) -> Edge:
        """The edge inducing the split with this normalized mask."""
        if mask & 1:
            mask ^= self.full_mask
        try:
            return self._edge_by_mask[mask]
        except KeyError:
            raise UnknownLeaf(f"no edge induces split mask {mask:#x}") from None

    def edge_far_vertex(self, edge: Edge) -> int:
        """Endpoint of ``edge`` on the side away from leaf 0."""
        u, v = edge
        key = (u, v) if u < v else (v, u)
        return self._edge_below[key][0]

    @cached_property
    def cluster_masks(self) -> frozenset[int]:
        """Both sides of every split, as plain leaf-index masks."""
        full = self.full_mask
        out = set()
        for m in self.split_masks:
            out.add(m)
            out.add(m ^ full)
        return frozenset(out)

    def clusters(self) -> frozenset[Cluster]:
        return frozenset(Cluster(m, self.n) for m in self.cluster_masks)

    def is_cherry(self, pair: Iterable[str]) -> bool:
        """True when the two named leaves form a size-2 cluster."""
        names = list(pair)
        if len(names) != 2:
            return False
        mask = self.leaf_set_mask(names)
        return mask.bit_count() == 2 and mask in self.cluster_masks

    @cached_property
    def _canonical_form(self) -> CanonicalForm:
        return CanonicalForm(self.split_masks, self.leaf_order)

    def canonical_form(self) -> CanonicalForm:
        return self._canonical_form

    # -- restriction ------------------------------------------------------

    def restrict(self, leaves: Iterable[str]) -> "PhyloTree":
        """Minimal subtree connecting ``leaves``, degree-2 vertices suppressed.

        Returns the one- or two-leaf degenerate tree for |leaves| <= 2.
        """
        keep_names = set(leaves)
        if not keep_names:
            raise TooFewLeaves("restriction needs at least one leaf")
        keep = {self._vertex_by_index[self.leaf_index(name)] for name in keep_names}

        adj: dict[int, set[int]] = {v: set(ws) for v, ws in self._adj.items()}
        # Shed leaves outside the kept set, then any chains exposed by that.
        prune = [v for v in adj if len(adj[v]) <= 1 and v not in keep]
        while prune:
            v = prune.pop()
            for w in adj.pop(v):
                adj[w].discard(v)
                if len(adj[w]) <= 1 and w not in keep:
                    prune.append(w)
        # Splice out degree-2 vertices (kept leaves never have degree 2).
        for v in [v for v, ws in adj.items() if len(ws) == 2]:
            a, b = adj.pop(v)
            adj[a].discard(v)
            adj[b].discard(v)
            adj[a].add(b)
            adj[b].add(a)
        names = {v: self._leaf_name[v] for v in keep}
        return PhyloTree(adj, names)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return self._canonical_form == other._canonical_form

    def __hash__(self) -> int:
        return hash(self._canonical_form)

    def __repr__(self) -> str:
        return f"PhyloTree(n={self.n}, leaves={list(self.leaf_order)!r})"


def build_tree(
    edges: Iterable[Edge],
    leaf_names: Mapping[int, str] | Iterable[tuple[int, str]] | Iterable[str],
) -> PhyloTree:
    """Build and validate a tree from an edge list.

    ``leaf_names`` may be a mapping from leaf vertex id to label, an iterable
    of (vertex, label) pairs, or a plain iterable of labels which are then
    assigned to the degree-1 vertices in ascending vertex order.
    """
    adjacency: dict[int, set[int]] = {}
    for u, v in edges:
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)

    names: dict[int, str]
    if isinstance(leaf_names, Mapping):
        names = dict(leaf_names)
    else:
        items = list(leaf_names)
        if items and isinstance(items[0], str):
            degree_one = sorted(v for v, ws in adjacency.items() if len(ws) == 1)
            if not adjacency and len(items) == 1:
                # A single isolated leaf has no edges; vertex id 0.
                return PhyloTree({0: ()}, {0: items[0]})
            if len(items) != len(degree_one):
                raise EmptyLabel(
                    f"{len(items)} labels supplied for {len(degree_one)} leaf vertices"
                )
            names = dict(zip(degree_one, items))
        else:
            names = {v: name for v, name in items}

    if not adjacency:
        if len(names) == 1:
            ((v, name),) = names.items()
            return PhyloTree({v: ()}, {v: name})
        raise Disconnected("no edges and not a single-leaf tree")
    return PhyloTree(adjacency, names)


def splits(tree: PhyloTree) -> frozenset[Split]:
    return tree.splits()


def canonical_form(tree: PhyloTree) -> CanonicalForm:
    return tree.canonical_form()


def restrict(tree: PhyloTree, leaves: Iterable[str]) -> PhyloTree:
    return tree.restrict(leaves)


def clusters(tree: PhyloTree) -> frozenset[Cluster]:
    return tree.clusters()


def is_cherry(tree: PhyloTree, pair: Iterable[str]) -> bool:
    return tree.is_cherry(pair)


def require_leaves(tree_or_n: "PhyloTree | int", minimum: int = 4) -> int:
    """Return the leaf count, raising TooFewLeaves below ``minimum``."""
    n = tree_or_n.n if isinstance(tree_or_n, PhyloTree) else int(tree_or_n)
    if n < minimum:
        raise TooFewLeaves(f"need at least {minimum} leaves, got {n}")
    return n
