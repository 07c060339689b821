"""Explicit enumeration, application, and classification of tree rearrangements.

A TBR (tree bisection and reconnection) operation deletes one edge and joins
the two resulting components with a new edge, attached at an arbitrary edge
of each component.  Deleting the edge leaves a degree-2 vertex in a component
of two or more leaves; suppressing it merges two edges into that component's
*scar edge*.  Reconnecting a component at its scar restores its original
attachment point, so:

* the pair (scar, scar) reproduces the input tree and is excluded,
* an operation is SPR (subtree prune and regraft) exactly when at least one
  component reconnects at its scar (a single-leaf component, which offers no
  choice, counts as reconnected at its scar),
* an operation is NNI (nearest neighbour interchange) when it is SPR and the
  other component reconnects at an edge incident to that component's scar:
  the moved subtree swaps places with a subtree adjacent to where it stood.

Every operation is addressed by the split of the bisected edge plus one
partial split per component (the bipartition its reconnection edge induces
inside the component), which makes operations serializable and independent
of internal vertex ids.

Enumeration is the brute-force oracle used to verify every closed-form count
in :mod:`treespace.metrics`, so it never consults those formulas.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidOp, TreeError
from .tree_core import CanonicalForm, Edge, PhyloTree, require_leaves


class OpKind(enum.Enum):
    """Rearrangement classes; NNI ops are SPR ops are TBR ops."""

    NNI = "nni"
    SPR = "spr"
    TBR = "tbr"

    def includes(self, other: "OpKind") -> bool:
        order = {OpKind.NNI: 0, OpKind.SPR: 1, OpKind.TBR: 2}
        return order[self] >= order[other]


@dataclass(frozen=True, order=True)
class RearrangementOp:
    """One bisection-and-reconnection move.

    ``bisect_mask`` is the normalized split mask of the deleted edge; side A
    is the leaf set in the mask, side B its complement.  Each reconnect field
    holds the partial-split mask identifying an edge of that component
    (normalized to the side not containing the component's smallest leaf
    index), or None when the component is a single leaf and offers no choice.
    """

    bisect_mask: int
    reconnect_a: int | None
    reconnect_b: int | None

    def to_json(self) -> dict:
        return {
            "bisect_mask": self.bisect_mask,
            "reconnect_a": self.reconnect_a,
            "reconnect_b": self.reconnect_b,
        }

    @classmethod
    def from_json(cls, record: dict) -> "RearrangementOp":
        return cls(
            bisect_mask=record["bisect_mask"],
            reconnect_a=record["reconnect_a"],
            reconnect_b=record["reconnect_b"],
        )


@dataclass(frozen=True)
class NeighbourhoodReport:
    """Counts for one tree and one operation kind.

    ``multiplicity_histogram`` maps output-tree multiplicity (how many
    distinct operations produce that tree) to the number of such outputs.
    """

    n: int
    kind: OpKind
    op_count: int
    neighbourhood_size: int
    multiplicity_histogram: dict[int, int]

    def __post_init__(self) -> None:
        ops = sum(m * c for m, c in self.multiplicity_histogram.items())
        size = sum(self.multiplicity_histogram.values())
        if ops != self.op_count or size != self.neighbourhood_size:
            raise ValueError("multiplicity histogram disagrees with the counts")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind.value,
            "op_count": self.op_count,
            "neighbourhood_size": self.neighbourhood_size,
            "multiplicity_histogram": {str(m): c for m, c in sorted(self.multiplicity_histogram.items())},
        }


# -- bisection components ---------------------------------------------------


@dataclass
class _Side:
    """One component of a bisected tree, with its reconnection bookkeeping."""

    mask: int
    single: int | None = None  # leaf vertex id when the component is one leaf
    adj: dict[int, tuple[int, ...]] | None = None
    scar_edge: Edge | None = None
    scar_ref: int | None = None
    refs: tuple[int, ...] = ()
    edge_of_ref: dict[int, Edge] | None = None
    near_scar: frozenset[int] = frozenset()

    def is_scar(self, ref: int | None) -> bool:
        return True if self.single is not None else ref == self.scar_ref

    def ref_choices(self) -> tuple[int | None, ...]:
        return (None,) if self.single is not None else self.refs


def _make_side(tree: PhyloTree, mask: int, inside: int, outside: int) -> _Side:
    if mask.bit_count() == 1:
        return _Side(mask=mask, single=inside)

    adj: dict[int, list[int]] = {}
    stack = [inside]
    seen = {inside}
    while stack:
        v = stack.pop()
        nbrs = [w for w in tree.neighbors(v) if not (v == inside and w == outside)]
        adj[v] = nbrs
        for w in nbrs:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    # The cut endpoint has degree 2 now; splice it out.  The merged edge is
    # the scar: reconnecting there restores the original attachment.
    x, y = adj.pop(inside)
    adj[x] = [w if w != inside else y for w in adj[x]]
    adj[y] = [w if w != inside else x for w in adj[y]]
    scar = (x, y) if x < y else (y, x)

    root_leaf = tree.leaf_vertex((mask & -mask).bit_length() - 1)
    start = adj[root_leaf][0]
    parent = {start: root_leaf}
    order = [start]
    dfs = [start]
    while dfs:
        v = dfs.pop()
        for w in adj[v]:
            if w != parent[v]:
                parent[w] = v
                order.append(w)
                dfs.append(w)
    below: dict[int, int] = {}
    ref_of_edge: dict[Edge, int] = {}
    for v in reversed(order):
        if len(adj[v]) == 1 and v != root_leaf:
            m = 1 << tree.vertex_leaf_index(v)
        else:
            m = 0
            for w in adj[v]:
                if w != parent[v]:
                    m |= below[w]
        below[v] = m
        p = parent[v]
        ref_of_edge[(v, p) if v < p else (p, v)] = m

    edge_of_ref = {r: e for e, r in ref_of_edge.items()}
    near = frozenset(
        r for e, r in ref_of_edge.items() if e != scar and (e[0] in scar or e[1] in scar)
    )
    return _Side(
        mask=mask,
        adj={v: tuple(ws) for v, ws in adj.items()},
        scar_edge=scar,
        scar_ref=ref_of_edge[scar],
        refs=tuple(sorted(ref_of_edge.values())),
        edge_of_ref=edge_of_ref,
        near_scar=near,
    )


def _bisect(tree: PhyloTree, bisect_mask: int) -> tuple[_Side, _Side]:
    try:
        edge = tree.edge_with_mask(bisect_mask)
    except TreeError:
        raise InvalidOp(f"no edge of the tree induces split mask {bisect_mask:#x}") from None
    far = tree.edge_far_vertex(edge)
    near = edge[0] if edge[1] == far else edge[1]
    side_a = _make_side(tree, bisect_mask, far, near)
    side_b = _make_side(tree, bisect_mask ^ tree.full_mask, near, far)
    return side_a, side_b


def _pair_kind(side_a: _Side, ra: int | None, side_b: _Side, rb: int | None) -> OpKind:
    scar_a = side_a.is_scar(ra)
    scar_b = side_b.is_scar(rb)
    if scar_a and scar_b:
        raise InvalidOp("reconnecting both components at their scars reproduces the tree")
    if scar_a:
        return OpKind.NNI if rb in side_b.near_scar else OpKind.SPR
    if scar_b:
        return OpKind.NNI if ra in side_a.near_scar else OpKind.SPR
    return OpKind.TBR


def _pairs(side_a: _Side, side_b: _Side, kind: OpKind) -> Iterator[tuple[int | None, int | None]]:
    """Reconnection pairs of the requested kind, in lexicographic ref order."""
    refs_a = side_a.ref_choices()
    refs_b = side_b.ref_choices()
    if kind is OpKind.TBR:
        for ra in refs_a:
            scar_a = side_a.is_scar(ra)
            for rb in refs_b:
                if scar_a and side_b.is_scar(rb):
                    continue
                yield ra, rb
        return
    if kind is OpKind.SPR:
        wanted = lambda ra, rb: True
    else:
        wanted = lambda ra, rb: _pair_kind(side_a, ra, side_b, rb) is OpKind.NNI
    out = []
    for ra in refs_a:
        if side_a.is_scar(ra):
            out.extend((ra, rb) for rb in refs_b if not side_b.is_scar(rb) and wanted(ra, rb))
        else:
            for rb in refs_b:
                if side_b.is_scar(rb) and wanted(ra, rb):
                    out.append((ra, rb))
    key = lambda pair: tuple(-1 if r is None else r for r in pair)
    yield from sorted(out, key=key)


# -- public operations --------------------------------------------------------


def enumerate_ops(tree: PhyloTree, kind: OpKind = OpKind.TBR) -> list[RearrangementOp]:
    """All distinct operations of the given kind, in a fixed order.

    Per bisection edge: a pendant edge frees one leaf, leaving 2n-6 non-scar
    reconnections of the remaining component; an internal edge with sides of
    a and b leaves offers (2a-3)(2b-3) - 1 reconnection pairs, the excluded
    one being the scar-scar pair that would rebuild the input tree.
    """
    require_leaves(tree)
    ops = []
    for mask in tree.split_masks:
        side_a, side_b = _bisect(tree, mask)
        for ra, rb in _pairs(side_a, side_b, kind):
            ops.append(RearrangementOp(mask, ra, rb))
    return ops


def _validated_sides(tree: PhyloTree, op: RearrangementOp) -> tuple[_Side, _Side]:
    side_a, side_b = _bisect(tree, op.bisect_mask)
    for side, ref, label in ((side_a, op.reconnect_a, "a"), (side_b, op.reconnect_b, "b")):
        if side.single is not None:
            if ref is not None:
                raise InvalidOp(f"component {label} is a single leaf; reconnect_{label} must be None")
        elif ref not in side.edge_of_ref:
            raise InvalidOp(f"reconnect_{label}={ref!r} is not an edge of component {label}")
    if side_a.is_scar(op.reconnect_a) and side_b.is_scar(op.reconnect_b):
        raise InvalidOp("op reproduces the input tree")
    return side_a, side_b


def classify_op(tree: PhyloTree, op: RearrangementOp) -> OpKind:
    """Most specific class of the op: NNI before SPR before TBR."""
    side_a, side_b = _validated_sides(tree, op)
    return _pair_kind(side_a, op.reconnect_a, side_b, op.reconnect_b)


def apply_op(tree: PhyloTree, op: RearrangementOp) -> PhyloTree:
    """Perform the move by explicit graph surgery and return the new tree.

    The chosen reconnection edge of each component is subdivided and the two
    fresh vertices are joined (a single-leaf component is joined directly).
    The result is validated from scratch, and is never equal to the input
    because the scar-scar pair is unrepresentable.
    """
    side_a, side_b = _validated_sides(tree, op)
    next_id = max(tree.vertices()) + 1
    adjacency: dict[int, set[int]] = {}

    def add_edge(u: int, v: int) -> None:
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)

    joints = []
    for side, ref in ((side_a, op.reconnect_a), (side_b, op.reconnect_b)):
        if side.single is not None:
            joints.append(side.single)
            continue
        x, y = side.edge_of_ref[ref]
        middle = next_id
        next_id += 1
        for v, ws in side.adj.items():
            for w in ws:
                if v < w and (v, w) != (x, y):
                    add_edge(v, w)
        add_edge(x, middle)
        add_edge(middle, y)
        joints.append(middle)
    add_edge(joints[0], joints[1])

    names = {v: tree.leaf_name(v) for v in tree.vertices() if tree.is_leaf(v)}
    return PhyloTree(adjacency, names)


# -- fast canonical assembly ---------------------------------------------------


def _contributions(side: _Side) -> dict[int | None, tuple[int, ...]]:
    """Output-split masks this component contributes, per reconnection choice.

    After reconnection at edge r, every other component edge g separates the
    same leaves as before on the side away from the attachment point; the
    subdivided edge r contributes both of its sides.  Masks are plain subsets
    of the component's leaf set, normalized later against the full leaf set.
    """
    if side.single is not None:
        return {None: ()}
    mask = side.mask
    refs = side.refs
    out: dict[int | None, tuple[int, ...]] = {}
    for r in refs:
        parts = [r, mask ^ r]
        for g in refs:
            if g != r:
                parts.append(mask ^ g if (r & g) == r else g)
        out[r] = tuple(parts)
    return out


def _survey_counters(tree: PhyloTree, kinds: tuple[OpKind, ...]) -> dict[OpKind, Counter]:
    """One pass over all TBR reconnection pairs, tallying canonical outputs.

    Output splits are recombined directly from the component partial splits,
    which is an independent route from apply_op's graph surgery (the two are
    cross-checked in the test suite).
    """
    require_leaves(tree)
    full = tree.full_mask
    counters: dict[OpKind, Counter] = {kind: Counter() for kind in kinds}
    want_tbr = OpKind.TBR in counters
    want_spr = OpKind.SPR in counters
    want_nni = OpKind.NNI in counters

    for mask in tree.split_masks:
        side_a, side_b = _bisect(tree, mask)
        contrib_a = _contributions(side_a)
        contrib_b = _contributions(side_b)
        for ra, parts_a in contrib_a.items():
            scar_a = side_a.is_scar(ra)
            norm_a = [p if not p & 1 else p ^ full for p in parts_a]
            for rb, parts_b in contrib_b.items():
                scar_b = side_b.is_scar(rb)
                if scar_a and scar_b:
                    continue
                if scar_a:
                    kind = OpKind.NNI if rb in side_b.near_scar else OpKind.SPR
                elif scar_b:
                    kind = OpKind.NNI if ra in side_a.near_scar else OpKind.SPR
                else:
                    kind = OpKind.TBR
                if kind is OpKind.TBR and not want_tbr:
                    continue
                key = [mask]
                key.extend(norm_a)
                key.extend(p if not p & 1 else p ^ full for p in parts_b)
                key = tuple(sorted(key))
                if want_tbr:
                    counters[OpKind.TBR][key] += 1
                if kind is not OpKind.TBR:
                    if want_spr:
                        counters[OpKind.SPR][key] += 1
                    if want_nni and kind is OpKind.NNI:
                        counters[OpKind.NNI][key] += 1
    return counters


@dataclass(frozen=True)
class SurveyEntry:
    """Survey output for one operation kind."""

    forms: frozenset[CanonicalForm]
    multiplicities: dict[CanonicalForm, int]
    report: NeighbourhoodReport


def _entry_from_counter(tree: PhyloTree, kind: OpKind, counter: Counter) -> SurveyEntry:
    names = tree.leaf_order
    multiplicities = {CanonicalForm(masks, names): c for masks, c in counter.items()}
    report = NeighbourhoodReport(
        n=tree.n,
        kind=kind,
        op_count=sum(counter.values()),
        neighbourhood_size=len(counter),
        multiplicity_histogram=dict(Counter(counter.values())),
    )
    return SurveyEntry(frozenset(multiplicities), multiplicities, report)


def neighbourhood(tree: PhyloTree, kind: OpKind = OpKind.TBR) -> tuple[frozenset[CanonicalForm], NeighbourhoodReport]:
    """Distinct trees reachable by one operation of ``kind``, plus the counts."""
    entry = op_survey(tree, (kind,))[kind]
    return entry.forms, entry.report


def op_survey(
    tree: PhyloTree,
    kinds: tuple[OpKind, ...] = (OpKind.NNI, OpKind.SPR, OpKind.TBR),
) -> dict[OpKind, SurveyEntry]:
    """Neighbourhoods and counts for the requested kinds in one enumeration pass."""
    counters = _survey_counters(tree, kinds)
    return {kind: _entry_from_counter(tree, kind, counters[kind]) for kind in counters}
