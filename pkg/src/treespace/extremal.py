"""Extremal shape predicates and the exhaustive scan that verifies them.

Over all trees on n leaves, the TBR neighbourhood is largest exactly for
caterpillars and smallest exactly for complete (maximally balanced) trees.
The scan checks both characterizations as canonical-form set equalities
against the predicates, over every labelled tree in T_n.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import RangeError
from .generators import all_trees
from .metrics import caterpillar_tbr_size, complete_tbr_size, gamma_complete, tbr_size
from .newick_io import parse_newick, serialize_newick
from .tree_core import CanonicalForm, PhyloTree, require_leaves


def is_caterpillar(tree: PhyloTree) -> bool:
    """True when every internal vertex has at least one leaf neighbour."""
    require_leaves(tree)
    for v in tree.vertices():
        if tree.is_leaf(v):
            continue
        if not any(tree.is_leaf(w) for w in tree.neighbors(v)):
            return False
    return True


def _is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def _pair_balanced(p: int, q: int) -> bool:
    """One part a power of two 2^j, the other within [2^(j-1), 2^(j+1))."""
    for a, b in ((p, q), (q, p)):
        if _is_power_of_two(a) and a <= 2 * b and b < 2 * a:
            return True
    return False


def is_complete(tree: PhyloTree) -> bool:
    """Direct check of maximal balance over the cluster set.

    With k such that 3*2^k <= n < 3*2^(k+1): (i) some cluster has exactly
    2^(k+1) leaves, and (ii) every cluster Y with 2 <= |Y| <= 2^(k+1) splits
    into two clusters, one of size 2^j and the other of size in
    [2^(j-1), 2^(j+1)) for some j.  Singleton leaf sets count as clusters,
    so a size-2 cluster always passes with j = 0.
    """
    n = require_leaves(tree)
    k = (n // 3).bit_length() - 1
    bound = 1 << (k + 1)
    masks = tree.cluster_masks
    if not any(m.bit_count() == bound for m in masks):
        return False
    for y in masks:
        size = y.bit_count()
        if not 3 <= size <= bound:
            continue
        ok = False
        for z in masks:
            if z != y and z & y == z and (y ^ z) in masks:
                if _pair_balanced(z.bit_count(), size - z.bit_count()):
                    ok = True
                    break
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class ExtremalScanResult:
    """Outcome of one exhaustive scan of T_n."""

    n: int
    tree_count: int
    max_value: int
    min_value: int
    max_gamma: int
    min_gamma: int
    argmax_forms: frozenset[CanonicalForm] = field(repr=False)
    argmin_forms: frozenset[CanonicalForm] = field(repr=False)
    argmax_all_caterpillar: bool = False
    argmin_all_complete: bool = False

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tree_count": self.tree_count,
            "max_value": self.max_value,
            "min_value": self.min_value,
            "max_gamma": self.max_gamma,
            "min_gamma": self.min_gamma,
            "argmax_count": len(self.argmax_forms),
            "argmin_count": len(self.argmin_forms),
            "argmax_all_caterpillar": self.argmax_all_caterpillar,
            "argmin_all_complete": self.argmin_all_complete,
            "caterpillar_formula": caterpillar_tbr_size(self.n),
            "complete_formula": complete_tbr_size(self.n),
            "gamma_complete_formula": gamma_complete(self.n),
        }


class _Accumulator:
    """Associatively mergeable partial scan state."""

    def __init__(self, n: int):
        self.n = n
        self.count = 0
        self.max_value: int | None = None
        self.min_value: int | None = None
        self.argmax: set[CanonicalForm] = set()
        self.argmin: set[CanonicalForm] = set()
        self.caterpillars: set[CanonicalForm] = set()
        self.completes: set[CanonicalForm] = set()

    def add(self, tree: PhyloTree) -> None:
        self.count += 1
        value = tbr_size(tree)
        form = tree.canonical_form()
        self._take_max(value, {form})
        self._take_min(value, {form})
        if is_caterpillar(tree):
            self.caterpillars.add(form)
        if is_complete(tree):
            self.completes.add(form)

    def _take_max(self, value: int, forms: set[CanonicalForm]) -> None:
        if self.max_value is None or value > self.max_value:
            self.max_value = value
            self.argmax = set(forms)
        elif value == self.max_value:
            self.argmax |= forms

    def _take_min(self, value: int, forms: set[CanonicalForm]) -> None:
        if self.min_value is None or value < self.min_value:
            self.min_value = value
            self.argmin = set(forms)
        elif value == self.min_value:
            self.argmin |= forms

    def merge(self, other: "_Accumulator") -> None:
        self.count += other.count
        if other.max_value is not None:
            self._take_max(other.max_value, other.argmax)
        if other.min_value is not None:
            self._take_min(other.min_value, other.argmin)
        self.caterpillars |= other.caterpillars
        self.completes |= other.completes

    def result(self) -> ExtremalScanResult:
        # tbr_size is 4*Gamma - (4n-2)(n-3), monotone in Gamma, so the
        # extremal Gamma values come straight back out of the sizes.
        offset = (4 * self.n - 2) * (self.n - 3)
        return ExtremalScanResult(
            n=self.n,
            tree_count=self.count,
            max_value=self.max_value,
            min_value=self.min_value,
            max_gamma=(self.max_value + offset) // 4,
            min_gamma=(self.min_value + offset) // 4,
            argmax_forms=frozenset(self.argmax),
            argmin_forms=frozenset(self.argmin),
            argmax_all_caterpillar=self.argmax == self.caterpillars,
            argmin_all_complete=self.argmin == self.completes,
        )


def _scan_chunk(args: tuple[int, list[str]]) -> _Accumulator:
    n, newicks = args
    acc = _Accumulator(n)
    for text in newicks:
        acc.add(parse_newick(text).tree)
    return acc


def extremal_scan(n: int, threads: int = 1) -> ExtremalScanResult:
    """Scan every tree in T_n (4 <= n <= 8) for TBR-neighbourhood extremes."""
    if not 4 <= n <= 8:
        raise RangeError(f"extremal scan supports 4 <= n <= 8, got {n}")
    acc = _Accumulator(n)
    if threads <= 1:
        for tree in all_trees(n):
            acc.add(tree)
        return acc.result()
    chunk: list[str] = []
    jobs = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for tree in all_trees(n):
            chunk.append(serialize_newick(tree))
            if len(chunk) >= 512:
                jobs.append(pool.submit(_scan_chunk, (n, chunk)))
                chunk = []
        if chunk:
            jobs.append(pool.submit(_scan_chunk, (n, chunk)))
        for job in jobs:
            acc.merge(job.result())
    return acc.result()
