"""Verification suites: brute-force enumeration against every closed form.

Each suite walks a body of trees (exhaustive T_n for small n, random samples
for larger n, or a pure closed-form sweep), evaluates its assertions, and
collects counterexamples instead of raising, so a run always produces a
complete report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .errors import RangeError
from .extremal import extremal_scan
from .generators import all_trees, random_tree
from .newick_io import serialize_newick
from .rearrange import OpKind, op_survey
from .tree_core import PhyloTree

#: Remainder constant for the asymptotic law: the complete-tree TBR
#: neighbourhood stays within C * n^2 of 4 * n^2 * floor(log2 n) for every
#: n up to 2**20.  Pinned by the exhaustive sweep; the supremum approaches
#: 13 from below along n = 2^k.
ASYMPTOTIC_C = 13

#: Smallest n from which complete_tbr_size(n) / (4 n^2 floor(log2 n)) stays
#: at or above one half for good; found by the same sweep (the ratio dips
#: under 0.5 for n in 64..71, the start of the floor(log2 n) = 6 octave).
RATIO_HALF_FROM = 72

SAMPLE_NS = (8, 9, 10, 11, 12)


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    checks: int
    details: dict
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": self.checks,
            "details": self.details,
            "failures": self.failures,
        }


class _Collector:
    def __init__(self, suite: str, max_failures: int = 20):
        self.suite = suite
        self.checks = 0
        self.failures: list[dict] = []
        self._max = max_failures

    def check(self, ok: bool, message: str, tree: PhyloTree | None = None) -> bool:
        self.checks += 1
        if not ok and len(self.failures) < self._max:
            record = {"message": message}
            if tree is not None:
                record["newick"] = serialize_newick(tree)
            self.failures.append(record)
        return ok

    def result(self, details: dict) -> SuiteResult:
        return SuiteResult(
            suite=self.suite,
            passed=not self.failures,
            checks=self.checks,
            details=details,
            failures=self.failures,
        )


def _check_formula_tree(col: _Collector, tree: PhyloTree) -> None:
    n = tree.n
    survey = op_survey(tree)
    tbr = survey[OpKind.TBR].report
    spr = survey[OpKind.SPR].report
    nni = survey[OpKind.NNI].report
    col.check(
        tbr.neighbourhood_size == metrics.tbr_size(tree),
        f"|N_TBR| = {tbr.neighbourhood_size}, formula gives {metrics.tbr_size(tree)}",
        tree,
    )
    col.check(
        tbr.op_count == metrics.tbr_op_count(tree),
        f"|O_TBR| = {tbr.op_count}, formula gives {metrics.tbr_op_count(tree)}",
        tree,
    )
    col.check(
        spr.neighbourhood_size == metrics.spr_size(n),
        f"|N_SPR| = {spr.neighbourhood_size}, formula gives {metrics.spr_size(n)}",
        tree,
    )
    col.check(
        spr.op_count == metrics.spr_op_count(n),
        f"|O_SPR| = {spr.op_count}, formula gives {metrics.spr_op_count(n)}",
        tree,
    )
    col.check(
        nni.neighbourhood_size == metrics.nni_size(n),
        f"|N_NNI| = {nni.neighbourhood_size}, formula gives {metrics.nni_size(n)}",
        tree,
    )


def _exhaustive_range(n_max: int) -> range:
    if n_max > 8:
        raise RangeError(f"exhaustive suites support n_max <= 8, got {n_max}")
    return range(4, n_max + 1)


def formulas_suite(n_max: int = 7, samples: int = 0, seed: int = 0) -> SuiteResult:
    """Enumerated neighbourhood and operation counts equal the closed forms.

    Exhaustive over T_4 .. T_{n_max}; optionally ``samples`` random trees for
    each n in 8..12, where only the shape-independent NNI and SPR counts are
    asserted (the TBR identities are shape-dependent and covered by the
    exhaustive part).
    """
    col = _Collector("formulas")
    trees_checked: dict[str, int] = {}
    for n in _exhaustive_range(n_max):
        count = 0
        for tree in all_trees(n):
            _check_formula_tree(col, tree)
            count += 1
        trees_checked[f"exhaustive_n{n}"] = count
    if samples:
        for n in SAMPLE_NS:
            for i in range(samples):
                tree = random_tree(n, seed=hash((seed, n, i)) & 0x7FFFFFFF)
                survey = op_survey(tree, (OpKind.SPR, OpKind.NNI))
                spr = survey[OpKind.SPR].report
                nni = survey[OpKind.NNI].report
                col.check(
                    spr.neighbourhood_size == metrics.spr_size(n),
                    f"sampled n={n}: |N_SPR| = {spr.neighbourhood_size} != {metrics.spr_size(n)}",
                    tree,
                )
                col.check(
                    spr.op_count == metrics.spr_op_count(n),
                    f"sampled n={n}: |O_SPR| = {spr.op_count} != {metrics.spr_op_count(n)}",
                    tree,
                )
                col.check(
                    nni.neighbourhood_size == metrics.nni_size(n),
                    f"sampled n={n}: |N_NNI| = {nni.neighbourhood_size} != {metrics.nni_size(n)}",
                    tree,
                )
            trees_checked[f"sampled_n{n}"] = samples
    return col.result({"trees": trees_checked})


def redundancy_suite(n_max: int = 7) -> SuiteResult:
    """Structure of repeated TBR outputs.

    Every output tree is produced by either 1 or 4 operations; the ones with
    multiplicity 4 are exactly the NNI neighbourhood (each reachable by 4
    distinct NNI operations), so op count minus neighbourhood size is
    3*(2n-6) for TBR and SPR alike.
    """
    col = _Collector("redundancy")
    trees_checked: dict[str, int] = {}
    for n in _exhaustive_range(n_max):
        count = 0
        for tree in all_trees(n):
            survey = op_survey(tree)
            tbr = survey[OpKind.TBR]
            nni = survey[OpKind.NNI]
            spr = survey[OpKind.SPR]
            mults = set(tbr.report.multiplicity_histogram)
            col.check(mults <= {1, 4}, f"TBR multiplicities {sorted(mults)} not in {{1, 4}}", tree)
            quadruple = frozenset(f for f, c in tbr.multiplicities.items() if c == 4)
            col.check(
                quadruple == nni.forms,
                "multiplicity-4 TBR outputs differ from the NNI neighbourhood",
                tree,
            )
            slack = 3 * (2 * n - 6)
            col.check(
                tbr.report.op_count - tbr.report.neighbourhood_size == slack,
                f"|O_TBR| - |N_TBR| = {tbr.report.op_count - tbr.report.neighbourhood_size} != {slack}",
                tree,
            )
            col.check(
                spr.report.op_count - spr.report.neighbourhood_size == slack,
                f"|O_SPR| - |N_SPR| = {spr.report.op_count - spr.report.neighbourhood_size} != {slack}",
                tree,
            )
            col.check(
                nni.report.multiplicity_histogram == {4: 2 * n - 6},
                f"NNI multiplicity histogram {nni.report.multiplicity_histogram} != {{4: {2 * n - 6}}}",
                tree,
            )
            count += 1
        trees_checked[f"exhaustive_n{n}"] = count
    return col.result({"trees": trees_checked})


def extremal_suite(n_max: int = 8, threads: int = 1) -> SuiteResult:
    """Arg-max and arg-min of the TBR neighbourhood over all of T_n.

    The maximizers must be exactly the caterpillars and the minimizers
    exactly the complete trees, with the extreme values matching their
    closed forms.
    """
    col = _Collector("extremal")
    scans = {}
    for n in _exhaustive_range(n_max):
        scan = extremal_scan(n, threads=threads)
        col.check(
            scan.max_value == metrics.caterpillar_tbr_size(n),
            f"n={n}: scan max {scan.max_value} != caterpillar formula {metrics.caterpillar_tbr_size(n)}",
        )
        col.check(
            scan.min_value == metrics.complete_tbr_size(n),
            f"n={n}: scan min {scan.min_value} != complete formula {metrics.complete_tbr_size(n)}",
        )
        col.check(
            scan.min_gamma == metrics.gamma_complete(n),
            f"n={n}: scan min gamma {scan.min_gamma} != closed form {metrics.gamma_complete(n)}",
        )
        col.check(
            scan.argmax_all_caterpillar,
            f"n={n}: maximizer set is not exactly the caterpillar set",
        )
        col.check(
            scan.argmin_all_complete,
            f"n={n}: minimizer set is not exactly the complete-tree set",
        )
        scans[str(n)] = scan.to_json()
    return col.result({"scans": scans})


def complete_tbr_size_sweep(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized complete_tbr_size for every n in [4, limit].

    Returns (ns, sizes) as int64 arrays; safe up to limit = 2**20 without
    overflow.  Cross-checked against the pure-integer closed form in the
    test suite.
    """
    ns = np.arange(4, limit + 1, dtype=np.int64)
    gamma = np.zeros_like(ns)
    top = int(limit).bit_length() - 1
    for j in range(1, top):
        two_j = np.int64(1 << j)
        s = (ns >> j) << j
        term = (s - two_j) * (2 * ns - s)
        term += ((ns >> (j - 1)) & 1) * (two_j * (ns - two_j))
        gamma += np.where(ns >= (1 << (j + 1)), term, 0)
    bits = np.zeros_like(ns)
    for k in range(2, top + 1):
        bits[ns >= (1 << k)] = k
    half_top = np.int64(1) << (bits - 1)
    second = (ns >> (bits - 1)) & 1
    gamma += (second - 1) * half_top * (ns - half_top)
    sizes = 4 * gamma - (4 * ns - 2) * (ns - 3)
    return ns, sizes


def asymptotic_suite(limit: int = 1 << 20) -> SuiteResult:
    """Sweep of the complete-tree size law: 4 n^2 floor(log2 n) + O(n^2).

    Asserts |size - 4 n^2 floor(log2 n)| <= ASYMPTOTIC_C * n^2 over the whole
    sweep, that the size/target ratio stays >= 1/2 from RATIO_HALF_FROM on,
    and that along n = 3 * 2^k the ratio increases towards 1 with the gap
    bounded by 8 / (3 floor(log2 n)).
    """
    col = _Collector("asymptotic")
    ns, sizes = complete_tbr_size_sweep(limit)
    bits = np.zeros_like(ns)
    for k in range(2, int(limit).bit_length()):
        bits[ns >= (1 << k)] = k
    target = 4 * ns * ns * bits
    diff = np.abs(sizes - target)
    col.check(
        bool(np.all(diff <= ASYMPTOTIC_C * ns * ns)),
        f"remainder exceeds {ASYMPTOTIC_C} * n^2 somewhere in [4, {limit}]",
    )
    observed_c = float(np.max(diff / (ns * ns).astype(np.float64)))
    ratio = sizes / target.astype(np.float64)
    from_idx = RATIO_HALF_FROM - 4
    col.check(
        bool(np.all(ratio[from_idx:] >= 0.5)) if limit >= RATIO_HALF_FROM else True,
        f"ratio drops below 1/2 at some n >= {RATIO_HALF_FROM}",
    )
    three_fold = []
    k = 1
    while 3 * (1 << k) <= limit:
        n = 3 * (1 << k)
        r = float(ratio[n - 4])
        three_fold.append((n, r))
        col.check(r < 1.0, f"ratio at n={n} is not below 1")
        col.check(
            1.0 - r <= 8.0 / (3.0 * int(bits[n - 4])),
            f"ratio gap at n={n} exceeds 8/(3 floor(log2 n))",
        )
        k += 1
    for (n_prev, r_prev), (n_next, r_next) in zip(three_fold, three_fold[1:]):
        col.check(
            r_next > r_prev,
            f"ratio not increasing along 3*2^k: {r_prev} at n={n_prev} vs {r_next} at n={n_next}",
        )
    return col.result(
        {
            "limit": limit,
            "pinned_c": ASYMPTOTIC_C,
            "observed_c": observed_c,
            "ratio_half_from": RATIO_HALF_FROM,
            "three_fold_ratios": [{"n": n, "ratio": r} for n, r in three_fold],
        }
    )


SUITES = {
    "formulas": formulas_suite,
    "redundancy": redundancy_suite,
    "extremal": extremal_suite,
    "asymptotic": asymptotic_suite,
}
