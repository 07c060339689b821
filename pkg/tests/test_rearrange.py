"""Enumeration, application, and classification of rearrangement operations.

The deeper semantic checks validate the scar-edge rules against the
definitional criteria (restriction equality for SPR, subtree swap for NNI)
implemented independently in conftest.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import nni_definitional, restriction_preserved, spr_definitional

from treespace import (
    InvalidOp,
    OpKind,
    RearrangementOp,
    TooFewLeaves,
    all_trees,
    apply_op,
    caterpillar,
    classify_op,
    enumerate_ops,
    neighbourhood,
    nni_size,
    parse_newick,
    random_tree,
    spr_op_count,
    tbr_op_count,
    tbr_size,
)
from treespace.rearrange import _bisect, op_survey


def leaf_mask(tree, *names):
    return sum(1 << tree.leaf_index(name) for name in names)


class TestEnumerate:
    def test_quartet_tbr_ops(self, quartet):
        ops = enumerate_ops(quartet, OpKind.TBR)
        assert len(ops) == 8  # 4 pendant edges x 2; the internal edge gives (1)(1)-1 = 0
        assert len(set(ops)) == 8

    def test_caterpillar5_spr_ops(self):
        assert len(enumerate_ops(caterpillar(5), OpKind.SPR)) == 24

    @pytest.mark.parametrize("seed", range(4))
    def test_t6_tbr_matches_gamma_formula(self, seed):
        t = random_tree(6, seed)
        assert len(enumerate_ops(t, OpKind.TBR)) == tbr_op_count(t)

    def test_deterministic_order(self):
        t = random_tree(7, 9)
        assert enumerate_ops(t, OpKind.TBR) == enumerate_ops(t, OpKind.TBR)

    def test_kind_nesting_of_op_sets(self):
        t = random_tree(7, 3)
        nni = set(enumerate_ops(t, OpKind.NNI))
        spr = set(enumerate_ops(t, OpKind.SPR))
        tbr = set(enumerate_ops(t, OpKind.TBR))
        assert nni <= spr <= tbr
        assert OpKind.TBR.includes(OpKind.SPR) and OpKind.SPR.includes(OpKind.NNI)
        assert not OpKind.NNI.includes(OpKind.SPR)
        for op in spr:
            assert OpKind.SPR.includes(classify_op(t, op))

    def test_rejects_small(self):
        with pytest.raises(TooFewLeaves):
            enumerate_ops(parse_newick("(1,2,3);").tree)


class TestApply:
    def test_quartet_leaf_regraft(self, quartet):
        # Prune leaf 1, regraft onto the pendant edge of 3.
        op = RearrangementOp(
            bisect_mask=quartet.full_mask ^ 1,
            reconnect_a=leaf_mask(quartet, "3"),
            reconnect_b=None,
        )
        result = apply_op(quartet, op)
        assert result == parse_newick("((1,3),(2,4));").tree

    def test_figure_tbr_move(self):
        """Bisect the central edge of the 1..6 caterpillar and reconnect at
        the pendant edges of 2 and 5: one TBR move to the 1,3,2,5,4,6 order."""
        t1 = caterpillar(6)
        op = RearrangementOp(
            bisect_mask=leaf_mask(t1, "4", "5", "6"),
            reconnect_a=leaf_mask(t1, "5"),
            reconnect_b=leaf_mask(t1, "2"),
        )
        t2 = apply_op(t1, op)
        assert t2 == parse_newick("(1,3,(2,(5,(4,6))));").tree
        assert classify_op(t1, op) is OpKind.TBR
        # Deleting the new edge gives the same forest as the bisection did.
        for side in ({"1", "2", "3"}, {"4", "5", "6"}):
            assert t1.restrict(side) == t2.restrict(side)
        # Not an SPR: neither component can be regrafted onto the other.
        assert not spr_definitional(t1, t2, op.bisect_mask)

    def test_figure_spr_move(self):
        """Same bisection, but component {4,5,6} keeps its rooting: an SPR
        move to the 1,3,2,4,5,6 order (also reachable as an interchange)."""
        t1 = caterpillar(6)
        mask = leaf_mask(t1, "4", "5", "6")
        side_a, _ = _bisect(t1, mask)
        op = RearrangementOp(mask, side_a.scar_ref, leaf_mask(t1, "2"))
        t3 = apply_op(t1, op)
        assert t3 == parse_newick("(1,3,(2,(4,(5,6))));").tree
        assert classify_op(t1, op) in (OpKind.NNI, OpKind.SPR)
        assert spr_definitional(t1, t3, mask)

    def test_output_valid_and_distinct(self):
        for seed in range(3):
            t = random_tree(6, seed)
            for op in enumerate_ops(t, OpKind.TBR):
                out = apply_op(t, op)
                assert out.n == t.n
                assert out.canonical_form() != t.canonical_form()

    def test_scar_scar_unrepresentable(self, quartet):
        internal = leaf_mask(quartet, "3", "4")
        side_a, side_b = _bisect(quartet, internal)
        with pytest.raises(InvalidOp):
            apply_op(quartet, RearrangementOp(internal, side_a.scar_ref, side_b.scar_ref))

    def test_bad_refs_rejected(self, quartet):
        with pytest.raises(InvalidOp):
            apply_op(quartet, RearrangementOp(0b0110, 1, None))  # not an edge split
        with pytest.raises(InvalidOp):
            apply_op(
                quartet,
                RearrangementOp(quartet.full_mask ^ 1, 0b0110, None),  # bogus component edge
            )

    def test_json_round_trip(self, quartet):
        for op in enumerate_ops(quartet, OpKind.TBR):
            assert RearrangementOp.from_json(op.to_json()) == op


class TestNeighbourhood:
    def test_quartet_tbr(self, quartet):
        forms, report = neighbourhood(quartet, OpKind.TBR)
        assert len(forms) == 2
        assert report.op_count == 8
        assert report.multiplicity_histogram == {4: 2}

    def test_t6_nni_is_six(self):
        for seed in range(3):
            _, report = neighbourhood(random_tree(6, seed), OpKind.NNI)
            assert report.neighbourhood_size == 6

    def test_caterpillar6_tbr(self):
        forms, report = neighbourhood(caterpillar(6), OpKind.TBR)
        assert report.neighbourhood_size == 34
        assert report.op_count == 52

    def test_survey_matches_apply_route(self):
        """The split-recombination fast path equals graph surgery output by
        output, including multiplicities."""
        from collections import Counter

        for tree in list(all_trees(5))[::3] + [random_tree(n, s) for n in (6, 7) for s in range(3)]:
            by_surgery = Counter()
            for op in enumerate_ops(tree, OpKind.TBR):
                by_surgery[apply_op(tree, op).canonical_form()] += 1
            survey = op_survey(tree, (OpKind.TBR,))[OpKind.TBR]
            assert survey.multiplicities == dict(by_surgery)

    def test_neighbourhood_nesting(self):
        for seed in range(3):
            t = random_tree(8, seed)
            nni, _ = neighbourhood(t, OpKind.NNI)
            spr, _ = neighbourhood(t, OpKind.SPR)
            tbr, _ = neighbourhood(t, OpKind.TBR)
            assert nni <= spr <= tbr

    def test_forest_symmetry(self):
        """Deleting the inserted edge undoes the move at the forest level."""
        t = random_tree(7, 4)
        for op in enumerate_ops(t, OpKind.TBR)[::5]:
            out = apply_op(t, op)
            a_names = {t.leaf_order[i] for i in range(t.n) if op.bisect_mask >> i & 1}
            b_names = set(t.leaf_order) - a_names
            assert t.restrict(a_names) == out.restrict(a_names)
            assert t.restrict(b_names) == out.restrict(b_names)


class TestClassification:
    def test_leaf_regraft_next_to_origin_is_nni(self):
        t = caterpillar(6)
        ops = [
            op
            for op in enumerate_ops(t, OpKind.NNI)
            if op.bisect_mask.bit_count() in (1, t.n - 1)
        ]
        assert ops
        for op in ops:
            assert classify_op(t, op) is OpKind.NNI

    def test_spr_proper_exists(self):
        t = caterpillar(6)
        op = RearrangementOp(t.full_mask ^ 1, leaf_mask(t, "5"), None)
        assert classify_op(t, op) is OpKind.SPR

    def test_matches_definitional_checks_exhaustively(self):
        """Scar rules == restriction/swap definitions on every op of every
        tree with up to 6 leaves."""
        trees = list(all_trees(4)) + list(all_trees(5)) + list(all_trees(6))
        for t in trees:
            for op in enumerate_ops(t, OpKind.TBR):
                out = apply_op(t, op)
                kind = classify_op(t, op)
                assert (kind in (OpKind.NNI, OpKind.SPR)) == spr_definitional(
                    t, out, op.bisect_mask
                )
                assert (kind is OpKind.NNI) == nni_definitional(t, out, op.bisect_mask)

    def test_spr_restriction_holds_for_every_foreign_leaf(self):
        """When the preserved-restriction test passes for one outside leaf it
        passes for all of them."""
        t = random_tree(6, 8)
        for op in enumerate_ops(t, OpKind.SPR):
            out = apply_op(t, op)
            full = t.full_mask
            for kept in (op.bisect_mask, op.bisect_mask ^ full):
                if not restriction_preserved(t, out, kept):
                    continue
                keep_names = {t.leaf_order[i] for i in range(t.n) if kept >> i & 1}
                for i in range(t.n):
                    if kept >> i & 1:
                        continue
                    probe = keep_names | {t.leaf_order[i]}
                    assert t.restrict(probe) == out.restrict(probe)


class TestCountFormulas:
    @given(st.integers(4, 9), st.integers(0, 10**9))
    @settings(max_examples=25, deadline=None)
    def test_op_counts_random(self, n, seed):
        t = random_tree(n, seed)
        assert len(enumerate_ops(t, OpKind.TBR)) == tbr_op_count(t)
        assert len(enumerate_ops(t, OpKind.SPR)) == spr_op_count(n)
        assert len(enumerate_ops(t, OpKind.NNI)) == 4 * nni_size(n)

    @given(st.integers(4, 8), st.integers(0, 10**9))
    @settings(max_examples=15, deadline=None)
    def test_neighbourhood_sizes_random(self, n, seed):
        t = random_tree(n, seed)
        _, report = neighbourhood(t, OpKind.TBR)
        assert report.neighbourhood_size == tbr_size(t)
