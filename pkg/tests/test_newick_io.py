"""Parser and serializer: round trips, determinism, and the negative corpus."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treespace import (
    BRANCH_LENGTHS_DISCARDED,
    ROOT_SUPPRESSED,
    DegreeViolation,
    DuplicateLabel,
    EmptyLabel,
    NewickSyntaxError,
    TooFewLeaves,
    TreeError,
    caterpillar,
    parse_newick,
    perfect,
    random_tree,
    serialize_newick,
)


class TestParse:
    def test_rooted_quartet_suppressed(self):
        doc = parse_newick("((1,2),(3,4));")
        assert ROOT_SUPPRESSED in doc.warnings
        assert doc.tree.is_cherry(["1", "2"]) and doc.tree.is_cherry(["3", "4"])

    def test_perfect_six(self):
        doc = parse_newick("(1,2,((3,4),(5,6)));")
        t = doc.tree
        assert doc.warnings == ()
        nontrivial = [s for s in t.splits() if not s.is_trivial]
        assert [sorted((s.a, s.b)) for s in nontrivial] == [[2, 4], [2, 4], [2, 4]]
        assert t == perfect(6)

    def test_branch_lengths_discarded(self):
        doc = parse_newick("(1:0.1,2:0.2,(3:0.3,4:0.4):0.5);")
        assert BRANCH_LENGTHS_DISCARDED in doc.warnings
        assert doc.tree == parse_newick("(1,2,(3,4));").tree

    def test_quoted_labels(self):
        t = parse_newick("('a b',c,('it''s',d));").tree
        assert set(t.leaf_order) == {"a b", "c", "it's", "d"}

    def test_whitespace_tolerated(self):
        t = parse_newick(" ( 1 , 2 , ( 3 , 4 ) ) ; ").tree
        assert t == parse_newick("(1,2,(3,4));").tree

    def test_degenerate_inputs(self):
        assert parse_newick("A;").tree.n == 1
        doc = parse_newick("(A,B);")
        assert doc.tree.n == 2 and ROOT_SUPPRESSED in doc.warnings


NEGATIVE_CORPUS = [
    ("", NewickSyntaxError),
    (";", EmptyLabel),
    ("(;", EmptyLabel),
    ("(1,2;", NewickSyntaxError),
    ("((1,2),(3,4))", NewickSyntaxError),
    ("((1,2),(3,4)));", NewickSyntaxError),
    ("(1,2),(3,4));", NewickSyntaxError),
    ("(1,,2);", EmptyLabel),
    ("(1,2,());", EmptyLabel),
    ("(1,2,3); trailing", NewickSyntaxError),
    ("(1,2,3,4);", DegreeViolation),
    ("(1,2,3,4,5);", DegreeViolation),
    ("((1,2,3),(4,5));", DegreeViolation),
    ("(1,(2),3);", DegreeViolation),
    ("(1,2,(3,3));", DuplicateLabel),
    ("(1,1,2);", DuplicateLabel),
    ("(1:x,2,3);", NewickSyntaxError),
    ("('abc,1,2);", NewickSyntaxError),
    ("(1,2,(3,4)oops);", NewickSyntaxError),
    ("(1,2,'');", EmptyLabel),
]


class TestNegativeCorpus:
    @pytest.mark.parametrize("text,exc", NEGATIVE_CORPUS)
    def test_rejected(self, text, exc):
        with pytest.raises(exc):
            parse_newick(text)

    @pytest.mark.parametrize(
        "text,exc", [(t, e) for t, e in NEGATIVE_CORPUS if e is NewickSyntaxError]
    )
    def test_syntax_errors_carry_positions(self, text, exc):
        with pytest.raises(NewickSyntaxError) as info:
            parse_newick(text)
        assert 0 <= info.value.position <= len(text)

    def test_non_syntax_errors_name_positions(self):
        for text in ["(1,,2);", "(1,2,(3,3));", "(1,(2),3);"]:
            with pytest.raises(TreeError) as info:
                parse_newick(text)
            assert "position" in str(info.value)


class TestSerialize:
    def test_quartet_deterministic_form(self, quartet):
        assert serialize_newick(quartet) == "(1,2,(3,4));"

    def test_caterpillar5(self):
        assert serialize_newick(caterpillar(5)) == "(1,2,(3,(4,5)));"

    def test_three_leaf_star(self):
        assert serialize_newick(parse_newick("(3,1,2);").tree) == "(1,2,3);"

    def test_serialization_is_function_of_canonical_form(self):
        a = parse_newick("((4,3),(2,1));").tree
        b = parse_newick("(3,4,(1,2));").tree
        assert a == b
        assert serialize_newick(a) == serialize_newick(b)

    def test_quoting_round_trip(self):
        text = "('a b',c,('it''s',d));"
        t = parse_newick(text).tree
        assert parse_newick(serialize_newick(t)).tree == t

    def test_too_few_leaves(self):
        with pytest.raises(TooFewLeaves):
            serialize_newick(parse_newick("A;").tree)


class TestRoundTrip:
    @given(st.integers(4, 20), st.integers(0, 10**9))
    @settings(max_examples=60, deadline=None)
    def test_canonical_form_preserved(self, n, seed):
        t = random_tree(n, seed)
        doc = parse_newick(serialize_newick(t))
        assert doc.tree.canonical_form() == t.canonical_form()

    @given(st.integers(4, 20), st.integers(0, 10**9))
    @settings(max_examples=30, deadline=None)
    def test_serialize_idempotent(self, n, seed):
        t = random_tree(n, seed)
        once = serialize_newick(t)
        assert serialize_newick(parse_newick(once).tree) == once
