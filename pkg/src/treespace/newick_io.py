"""Newick parsing and serialization for unrooted binary trees.

The unrooted convention is a top-level trifurcation ``(A,B,C);``.  Rooted
bifurcating input is accepted: the degree-2 root is suppressed and reported
through the ``RootSuppressed`` warning.  Branch lengths are parsed and
discarded (``BranchLengthsDiscarded`` warning); internal node labels have no
meaning for a purely topological tree and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegreeViolation, DuplicateLabel, EmptyLabel, NewickSyntaxError, TooFewLeaves
from .tree_core import PhyloTree

ROOT_SUPPRESSED = "RootSuppressed"
BRANCH_LENGTHS_DISCARDED = "BranchLengthsDiscarded"

_STRUCTURAL = set("(),:;'")
_QUOTE_TRIGGERS = set("(),:;' \t\n\r[]")


@dataclass(frozen=True)
class NewickDoc:
    """A parsed Newick statement: the tree plus parse warnings."""

    tree: PhyloTree
    text: str
    warnings: tuple[str, ...]


@dataclass
class _Node:
    pos: int
    label: str | None = None
    children: list["_Node"] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.saw_length = False

    def error(self, message: str, expected: str | None = None, pos: int | None = None) -> NewickSyntaxError:
        return NewickSyntaxError(message, self.pos if pos is None else pos, expected)

    def skip_ws(self) -> None:
        text = self.text
        while self.pos < len(text) and text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> _Node:
        self.skip_ws()
        if not self.peek():
            raise self.error("empty input", expected="a Newick statement")
        root = self.subtree()
        self.skip_ws()
        if self.peek() != ";":
            raise self.error("unterminated statement", expected="';'")
        self.pos += 1
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing characters after ';'")
        return root

    def subtree(self) -> _Node:
        self.skip_ws()
        start = self.pos
        if self.peek() == "(":
            self.pos += 1
            node = _Node(pos=start)
            node.children.append(self.subtree())
            self.skip_ws()
            while self.peek() == ",":
                self.pos += 1
                node.children.append(self.subtree())
                self.skip_ws()
            if self.peek() != ")":
                raise self.error("unbalanced parenthesis", expected="',' or ')'")
            self.pos += 1
            self.skip_ws()
            if self.peek() and self.peek() not in ",():;":
                raise self.error("internal node labels are not supported")
            self.branch_length()
            return node
        node = _Node(pos=start, label=self.label())
        self.branch_length()
        return node

    def label(self) -> str:
        self.skip_ws()
        start = self.pos
        text = self.text
        if self.peek() == "'":
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(text):
                    raise self.error("unterminated quoted label", pos=start)
                ch = text[self.pos]
                if ch == "'":
                    if self.pos + 1 < len(text) and text[self.pos + 1] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    break
                out.append(ch)
                self.pos += 1
            name = "".join(out)
            if not name:
                raise EmptyLabel(f"empty quoted label at position {start}")
            return name
        out = []
        while self.pos < len(text) and text[self.pos] not in _QUOTE_TRIGGERS:
            out.append(text[self.pos])
            self.pos += 1
        if not out:
            raise EmptyLabel(f"missing leaf label at position {start}")
        return "".join(out)

    def branch_length(self) -> None:
        self.skip_ws()
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip_ws()
        start = self.pos
        text = self.text
        while self.pos < len(text) and (text[self.pos].isdigit() or text[self.pos] in "+-.eE"):
            self.pos += 1
        token = text[start : self.pos]
        try:
            float(token)
        except ValueError:
            raise self.error("malformed branch length", expected="a number", pos=start) from None
        self.saw_length = True


def _collect(root: _Node) -> tuple[dict[int, set[int]], dict[int, str], list[str]]:
    """Turn the parse tree into adjacency + leaf labels, unrooting as needed."""
    warnings: list[str] = []
    adjacency: dict[int, set[int]] = {}
    leaf_names: dict[int, str] = {}
    seen: dict[str, int] = {}
    counter = 0

    def fresh() -> int:
        nonlocal counter
        counter += 1
        return counter - 1

    def add_edge(u: int, v: int) -> None:
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)

    def walk(node: _Node) -> int:
        if not node.children:
            if node.label in seen:
                raise DuplicateLabel(f"label {node.label!r} reused at position {node.pos}")
            seen[node.label] = node.pos
            v = fresh()
            leaf_names[v] = node.label
            return v
        if len(node.children) != 2:
            raise DegreeViolation(
                f"internal node at position {node.pos} has {len(node.children)} children; "
                "binary trees need exactly 2"
            )
        v = fresh()
        for child in node.children:
            add_edge(v, walk(child))
        return v

    kids = root.children
    if not kids:
        # A bare labelled leaf, e.g. "A;"
        leaf_names[fresh()] = root.label
        return adjacency, leaf_names, warnings
    if len(kids) == 1:
        raise DegreeViolation(f"root at position {root.pos} has a single child")
    if len(kids) == 2:
        # Rooted bifurcating input: drop the root, join its children.
        warnings.append(ROOT_SUPPRESSED)
        add_edge(walk(kids[0]), walk(kids[1]))
        return adjacency, leaf_names, warnings
    if len(kids) == 3:
        center = fresh()
        for child in kids:
            add_edge(center, walk(child))
        return adjacency, leaf_names, warnings
    raise DegreeViolation(
        f"root at position {root.pos} has {len(kids)} children; at most 3 are allowed"
    )


def parse_newick(text: str) -> NewickDoc:
    """Parse one Newick statement into an unrooted binary tree.

    Raises NewickSyntaxError (with a character position) for malformed
    input, and DegreeViolation / DuplicateLabel / EmptyLabel for well-formed
    strings describing an invalid tree.
    """
    parser = _Parser(text)
    root = parser.parse()
    adjacency, leaf_names, warnings = _collect(root)
    if parser.saw_length:
        warnings.append(BRANCH_LENGTHS_DISCARDED)
    if not adjacency:
        ((v, name),) = leaf_names.items()
        tree = PhyloTree({v: ()}, {v: name})
    else:
        tree = PhyloTree(adjacency, leaf_names)
    return NewickDoc(tree=tree, text=text, warnings=tuple(warnings))


def _quote(name: str) -> str:
    if any(ch in _QUOTE_TRIGGERS for ch in name):
        return "'" + name.replace("'", "''") + "'"
    return name


def serialize_newick(tree: PhyloTree) -> str:
    """Deterministic Newick text for a tree with n >= 3.

    The output is rooted at the internal vertex adjacent to leaf index 0
    and children are ordered by the smallest leaf index in their subtree,
    so isomorphic labelled trees serialize identically.
    """
    if tree.n < 3:
        raise TooFewLeaves(f"serialization needs n >= 3, got n = {tree.n}")
    leaf0 = tree.leaf_vertex(0)
    center = tree.neighbors(leaf0)[0]

    def min_index(v: int, parent: int) -> int:
        if v == leaf0:
            return 0
        edge = (v, parent) if v < parent else (parent, v)
        far = tree.edge_far_vertex(edge)
        mask = tree.edge_split(edge).mask
        if far != v:
            mask ^= tree.full_mask
        return (mask & -mask).bit_length() - 1

    def render(v: int, parent: int) -> str:
        if tree.is_leaf(v):
            return _quote(tree.leaf_name(v))
        kids = sorted((w for w in tree.neighbors(v) if w != parent), key=lambda w: min_index(w, v))
        return "(" + ",".join(render(w, v) for w in kids) + ")"

    kids = sorted(tree.neighbors(center), key=lambda w: min_index(w, center))
    return "(" + ",".join(render(w, center) for w in kids) + ");"
