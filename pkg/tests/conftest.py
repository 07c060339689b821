"""Shared helpers: definitional rearrangement checks built only on restriction
and subtree-swap surgery, independent of the scar-edge classification rules
they are used to validate."""

from __future__ import annotations

import pytest

from treespace import PhyloTree, build_tree
from treespace.tree_core import Edge


def names_of_mask(tree: PhyloTree, mask: int) -> set[str]:
    return {tree.leaf_order[i] for i in range(tree.n) if mask >> i & 1}


def cluster_attachment(tree: PhyloTree, mask: int) -> tuple[int, int]:
    """(root vertex of the cluster's subtree, vertex it attaches to)."""
    edge = tree.edge_with_mask(mask)
    far = tree.edge_far_vertex(edge)
    near = edge[0] + edge[1] - far
    if mask & 1:  # cluster holds leaf 0, so it is the near side
        return near, far
    return far, near


def swap_clusters(tree: PhyloTree, y_mask: int, z_mask: int) -> PhyloTree:
    """Exchange the pendant subtrees of two disjoint clusters."""
    assert y_mask & z_mask == 0
    ry, ay = cluster_attachment(tree, y_mask)
    rz, az = cluster_attachment(tree, z_mask)
    dropped = {tuple(sorted((ry, ay))), tuple(sorted((rz, az)))}
    edges: list[Edge] = [e for e in tree.edges() if e not in dropped]
    edges += [(ay, rz), (az, ry)]
    names = {v: tree.leaf_name(v) for v in tree.vertices() if tree.is_leaf(v)}
    return build_tree(edges, names)


def restriction_preserved(tree: PhyloTree, result: PhyloTree, kept_mask: int) -> bool:
    """T|(X + {x}) == T'|(X + {x}) for one leaf x outside X.

    Holding for one outside leaf is equivalent to holding for all of them,
    so a single arbitrary pick (the lowest outside index) suffices.
    """
    outside = kept_mask ^ tree.full_mask
    x = (outside & -outside).bit_length() - 1
    leaves = names_of_mask(tree, kept_mask) | {tree.leaf_order[x]}
    return tree.restrict(leaves) == result.restrict(leaves)


def spr_definitional(tree: PhyloTree, result: PhyloTree, bisect_mask: int) -> bool:
    """The restriction-based SPR test: one component of the bisection keeps
    its position relative to the other."""
    return restriction_preserved(tree, result, bisect_mask) or restriction_preserved(
        tree, result, bisect_mask ^ tree.full_mask
    )


def nni_definitional(tree: PhyloTree, result: PhyloTree, bisect_mask: int) -> bool:
    """The subtree-swap NNI test.

    The pruned component Y is the side whose restriction (plus one foreign
    leaf) is preserved; the move is an interchange exactly when the result
    equals the tree with Y swapped against some disjoint cluster Z.
    """
    full = tree.full_mask
    for y in (bisect_mask, bisect_mask ^ full):
        if not restriction_preserved(tree, result, y):
            continue
        for z in tree.cluster_masks:
            # z must be a different subtree: disjoint from y and not its
            # complement (both sides of one split hang off the same edge).
            if z & y or z | y == full:
                continue
            if swap_clusters(tree, y, z) == result:
                return True
    return False


@pytest.fixture
def quartet():
    from treespace import parse_newick

    return parse_newick("((1,2),(3,4));").tree
