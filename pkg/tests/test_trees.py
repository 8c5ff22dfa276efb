"""Tests for trees module."""

from itertools import permutations

import numpy as np
import pytest

from treeaut.enumeration import enumerate_rooted_trees, enumerate_unrooted_trees
from treeaut.errors import TreeFormatError
from treeaut.textio import parse_parens
from treeaut.trees import (
    CentroidKind,
    RootedTree,
    UnrootedTree,
    branch_decomposition,
    canonical_code,
    class_ids,
    find_centroid,
    max_component_sizes,
    rooted_isomorphic,
)


def brute_isomorphic(a: RootedTree, u: int, b: RootedTree, v: int) -> bool:
    """Whether the subtree of a at u maps onto the subtree of b at v, trying every child matching."""
    ca, cb = a.children(u).tolist(), b.children(v).tolist()
    if len(ca) != len(cb):
        return False
    return any(all(brute_isomorphic(a, x, b, y) for x, y in zip(ca, perm)) for perm in permutations(cb))


def relabeled(tree: RootedTree, gen) -> RootedTree:
    """The same tree under a random vertex relabeling, so child orders change too."""
    perm = gen.permutation(tree.n)
    parents = np.full(tree.n, -1, dtype=np.int64)
    for v, p in enumerate(tree.parents.tolist()):
        if p >= 0:
            parents[perm[v]] = perm[p]
    return RootedTree.from_parents(parents)


def largest_component_after_deleting(tree: UnrootedTree, v: int) -> int:
    seen = {v}
    largest = 0
    for start in tree.neighbors(v).tolist():
        stack, size = [start], 0
        seen.add(start)
        while stack:
            w = stack.pop()
            size += 1
            for x in tree.neighbors(w).tolist():
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        largest = max(largest, size)
    return largest


class TestRootedTree:
    """Tests for RootedTree construction and views."""

    def test_from_parents(self):
        """Test children, parents and degrees from a parent array."""
        tree = RootedTree.from_parents([-1, 0, 0, 1])

        assert tree.n == 4
        assert tree.root == 0
        assert tree.children(0).tolist() == [1, 2]
        assert tree.children(1).tolist() == [3]
        assert tree.parents.tolist() == [-1, 0, 0, 1]
        assert tree.out_degrees.tolist() == [2, 1, 0, 0]
        assert tree.root_degree == 2

    def test_root_need_not_be_zero(self):
        """Test a parent array rooted at another id."""
        tree = RootedTree.from_parents([2, 2, -1])
        assert tree.root == 2
        assert sorted(tree.children(2).tolist()) == [0, 1]

    def test_from_offspring_bfs_ids(self):
        """Test offspring counts are read in breadth-first order."""
        tree = RootedTree.from_offspring([2, 1, 0, 0])
        assert tree.children(0).tolist() == [1, 2]
        assert tree.children(1).tolist() == [3]
        assert tree.bfs_order.tolist() == [0, 1, 2, 3]

    def test_from_children(self):
        """Test explicit child lists."""
        tree = RootedTree.from_children([[1, 2, 3], [], [], []])
        assert tree.root_degree == 3

    def test_single_vertex(self):
        """Test the one-vertex tree."""
        tree = RootedTree.from_parents([-1])
        assert tree.n == 1
        assert tree.height == 0
        assert tree.subtree_sizes.tolist() == [1]

    def test_levels_height_and_sizes(self):
        """Test depth levels, height and subtree sizes."""
        tree = parse_parens("((())())")
        assert [level.tolist() for level in tree.levels] == [[0], [1, 3], [2]]
        assert tree.height == 2
        assert tree.subtree_sizes.tolist() == [4, 2, 1, 1]

    def test_arrays_are_read_only(self):
        """Test the CSR arrays cannot be mutated."""
        tree = RootedTree.from_parents([-1, 0])
        with pytest.raises(ValueError):
            tree.child_list[0] = 0

    @pytest.mark.parametrize("parents", [[-1, -1], [0, 1], [-1, 5], [-1, 2, 1]])
    def test_invalid_parent_arrays(self, parents):
        """Test malformed parent arrays raise TreeFormatError."""
        with pytest.raises(TreeFormatError):
            RootedTree.from_parents(parents)

    def test_bad_offspring_sum(self):
        """Test offspring counts must sum to n - 1."""
        with pytest.raises(TreeFormatError):
            RootedTree.from_offspring([2, 0])

    def test_to_unrooted_keeps_ids(self):
        """Test forgetting the root keeps the edge set."""
        free = RootedTree.from_parents([-1, 0, 1]).to_unrooted()
        assert sorted(map(tuple, free.edges.tolist())) == [(0, 1), (1, 2)]


class TestUnrootedTree:
    """Tests for UnrootedTree."""

    def test_degrees_and_neighbors(self, path5):
        """Test adjacency of a path."""
        assert path5.degrees.tolist() == [1, 2, 2, 2, 1]
        assert sorted(path5.neighbors(2).tolist()) == [1, 3]

    def test_rooted_at_keeps_ids(self, path5):
        """Test rooting at a vertex keeps ids."""
        rooted = path5.rooted_at(2)
        assert rooted.root == 2
        assert rooted.height == 2

    def test_rooted_at_blocked(self, path5):
        """Test cutting an edge returns one component relabelled."""
        half = path5.rooted_at(2, blocked=3)
        assert half.n == 3
        assert half.root == 0
        assert half.height == 2

    def test_disconnected_rejected(self):
        """Test a disconnected edge list raises TreeFormatError."""
        with pytest.raises(TreeFormatError):
            UnrootedTree(4, np.array([[0, 1], [1, 0], [2, 3]]))

    def test_wrong_edge_count(self):
        """Test n - 1 edges are required."""
        with pytest.raises(TreeFormatError):
            UnrootedTree(3, np.array([[0, 1]]))

    def test_self_loop(self):
        """Test self-loops are rejected."""
        with pytest.raises(TreeFormatError):
            UnrootedTree(2, np.array([[1, 1]]))


class TestCanonicalForms:
    """Tests for canonical codes and class ids."""

    def test_plane_representatives_share_code(self):
        """Test reordering children does not change the code."""
        a = parse_parens("((())())")
        b = parse_parens("(()(()))")
        assert canonical_code(a) == canonical_code(b)
        assert rooted_isomorphic(a, b)

    def test_different_shapes_differ(self):
        """Test a path and a cherry of the same order differ."""
        assert not rooted_isomorphic(parse_parens("((()))"), parse_parens("(()())"))

    def test_different_orders(self):
        """Test trees of different order are never isomorphic."""
        assert not rooted_isomorphic(parse_parens("(())"), parse_parens("(()())"))

    def test_class_ids_shared_table(self):
        """Test ids agree across trees interned into one table."""
        table = {}
        a = class_ids(parse_parens("(()())"), table)
        b = class_ids(parse_parens("((()()))"), table)
        assert a[0] == b[1]
        assert a[1] == a[2] == b[2]

    def test_leaves_share_class(self, star4):
        """Test all leaves get one class."""
        ids = class_ids(star4)
        assert len(set(ids[1:].tolist())) == 1

    def test_branch_decomposition(self):
        """Test branches are grouped by isomorphism type."""
        tree = parse_parens("(()()(()))")
        assert branch_decomposition(tree) == [("(())", 1), ("()", 2)]

    @pytest.mark.slow
    def test_codes_match_brute_force_isomorphism(self):
        """Test equal codes exactly when a child matching exists, over all pairs up to order 8."""
        gen = np.random.default_rng(3)
        for n in range(1, 9):
            trees = [relabeled(t, gen) for t in enumerate_rooted_trees(n) for _ in range(2)]
            codes = [canonical_code(t) for t in trees]
            for i, a in enumerate(trees):
                for j in range(i, len(trees)):
                    b = trees[j]
                    assert (codes[i] == codes[j]) == brute_isomorphic(a, a.root, b, b.root)


class TestCentroid:
    """Tests for centroid location and classification."""

    def test_single_vertex(self):
        """Test the one-vertex tree is its own centroid."""
        info = find_centroid(UnrootedTree(1, np.empty((0, 2))))
        assert info.centroids == (0,)
        assert info.kind is CentroidKind.CENTRAL_VERTEX

    def test_odd_path(self, path5):
        """Test the middle of a path on five vertices."""
        info = find_centroid(path5)
        assert info.centroids == (2,)
        assert info.kind is CentroidKind.CENTRAL_VERTEX

    def test_symmetry_line(self, symmetric_double_star):
        """Test two isomorphic halves give a symmetry line."""
        info = find_centroid(symmetric_double_star)
        assert info.centroids == (0, 1)
        assert info.kind is CentroidKind.SYMMETRY_LINE

    def test_central_edge_without_symmetry(self):
        """Test two centroids with different halves."""
        # Halves: a path on three vertices and a cherry.
        tree = UnrootedTree(6, np.array([[0, 1], [0, 2], [2, 3], [1, 4], [1, 5]]))
        info = find_centroid(tree)
        assert info.centroids == (0, 1)
        assert info.kind is CentroidKind.CENTRAL_EDGE

    def test_max_component_sizes(self, path5):
        """Test the largest remaining component per deleted vertex."""
        assert max_component_sizes(path5).tolist() == [4, 3, 2, 3, 4]

    @pytest.mark.slow
    def test_every_free_tree_up_to_twelve(self):
        """Test centroids minimise the largest component and the kind matches the halves."""
        for n in range(1, 13):
            for tree in enumerate_unrooted_trees(n):
                largest = [largest_component_after_deleting(tree, v) for v in range(n)]
                best = min(largest)
                info = find_centroid(tree)
                assert info.centroids == tuple(v for v in range(n) if largest[v] == best)
                assert all(largest[c] <= n // 2 for c in info.centroids)
                if len(info.centroids) == 1:
                    assert info.kind is CentroidKind.CENTRAL_VERTEX
                    continue
                u, v = info.centroids
                assert v in tree.neighbors(u).tolist()
                a, b = tree.rooted_at(u, blocked=v), tree.rooted_at(v, blocked=u)
                symmetric = a.n == b.n and brute_isomorphic(a, a.root, b, b.root)
                assert info.kind is (CentroidKind.SYMMETRY_LINE if symmetric else CentroidKind.CENTRAL_EDGE)
