"""Tests for automorphism module."""

import math

import numpy as np
import pytest

from treeaut.automorphism import (
    AutSize,
    aut_rooted,
    aut_unrooted,
    brute_force_aut,
    cutoff_functionals,
    ln_factorial,
    log_aut_rooted,
    log_aut_unrooted,
    orbit_count,
    rooted_class_at_every_vertex,
    toll,
    vertex_orbits,
)
from treeaut.enumeration import enumerate_rooted_trees, enumerate_unrooted_trees
from treeaut.errors import BruteForceLimitError
from treeaut.textio import parse_parens
from treeaut.trees import RootedTree, UnrootedTree, class_ids


def star(k: int) -> UnrootedTree:
    return UnrootedTree(k + 1, np.array([[0, i] for i in range(1, k + 1)]))


class TestAutSize:
    """Tests for AutSize."""

    def test_rejects_zero(self):
        """Test a group order below one is invalid."""
        with pytest.raises(ValueError):
            AutSize(0, 0.0)

    def test_doubled(self):
        """Test doubling keeps exact and log values in step."""
        doubled = AutSize(3, math.log(3)).doubled()
        assert doubled.exact == 6
        assert doubled.log_value == pytest.approx(math.log(6))


class TestLnFactorial:
    """Tests for ln_factorial."""

    @pytest.mark.parametrize("m", [0, 1, 2, 10, 170])
    def test_small_values(self, m):
        """Test agreement with lgamma."""
        assert ln_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-12)

    def test_past_table(self):
        """Test values beyond the table fall back to lgamma."""
        m = 2 * 10**6
        assert ln_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-12)


class TestRooted:
    """Tests for rooted automorphism counts."""

    def test_four_leaf_star(self, star4):
        """Test the star with four leaves has 24 automorphisms."""
        aut = aut_rooted(star4)
        assert aut.exact == 24
        assert aut.log_value == pytest.approx(math.log(24))

    def test_single_vertex(self):
        """Test the trivial tree."""
        assert aut_rooted(RootedTree.from_parents([-1])).exact == 1

    def test_nested_multiplicities(self):
        """Test |Aut| of two cherries below a root is 2! * 2 * 2."""
        assert aut_rooted(parse_parens("((()())(()()))")).exact == 8

    def test_mixed_branches(self):
        """Test distinct branch types do not multiply."""
        assert aut_rooted(parse_parens("(()(()))")).exact == 1

    def test_log_fast_path_agrees(self):
        """Test log_aut_rooted against the exact count on every class of order 9."""
        for tree in enumerate_rooted_trees(9):
            assert log_aut_rooted(tree) == pytest.approx(aut_rooted(tree).log_value, abs=1e-9)

    def test_deep_path(self):
        """Test long paths do not recurse."""
        n = 50000
        tree = RootedTree.from_parents([-1] + list(range(n - 1)))
        assert aut_rooted(tree).exact == 1

    def test_huge_star_log(self):
        """Test the log stays finite when the exact value is astronomically large."""
        n = 3000
        tree = RootedTree.from_parents([-1] + [0] * (n - 1))
        assert log_aut_rooted(tree) == pytest.approx(math.lgamma(n), rel=1e-12)

    def test_toll(self):
        """Test the root toll counts only the root's multiplicities."""
        tree = parse_parens("(()()(()())(()()))")
        assert toll(tree) == pytest.approx(2 * math.log(2))

    def test_cutoff_functionals_sum(self):
        """Test the two cutoff parts add up to log|Aut|."""
        tree = parse_parens("(()()()(()()()))")
        le, gt = cutoff_functionals(tree, 2)
        assert le == pytest.approx(0.0)
        assert gt == pytest.approx(2 * math.log(6))
        assert le + gt == pytest.approx(log_aut_rooted(tree))

    def test_cutoff_small_multiplicities(self):
        """Test multiplicities at the cutoff go to the lower part."""
        le, gt = cutoff_functionals(parse_parens("(()()(()()))"), 2)
        assert le == pytest.approx(2 * math.log(2))
        assert gt == 0.0

    def test_cutoff_must_be_positive(self):
        """Test N = 0 is rejected."""
        with pytest.raises(ValueError):
            cutoff_functionals(parse_parens("(())"), 0)


class TestUnrooted:
    """Tests for free-tree automorphism counts."""

    @pytest.mark.parametrize("n,expected", [(1, 1), (2, 2), (3, 2), (4, 2), (5, 2)])
    def test_paths(self, n, expected):
        """Test paths have the reversal symmetry."""
        tree = UnrootedTree(n, np.array([[i, i + 1] for i in range(n - 1)]))
        assert aut_unrooted(tree).exact == expected

    def test_star(self):
        """Test a star with k leaves has k! automorphisms."""
        assert aut_unrooted(star(5)).exact == 120

    def test_symmetry_line_doubles(self, symmetric_double_star):
        """Test swapping the two halves doubles the rooted count."""
        assert aut_unrooted(symmetric_double_star).exact == 8
        assert log_aut_unrooted(symmetric_double_star) == pytest.approx(math.log(8))

    def test_central_edge_does_not_double(self):
        """Test different halves keep the rooted count."""
        tree = UnrootedTree(6, np.array([[0, 1], [0, 2], [2, 3], [1, 4], [1, 5]]))
        assert aut_unrooted(tree).exact == 2

    def test_log_matches_exact(self):
        """Test log_aut_unrooted on every free tree of order 10."""
        for tree in enumerate_unrooted_trees(10):
            assert log_aut_unrooted(tree) == pytest.approx(aut_unrooted(tree).log_value, abs=1e-9)

    def test_labeled_count_identity(self):
        """Test sum of n!/|Aut| over free trees is n**(n-2)."""
        for n in range(1, 11):
            total = sum(math.factorial(n) // aut_unrooted(t).exact for t in enumerate_unrooted_trees(n))
            assert total == (n ** (n - 2) if n > 1 else 1)

    def test_rooted_labeled_count_identity(self):
        """Test sum of n!/|Aut| over rooted classes is n**(n-1)."""
        for n in range(1, 11):
            total = sum(math.factorial(n) // aut_rooted(t).exact for t in enumerate_rooted_trees(n))
            assert total == n ** (n - 1)


class TestBruteForce:
    """Tests for the permutation-search oracle."""

    def test_star_rooted(self, star4):
        """Test the rooted star by search."""
        assert brute_force_aut(star4).exact == 24

    def test_path_unrooted(self, path5):
        """Test the free path by search."""
        assert brute_force_aut(path5).exact == 2

    def test_limit(self):
        """Test the search refuses large trees."""
        with pytest.raises(BruteForceLimitError):
            brute_force_aut(star(11))

    def test_agrees_on_rooted_classes(self):
        """Test recursion and search agree on every rooted class of order 8."""
        for tree in enumerate_rooted_trees(8):
            assert brute_force_aut(tree).exact == aut_rooted(tree).exact

    def test_agrees_on_free_trees(self):
        """Test recursion and search agree on every free tree of order 8."""
        for tree in enumerate_unrooted_trees(8):
            assert brute_force_aut(tree).exact == aut_unrooted(tree).exact

    @pytest.mark.slow
    def test_agrees_rooted_up_to_ten(self):
        """Test every rooted class with n <= 10."""
        for n in range(1, 11):
            for tree in enumerate_rooted_trees(n):
                assert brute_force_aut(tree).exact == aut_rooted(tree).exact

    @pytest.mark.slow
    def test_agrees_unrooted_up_to_nine(self):
        """Test every free tree with n <= 9."""
        for n in range(1, 10):
            for tree in enumerate_unrooted_trees(n):
                assert brute_force_aut(tree).exact == aut_unrooted(tree).exact


class TestOrbits:
    """Tests for vertex orbits."""

    def test_path_orbits(self, path5):
        """Test a path pairs vertices by distance from the middle."""
        assert vertex_orbits(path5) == [[0, 4], [1, 3], [2]]
        assert orbit_count(path5) == 3

    def test_star_orbits(self):
        """Test a star has the center and the leaves."""
        assert orbit_count(star(6)) == 2

    def test_symmetry_line_orbits(self, symmetric_double_star):
        """Test the two centers share an orbit."""
        assert vertex_orbits(symmetric_double_star) == [[0, 1], [2, 3, 4, 5]]

    def test_rerooting_matches_direct_rooting(self):
        """Test rerooted classes agree with rooting at each vertex from scratch."""
        for tree in enumerate_unrooted_trees(9):
            table = {}
            rerooted = rooted_class_at_every_vertex(tree, table)
            for v in range(tree.n):
                direct = class_ids(tree.rooted_at(v), table)[v]
                assert rerooted[v] == direct

    def test_exact_orbits_agree(self):
        """Test isomorphism-based orbits agree with explicit search for n = 8."""
        for tree in enumerate_unrooted_trees(8):
            assert vertex_orbits(tree) == vertex_orbits(tree, exact=True)

    def test_orbit_stabilizer(self):
        """Test |Aut| = |orbit of v| * |Aut rooted at v| for every vertex."""
        for tree in enumerate_unrooted_trees(8):
            total = aut_unrooted(tree).exact
            for block in vertex_orbits(tree):
                for v in block:
                    assert len(block) * aut_rooted(tree.rooted_at(v)).exact == total

    @pytest.mark.slow
    def test_orbit_stabilizer_up_to_twelve(self):
        """Test the orbit-stabilizer identity on exact orbits for every free tree with n <= 12."""
        for n in range(1, 13):
            for tree in enumerate_unrooted_trees(n):
                total = aut_unrooted(tree).exact
                blocks = vertex_orbits(tree, exact=True)
                assert blocks == vertex_orbits(tree)
                for block in blocks:
                    for v in block:
                        assert len(block) * aut_rooted(tree.rooted_at(v)).exact == total

    def test_exact_orbit_limit(self):
        """Test the automorphism search refuses trees above its limit."""
        tree = enumerate_unrooted_trees(6)[0]
        assert vertex_orbits(tree, exact=True, limit=6)
        with pytest.raises(BruteForceLimitError):
            vertex_orbits(tree, exact=True, limit=5)
