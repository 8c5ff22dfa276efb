"""
Rooted and unrooted tree representations.

Vertex ids are dense integers 0..n-1. Both tree types are immutable after
construction and store their adjacency in compressed (CSR) numpy arrays, so
traversals at n ~ 10**6 stay array-backed.

Isomorphism classes are handled two ways:

* ``canonical_code`` builds the AHU balanced-parentheses string, where a
  vertex's code is "(" + sorted child codes + ")". Equal codes mean
  isomorphic rooted trees.
* ``class_ids`` interns the sorted tuple of child class ids instead, which
  needs no string concatenation and is what the automorphism code uses.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import TreeFormatError

logger = logging.getLogger(__name__)

# Intern table shared between class_ids calls that must compare trees.
ClassTable = Dict[Tuple[int, ...], int]

# [(branch code, multiplicity), ...] sorted by code.
BranchDecomposition = List[Tuple[str, int]]


def _gather(starts: np.ndarray, items: np.ndarray, frontier: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Concatenate the CSR rows of every vertex in ``frontier``.

    Returns:
        (row entries, owning frontier vertex for each entry)
    """
    counts = starts[frontier + 1] - starts[frontier]
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    ends = np.cumsum(counts)
    offsets = np.repeat(starts[frontier] - ends + counts, counts) + np.arange(total)
    return items[offsets], np.repeat(frontier, counts)


class RootedTree:
    """
    Immutable rooted plane tree.

    Children of vertex v are ``child_list[child_start[v]:child_start[v + 1]]``
    in their plane order.
    """

    def __init__(self, child_start: np.ndarray, child_list: np.ndarray, root: int):
        self._child_start = np.asarray(child_start, dtype=np.int64)
        self._child_list = np.asarray(child_list, dtype=np.int64)
        self._n = len(self._child_start) - 1
        self._root = int(root)
        if self._n < 1:
            raise TreeFormatError("A tree needs at least one vertex")
        if len(self._child_list) != self._n - 1:
            raise TreeFormatError(f"Expected {self._n - 1} child entries, got {len(self._child_list)}")
        if not 0 <= self._root < self._n:
            raise TreeFormatError(f"Root {self._root} out of range for n = {self._n}")
        self._child_start.flags.writeable = False
        self._child_list.flags.writeable = False
        self._validate()

    def _validate(self) -> None:
        if self._n == 1:
            return
        cl = self._child_list
        if cl.min() < 0 or cl.max() >= self._n:
            raise TreeFormatError("Child id out of range")
        seen = np.bincount(cl, minlength=self._n)
        if seen[self._root] != 0:
            raise TreeFormatError("The root cannot be a child")
        if np.any(np.delete(seen, self._root) != 1):
            raise TreeFormatError("Every non-root vertex needs exactly one parent")
        # One parent each plus reachability from the root rules out cycles.
        if len(self.bfs_order) != self._n:
            raise TreeFormatError("Child relation does not span all vertices from the root")

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "RootedTree":
        """
        Build a tree from a parent array with -1 at the root.

        Children keep increasing id order.

        Raises:
            TreeFormatError: If the array does not describe a rooted tree.
        """
        parents = np.asarray(parents, dtype=np.int64)
        n = len(parents)
        roots = np.flatnonzero(parents < 0)
        if len(roots) != 1:
            raise TreeFormatError(f"Expected exactly one root, found {len(roots)}")
        nonroot = np.flatnonzero(parents >= 0)
        if n > 1 and parents[nonroot].max() >= n:
            raise TreeFormatError("Parent id out of range")
        order = np.argsort(parents[nonroot], kind="stable")
        child_list = nonroot[order]
        counts = np.bincount(parents[nonroot], minlength=n)
        child_start = np.concatenate(([0], np.cumsum(counts)))
        return cls(child_start, child_list, int(roots[0]))

    @classmethod
    def from_children(cls, children: Sequence[Sequence[int]], root: int = 0) -> "RootedTree":
        """Build a tree from per-vertex child lists."""
        counts = [len(c) for c in children]
        child_start = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
        flat = [c for row in children for c in row]
        return cls(child_start, np.array(flat, dtype=np.int64), root)

    @classmethod
    def from_offspring(cls, offspring: Sequence[int]) -> "RootedTree":
        """
        Build a tree from offspring counts listed in breadth-first order.

        Vertex i gets the next ``offspring[i]`` unused ids as its children, so
        the ids come out in breadth-first order with the root at 0.
        """
        offspring = np.asarray(offspring, dtype=np.int64)
        n = len(offspring)
        if n < 1 or offspring.sum() != n - 1:
            raise TreeFormatError("Offspring counts must sum to n - 1")
        child_start = np.concatenate(([0], np.cumsum(offspring)))
        return cls(child_start, np.arange(1, n, dtype=np.int64), 0)

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self._n

    @property
    def root(self) -> int:
        return self._root

    @property
    def child_start(self) -> np.ndarray:
        return self._child_start

    @property
    def child_list(self) -> np.ndarray:
        return self._child_list

    def children(self, v: int) -> np.ndarray:
        """Children of ``v`` in plane order."""
        return self._child_list[self._child_start[v]:self._child_start[v + 1]]

    @cached_property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self._child_start)

    @property
    def root_degree(self) -> int:
        return int(self.out_degrees[self._root])

    @cached_property
    def parents(self) -> np.ndarray:
        parents = np.full(self._n, -1, dtype=np.int64)
        parents[self._child_list] = np.repeat(np.arange(self._n), self.out_degrees)
        return parents

    @cached_property
    def levels(self) -> List[np.ndarray]:
        """Vertices grouped by depth, root level first."""
        levels = []
        frontier = np.array([self._root], dtype=np.int64)
        visited = 0
        while len(frontier) and visited <= self._n:
            levels.append(frontier)
            visited += len(frontier)
            frontier, _ = _gather(self._child_start, self._child_list, frontier)
        return levels

    @cached_property
    def bfs_order(self) -> np.ndarray:
        return np.concatenate(self.levels)

    @property
    def height(self) -> int:
        """Length of the longest root-to-leaf path."""
        return len(self.levels) - 1

    @cached_property
    def subtree_sizes(self) -> np.ndarray:
        sizes = np.ones(self._n, dtype=np.int64)
        parents = self.parents
        for level in reversed(self.levels[1:]):
            np.add.at(sizes, parents[level], sizes[level])
        return sizes

    def to_unrooted(self) -> "UnrootedTree":
        """Forget the root, keeping vertex ids."""
        parents = self.parents
        nonroot = np.flatnonzero(parents >= 0)
        return UnrootedTree(self._n, np.column_stack((parents[nonroot], nonroot)))

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return f"RootedTree(n={self._n}, root={self._root})"


class UnrootedTree:
    """Immutable free tree given by n - 1 undirected edges over ids 0..n-1."""

    def __init__(self, n: int, edges):
        if n < 1:
            raise TreeFormatError("A tree needs at least one vertex")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges) != n - 1:
            raise TreeFormatError(f"A tree on {n} vertices has {n - 1} edges, got {len(edges)}")
        if len(edges) and (edges.min() < 0 or edges.max() >= n):
            raise TreeFormatError("Edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise TreeFormatError("Self-loop in edge list")
        self._n = int(n)
        self._edges = edges
        self._edges.flags.writeable = False
        if n > 1 and len(self.rooted_at(0).bfs_order) != n:
            raise TreeFormatError("Edge list is not connected")

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @cached_property
    def _adjacency(self) -> Tuple[np.ndarray, np.ndarray]:
        heads = np.concatenate((self._edges[:, 0], self._edges[:, 1]))
        tails = np.concatenate((self._edges[:, 1], self._edges[:, 0]))
        order = np.argsort(heads, kind="stable")
        counts = np.bincount(heads, minlength=self._n)
        return np.concatenate(([0], np.cumsum(counts))), tails[order]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self._adjacency[0])

    def neighbors(self, v: int) -> np.ndarray:
        starts, items = self._adjacency
        return items[starts[v]:starts[v + 1]]

    def rooted_at(self, root: int, blocked: Optional[int] = None) -> RootedTree:
        """
        Root the tree at ``root``, keeping vertex ids.

        With ``blocked`` set, the edge root-blocked is cut and the component
        containing ``root`` is returned, relabelled densely in BFS order.
        """
        starts, items = self._adjacency
        parents = np.full(self._n, -2, dtype=np.int64)
        parents[root] = -1
        if blocked is not None:
            parents[blocked] = -3
        frontier = np.array([root], dtype=np.int64)
        reached = [frontier]
        while len(frontier):
            nbrs, owners = _gather(starts, items, frontier)
            fresh = parents[nbrs] == -2
            nbrs, owners = nbrs[fresh], owners[fresh]
            parents[nbrs] = owners
            frontier = nbrs
            reached.append(frontier)
        if blocked is None:
            if np.any(parents == -2):
                raise TreeFormatError("Edge list is not connected")
            return RootedTree.from_parents(parents)
        order = np.concatenate(reached)
        relabel = np.full(self._n, -1, dtype=np.int64)
        relabel[order] = np.arange(len(order))
        sub_parents = parents[order]
        sub_parents[1:] = relabel[sub_parents[1:]]
        return RootedTree.from_parents(sub_parents)

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return f"UnrootedTree(n={self._n})"


def canonical_code(tree: RootedTree) -> str:
    """AHU code of ``tree``; equal across all plane representatives of a class."""
    codes: List[Optional[str]] = [None] * tree.n
    for level in reversed(tree.levels):
        for v in level:
            kids = sorted(codes[c] for c in tree.children(v))
            codes[v] = "(" + "".join(kids) + ")"
    return codes[tree.root]


def class_ids(tree: RootedTree, table: Optional[ClassTable] = None) -> np.ndarray:
    """
    Isomorphism class id of the subtree hanging from every vertex.

    Two vertices (of this tree or of any tree interned into the same
    ``table``) get equal ids iff their subtrees are isomorphic.
    """
    table = {} if table is None else table
    ids = [0] * tree.n
    cs, cl = tree.child_start.tolist(), tree.child_list.tolist()
    for level in reversed(tree.levels):
        for v in level.tolist():
            key = tuple(sorted([ids[c] for c in cl[cs[v]:cs[v + 1]]]))
            cid = table.get(key)
            if cid is None:
                cid = len(table)
                table[key] = cid
            ids[v] = cid
    return np.array(ids, dtype=np.int64)


def rooted_isomorphic(a: RootedTree, b: RootedTree) -> bool:
    """Whether two rooted trees are isomorphic."""
    if a.n != b.n:
        return False
    table: ClassTable = {}
    return class_ids(a, table)[a.root] == class_ids(b, table)[b.root]


def branch_decomposition(tree: RootedTree) -> BranchDecomposition:
    """Root branches up to isomorphism with their multiplicities."""
    codes = Counter()
    for child in tree.children(tree.root):
        codes[canonical_code(_subtree(tree, int(child)))] += 1
    return sorted(codes.items())


def _subtree(tree: RootedTree, v: int) -> RootedTree:
    """The branch hanging from ``v``, relabelled densely in BFS order."""
    cs, cl = tree.child_start, tree.child_list
    levels = []
    frontier = np.array([v], dtype=np.int64)
    while len(frontier):
        levels.append(frontier)
        frontier, _ = _gather(cs, cl, frontier)
    order = np.concatenate(levels)
    return RootedTree.from_offspring(tree.out_degrees[order])


class CentroidKind(str, Enum):
    """How the centroid of a free tree looks."""
    CENTRAL_VERTEX = "central-vertex"
    CENTRAL_EDGE = "central-edge"
    SYMMETRY_LINE = "symmetry-line"


@dataclass(frozen=True)
class CentroidInfo:
    """One centroid vertex, or two adjacent ones with the kind of their edge."""
    centroids: Tuple[int, ...]
    kind: CentroidKind


def max_component_sizes(tree: UnrootedTree) -> np.ndarray:
    """Largest component left after deleting each vertex."""
    rooted = tree.rooted_at(0)
    sizes = rooted.subtree_sizes
    parents = rooted.parents
    largest = np.zeros(tree.n, dtype=np.int64)
    nonroot = np.flatnonzero(parents >= 0)
    np.maximum.at(largest, parents[nonroot], sizes[nonroot])
    return np.maximum(largest, tree.n - sizes)


def find_centroid(tree: UnrootedTree) -> CentroidInfo:
    """
    Locate the centroid(s) and classify them.

    Two centroids are always adjacent. Their edge is a symmetry line when the
    two halves left by cutting it are isomorphic as rooted trees.
    """
    if tree.n == 1:
        return CentroidInfo((0,), CentroidKind.CENTRAL_VERTEX)
    largest = max_component_sizes(tree)
    centroids = tuple(int(v) for v in np.flatnonzero(largest <= tree.n // 2))
    if len(centroids) == 1:
        return CentroidInfo(centroids, CentroidKind.CENTRAL_VERTEX)
    u, v = centroids
    halves_match = rooted_isomorphic(tree.rooted_at(u, blocked=v), tree.rooted_at(v, blocked=u))
    kind = CentroidKind.SYMMETRY_LINE if halves_match else CentroidKind.CENTRAL_EDGE
    return CentroidInfo(centroids, kind)
