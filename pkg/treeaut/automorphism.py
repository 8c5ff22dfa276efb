"""
Automorphism-group orders of rooted and free trees.

For a rooted tree whose root branches fall into isomorphism classes T_1..T_k
with multiplicities m_1..m_k,

    |Aut T| = prod_i m_i! * |Aut T_i| ** m_i

so log|Aut T| is the additive functional with toll sum_i ln(m_i!). The order
is computed once per isomorphism class (classes are interned children first,
so increasing class id is a valid evaluation order).
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .config import EnumerationConfig
from .errors import BruteForceLimitError
from .trees import (
    CentroidKind,
    ClassTable,
    RootedTree,
    UnrootedTree,
    class_ids,
    find_centroid,
)

logger = logging.getLogger(__name__)

LN_FACTORIAL_TABLE_SIZE = 10**6
LN2 = math.log(2.0)


@dataclass(frozen=True)
class AutSize:
    """Exact group order with its natural logarithm carried alongside."""
    exact: int
    log_value: float

    def __post_init__(self):
        if self.exact < 1:
            raise ValueError(f"Automorphism group order must be >= 1, got {self.exact}")

    def doubled(self) -> "AutSize":
        return AutSize(2 * self.exact, self.log_value + LN2)


@lru_cache(maxsize=1)
def _ln_factorial_table() -> np.ndarray:
    logger.debug(f"Building ln(m!) table with {LN_FACTORIAL_TABLE_SIZE + 1} entries")
    table = gammaln(np.arange(LN_FACTORIAL_TABLE_SIZE + 1, dtype=np.float64) + 1.0)
    table.flags.writeable = False
    return table


def ln_factorial(m: int) -> float:
    """ln(m!) from a shared table, falling back to lgamma past its end."""
    if m <= LN_FACTORIAL_TABLE_SIZE:
        return float(_ln_factorial_table()[m])
    return math.lgamma(m + 1.0)


def _class_keys(tree: RootedTree) -> Tuple[int, List[Tuple[int, ...]]]:
    """Root class id and, per class id, the sorted child class ids."""
    table: ClassTable = {}
    ids = class_ids(tree, table)
    keys: List[Tuple[int, ...]] = [()] * len(table)
    for key, cid in table.items():
        keys[cid] = key
    return int(ids[tree.root]), keys


def _fold(tree: RootedTree, combine: Callable[[Sequence, Counter], object]):
    """Evaluate ``combine(values, multiplicities)`` over classes, children first."""
    root_class, keys = _class_keys(tree)
    values: List[object] = []
    for key in keys:
        values.append(combine(values, Counter(key)))
    return values[root_class]


def aut_rooted(tree: RootedTree) -> AutSize:
    """Exact root-preserving automorphism count."""

    def combine(values, mults):
        exact, log_value = 1, 0.0
        for child, m in mults.items():
            child_exact, child_log = values[child]
            exact *= math.factorial(m) * child_exact**m
            log_value += ln_factorial(m) + m * child_log
        return exact, log_value

    return AutSize(*_fold(tree, combine))


def log_aut_rooted(tree: RootedTree) -> float:
    """log|Aut| in floating point only."""

    def combine(values, mults):
        return sum(ln_factorial(m) + m * values[child] for child, m in mults.items())

    return _fold(tree, combine)


def toll(tree: RootedTree) -> float:
    """Sum of ln(m_i!) over the root's branch multiplicities."""
    root_class, keys = _class_keys(tree)
    return sum(ln_factorial(m) for m in Counter(keys[root_class]).values())


def cutoff_functionals(tree: RootedTree, N: int) -> Tuple[float, float]:
    """
    Split log|Aut| by branch multiplicity.

    Returns:
        (F_le, F_gt): the additive functionals whose tolls keep only the
        ln(m!) terms with m <= N, respectively m > N.
    """
    if N < 1:
        raise ValueError(f"Cutoff must be >= 1, got {N}")

    def combine(values, mults):
        le = gt = 0.0
        for child, m in mults.items():
            child_le, child_gt = values[child]
            if m <= N:
                le += ln_factorial(m)
            else:
                gt += ln_factorial(m)
            le += m * child_le
            gt += m * child_gt
        return le, gt

    return _fold(tree, combine)


def aut_unrooted(tree: UnrootedTree) -> AutSize:
    """
    Automorphism count of a free tree.

    Every automorphism fixes the centroid set, so the group is the rooted one
    at a centroid, doubled when a symmetry line lets the two centroids swap.
    """
    if tree.n == 1:
        return AutSize(1, 0.0)
    if tree.n == 2:
        return AutSize(2, LN2)
    info = find_centroid(tree)
    base = aut_rooted(tree.rooted_at(info.centroids[0]))
    if info.kind is CentroidKind.SYMMETRY_LINE:
        return base.doubled()
    return base


def log_aut_unrooted(tree: UnrootedTree) -> float:
    """log|Aut| of a free tree in floating point only."""
    if tree.n <= 2:
        return 0.0 if tree.n == 1 else LN2
    info = find_centroid(tree)
    value = log_aut_rooted(tree.rooted_at(info.centroids[0]))
    if info.kind is CentroidKind.SYMMETRY_LINE:
        value += LN2
    return value


def _adjacency_sets(tree: Union[RootedTree, UnrootedTree]) -> List[set]:
    edges = tree.to_unrooted().edges if isinstance(tree, RootedTree) else tree.edges
    adj = [set() for _ in range(tree.n)]
    for u, v in edges.tolist():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _count_maps(adj: List[set], start: int, first_images: Sequence[int], stop_at_first: bool = False) -> int:
    """
    Count adjacency-preserving bijections by backtracking.

    Vertices are mapped in BFS order from ``start``; ``start`` may only go to
    ``first_images``. A partial map is extended only while it preserves
    adjacency and non-adjacency among all mapped vertices.
    """
    n = len(adj)
    order = [start]
    parent = {start: None}
    for v in order:
        for w in sorted(adj[v]):
            if w not in parent:
                parent[w] = v
                order.append(w)
    image = [-1] * n
    used = [False] * n
    count = 0

    def extend(i: int) -> bool:
        nonlocal count
        if i == n:
            count += 1
            return stop_at_first
        v = order[i]
        candidates = first_images if i == 0 else sorted(adj[image[parent[v]]])
        for w in candidates:
            if used[w] or len(adj[w]) != len(adj[v]):
                continue
            if any((order[k] in adj[v]) != (image[order[k]] in adj[w]) for k in range(i)):
                continue
            image[v], used[w] = w, True
            done = extend(i + 1)
            image[v], used[w] = -1, False
            if done:
                return True
        return False

    extend(0)
    return count


def brute_force_aut(tree: Union[RootedTree, UnrootedTree], limit: Optional[int] = None) -> AutSize:
    """
    Count automorphisms by explicit search over vertex permutations.

    Rooted trees must also fix the root.

    Raises:
        BruteForceLimitError: If n exceeds ``limit`` (defaults: 10 rooted, 9 unrooted).
    """
    rooted = isinstance(tree, RootedTree)
    if limit is None:
        limit = EnumerationConfig.brute_force_rooted_cap if rooted else EnumerationConfig.brute_force_unrooted_cap
    if tree.n > limit:
        raise BruteForceLimitError(tree.n, limit)
    adj = _adjacency_sets(tree)
    start = tree.root if rooted else 0
    first_images = [start] if rooted else list(range(tree.n))
    count = _count_maps(adj, start, first_images)
    return AutSize(count, math.log(count))


def rooted_class_at_every_vertex(tree: UnrootedTree, table: Optional[ClassTable] = None) -> np.ndarray:
    """
    Class id of the tree rooted at each vertex, by rerooting.

    One pass down computes the classes of the branches below each vertex of
    the tree rooted at 0; a pass up computes the class of the part above each
    vertex, from which the whole tree rooted there follows.
    """
    table = {} if table is None else table

    def intern(key: Tuple[int, ...]) -> int:
        cid = table.get(key)
        if cid is None:
            cid = len(table)
            table[key] = cid
        return cid

    rooted = tree.rooted_at(0)
    down = class_ids(rooted, table).tolist()
    cs, cl = rooted.child_start.tolist(), rooted.child_list.tolist()
    up: Dict[int, int] = {}
    full = [0] * tree.n
    for level in rooted.levels:
        for p in level.tolist():
            kids = cl[cs[p]:cs[p + 1]]
            around = [down[c] for c in kids]
            if p in up:
                around.append(up[p])
            full[p] = intern(tuple(sorted(around)))
            without: Dict[int, int] = {}
            for c in kids:
                d = down[c]
                if d not in without:
                    rest = list(around)
                    rest.remove(d)
                    without[d] = intern(tuple(sorted(rest)))
                up[c] = without[d]
    return np.array(full, dtype=np.int64)


def orbit_count(tree: UnrootedTree) -> int:
    """Number of vertex orbits under Aut."""
    return len(np.unique(rooted_class_at_every_vertex(tree)))


def vertex_orbits(tree: UnrootedTree, exact: bool = False, limit: Optional[int] = None) -> List[List[int]]:
    """
    Partition the vertices into Aut-orbits.

    By default u and v share a block when the tree rooted at u is isomorphic
    to the tree rooted at v. With ``exact`` set, blocks come from a direct
    search for an automorphism mapping u to v (small trees only).

    Returns:
        Blocks as sorted vertex lists, ordered by their smallest vertex.

    Raises:
        BruteForceLimitError: In exact mode above ``limit`` (default 12).
    """
    if exact:
        limit = EnumerationConfig.exact_orbit_cap if limit is None else limit
        if tree.n > limit:
            raise BruteForceLimitError(tree.n, limit)
        adj = _adjacency_sets(tree)
        block_of = [-1] * tree.n
        blocks: List[List[int]] = []
        for v in range(tree.n):
            if block_of[v] >= 0:
                continue
            block_of[v] = len(blocks)
            blocks.append([v])
            for u in range(v + 1, tree.n):
                if block_of[u] < 0 and _count_maps(adj, v, [u], stop_at_first=True):
                    block_of[u] = block_of[v]
                    blocks[-1].append(u)
        return blocks

    groups: Dict[int, List[int]] = {}
    for v, cid in enumerate(rooted_class_at_every_vertex(tree).tolist()):
        groups.setdefault(cid, []).append(v)
    return sorted(groups.values())
