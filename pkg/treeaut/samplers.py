"""
Exact samplers for the random tree models.

* Conditioned Galton-Watson trees: a degree sequence conditioned on summing
  to n - 1, rotated by the cycle lemma and read in breadth-first order.
* Uniform labeled trees through the Pruefer bijection.
* Uniform rooted Polya trees by recursive (d, j)-attachment driven by the
  exact counts r_n, and uniform free trees by orbit-count rejection.
"""

import heapq
import logging
from typing import List, Optional, Tuple, Union

import numpy as np

from .automorphism import orbit_count
from .config import SamplerConfig
from .errors import CountTableTooSmall, RejectionBudgetExceeded, UnattainableSizeError
from .generating import rooted_counts
from .offspring import FULL_BINARY, GEOMETRIC, POISSON, PRUNED_BINARY, OffspringDistribution
from .random_stream import RandomStream
from .trees import RootedTree, UnrootedTree, rooted_isomorphic

logger = logging.getLogger(__name__)


def cycle_lemma_rotation(degrees) -> np.ndarray:
    """
    The unique rotation of ``degrees`` that is a breadth-first offspring sequence.

    With S_m the partial sums of (xi_i - 1), the rotation starts right after
    the first index where S_m is smallest; every proper partial sum of the
    result is then >= 0.

    Raises:
        ValueError: If the degrees do not sum to len(degrees) - 1.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    walk = np.cumsum(degrees - 1)
    if walk[-1] != -1:
        raise ValueError(f"Degrees sum to {degrees.sum()}, expected {len(degrees) - 1}")
    first_min = int(np.argmin(walk))
    return np.roll(degrees, -(first_min + 1))


def _conditioned_degrees(dist: OffspringDistribution, n: int, rng: RandomStream, budget: int) -> np.ndarray:
    """i.i.d. child counts conditioned on summing to n - 1, in exchangeable order."""
    gen = rng.generator
    if dist.scheme == POISSON:
        # Conditioned Poisson(1) counts are a uniform allocation of n - 1 balls.
        return np.bincount(gen.integers(0, n, size=n - 1), minlength=n)
    if dist.scheme == GEOMETRIC:
        # Every composition of n - 1 into n parts is equally likely.
        bars = np.sort(gen.choice(2 * n - 2, size=n - 1, replace=False))
        return np.diff(np.concatenate(([-1], bars, [2 * n - 2]))) - 1
    if dist.scheme == FULL_BINARY:
        degrees = np.zeros(n, dtype=np.int64)
        degrees[gen.choice(n, size=(n - 1) // 2, replace=False)] = 2
        return degrees
    if dist.scheme == PRUNED_BINARY:
        # Binomial(2, 1/2) counts: n - 1 marked slots out of 2n, two per vertex.
        slots = gen.choice(2 * n, size=n - 1, replace=False)
        return np.bincount(slots // 2, minlength=n)

    for _ in range(budget):
        degrees = dist.sample_offspring(rng, n)
        if degrees.sum() == n - 1:
            return degrees
    raise RejectionBudgetExceeded(budget, f"{dist.name} degree sequence of length {n}")


def sample_conditioned_gw(
    dist: OffspringDistribution,
    n: int,
    rng: RandomStream,
    budget: Optional[int] = None,
) -> RootedTree:
    """
    Galton-Watson tree conditioned on n vertices.

    Args:
        dist: Offspring distribution (weights and sampling scheme).
        n: Tree order.
        rng: Random source.
        budget: Rejection attempts for distributions without an exact scheme.

    Raises:
        UnattainableSizeError: If no tree of order n fits the support.
        RejectionBudgetExceeded: If rejection runs out of attempts.
    """
    if not dist.attainable(n):
        raise UnattainableSizeError(n, dist.name)
    budget = SamplerConfig.rejection_budget if budget is None else budget
    degrees = _conditioned_degrees(dist, n, rng, budget)
    return RootedTree.from_offspring(cycle_lemma_rotation(degrees))


def pruefer_decode(sequence, n: int) -> np.ndarray:
    """Edges of the labeled tree with Pruefer sequence ``sequence`` (length n - 2)."""
    sequence = [int(x) for x in sequence]
    degree = [1] * n
    for x in sequence:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges: List[Tuple[int, int]] = []
    for x in sequence:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return np.array(edges, dtype=np.int64)


def sample_labeled_tree(n: int, rng: RandomStream, rooted: bool = False) -> Union[UnrootedTree, RootedTree]:
    """
    Uniform labeled tree on vertices 0..n-1.

    With ``rooted`` set the root is an independent uniform vertex, which
    gives the uniform law over the n**(n-1) rooted labeled trees.
    """
    if n < 1:
        raise ValueError(f"Tree order must be >= 1, got {n}")
    if n == 1:
        tree = UnrootedTree(1, np.empty((0, 2), dtype=np.int64))
    elif n == 2:
        tree = UnrootedTree(2, np.array([[0, 1]]))
    else:
        tree = UnrootedTree(n, pruefer_decode(rng.integers(0, n, size=n - 2), n))
    if rooted:
        return tree.rooted_at(int(rng.integers(0, n)))
    return tree


def _choose_attachment(m: int, r: Tuple[int, ...], rng: RandomStream) -> Tuple[int, int]:
    """
    Pick (j, d) with probability d r_d r_{m - j d} / ((m - 1) r_m).

    Pairs with j = 1 and large d carry most of the mass, so they are tried
    first.
    """
    target = rng.randbelow((m - 1) * r[m])
    for d in range(m - 1, 0, -1):
        target -= d * r[d] * r[m - d]
        if target < 0:
            return 1, d
    for d in range(1, m):
        for j in range(2, (m - 1) // d + 1):
            target -= d * r[d] * r[m - j * d]
            if target < 0:
                return j, d
    raise AssertionError("attachment weights do not sum to (m - 1) r_m")


def _polya_parents(n: int, rng: RandomStream, table_size: Optional[int]) -> List[int]:
    """Parent array of a uniform rooted class of order n, root at vertex 0."""
    table_size = SamplerConfig.polya_table_size if table_size is None else table_size
    if n < 1:
        raise ValueError(f"Tree order must be >= 1, got {n}")
    if n > table_size:
        raise CountTableTooSmall(n, table_size)
    r = rooted_counts(n)

    # A plan is [size, [(child plan, copies), ...]].
    root_plan: list = [n, []]
    pending = [root_plan]
    while pending:
        plan = pending.pop()
        m = plan[0]
        while m > 1:
            j, d = _choose_attachment(m, r, rng)
            child: list = [d, []]
            plan[1].append((child, j))
            pending.append(child)
            m -= j * d

    parents = [-1]
    stack = [(root_plan, 0)]
    while stack:
        plan, vertex = stack.pop()
        for child, copies in plan[1]:
            for _ in range(copies):
                parents.append(vertex)
                stack.append((child, len(parents) - 1))
    return parents


def sample_rooted_polya(n: int, rng: RandomStream, table_size: Optional[int] = None) -> RootedTree:
    """
    Uniform rooted unlabeled tree of order n.

    A tree of order m is a tree of order m - j d with j identical copies of a
    uniform tree of order d attached to its root. The attachment plan is
    drawn first; copies then share one sub-plan, which makes them isomorphic.

    Raises:
        CountTableTooSmall: If n exceeds ``table_size``.
    """
    return RootedTree.from_parents(_polya_parents(n, rng, table_size))


def _distinct_degree_count(parents: List[int]) -> int:
    """Number of distinct vertex degrees, a lower bound on the orbit count."""
    degrees = np.bincount(np.asarray(parents[1:], dtype=np.int64), minlength=len(parents)) + 1
    degrees[0] -= 1
    return len(np.unique(degrees))


def sample_unrooted_polya(
    n: int,
    rng: RandomStream,
    budget_factor: Optional[int] = None,
    table_size: Optional[int] = None,
) -> UnrootedTree:
    """
    Uniform free unlabeled tree of order n.

    A free tree with k vertex orbits arises from exactly k rooted classes, so
    accepting a uniform rooted class with probability 1/k is uniform on free
    trees. The uniform draw comes first and is compared against the number
    of distinct degrees, which bounds k from below; the orbit count is only
    computed for draws that bound cannot reject. Each attempt still builds a
    rooted sample and about 0.8 n attempts are needed per tree.

    Raises:
        RejectionBudgetExceeded: After ``budget_factor * n`` rejected draws.
    """
    budget_factor = SamplerConfig.unrooted_budget_factor if budget_factor is None else budget_factor
    budget = max(1, budget_factor * n)
    for _ in range(budget):
        parents = _polya_parents(n, rng, table_size)
        u = rng.random()
        if u * _distinct_degree_count(parents) >= 1.0:
            continue
        free = RootedTree.from_parents(parents).to_unrooted()
        if u * orbit_count(free) < 1.0:
            return free
    raise RejectionBudgetExceeded(budget, f"free tree of order {n}")


def sample_truncated_gw(dist: OffspringDistribution, depth: int, rng: RandomStream) -> RootedTree:
    """
    Unconditioned Galton-Watson tree cut off below ``depth``.

    Vertices at ``depth`` are kept as leaves, so the height of the result is
    min(height of the full tree, depth).
    """
    offspring: List[np.ndarray] = []
    width = 1
    for _ in range(depth):
        if width == 0:
            break
        counts = np.asarray(dist.sample_offspring(rng, width), dtype=np.int64)
        offspring.append(counts)
        width = int(counts.sum())
    offspring.append(np.zeros(width, dtype=np.int64))
    return RootedTree.from_offspring(np.concatenate(offspring))


def estimate_level_iso_probability(dist: OffspringDistribution, M: int, trials: int, rng: RandomStream) -> float:
    """
    Monte-Carlo estimate of P(two independent GW trees agree up to depth M
    and both reach height M).
    """
    if M < 1 or trials < 1:
        raise ValueError(f"Need M >= 1 and trials >= 1, got M={M}, trials={trials}")
    hits = 0
    for _ in range(trials):
        first = sample_truncated_gw(dist, M, rng)
        second = sample_truncated_gw(dist, M, rng)
        if first.height >= M and second.height >= M and rooted_isomorphic(first, second):
            hits += 1
    logger.debug(f"Level-isomorphism estimate for {dist.name}, M={M}: {hits}/{trials}")
    return hits / trials
