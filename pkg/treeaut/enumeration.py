"""
Exhaustive enumeration of rooted and free trees up to isomorphism.

These are desk-scale oracles. A rooted tree of order n is a root plus a
multiset of branches whose orders form a partition of n - 1, so classes are
built from the canonical codes of smaller classes and never need an
isomorphism test.
"""

import logging
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import FrozenSet, Iterator, List, Optional, Set, Tuple

from .config import EnumerationConfig
from .errors import EnumerationLimitError
from .textio import parse_parens
from .trees import RootedTree, UnrootedTree

logger = logging.getLogger(__name__)


def partitions(m: int, max_part: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Partitions of ``m`` as non-increasing tuples with parts at most ``max_part``."""
    max_part = m if max_part is None else min(max_part, m)
    if m == 0:
        yield ()
        return
    for first in range(max_part, 0, -1):
        for rest in partitions(m - first, first):
            yield (first,) + rest


def _branch_multisets(parts: Tuple[int, ...], allowed: Optional[FrozenSet[int]]) -> Iterator[List[str]]:
    """Every multiset of branch codes whose orders are ``parts``."""
    groups = []
    for size in sorted(set(parts)):
        count = parts.count(size)
        groups.append(combinations_with_replacement(rooted_codes(size, allowed), count))
    for choice in product(*groups):
        yield [code for group in choice for code in group]


@lru_cache(maxsize=None)
def rooted_codes(n: int, allowed: Optional[FrozenSet[int]] = None) -> Tuple[str, ...]:
    """
    Sorted canonical codes of all rooted trees of order ``n``.

    With ``allowed`` set, every vertex's child count must lie in it.
    """
    if n == 1:
        return ("()",) if allowed is None or 0 in allowed else ()
    codes = []
    for parts in partitions(n - 1):
        if allowed is not None and len(parts) not in allowed:
            continue
        for branches in _branch_multisets(parts, allowed):
            codes.append("(" + "".join(sorted(branches)) + ")")
    codes.sort()
    logger.debug(f"Enumerated {len(codes)} rooted classes of order {n}")
    return tuple(codes)


def enumerate_rooted_trees(
    n: int,
    allowed_child_counts: Optional[Set[int]] = None,
    limit: Optional[int] = None,
) -> List[RootedTree]:
    """
    One representative per rooted isomorphism class of order ``n``.

    Args:
        n: Tree order.
        allowed_child_counts: Restrict every vertex's number of children.
        limit: Largest accepted n (defaults to the configured rooted cap).

    Raises:
        EnumerationLimitError: If n is outside 1..limit.
    """
    limit = EnumerationConfig.rooted_cap if limit is None else limit
    if not 1 <= n <= limit:
        raise EnumerationLimitError(n, limit, "rooted trees")
    allowed = None if allowed_child_counts is None else frozenset(allowed_child_counts)
    return [parse_parens(code) for code in rooted_codes(n, allowed)]


def unrooted_codes(n: int) -> List[str]:
    """
    Codes of free trees of order ``n``, each rooted at its centroid.

    A single centroid has every branch of order at most (n - 1) // 2. Two
    centroids split the tree into two halves of order n / 2; the second half
    is hung below the root of the first.
    """
    if n == 1:
        return ["()"]
    codes = []
    for parts in partitions(n - 1, (n - 1) // 2):
        for branches in _branch_multisets(parts, None):
            codes.append("(" + "".join(sorted(branches)) + ")")
    if n % 2 == 0:
        halves = rooted_codes(n // 2)
        for a, b in combinations_with_replacement(halves, 2):
            codes.append(a[:-1] + b + ")")
    return codes


def enumerate_unrooted_trees(n: int, limit: Optional[int] = None) -> List[UnrootedTree]:
    """
    One representative per free-tree isomorphism class of order ``n``.

    Raises:
        EnumerationLimitError: If n is outside 1..limit (default: the configured unrooted cap).
    """
    limit = EnumerationConfig.unrooted_cap if limit is None else limit
    if not 1 <= n <= limit:
        raise EnumerationLimitError(n, limit, "unrooted trees")
    trees = [parse_parens(code).to_unrooted() for code in unrooted_codes(n)]
    logger.debug(f"Enumerated {len(trees)} free trees of order {n}")
    return trees
