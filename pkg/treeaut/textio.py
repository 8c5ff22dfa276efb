"""
Text formats for trees.

Rooted trees use the nested-parentheses format, where every vertex is a "("
followed by its children and a ")"; a canonical code is one such string.
Unrooted trees use an edge list with one "u v" pair per line.
"""

import logging
from typing import Iterable, List, Union

import numpy as np

from .errors import TreeFormatError
from .trees import RootedTree, UnrootedTree, canonical_code

logger = logging.getLogger(__name__)


def parse_parens(text: str) -> RootedTree:
    """
    Parse a nested-parentheses string into a rooted plane tree.

    Vertex ids follow the order of the opening parentheses, so the root is 0.
    Whitespace is ignored.

    Raises:
        TreeFormatError: On unbalanced input, stray characters, or more than
            one top-level vertex.
    """
    parents: List[int] = []
    stack: List[int] = []
    closed_root = False
    for pos, ch in enumerate(text):
        if ch.isspace():
            continue
        if closed_root:
            raise TreeFormatError(f"Unexpected {ch!r} after the root closed (position {pos})")
        if ch == "(":
            parents.append(stack[-1] if stack else -1)
            stack.append(len(parents) - 1)
        elif ch == ")":
            if not stack:
                raise TreeFormatError(f"Unbalanced ')' at position {pos}")
            stack.pop()
            closed_root = not stack
        else:
            raise TreeFormatError(f"Unexpected character {ch!r} at position {pos}")
    if not parents:
        raise TreeFormatError("Empty tree text")
    if stack:
        raise TreeFormatError(f"{len(stack)} unclosed '(' at end of input")
    return RootedTree.from_parents(parents)


def format_parens(tree: RootedTree, canonical: bool = True) -> str:
    """
    Render a rooted tree as nested parentheses.

    With ``canonical`` set this is ``canonical_code``; otherwise the plane
    order of the children is kept.
    """
    if canonical:
        return canonical_code(tree)
    out: List[str] = []
    stack = [(tree.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            out.append(")")
            continue
        out.append("(")
        stack.append((v, True))
        for child in reversed(tree.children(v).tolist()):
            stack.append((child, False))
    return "".join(out)


def parse_edges(text: Union[str, Iterable[str]]) -> UnrootedTree:
    """
    Parse an edge list into an unrooted tree.

    Blank lines and lines starting with "#" are skipped. The order is the
    number of edges plus one, so empty input is the single-vertex tree.

    Raises:
        TreeFormatError: On malformed lines or a non-tree edge set.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    edges = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TreeFormatError(f"Line {lineno}: expected 'u v', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise TreeFormatError(f"Line {lineno}: vertex ids must be integers, got {line!r}")
    return UnrootedTree(len(edges) + 1, np.array(edges, dtype=np.int64).reshape(-1, 2))


def format_edges(tree: UnrootedTree) -> str:
    """One "u v" line per edge."""
    return "".join(f"{u} {v}\n" for u, v in tree.edges.tolist())


def parse_tree(text: str) -> Union[RootedTree, UnrootedTree]:
    """Parse either format, telling them apart by the first non-blank character."""
    stripped = text.strip()
    if stripped.startswith("("):
        return parse_parens(stripped)
    return parse_edges(text)
