"""treeaut - automorphism groups of random trees."""

__version__ = "1.1.0"
