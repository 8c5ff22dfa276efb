"""Unit tests for treeaut."""
