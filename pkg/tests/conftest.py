"""Pytest fixtures for treeaut tests."""

import numpy as np
import pytest

from treeaut.random_stream import RandomStream
from treeaut.textio import parse_parens
from treeaut.trees import UnrootedTree


@pytest.fixture
def star4():
    """Root with four leaf children."""
    return parse_parens("(()()()())")


@pytest.fixture
def path5():
    """Unrooted path on five vertices."""
    return UnrootedTree(5, np.array([[0, 1], [1, 2], [2, 3], [3, 4]]))


@pytest.fixture
def symmetric_double_star():
    """Two adjacent centers with two leaves each; the central edge is a symmetry line."""
    return UnrootedTree(6, np.array([[0, 1], [0, 2], [0, 3], [1, 4], [1, 5]]))


@pytest.fixture
def rng():
    """Seeded random stream."""
    return RandomStream(12345)


@pytest.fixture
def sample_config_yaml(tmp_path):
    """Create a sample config.yaml file for testing."""
    config_content = """
enumeration:
  rooted_cap: 12
  brute_force_rooted_cap: 8

series:
  polya_order: 30
  labeled_j_max: 10

samplers:
  polya_table_size: 500

experiments:
  workers: 2
  significance: 0.05

logging:
  log_target: "stderr"
  log_level: "DEBUG"
"""
    config_file = tmp_path / "config.yaml"
    config_file.write_text(config_content)
    return str(config_file)
