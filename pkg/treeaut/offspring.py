"""
Offspring distributions and the preset tree families.

A family is given by its weights w_k (the coefficients of Phi). The
probability view tilts them at the critical point, p_k = w_k tau**k / Phi(tau),
which has mean 1 and leaves every conditioned law unchanged.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .generating import WeightPolynomial, critical_point
from .random_stream import RandomStream

logger = logging.getLogger(__name__)

# Exact conditioned samplers available for the presets.
POISSON = "poisson"
GEOMETRIC = "geometric"
FULL_BINARY = "full-binary"
PRUNED_BINARY = "pruned-binary"


@dataclass(frozen=True)
class OffspringDistribution:
    """Weights of a simply generated family with an optional exact sampling scheme."""
    name: str
    phi: WeightPolynomial
    scheme: Optional[str] = None

    @cached_property
    def tilt(self) -> Tuple[float, float]:
        """(tau, rho) of the critical point."""
        return critical_point(self.phi)

    @cached_property
    def probabilities(self) -> np.ndarray:
        """Critically tilted law p_k over the stored support."""
        tau, _ = self.tilt
        w = np.asarray(self.phi.coefficients)
        p = w * tau ** np.arange(len(w))
        p = p / p.sum()
        p.flags.writeable = False
        return p

    @property
    def bounded(self) -> bool:
        return self.phi.finite

    @property
    def support(self) -> FrozenSet[int]:
        """Child counts with positive weight."""
        return frozenset(k for k, w in enumerate(self.phi.coefficients) if w > 0)

    @property
    def allowed_child_counts(self) -> Optional[FrozenSet[int]]:
        """Child-count restriction for enumeration; None when every count is allowed."""
        return self.support if self.bounded else None

    @property
    def degenerate(self) -> bool:
        """No vertex can have two or more children, so every tree is a path."""
        return not self.phi.branching

    def attainable(self, n: int) -> bool:
        """Whether some tree of order n has all child counts in the support."""
        if n < 1:
            return False
        if n == 1 or 1 in self.support:
            return True
        steps = sorted(k for k in self.support if k >= 2)
        reach = np.zeros(n, dtype=bool)
        reach[0] = True
        for s in range(1, n):
            reach[s] = any(reach[s - k] for k in steps if k <= s)
        return bool(reach[n - 1])

    def sample_offspring(self, rng: RandomStream, size: int) -> np.ndarray:
        """``size`` i.i.d. child counts from the tilted law."""
        if self.scheme == POISSON:
            return rng.generator.poisson(1.0, size)
        if self.scheme == GEOMETRIC:
            return rng.generator.geometric(0.5, size) - 1
        return rng.generator.choice(len(self.probabilities), size=size, p=self.probabilities)


def labeled() -> OffspringDistribution:
    """Cayley trees: Phi = e**z, Poisson(1) offspring."""
    return OffspringDistribution(
        "labeled",
        WeightPolynomial.from_function(lambda k: 1.0 / math.factorial(k), 171),
        POISSON,
    )


def plane() -> OffspringDistribution:
    """Plane trees: Phi = 1/(1 - z), Geometric(1/2) offspring."""
    return OffspringDistribution("plane", WeightPolynomial.from_function(lambda k: 1.0, 400, radius=1.0), GEOMETRIC)


def full_binary() -> OffspringDistribution:
    """Phi = 1 + z**2."""
    return OffspringDistribution("full-binary", WeightPolynomial((1.0, 0.0, 1.0)), FULL_BINARY)


def pruned_binary() -> OffspringDistribution:
    """Phi = (1 + z)**2: left/right children each present or absent."""
    return OffspringDistribution("pruned-binary", WeightPolynomial((1.0, 2.0, 1.0)), PRUNED_BINARY)


def paths() -> OffspringDistribution:
    """Phi = 1 + z: every tree is a path."""
    return OffspringDistribution("paths", WeightPolynomial((1.0, 1.0)))


PRESETS: Dict[str, Callable[[], OffspringDistribution]] = {
    "labeled": labeled,
    "plane": plane,
    "full-binary": full_binary,
    "pruned-binary": pruned_binary,
    "paths": paths,
}


def get_preset(name: str) -> OffspringDistribution:
    """
    Look up a preset by name.

    Raises:
        ConfigError: For an unknown name.
    """
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"Unknown offspring distribution {name!r}; choose from {', '.join(PRESETS)}")


def from_weights(weights, name: str = "custom") -> OffspringDistribution:
    """A distribution from a finite list of weights, sampled by rejection."""
    return OffspringDistribution(name, WeightPolynomial(tuple(float(w) for w in weights)))
