"""
Truncated power series.

``PowerSeries`` holds float coefficients a_0..a_N; every operation is exact
through order N (products and compositions are truncated, never shortened).
``ExactSeries`` holds Python integers for counting sequences.
"""

import csv
import logging
import math
from typing import IO, Iterable, List, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Number = Union[int, float]


class PowerSeries:
    """Float power series truncated at a fixed order."""

    def __init__(self, coefficients: Iterable[float], order: int = None):
        coeffs = np.asarray(list(coefficients) if not isinstance(coefficients, np.ndarray) else coefficients,
                            dtype=np.float64)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("Series order must be >= 0")
        out = np.zeros(order + 1)
        m = min(len(coeffs), order + 1)
        out[:m] = coeffs[:m]
        self._coeffs = out
        self._coeffs.flags.writeable = False

    @classmethod
    def zeros(cls, order: int) -> "PowerSeries":
        return cls(np.zeros(order + 1))

    @classmethod
    def variable(cls, order: int) -> "PowerSeries":
        """The series x."""
        coeffs = np.zeros(order + 1)
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeffs

    def __getitem__(self, k):
        return self._coeffs[k]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __repr__(self) -> str:
        head = ", ".join(f"{c:.6g}" for c in self._coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"PowerSeries([{head}{more}], order={self.order})"

    def _coerce(self, other) -> Tuple[np.ndarray, np.ndarray, int]:
        order = min(self.order, other.order)
        return self._coeffs[:order + 1], other.coefficients[:order + 1], order

    def __add__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            a, b, order = self._coerce(other)
            return PowerSeries(a + b)
        coeffs = self._coeffs.copy()
        coeffs[0] += other
        return PowerSeries(coeffs)

    __radd__ = __add__

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(-self._coeffs)

    def __sub__(self, other) -> "PowerSeries":
        return self + (-other)

    def __rsub__(self, other) -> "PowerSeries":
        return (-self) + other

    def __mul__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            a, b, order = self._coerce(other)
            return PowerSeries(np.convolve(a, b)[:order + 1])
        return PowerSeries(self._coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return self * other.reciprocal()
        return PowerSeries(self._coeffs / other)

    def reciprocal(self) -> "PowerSeries":
        """1/s, which needs a_0 != 0."""
        a = self._coeffs
        if a[0] == 0:
            raise ValueError("Reciprocal of a series with zero constant term")
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for n in range(1, len(a)):
            out[n] = -np.dot(a[1:n + 1], out[n - 1::-1]) / a[0]
        return PowerSeries(out)

    def exp(self) -> "PowerSeries":
        """exp(s) for a series with a_0 = 0, via n b_n = sum_k k a_k b_{n-k}."""
        a = self._coeffs
        if a[0] != 0:
            raise ValueError(f"exp needs a zero constant term, got {a[0]}")
        ka = a * np.arange(len(a))
        out = np.zeros_like(a)
        out[0] = 1.0
        for n in range(1, len(a)):
            out[n] = np.dot(ka[1:n + 1], out[n - 1::-1]) / n
        return PowerSeries(out)

    def log(self) -> "PowerSeries":
        """log(s) for a series with a_0 = 1."""
        a = self._coeffs
        if a[0] != 1:
            raise ValueError(f"log needs constant term 1, got {a[0]}")
        out = np.zeros_like(a)
        k = np.arange(len(a))
        for n in range(1, len(a)):
            # n a_n = n b_n + sum_{k<n} k b_k a_{n-k}
            inner = np.dot(k[1:n] * out[1:n], a[n - 1:0:-1]) if n > 1 else 0.0
            out[n] = a[n] - inner / n
        return PowerSeries(out)

    def substitute_power(self, j: int) -> "PowerSeries":
        """s(x**j): a_k moves to x**(j*k), truncated at the same order."""
        if j < 1:
            raise ValueError(f"Power must be >= 1, got {j}")
        out = np.zeros_like(self._coeffs)
        src = self._coeffs[:self.order // j + 1]
        out[::j][:len(src)] = src
        return PowerSeries(out)

    def derivative(self) -> "PowerSeries":
        """d/dx, keeping the order (the top coefficient becomes 0)."""
        a = self._coeffs
        out = np.zeros_like(a)
        out[:-1] = a[1:] * np.arange(1, len(a))
        return PowerSeries(out)

    def evaluate(self, x: float) -> float:
        """Value at ``x`` by compensated summation of the terms."""
        return math.fsum(self.terms(x))

    __call__ = evaluate

    def terms(self, x: float) -> List[float]:
        powers = np.power(float(x), np.arange(len(self._coeffs)))
        return (self._coeffs * powers).tolist()

    def tail_estimate(self, x: float) -> float:
        """
        Geometric estimate of the terms dropped beyond the order.

        Uses the ratio of the last two nonzero terms; infinite when the
        terms are not decreasing there.
        """
        nonzero = [t for t in self.terms(x) if t != 0.0]
        if len(nonzero) < 2:
            return 0.0
        last, prev = abs(nonzero[-1]), abs(nonzero[-2])
        ratio = last / prev
        if ratio >= 1.0:
            return math.inf
        return last * ratio / (1.0 - ratio)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self._coeffs)))

    def to_csv(self, stream: IO[str]) -> None:
        """Write ``n,coefficient`` rows at full precision."""
        write_series_csv(self._coeffs.tolist(), stream)


class ExactSeries:
    """Integer power series truncated at a fixed order."""

    def __init__(self, coefficients: Sequence[int], order: int = None):
        coeffs = [int(c) for c in coefficients]
        order = len(coeffs) - 1 if order is None else order
        self._coeffs = tuple((coeffs + [0] * (order + 1))[:order + 1])

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return self._coeffs

    def __getitem__(self, k):
        return self._coeffs[k]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactSeries) and self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"ExactSeries({list(self._coeffs[:8])}{'...' if self.order >= 8 else ''}, order={self.order})"

    def __add__(self, other: "ExactSeries") -> "ExactSeries":
        order = min(self.order, other.order)
        return ExactSeries([a + b for a, b in zip(self._coeffs[:order + 1], other._coeffs)])

    def __mul__(self, other: "ExactSeries") -> "ExactSeries":
        order = min(self.order, other.order)
        a, b = self._coeffs, other._coeffs
        return ExactSeries([sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(order + 1)])

    def substitute_power(self, j: int) -> "ExactSeries":
        out = [0] * (self.order + 1)
        for k in range(self.order // j + 1):
            out[j * k] = self._coeffs[k]
        return ExactSeries(out)

    def to_float(self) -> PowerSeries:
        return PowerSeries([float(c) for c in self._coeffs])

    def to_csv(self, stream: IO[str]) -> None:
        write_series_csv(self._coeffs, stream)


def write_series_csv(coefficients: Sequence[Number], stream: IO[str]) -> None:
    """Series dump: header ``n,coefficient`` then one row per order."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n", "coefficient"])
    for n, c in enumerate(coefficients):
        writer.writerow([n, repr(c) if isinstance(c, float) else c])


def exp_series(s: PowerSeries) -> PowerSeries:
    return s.exp()


def log_series(s: PowerSeries) -> PowerSeries:
    return s.log()


def substitute_power(s: PowerSeries, j: int) -> PowerSeries:
    return s.substitute_power(j)


def add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    return a + b


def multiply(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    return a * b
