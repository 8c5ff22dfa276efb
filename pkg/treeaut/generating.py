"""
Generating-function solvers.

Covers the simply generated equation T = x Phi(T), the automorphism-weighted
Polya equation

    P(x, t) = x exp(P(x, t) + sum_{j>=2} a_j(t) P(x**j, j t)),
    sum_j a_j(t) u**j = log sum_n (n!)**t u**n,

exact Polya counts, the singularity rho_p of P(x) and the class sums of
bounded-degree families. All solvers run by coefficient recursion: the
coefficient of x**n only needs lower orders and series at other parameters
of order <= n / j.
"""

import logging
import math
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, lambertw

from .config import SeriesConfig
from .enumeration import partitions
from .errors import (
    BracketError,
    InfiniteSupportError,
    NoCriticalPointError,
    SeriesDivergenceError,
    SeriesLimitError,
)
from .series import ExactSeries, PowerSeries

logger = logging.getLogger(__name__)

# Entries of the Polya jet cache; a solve at order N with t != 0 fills about N.
POLYA_CACHE_SIZE = 4096


@dataclass(frozen=True)
class WeightPolynomial:
    """
    Weight generating function Phi(z) = sum_k w_k z**k.

    ``finite`` is False when the coefficients are the leading terms of an
    entire or meromorphic series (Poisson, geometric); ``radius`` is then the
    radius of convergence of the full series.
    """
    coefficients: Tuple[float, ...]
    radius: float = math.inf
    finite: bool = True

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] <= 0:
            raise ValueError("Phi needs w_0 > 0")
        if any(w < 0 for w in self.coefficients):
            raise ValueError("Weights must be nonnegative")

    @classmethod
    def from_function(cls, weight: Callable[[int], float], terms: int, radius: float = math.inf) -> "WeightPolynomial":
        """Leading ``terms`` coefficients of an infinite series."""
        return cls(tuple(float(weight(k)) for k in range(terms)), radius, finite=False)

    @property
    def degree(self) -> int:
        """Largest k with w_k > 0 (of the stored coefficients)."""
        return max(k for k, w in enumerate(self.coefficients) if w > 0)

    @property
    def branching(self) -> bool:
        """Whether some w_k > 0 with k >= 2."""
        return any(w > 0 for w in self.coefficients[2:])

    def derivative_at(self, x: float, m: int = 0) -> float:
        """m-th derivative of Phi at ``x``."""
        return math.fsum(
            w * math.perm(k, m) * x ** (k - m)
            for k, w in enumerate(self.coefficients)
            if k >= m and w
        )

    def __call__(self, x: float) -> float:
        return self.derivative_at(x, 0)


def solve_simply_generated(phi: WeightPolynomial, N: int) -> PowerSeries:
    """
    Series T with T = x Phi(T) through order N.

    Uses t_n = [z**(n-1)] Phi(z)**n / n, building the powers one at a time.
    """
    if N < 1:
        raise ValueError(f"Order must be >= 1, got {N}")
    base = PowerSeries(phi.coefficients, order=N - 1)
    power = PowerSeries([1.0], order=N - 1)
    coeffs = np.zeros(N + 1)
    for n in range(1, N + 1):
        power = power * base
        coeffs[n] = power[n - 1] / n
    return PowerSeries(coeffs)


def critical_point(phi: WeightPolynomial) -> Tuple[float, float]:
    """
    Solve Phi(tau) = tau Phi'(tau) for tau > 0.

    Returns:
        (tau, rho) with rho = tau / Phi(tau).

    Raises:
        NoCriticalPointError: If no root lies inside the radius of Phi.
    """
    if not phi.branching:
        raise NoCriticalPointError("Phi has no weight of degree >= 2, so there is no critical point")

    def gap(tau: float) -> float:
        return phi(tau) - tau * phi.derivative_at(tau, 1)

    if math.isfinite(phi.radius):
        hi = phi.radius * (1.0 - 1e-9)
        if gap(hi) >= 0:
            raise NoCriticalPointError(f"No critical point below the radius {phi.radius}")
    else:
        hi = 1.0
        while gap(hi) >= 0:
            hi *= 2.0
            if hi > 1e6:
                raise NoCriticalPointError("No critical point found below 1e6")
    tau = brentq(gap, 0.0, hi, xtol=1e-15, rtol=1e-15)
    rho = tau / phi(tau)
    logger.debug(f"Critical point tau={tau!r}, rho={rho!r}")
    return tau, rho


@lru_cache(maxsize=None)
def _partition_list(j: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Partitions of j as (part, multiplicity) pairs."""
    return tuple(tuple(sorted(Counter(p).items())) for p in partitions(j))


def _partition_sum(j: int, t: float, keep: Callable[[int], bool], cap: int) -> float:
    """
    j * sum over partitions of j of
    (-1)**(|l|-1) / |l| * multinomial(|l|; multiplicities) * prod_{kept n} n!**(l_n t).

    Integer t is summed exactly in rationals.
    """
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    if j > cap:
        raise SeriesLimitError("j", j, cap)
    exact = float(t).is_integer()
    exact_terms: List[Fraction] = []
    float_terms: List[float] = []
    for parts in _partition_list(j):
        size = sum(m for _, m in parts)
        multinomial = math.factorial(size)
        for _, m in parts:
            multinomial //= math.factorial(m)
        sign = 1 if size % 2 == 1 else -1
        coef = Fraction(sign * multinomial, size)
        if exact:
            factor = Fraction(1)
            for part, m in parts:
                if keep(part):
                    factor *= Fraction(math.factorial(part)) ** (m * int(t))
            exact_terms.append(coef * factor)
        else:
            log_factor = sum(m * t * math.lgamma(part + 1.0) for part, m in parts if keep(part))
            float_terms.append(float(coef) * math.exp(log_factor))
    if exact:
        return float(j * sum(exact_terms))
    return j * math.fsum(float_terms)


def c_coeff(j: int, t: float, cap: int = SeriesConfig.partition_cap) -> float:
    """c(j, t) by the explicit partition sum."""
    return _partition_sum(j, t, lambda n: True, cap)


def cN_coeff(j: int, t: float, N: int, cap: int = SeriesConfig.partition_cap) -> float:
    """c_N(j, t): the partition sum with n!**(l_n t) dropped for n > N."""
    return _partition_sum(j, t, lambda n: n <= N, cap)


def d_coeff(j: int) -> float:
    """d(j) = (1/j!) sum_{m=1}^{j} (-1)**(j-m) C(j-1, m-1) log m."""
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    total = math.fsum((-1) ** (j - m) * math.comb(j - 1, m - 1) * math.log(m) for m in range(1, j + 1))
    return total / math.factorial(j)


class LogSeriesJet(NamedTuple):
    """a_j(t) = c(j, t) / j and its first two t-derivatives, indexed by j."""
    a: np.ndarray
    a_t: np.ndarray
    a_tt: np.ndarray


def _toll_mask(n: np.ndarray, cutoff: Optional[int], above: bool) -> np.ndarray:
    """Which multiplicities keep their ln(n!) toll."""
    if cutoff is None:
        return np.ones(len(n))
    kept = n > cutoff if above else n <= cutoff
    return kept.astype(np.float64)


@lru_cache(maxsize=1024)
def log_series_jet(t: float, J: int, cutoff: Optional[int] = None, above: bool = False) -> LogSeriesJet:
    """
    Coefficients of log sum_n (n!)**(t e_n) u**n through u**J, with t-derivatives.

    e_n is 1 for every n by default; with a cutoff it is 1 only for n <= cutoff,
    or only for n > cutoff when ``above`` is set.

    Raises:
        SeriesDivergenceError: If a coefficient overflows.
    """
    n = np.arange(J + 1)
    toll = _toll_mask(n, cutoff, above) * gammaln(n + 1.0)
    # Rescale u so the largest term is O(1); a_j picks up exp(j * shift).
    shift = max(0.0, float(np.max(t * toll[1:] / n[1:]))) if J >= 1 else 0.0
    s = np.exp(t * toll - shift * n)
    S = PowerSeries(s)
    ratio = PowerSeries(toll * s) / S
    second = PowerSeries(toll * toll * s) / S - ratio * ratio
    scale = np.exp(shift * n)
    jet = LogSeriesJet(S.log().coefficients * scale, ratio.coefficients * scale, second.coefficients * scale)
    for arr in jet:
        if not np.all(np.isfinite(arr)):
            bad = int(np.argmin(np.isfinite(arr)))
            raise SeriesDivergenceError(bad, f"log-series coefficient at t={t}")
        arr.flags.writeable = False
    return jet


@dataclass(frozen=True)
class PolyaJet:
    """P(x, t) and its first two t-derivatives at a fixed t."""
    t: float
    P: PowerSeries
    P_t: PowerSeries
    P_tt: PowerSeries


@lru_cache(maxsize=POLYA_CACHE_SIZE)
def _polya_arrays(t: float, N: int, cutoff: Optional[int], above: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if N == 0:
        zero = np.zeros(1)
        return zero, zero, zero
    a, a_t, a_tt = log_series_jet(t, N, cutoff, above)
    self_ref = t == 0.0
    subs = {} if self_ref else {j: _polya_arrays(j * t, N // j, cutoff, above) for j in range(2, N + 1)}

    P, Pt, Ptt = np.zeros(N + 1), np.zeros(N + 1), np.zeros(N + 1)
    S, E = np.zeros(N + 1), np.zeros(N + 1)
    D, D2 = np.zeros(N + 1), np.zeros(N + 1)
    E[0] = 1.0
    k = np.arange(N + 1)
    for n in range(1, N + 1):
        q = qt = qtt = 0.0
        for j in range(2, n + 1):
            if n % j:
                continue
            m = n // j
            p0, p1, p2 = (P, Pt, Ptt) if self_ref else subs[j]
            q += a[j] * p0[m]
            qt += a_t[j] * p0[m] + j * a[j] * p1[m]
            qtt += a_tt[j] * p0[m] + 2 * j * a_t[j] * p1[m] + j * j * a[j] * p2[m]
        P[n] = E[n - 1]
        S[n] = P[n] + q
        E[n] = np.dot(k[1:n + 1] * S[1:n + 1], E[n - 1::-1]) / n
        # P_t = P (P_t + Q_t); P_tt = P ((P_t + Q_t)**2 + P_tt + Q_tt)
        Pt[n] = np.dot(P[1:n + 1], D[n - 1::-1])
        D[n] = Pt[n] + qt
        Ptt[n] = np.dot(P[1:n + 1], D2[n - 1::-1])
        D2[n] = np.dot(D[:n + 1], D[n::-1]) + Ptt[n] + qtt
        if not (math.isfinite(P[n]) and math.isfinite(Pt[n]) and math.isfinite(Ptt[n])):
            raise SeriesDivergenceError(n, f"Polya series at t={t}")
    for arr in (P, Pt, Ptt):
        arr.flags.writeable = False
    return P, Pt, Ptt


def solve_polya_jet(t: float, N: int, cutoff: Optional[int] = None, above: bool = False) -> PolyaJet:
    """
    Solve the weighted Polya equation and its t-derivatives through order N.

    [x**n] P(x, t) is the sum of |Aut T|**t over rooted classes of order n;
    P_t and P_tt carry the extra factors F(T) and F(T)**2, where F is
    log|Aut| (or its cutoff part when ``cutoff`` is given).
    """
    if N < 1:
        raise ValueError(f"Order must be >= 1, got {N}")
    P, Pt, Ptt = _polya_arrays(float(t), int(N), cutoff, above)
    return PolyaJet(float(t), PowerSeries(P), PowerSeries(Pt), PowerSeries(Ptt))


def solve_polya_weighted(
    t: float,
    N: int,
    cutoff: Optional[int] = None,
    t_bound: float = SeriesConfig.weighted_t_bound,
) -> PowerSeries:
    """
    p_n(t) = sum over rooted classes of order n of |Aut T|**t, through order N.

    Raises:
        SeriesLimitError: For t above ``t_bound``.
        SeriesDivergenceError: If a coefficient overflows.
    """
    if t > t_bound:
        raise SeriesLimitError("t", t, t_bound)
    logger.debug(f"Solving weighted Polya equation at t={t}, N={N}, cutoff={cutoff}")
    return solve_polya_jet(t, N, cutoff).P


_count_lock = threading.Lock()
_rooted: List[int] = [0, 1]
_divisor_sums: List[int] = [0]


def rooted_counts(N: int) -> Tuple[int, ...]:
    """
    r_0..r_N, the numbers of rooted unlabeled trees.

    r_{n+1} = (1/n) sum_{k=1}^{n} (sum_{d | k} d r_d) r_{n-k+1}. The table
    grows on demand and is shared.
    """
    with _count_lock:
        while len(_rooted) <= N:
            n = len(_rooted) - 1
            _divisor_sums.append(sum(d * _rooted[d] for d in range(1, n + 1) if n % d == 0))
            total = sum(_divisor_sums[k] * _rooted[n - k + 1] for k in range(1, n + 1))
            _rooted.append(total // n)
        return tuple(_rooted[:N + 1])


def polya_counts(N: int) -> Tuple[ExactSeries, ExactSeries]:
    """
    Exact rooted and unrooted tree counts through order N.

    u_n = r_n - 1/2 sum_{i+j=n} r_i r_j + 1/2 r_{n/2}.
    """
    if N < 1:
        raise ValueError(f"Order must be >= 1, got {N}")
    r = rooted_counts(N)
    u = [0] * (N + 1)
    for n in range(1, N + 1):
        twice = 2 * r[n] - sum(r[i] * r[n - i] for i in range(1, n))
        if n % 2 == 0:
            twice += r[n // 2]
        u[n] = twice // 2
    return ExactSeries(r), ExactSeries(u)


def _otter_tail(x: float, series: PowerSeries) -> float:
    """sum_{k>=2} P(x**k) / k, stopping once x**k is negligible."""
    total = []
    k = 2
    while x ** k > 1e-18:
        total.append(series.evaluate(x ** k) / k)
        k += 1
    return math.fsum(total)


@dataclass(frozen=True)
class RhoEstimate:
    """rho_p with its truncation-error estimate and |P(rho_p) - 1| check."""
    rho: float
    error: float
    residual: float
    order: int


def _rho_at_order(N: int) -> Tuple[float, PowerSeries]:
    series = ExactSeries(rooted_counts(N)).to_float()

    # P(rho) = 1 turns P = x exp(P + Q) into log(rho) + 1 + Q(rho) = 0.
    def gap(x: float) -> float:
        return math.log(x) + 1.0 + _otter_tail(x, series)

    lo, hi = 0.2, 0.45
    if gap(lo) * gap(hi) > 0:
        raise BracketError(f"No sign change for rho_p in [{lo}, {hi}]")
    return brentq(gap, lo, hi, xtol=1e-16, rtol=1e-15), series


def rho_polya_report(N: int = SeriesConfig.rho_order) -> RhoEstimate:
    """rho_p at order N, with the spread against order N // 2 as error estimate."""
    rho, series = _rho_at_order(N)
    coarse, _ = _rho_at_order(max(N // 2, 8))
    residual = abs(rho * math.exp(1.0 + _otter_tail(rho, series)) - 1.0)
    logger.info(f"rho_p = {rho!r} (order {N}, error {abs(rho - coarse):.2e}, residual {residual:.2e})")
    return RhoEstimate(rho, abs(rho - coarse), residual, N)


def find_rho_polya(N: int = SeriesConfig.rho_order) -> float:
    """Dominant singularity rho_p of the rooted-tree counting series."""
    return _rho_at_order(N)[0]


def evaluate_polya(x: float, N: int = SeriesConfig.rho_order) -> float:
    """
    P(x) for 0 <= x <= rho_p, including the point rho_p itself.

    Solves P = x exp(P + Q(x)) through the principal Lambert W branch, where
    Q(x) = sum_{k>=2} P(x**k)/k only needs the series well inside its disc.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    series = ExactSeries(rooted_counts(N)).to_float()
    arg = -x * math.exp(_otter_tail(x, series))
    if arg < -math.exp(-1.0) * (1.0 + 1e-12):
        raise ValueError(f"x = {x} lies beyond the singularity rho_p")
    return float(-lambertw(max(arg, -math.exp(-1.0)), 0).real)


class ClassSums(NamedTuple):
    """sum_B W(B)**j x**|B| and sum_B W(B)**j F(B) x**|B| over rooted classes B."""
    S: PowerSeries
    S_t: PowerSeries


def _spread(arr: np.ndarray, l: int, order: int) -> np.ndarray:
    """Coefficients of s(x**l) through ``order``."""
    out = np.zeros(order + 1)
    src = arr[:order // l + 1]
    out[::l][:len(src)] = src
    return out


@lru_cache(maxsize=None)
def _class_sum_arrays(phi: WeightPolynomial, j: int, M: int) -> Tuple[np.ndarray, np.ndarray]:
    if M == 0:
        zero = np.zeros(1)
        return zero, zero
    k0 = phi.degree
    w = phi.coefficients
    c = [float(math.factorial(d) * w[d]) ** j if d < len(w) else 0.0 for d in range(k0 + 1)]
    a, a_t, _ = log_series_jet(float(-j), k0)
    A: List[Optional[np.ndarray]] = [None, None]
    At: List[Optional[np.ndarray]] = [None, None]
    for l in range(2, k0 + 1):
        sub_S, sub_St = _class_sum_arrays(phi, l * j, M // l)
        spread_S, spread_St = _spread(sub_S, l, M), _spread(sub_St, l, M)
        A.append(a[l] * spread_S)
        At.append(a_t[l] * spread_S + l * a[l] * spread_St)

    S = np.zeros(M + 1)
    E = [np.zeros(M + 1) for _ in range(k0 + 1)]
    E[0][0] = 1.0
    # Phi-weighted z-coefficients of exp(z S + sum_l A_l z**l), online in x.
    for n in range(1, M + 1):
        S[n] = sum(c[d] * E[d][n - 1] for d in range(k0 + 1))
        for d in range(1, k0 + 1):
            total = 0.0
            for k in range(1, d + 1):
                Ak = S if k == 1 else A[k]
                total += k * np.dot(Ak[:n + 1], E[d - k][n::-1])
            E[d][n] = total / d

    St = np.zeros(M + 1)
    Et = [np.zeros(M + 1) for _ in range(k0 + 1)]
    for n in range(1, M + 1):
        St[n] = sum(c[d] * Et[d][n - 1] for d in range(k0 + 1))
        for d in range(1, k0 + 1):
            total = 0.0
            for k in range(1, d + 1):
                Atk = St if k == 1 else At[k]
                total += np.dot(Atk[:n + 1], E[d - k][n::-1])
            Et[d][n] = total
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(St))):
        raise SeriesDivergenceError(M, f"class sums with j={j}")
    S.flags.writeable = False
    St.flags.writeable = False
    return S, St


def solve_class_sums(phi: WeightPolynomial, j: int, N: int) -> ClassSums:
    """
    Power sums of class weights W(B) = prod_v deg(v)! w_deg(v) / |Aut B|.

    W(B) is the total weight of the plane trees in class B, so j = 1 gives
    the simply generated series T = x Phi(T).

    Raises:
        InfiniteSupportError: If Phi is not a polynomial.
    """
    if not phi.finite:
        raise InfiniteSupportError("Class sums need a polynomial Phi")
    if j < 1 or N < 1:
        raise ValueError(f"Need j >= 1 and N >= 1, got j={j}, N={N}")
    S, St = _class_sum_arrays(phi, int(j), int(N))
    return ClassSums(PowerSeries(S), PowerSeries(St))
