"""
Mean and variance constants of log|Aut| for the tree families.

Every family's weighted generating function y(x, t) solves y = G(x, y, t)
and has a square-root singularity at (rho(t), tau(t)). Along t the
coefficients behave like quasi-powers, so

    mu = -(log rho)'(t0),   sigma**2 = -(log rho)''(t0).

``quasi_power_constants`` turns the second-order jet of G at the singular
point into these two numbers; each family only has to supply its jet.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from .automorphism import aut_rooted, aut_unrooted, log_aut_rooted, log_aut_unrooted
from .config import SeriesConfig
from .enumeration import enumerate_rooted_trees, enumerate_unrooted_trees
from .errors import EnumerationLimitError, InfiniteSupportError, UnattainableSizeError
from .generating import (
    log_series_jet,
    rho_polya_report,
    solve_class_sums,
    solve_polya_jet,
)
from .offspring import OffspringDistribution, get_preset

logger = logging.getLogger(__name__)


class Family(str, Enum):
    """Random tree models."""
    LABELED_ROOTED = "labeled-rooted"
    LABELED_UNROOTED = "labeled-unrooted"
    FULL_BINARY = "full-binary"
    PRUNED_BINARY = "pruned-binary"
    PLANE = "plane"
    POLYA_ROOTED = "polya-rooted"
    POLYA_UNROOTED = "polya-unrooted"


# Conditioned Galton-Watson families and their offspring presets.
GW_PRESETS = {
    Family.LABELED_ROOTED: "labeled",
    Family.FULL_BINARY: "full-binary",
    Family.PRUNED_BINARY: "pruned-binary",
    Family.PLANE: "plane",
}

ENUMERATION_CAPS = {
    Family.POLYA_ROOTED: 14,
    Family.POLYA_UNROOTED: 14,
    Family.LABELED_ROOTED: 12,
    Family.LABELED_UNROOTED: 12,
    Family.FULL_BINARY: 16,
    Family.PRUNED_BINARY: 16,
    Family.PLANE: 16,
}


@dataclass
class ConstantsReport:
    """mu and sigma**2 for one family with the truncation used and its error."""
    family: str
    mu: float
    sigma2: float
    params: Dict[str, float] = field(default_factory=dict)
    error_estimates: Dict[str, float] = field(default_factory=dict)
    converged: bool = True
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class SingularJet:
    """
    Partial derivatives of G(x, y, t) at the singular point (rho, tau, t0).

    G itself equals tau and G_y equals 1 there, so neither is stored.
    """
    rho: float
    G_x: float
    G_t: float
    G_xx: float
    G_xy: float
    G_xt: float
    G_yy: float
    G_yt: float
    G_tt: float


def quasi_power_constants(jet: SingularJet) -> Tuple[float, float]:
    """
    (mu, sigma**2) from the jet of G.

    The singular point moves with t along G = y, G_y = 1; differentiating
    both twice gives rho'(t0) and rho''(t0).
    """
    x1 = -jet.G_t / jet.G_x
    y1 = -(jet.G_xy * x1 + jet.G_yt) / jet.G_yy
    x2 = -(
        jet.G_xx * x1 * x1
        + jet.G_xy * x1 * y1
        + 2.0 * jet.G_xt * x1
        + jet.G_yt * y1
        + jet.G_tt
    ) / jet.G_x
    mu = -x1 / jet.rho
    sigma2 = -x2 / jet.rho + mu * mu
    return mu, sigma2


def _exp_type_jet(rho: float, t0: float, order: int, j_max: int, cutoff=None, above: bool = False) -> SingularJet:
    """
    Jet of G = x exp(y + Q(x, t)), Q = sum_{j>=2} a_j(t) P(x**j, j t), at y = 1.

    Covers Polya trees (t0 = 0) and labeled trees (t0 = -1, where P(x, t - 1)
    is the labeled series).
    """
    a, a_t, a_tt = log_series_jet(float(t0), j_max, cutoff, above)
    parts: Dict[str, List[float]] = {k: [] for k in ("x", "xx", "t", "xt", "tt")}
    for j in range(2, j_max + 1):
        y = rho ** j
        if y < 1e-300:
            break
        jet = solve_polya_jet(j * t0, order, cutoff, above)
        px = jet.P.derivative()
        p, dp, d2p = jet.P(y), px(y), px.derivative()(y)
        pt, ptt, dpt = jet.P_t(y), jet.P_tt(y), jet.P_t.derivative()(y)
        xj1 = j * rho ** (j - 1)
        parts["x"].append(a[j] * xj1 * dp)
        parts["xx"].append(a[j] * (j * (j - 1) * rho ** (j - 2) * dp + xj1 * xj1 * d2p))
        parts["t"].append(a_t[j] * p + j * a[j] * pt)
        parts["xt"].append(a_t[j] * xj1 * dp + a[j] * j * xj1 * dpt)
        parts["tt"].append(a_tt[j] * p + 2 * j * a_t[j] * pt + j * j * a[j] * ptt)
    Q = {k: math.fsum(v) for k, v in parts.items()}
    inv = 1.0 / rho + Q["x"]
    return SingularJet(
        rho=rho,
        G_x=inv,
        G_t=Q["t"],
        G_xx=inv * inv - 1.0 / rho ** 2 + Q["xx"],
        G_xy=inv,
        G_xt=Q["t"] * inv + Q["xt"],
        G_yy=1.0,
        G_yt=Q["t"],
        G_tt=Q["t"] ** 2 + Q["tt"],
    )


def _finish(report: ConstantsReport, tolerance: float) -> ConstantsReport:
    report.converged = all(err <= tolerance for err in report.error_estimates.values())
    if -tolerance < report.sigma2 < 0.0:
        report.sigma2 = 0.0
    if not report.converged:
        logger.warning(f"{report.family}: truncation error above {tolerance:g}: {report.error_estimates}")
    else:
        logger.info(f"{report.family}: mu={report.mu:.7f}, sigma2={report.sigma2:.7f}")
    return report


def mu_sigma_polya(
    N: int = SeriesConfig.polya_order,
    cutoff=None,
    above: bool = False,
    rho_order: int = SeriesConfig.rho_order,
    tolerance: float = SeriesConfig.tolerance,
) -> ConstantsReport:
    """
    Constants for uniform rooted Polya trees.

    With ``cutoff`` the functional is F^{<=cutoff} (or F^{>cutoff} when
    ``above`` is set) instead of log|Aut|.
    """
    if N < 2:
        raise ValueError(f"Order must be >= 2, got {N}")
    rho = rho_polya_report(rho_order)
    mu, sigma2 = quasi_power_constants(_exp_type_jet(rho.rho, 0.0, N, N, cutoff, above))
    mu_c, sigma2_c = quasi_power_constants(_exp_type_jet(rho.rho, 0.0, N // 2, N // 2, cutoff, above))
    family = "polya-rooted"
    if cutoff is not None:
        family += f" ({'>' if above else '<='}{cutoff})"
    report = ConstantsReport(
        family=family,
        mu=mu,
        sigma2=sigma2,
        params={"N": N, "rho_order": rho_order, "cutoff": cutoff, "above": above},
        error_estimates={"mu": abs(mu - mu_c), "sigma2": abs(sigma2 - sigma2_c), "rho": rho.error},
        diagnostics={"rho": rho.rho, "rho_residual": rho.residual},
    )
    return _finish(report, tolerance)


def mu_sigma_labeled(
    J_max: int = SeriesConfig.labeled_j_max,
    N: int = SeriesConfig.labeled_order,
    tolerance: float = SeriesConfig.tolerance,
) -> ConstantsReport:
    """
    Constants for uniform labeled (Cayley) trees.

    The labeled series is the Polya series shifted by one in t, so the jet is
    taken at t0 = -1, where a_j(-1) = 0 for j >= 2 and the singularity is 1/e.
    """
    if J_max < 2 or N < 1:
        raise ValueError(f"Need J_max >= 2 and N >= 1, got J_max={J_max}, N={N}")
    rho = math.exp(-1.0)
    mu, sigma2 = quasi_power_constants(_exp_type_jet(rho, -1.0, N, J_max))
    coarse_j, coarse_n = max(J_max // 2, 2), max(N // 2, 1)
    mu_c, sigma2_c = quasi_power_constants(_exp_type_jet(rho, -1.0, coarse_n, coarse_j))
    report = ConstantsReport(
        family="labeled",
        mu=mu,
        sigma2=sigma2,
        params={"J_max": J_max, "N": N},
        error_estimates={"mu": abs(mu - mu_c), "sigma2": abs(sigma2 - sigma2_c)},
    )
    return _finish(report, tolerance)


def _bounded_degree_jet(dist: OffspringDistribution, order: int) -> SingularJet:
    """
    Jet of G = x sum_d d! w_d [z**d] exp(z y + sum_{l>=2} b_l(t) z**l V_l(x, t))
    at t = 0, where b_l(t) = a_l(t - 1) vanishes and V_l(x, t) = S_l(x**l, l t)
    are the class power sums.
    """
    phi = dist.phi
    tau, rho = dist.tilt
    k0 = phi.degree
    _, d, b2 = log_series_jet(-1.0, k0)
    V, Vx, Vt = {}, {}, {}
    for l in range(2, k0 + 1):
        sums = solve_class_sums(phi, l, order)
        y = rho ** l
        V[l] = sums.S(y)
        Vx[l] = l * rho ** (l - 1) * sums.S.derivative()(y)
        Vt[l] = l * sums.S_t(y)
    dphi = [phi.derivative_at(tau, m) for m in range(2 * k0 + 2)]
    ls = range(2, k0 + 1)
    cross = math.fsum(d[i] * d[l] * V[i] * V[l] * dphi[i + l] for i in ls for l in ls)
    return SingularJet(
        rho=rho,
        G_x=dphi[0],
        G_t=rho * math.fsum(d[l] * V[l] * dphi[l] for l in ls),
        G_xx=0.0,
        G_xy=dphi[1],
        G_xt=math.fsum(d[l] * (V[l] + rho * Vx[l]) * dphi[l] for l in ls),
        G_yy=rho * dphi[2],
        G_yt=rho * math.fsum(d[l] * V[l] * dphi[l + 1] for l in ls),
        G_tt=rho * (math.fsum((b2[l] * V[l] + 2.0 * d[l] * Vt[l]) * dphi[l] for l in ls) + cross),
    )


def mu_sigma_bounded_degree(
    dist: OffspringDistribution,
    B_max: int = SeriesConfig.class_order,
    tolerance: float = SeriesConfig.tolerance,
) -> ConstantsReport:
    """
    Constants for conditioned GW trees with bounded offspring.

    Class sums run over rooted classes of order <= B_max; the estimate is
    compared with B_max // 2.

    Raises:
        InfiniteSupportError: If Phi is not a polynomial.
    """
    if not dist.bounded:
        raise InfiniteSupportError(f"{dist.name} has unbounded offspring; a polynomial Phi is required")
    if B_max < 2:
        raise ValueError(f"B_max must be >= 2, got {B_max}")
    params = {"B_max": B_max}
    if dist.degenerate:
        return ConstantsReport(dist.name, 0.0, 0.0, params, {"mu": 0.0, "sigma2": 0.0})
    mu, sigma2 = quasi_power_constants(_bounded_degree_jet(dist, B_max))
    mu_c, sigma2_c = quasi_power_constants(_bounded_degree_jet(dist, B_max // 2))
    tau, rho = dist.tilt
    report = ConstantsReport(
        family=dist.name,
        mu=mu,
        sigma2=sigma2,
        params=params,
        error_estimates={"mu": abs(mu - mu_c), "sigma2": abs(sigma2 - sigma2_c)},
        diagnostics={"tau": tau, "rho": rho},
    )
    return _finish(report, tolerance)


@dataclass
class UnrootedCheck:
    """Coefficientwise comparison of U(x, t) against enumeration."""
    rows: List[Dict[str, float]]
    max_abs_discrepancy: float
    max_rel_discrepancy: float
    passed: bool


def unrooted_gf_check(t_values: Sequence[float], n_max: int, tolerance: float = 1e-9) -> UnrootedCheck:
    """
    Check U(x, t) = P(x, t) - P(x, t)**2 / 2 + (2**t - 1/2) P(x**2, 2t).

    [x**n] of the right side is compared with the sum of |Aut T|**t over
    enumerated free trees of order n. A row passes when the discrepancy is
    at most ``tolerance * max(1, |value|)``.
    """
    auts = {n: [aut_unrooted(tree).exact for tree in enumerate_unrooted_trees(n)] for n in range(1, n_max + 1)}
    rows = []
    passed = True
    for t in t_values:
        P = solve_polya_jet(t, n_max).P
        doubled = solve_polya_jet(2.0 * t, n_max).P.substitute_power(2)
        U = P - 0.5 * (P * P) + (2.0 ** t - 0.5) * doubled
        for n in range(1, n_max + 1):
            expected = math.fsum(float(a) ** t for a in auts[n])
            diff = abs(U[n] - expected)
            ok = diff <= tolerance * max(1.0, abs(expected))
            passed = passed and ok
            rows.append({"t": t, "n": n, "series": float(U[n]), "enumeration": expected,
                         "abs": diff, "rel": diff / max(1.0, abs(expected))})
    max_abs = max((r["abs"] for r in rows), default=0.0)
    max_rel = max((r["rel"] for r in rows), default=0.0)
    logger.info(f"U(x,t) check over n <= {n_max}: max discrepancy {max_abs:.3e} ({'pass' if passed else 'FAIL'})")
    return UnrootedCheck(rows, max_abs, max_rel, passed)


def _weighted_moments(values: Sequence[float], weights: Sequence[float]) -> Tuple[float, float]:
    total = math.fsum(weights)
    mean = math.fsum(w * v for v, w in zip(values, weights)) / total
    var = math.fsum(w * (v - mean) ** 2 for v, w in zip(values, weights)) / total
    return mean, max(var, 0.0)


def mean_variance_by_enumeration(family: Family, n: int) -> Tuple[float, float]:
    """
    Exact E and Var of log|Aut| at order n under the family's law.

    Raises:
        EnumerationLimitError: Above the family's cap.
        UnattainableSizeError: If the family has no tree of order n.
    """
    family = Family(family)
    cap = ENUMERATION_CAPS[family]
    if not 1 <= n <= cap:
        raise EnumerationLimitError(n, cap, f"{family.value} trees")

    if family is Family.POLYA_ROOTED:
        trees = enumerate_rooted_trees(n, limit=cap)
        return _weighted_moments([log_aut_rooted(t) for t in trees], [1.0] * len(trees))
    if family is Family.POLYA_UNROOTED:
        trees = enumerate_unrooted_trees(n, limit=cap)
        return _weighted_moments([log_aut_unrooted(t) for t in trees], [1.0] * len(trees))
    if family is Family.LABELED_UNROOTED:
        auts = [aut_unrooted(t) for t in enumerate_unrooted_trees(n, limit=cap)]
        return _weighted_moments([a.log_value for a in auts], [float(math.factorial(n) // a.exact) for a in auts])

    # Plane representatives of class B carry total weight prod_v deg(v)! w_deg(v) / |Aut B|.
    dist = get_preset(GW_PRESETS[family])
    w = dist.phi.coefficients
    trees = enumerate_rooted_trees(n, dist.allowed_child_counts, limit=cap)
    if not trees:
        raise UnattainableSizeError(n, family.value)
    values, weights = [], []
    for tree in trees:
        aut = aut_rooted(tree)
        log_w = sum(math.lgamma(k + 1.0) + math.log(w[k]) for k in tree.out_degrees.tolist()) - aut.log_value
        values.append(aut.log_value)
        weights.append(log_w)
    top = max(weights)
    return _weighted_moments(values, [math.exp(lw - top) for lw in weights])


def exact_moments_polya(n: int) -> Tuple[float, float]:
    """E and Var of log|Aut| for uniform rooted Polya trees of order n, from P_t and P_tt."""
    jet = solve_polya_jet(0.0, n)
    mean = jet.P_t[n] / jet.P[n]
    return mean, max(jet.P_tt[n] / jet.P[n] - mean * mean, 0.0)


def exact_moments_labeled(n: int) -> Tuple[float, float]:
    """Same for uniform rooted labeled trees, from the series at t = -1."""
    jet = solve_polya_jet(-1.0, n)
    mean = jet.P_t[n] / jet.P[n]
    return mean, max(jet.P_tt[n] / jet.P[n] - mean * mean, 0.0)
