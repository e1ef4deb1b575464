"""Covering numbers, pseudo-metrics, shatter coefficients.

Nets follow the strict-inequality convention: {m_1..m_k} is a u-net when every
point of the space is within distance strictly less than u of some m_i.  Exact
covering numbers (minimum net size) are computed by a set-cover DP over
bitmasks and are therefore limited to small instances; the greedy
farthest-point-first net provides the general upper bound.

The subset monotonicity check uses ambient nets (net points may be taken from
the superset): with nets forced inside the subset the inequality
N(u, M', d) <= N(u, M, d) is false in general (a hub point of M can cover
several points of M' that cannot cover each other), and the ambient reading is
the one actually used when passing from a product class to its factor classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .function_classes import (
    BVectorClass,
    GClass,
    HolderMember,
    IndicatorFamily,
    IndicatorMember,
    ProductClass,
    holder_l2_lambda_sq,
)
from .intervals import IntervalUnion
from .measures import NuModel, Sample, draw_sample, grid_points

__all__ = [
    "PseudoMetricId",
    "eval_pseudometric",
    "greedy_net_indices",
    "exact_covering_number",
    "covering_number",
    "check_covering_lemmas",
    "ShatterReport",
    "shatter_coefficient",
    "random_covering_boundedness",
]


# ---------------------------------------------------------------------------
# Pseudo-metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudoMetricId:
    """Identifier plus evaluation context for the pseudo-metrics in use.

    kind: one of d1_Pn, d1_nun, d1_lambdan, d2_lambdan, d2_nun, d2_lambda,
    d2_nu, d2_product, composite_d.  The empirical kinds need a sample; the
    lambda_n kinds need n; the population kinds need the model.
    """

    kind: str
    n: Optional[int] = None
    sample: Optional[Sample] = None
    model: Optional[NuModel] = None


def _h_values(h, pts: np.ndarray) -> np.ndarray:
    return np.asarray(h(pts), dtype=float)


def _as_pair(f):
    if isinstance(f, tuple) and len(f) == 2:
        return f
    raise TypeError("product-metric operands must be (h, g) pairs")


def _lambda2_h(h1, h2) -> float:
    """Exact L2(lambda) distance between two h members."""
    if isinstance(h1, IndicatorMember) and isinstance(h2, IndicatorMember):
        return math.sqrt(abs(h1.t - h2.t))
    if isinstance(h1, HolderMember) and isinstance(h2, HolderMember):
        return math.sqrt(max(holder_l2_lambda_sq(h1, h2), 0.0))
    if isinstance(h1, IntervalUnion) and isinstance(h2, IntervalUnion):
        return math.sqrt(float(h1.symdiff_measure(h2)))
    from .quadrature import integrate

    val = integrate(
        lambda x: (float(np.asarray(h1(np.asarray([x]))).ravel()[0])
                   - float(np.asarray(h2(np.asarray([x]))).ravel()[0])) ** 2,
        0.0, 1.0, tol=1e-10,
    )
    return math.sqrt(max(val, 0.0))


def _nu2_g(g1, g2, model: NuModel) -> float:
    """Exact L2(nu) distance via closed-form pair means."""
    sq = g1.second_moment(model) - 2.0 * g1.pair_mean(g2, model) + g2.second_moment(model)
    return math.sqrt(max(sq, 0.0))


def eval_pseudometric(metric: PseudoMetricId, a, b) -> float:
    kind = metric.kind
    if kind in ("d1_Pn", "d2_Pn"):
        h1, g1 = _as_pair(a)
        h2, g2 = _as_pair(b)
        s = metric.sample.grid()
        xs = metric.sample.xs()
        diff = _h_values(h1, s) * np.asarray(g1(xs), dtype=float) - _h_values(
            h2, s
        ) * np.asarray(g2(xs), dtype=float)
        if kind == "d1_Pn":
            return float(np.mean(np.abs(diff)))
        return float(math.sqrt(np.mean(diff**2)))
    if kind in ("d1_lambdan", "d2_lambdan"):
        pts = grid_points(metric.n)
        diff = _h_values(a, pts) - _h_values(b, pts)
        if kind == "d1_lambdan":
            return float(np.mean(np.abs(diff)))
        return float(math.sqrt(np.mean(diff**2)))
    if kind in ("d1_nun", "d2_nun"):
        xs = metric.sample.xs()
        diff = np.asarray(a(xs), dtype=float) - np.asarray(b(xs), dtype=float)
        if kind == "d1_nun":
            return float(np.mean(np.abs(diff)))
        return float(math.sqrt(np.mean(diff**2)))
    if kind == "d2_lambda":
        return _lambda2_h(a, b)
    if kind == "d2_nu":
        return _nu2_g(a, b, metric.model)
    if kind == "d2_product":
        h1, g1 = _as_pair(a)
        h2, g2 = _as_pair(b)
        pts = grid_points(metric.n)
        v1, v2 = _h_values(h1, pts), _h_values(h2, pts)
        m = metric.model
        sq = (
            float(np.mean(v1 * v1)) * g1.second_moment(m)
            - 2.0 * float(np.mean(v1 * v2)) * g1.pair_mean(g2, m)
            + float(np.mean(v2 * v2)) * g2.second_moment(m)
        )
        return math.sqrt(max(sq, 0.0))
    if kind == "composite_d":
        h1, g1 = _as_pair(a)
        h2, g2 = _as_pair(b)
        return _lambda2_h(h1, h2) + _nu2_g(g1, g2, metric.model)
    raise ValueError(f"unknown pseudo-metric kind {kind!r}")


def pairwise_distances(family: Sequence, metric) -> np.ndarray:
    """Distance matrix for a finite family; metric is a PseudoMetricId or a
    callable (a, b) -> float."""
    fn = metric if callable(metric) else (lambda a, b: eval_pseudometric(metric, a, b))
    k = len(family)
    d = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            d[i, j] = d[j, i] = fn(family[i], family[j])
    return d


# ---------------------------------------------------------------------------
# Covering numbers
# ---------------------------------------------------------------------------

def greedy_net_indices(dist: np.ndarray, u: float) -> list[int]:
    """Farthest-point-first u-net (strict < u coverage); deterministic start
    at index 0.  The selected points are pairwise >= u apart, so the result is
    simultaneously a maximal u-packing and a valid u-net."""
    k = dist.shape[0]
    if k == 0:
        return []
    chosen = [0]
    mind = dist[0].copy()
    while True:
        far = int(np.argmax(mind))
        if mind[far] < u:
            break
        chosen.append(far)
        mind = np.minimum(mind, dist[far])
    return chosen


def exact_covering_number(
    dist: np.ndarray,
    u: float,
    targets: Optional[Sequence[int]] = None,
    centers: Optional[Sequence[int]] = None,
    hard_cap: int = 22,
) -> int:
    """Minimum u-net size by set-cover DP.  targets are the rows to cover
    (default all); centers the allowed net points (default all -> ambient =
    internal when both default)."""
    k = dist.shape[0]
    tg = list(range(k)) if targets is None else list(targets)
    ct = list(range(k)) if centers is None else list(centers)
    t = len(tg)
    if t == 0:
        return 0
    if t > hard_cap:
        raise ValueError(f"exact covering limited to {hard_cap} targets, got {t}")
    pos = {p: i for i, p in enumerate(tg)}
    masks = []
    for c in ct:
        m = 0
        for p in tg:
            if dist[c, p] < u:
                m |= 1 << pos[p]
        if m:
            masks.append(m)
    full = (1 << t) - 1
    if not masks:
        raise ValueError("some target cannot be covered at this radius")
    best = {0: 0}
    frontier = {0}
    count = 0
    while True:
        if full in best:
            return best[full]
        count += 1
        new_frontier = set()
        for state in frontier:
            for m in masks:
                nxt = state | m
                if nxt not in best:
                    best[nxt] = count
                    new_frontier.add(nxt)
        if not new_frontier:
            raise ValueError("some target cannot be covered at this radius")
        frontier = new_frontier


def covering_number(family: Sequence, u: float, metric) -> int:
    """Size of a greedy u-net; exact (verified minimal) for families of at
    most 12 members."""
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    if u <= 0:
        raise ValueError("u must be > 0")
    dist = metric if isinstance(metric, np.ndarray) else pairwise_distances(family, metric)
    if len(family) <= 12:
        return exact_covering_number(dist, u)
    return len(greedy_net_indices(dist, u))


# ---------------------------------------------------------------------------
# The four covering lemmas as randomized property checks
# ---------------------------------------------------------------------------

def _euclidean(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


@dataclass
class LemmaCheckReport:
    trials: int
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return len(self.violations)

    def to_json(self) -> list[dict]:
        """One {lemma, trials, violations, worst_case} record per lemma."""
        out = []
        for lemma, trials in self.checks.items():
            mine = [v for v in self.violations if v["lemma"] == lemma]
            out.append({
                "lemma": lemma,
                "trials": trials,
                "violations": len(mine),
                "worst_case": mine[0] if mine else None,
            })
        return out


def check_covering_lemmas(trials: int, seed: int) -> LemmaCheckReport:
    """Randomized finite metric spaces (Euclidean point clouds, <= 10 points),
    exact covering numbers; asserts subset monotonicity (ambient nets), metric
    domination, the product bound and isometry invariance."""
    if trials < 1:
        raise ValueError("trials >= 1")
    rng = np.random.default_rng(seed)
    report = LemmaCheckReport(trials=trials)
    counts = {"subset": 0, "domination": 0, "product": 0, "isometry": 0}

    for trial in range(trials):
        k = int(rng.integers(3, 11))
        pts = rng.random((k, 2)) * 2.0
        dist = _euclidean(pts)
        diam = float(dist.max())
        u = float(rng.random() * 1.2 * diam + 1e-6)

        n_full = exact_covering_number(dist, u)

        # subset monotonicity, ambient nets
        sub_size = int(rng.integers(1, k + 1))
        sub = sorted(rng.choice(k, size=sub_size, replace=False).tolist())
        n_sub = exact_covering_number(dist, u, targets=sub)
        counts["subset"] += 1
        if n_sub > n_full:
            report.violations.append(
                {"lemma": "subset", "trial": trial, "u": u,
                 "points": pts.tolist(), "subset": sub,
                 "n_sub": n_sub, "n_full": n_full}
            )

        # metric domination: d' = d + extra Euclidean block >= d
        extra = rng.random((k, 1)) * 2.0
        dist_prime = dist + _euclidean(extra)
        n_d = exact_covering_number(dist, u)
        n_dp = exact_covering_number(dist_prime, u)
        counts["domination"] += 1
        if n_d > n_dp:
            report.violations.append(
                {"lemma": "domination", "trial": trial, "u": u,
                 "points": pts.tolist(), "n_d": n_d, "n_dprime": n_dp}
            )

        # product bound on two small factors
        k1, k2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        p1 = rng.random((k1, 2))
        p2 = rng.random((k2, 2))
        d1, d2 = _euclidean(p1), _euclidean(p2)
        dprod = (d1[:, None, :, None] + d2[None, :, None, :]).reshape(k1 * k2, k1 * k2)
        t = float(rng.random() * 0.8 + 0.1)
        u2 = float(rng.random() * 1.2 * (d1.max() + d2.max()) + 1e-6)
        n_prod = exact_covering_number(dprod, u2)
        bound = exact_covering_number(d1, t * u2) * exact_covering_number(d2, (1 - t) * u2)
        counts["product"] += 1
        if n_prod > bound:
            report.violations.append(
                {"lemma": "product", "trial": trial, "u": u2, "t": t,
                 "n_product": n_prod, "bound": bound,
                 "p1": p1.tolist(), "p2": p2.tolist()}
            )

        # isometry invariance under relabeling
        perm = rng.permutation(k)
        dist_perm = dist[np.ix_(perm, perm)]
        n_perm = exact_covering_number(dist_perm, u)
        counts["isometry"] += 1
        if n_perm != n_full:
            report.violations.append(
                {"lemma": "isometry", "trial": trial, "u": u,
                 "n_original": n_full, "n_relabeled": n_perm}
            )

    report.checks = counts
    return report


# ---------------------------------------------------------------------------
# Shatter coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShatterReport:
    class_label: str
    points: tuple[float, ...]
    coefficient: int
    dichotomies: Optional[tuple[int, ...]] = None

    def sauer_bound(self, vc_dim: int) -> int:
        return (len(self.points) + 1) ** vc_dim

    @property
    def shatters(self) -> bool:
        return self.coefficient == 2 ** len(self.points)

    def to_json(self) -> dict:
        out = {
            "class": self.class_label,
            "points": list(self.points),
            "coefficient": self.coefficient,
            "shatters": self.shatters,
        }
        if self.dichotomies is not None:
            out["dichotomies"] = [
                [i for i in range(len(self.points)) if m >> i & 1]
                for m in self.dichotomies
            ]
        return out


def _runs_of_mask(mask: int) -> int:
    # number of maximal blocks of consecutive ones
    return bin(mask & ~(mask << 1)).count("1")


def shatter_coefficient(
    cls: Union[BVectorClass, GClass, IndicatorFamily],
    points: Sequence[float],
    keep_dichotomies: bool = False,
) -> ShatterReport:
    """Exact count of distinct subsets of `points` cut out by the class.

    For interval-built classes the dichotomy rule on sorted points reduces to
    run counting: a subset is achievable iff its number of consecutive runs is
    within the interval budget, with the anchored initial interval granting one
    extra run exactly when the smallest point is selected.
    """
    pts = sorted(float(p) for p in points)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    k = len(pts)
    if k > 20:
        raise ValueError("instance too large: at most 20 points")

    if isinstance(cls, GClass):
        if cls.kind not in ("half-lines", "initial-intervals"):
            raise ValueError("shatter enumeration shipped for indicator G kinds only")
        achievable = [m for m in range(1 << k) if _is_prefix_mask(m, k)]
    elif isinstance(cls, IndicatorFamily):
        achievable = [m for m in range(1 << k) if _is_prefix_mask(m, k)]
    elif isinstance(cls, BVectorClass):
        achievable = []
        for m in range(1 << k):
            budget = cls.j
            if cls.parity == "odd" and (m & 1):
                budget += 1  # anchored initial interval, usable iff p_min selected
            if _runs_of_mask(m) <= budget:
                achievable.append(m)
    else:
        raise TypeError(type(cls))

    label = getattr(cls, "kind", None) or (
        f"B({cls.n_breakpoints})" if isinstance(cls, BVectorClass) else type(cls).__name__
    )
    return ShatterReport(
        class_label=str(label),
        points=tuple(pts),
        coefficient=len(achievable),
        dichotomies=tuple(achievable) if keep_dichotomies else None,
    )


def _is_prefix_mask(mask: int, k: int) -> bool:
    # half-lines cut exactly the prefixes of the sorted order (incl. empty)
    if mask == 0:
        return True
    return _runs_of_mask(mask) == 1 and (mask & 1) == 1


# ---------------------------------------------------------------------------
# Stochastic boundedness of random covering numbers
# ---------------------------------------------------------------------------

@dataclass
class RandomCoveringReport:
    tau: float
    trials: list = field(default_factory=list)
    max_observed: int = 0
    violations: int = 0


def random_covering_boundedness(
    product_class: ProductClass,
    tau: float,
    n_list: Sequence[int],
    seeds: Sequence[int],
    model: NuModel,
    fine: int = 12,
) -> RandomCoveringReport:
    """Greedy covering numbers of a fixed fine net of F under the random
    empirical L1 metric, trial by trial, against the factorized bound
    N(tau/2, H, d1_lambdan) * N(tau/2, G, d1_nun)."""
    if product_class.taxonomy_tag != "pi(UB,M-VC)":
        raise ValueError("random covering boundedness is stated for pi(UB,M-VC)")
    if not isinstance(product_class.h_class, IndicatorFamily):
        raise ValueError("the shipped fine net uses the indicator h family")

    from .function_classes import HalfLine, InitialInterval

    h_net = [IndicatorMember((i + 1) / fine) for i in range(fine)]
    probs = [(i + 1) / (fine + 1) for i in range(fine)]
    g_ctor = HalfLine if product_class.g_class.kind == "half-lines" else InitialInterval
    g_net = [g_ctor(float(model.ppf(p))) for p in probs]

    report = RandomCoveringReport(tau=tau)
    for n in n_list:
        s_grid = grid_points(n)
        h_vals = np.stack([h(s_grid) for h in h_net])      # (H, n)
        for seed in seeds:
            sample = draw_sample(model, n, seed)
            xs = sample.xs()
            g_vals = np.stack([g(xs) for g in g_net])      # (G, n)
            f_vals = (h_vals[:, None, :] * g_vals[None, :, :]).reshape(-1, n)
            dist_f = np.mean(
                np.abs(f_vals[:, None, :] - f_vals[None, :, :]), axis=2
            )
            observed = len(greedy_net_indices(dist_f, tau))
            dist_h = np.mean(np.abs(h_vals[:, None, :] - h_vals[None, :, :]), axis=2)
            dist_g = np.mean(np.abs(g_vals[:, None, :] - g_vals[None, :, :]), axis=2)
            nh = len(greedy_net_indices(dist_h, tau / 2.0))
            ng = len(greedy_net_indices(dist_g, tau / 2.0))
            ok = observed <= nh * ng
            report.trials.append(
                {"n": n, "seed": seed, "observed": observed,
                 "bound_h": nh, "bound_g": ng, "bound": nh * ng, "ok": ok}
            )
            report.max_observed = max(report.max_observed, observed)
            if not ok:
                report.violations += 1
    return report
