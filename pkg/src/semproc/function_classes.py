"""The explicit function and set classes: Holder balls H(T, C, beta), the
initial-interval indicator family, the interval-union set classes B(2j+1) and
B(2j), the non-uniformly-Riemann-integrable counterexample family, parametric
G classes on the sample space, and products F = H * G.

Every class exposes three things, which is how an infinite class becomes
computable:

  * random member generation (seeded),
  * u-net construction with a provable coverage guarantee in a stated metric,
  * closed-form rate bounds where they exist.

Holder nets are built on a uniform grid: candidate value sequences are
enumerated on a step/2 value lattice, each sequence is replaced by its largest
Holder minorant on the grid (a McShane-type regularization, which restores
exact pairwise feasibility), the anchor value is clipped back into [-T, T] by
a vertical translation, and the piecewise-linear interpolant is kept.  A
convexity argument shows linear interpolation of pairwise-feasible grid data
is itself (C, beta)-Holder, so net members are exact class members; rounding
(u/4), regularization (u/4), anchor translation (u/4 slack absorbed) and
interpolation (u/2) add up to sup-distance at most u from any class member.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .intervals import IntervalUnion
from .measures import NuModel
from .piecewise import PiecewiseLinear, diff_sq_integral, sup_dist

__all__ = [
    "NetTooLargeError",
    "NoBoundError",
    "HolderClass",
    "HolderMember",
    "IndicatorFamily",
    "IndicatorMember",
    "BVectorClass",
    "BVectorMember",
    "b_infinity_witness",
    "BInfinityClass",
    "GClass",
    "HalfLine",
    "InitialInterval",
    "BoundedPolynomial",
    "ProductClass",
    "riemann_gap_bound",
    "observed_riemann_gap",
    "oscillation_sup_bound",
    "eval_member",
]


class NetTooLargeError(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"net would need about {estimate} members (cap {cap})")
        self.estimate = estimate
        self.cap = cap


class NoBoundError(ValueError):
    """The class has no stated closed-form Riemann gap bound."""


# ---------------------------------------------------------------------------
# Holder classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderMember:
    """A function in H(T, C, beta), either a cusp mixture

        h(x) = a + sum_k c_k |x - x_k|^beta   with sum |c_k| <= C, |h(0)| <= T,

    (exactly Holder by subadditivity of t -> t^beta) or a piecewise-linear
    interpolant of pairwise-feasible grid values (net members)."""

    T: float
    C: float
    beta: float
    a: float = 0.0
    coeffs: tuple[float, ...] = ()
    centers: tuple[float, ...] = ()
    pl: Optional[PiecewiseLinear] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.pl is not None:
            return self.pl(x)
        out = np.full(x.shape, self.a, dtype=float)
        for c, x0 in zip(self.coeffs, self.centers):
            out += c * np.abs(x - x0) ** self.beta
        return out

    def lambda_exact(self) -> float:
        """Exact integral over [0, 1]."""
        if self.pl is not None:
            return self.pl.integral()
        b = self.beta
        total = self.a
        for c, x0 in zip(self.coeffs, self.centers):
            total += c * (x0 ** (b + 1) + (1 - x0) ** (b + 1)) / (b + 1)
        return total

    def lambda_n(self, n: int) -> float:
        grid = np.arange(1, n + 1, dtype=float) / n
        return float(np.mean(self(grid)))

    def envelope_bound(self) -> float:
        return self.C + self.T


@dataclass(frozen=True)
class HolderClass:
    """H(T, C, beta): |h(x1) - h(x2)| <= C |x1 - x2|^beta and |h(0)| <= T."""

    T: float
    C: float
    beta: float

    def __post_init__(self):
        if self.T <= 0 or self.C <= 0 or not (0 < self.beta <= 1):
            raise ValueError("need T > 0, C > 0, beta in (0, 1]")

    @property
    def envelope_constant(self) -> float:
        return self.C + self.T

    def random_member(self, rng: np.random.Generator, max_cusps: int = 3) -> HolderMember:
        k = int(rng.integers(1, max_cusps + 1))
        centers = rng.random(k)
        raw = rng.standard_normal(k)
        denom = np.sum(np.abs(raw))
        if denom == 0.0:
            raw = np.ones(k)
            denom = float(k)
        coeffs = raw / denom * self.C * rng.random()
        t0 = (2.0 * rng.random() - 1.0) * self.T
        a = t0 - float(np.sum(coeffs * centers**self.beta))
        return HolderMember(self.T, self.C, self.beta, a=a,
                            coeffs=tuple(coeffs), centers=tuple(centers))

    def riemann_gap_bound(self, n: int) -> float:
        return self.C / n**self.beta

    def oscillation_sup_bound(self, n: int) -> float:
        """Closed-form bound on sup |lambda_n((h1-h2)^2) - lambda((h1-h2)^2)|
        over the class, aggregated from the square and cross-product chains."""
        return 8.0 * self.C * (self.C + self.T) / n**self.beta

    # -- net construction ----------------------------------------------------

    def net_grid_count(self, u: float) -> int:
        """Cells m such that 2 C (1/(2m))^beta <= u/2; equals ceil(2C/u) at beta=1."""
        return max(1, math.ceil(0.5 * (4.0 * self.C / u) ** (1.0 / self.beta)))

    def build_net(self, u: float, max_members: int = 200_000) -> list[HolderMember]:
        """Sup-norm u-net of exact class members (see module docstring)."""
        if u <= 0:
            raise ValueError("u must be > 0")
        m = self.net_grid_count(u)
        step = u / 2.0
        grid = np.arange(0, m + 1, dtype=float) / m
        hol = self.C * np.abs(grid[:, None] - grid[None, :]) ** self.beta

        anchor_lo = -(self.T + u / 4.0)
        anchor_hi = self.T + u / 4.0
        anchors = [k * step for k in range(math.ceil(anchor_lo / step),
                                           math.floor(anchor_hi / step) + 1)]
        max_step = self.C / m**self.beta + u / 2.0
        n_steps = 2 * math.floor(max_step / step + 1e-12) + 1
        estimate = len(anchors) * n_steps**m
        if estimate > max_members:
            raise NetTooLargeError(estimate, max_members)
        step_options = [k * step for k in range(-(n_steps // 2), n_steps // 2 + 1)]
        env = self.C + self.T + u / 4.0

        members: dict[tuple, HolderMember] = {}
        seq = np.empty(m + 1)

        def extend(k: int):
            if k == m + 1:
                vals = np.min(seq[None, :] + hol, axis=1)  # Holder minorant on the grid
                shift = min(self.T, max(-self.T, vals[0])) - vals[0]
                vals = vals + shift
                key = tuple(np.round(vals, 9))
                if key not in members:
                    members[key] = HolderMember(
                        self.T, self.C, self.beta,
                        pl=PiecewiseLinear(tuple(grid), tuple(float(v) for v in vals)),
                    )
                return
            prev = seq[:k]
            for s in step_options:
                cand = seq[k - 1] + s
                if abs(cand) > env + 1e-12:
                    continue
                window = hol[k, :k] + u / 2.0 + 1e-12
                if np.any(np.abs(cand - prev) > window):
                    continue
                seq[k] = cand
                extend(k + 1)

        for a0 in anchors:
            seq[0] = a0
            extend(1)
        return list(members.values())


def holder_sup_distance(h1, h2, grid_size: int = 4001) -> float:
    """Certified upper bound on sup |h1 - h2|; exact when both are pl."""
    p1 = getattr(h1, "pl", None)
    p2 = getattr(h2, "pl", None)
    if p1 is not None and p2 is not None:
        return sup_dist(p1, p2)
    xs = np.linspace(0.0, 1.0, grid_size)
    est = float(np.max(np.abs(h1(xs) - h2(xs))))
    half = 0.5 / (grid_size - 1)
    slack = 0.0
    for h in (h1, h2):
        slack += h.C * half ** h.beta
    return est + slack


def holder_l2_lambda_sq(h1: HolderMember, h2: HolderMember) -> float:
    """lambda((h1-h2)^2), exact for pl pairs."""
    if h1.pl is not None and h2.pl is not None:
        return diff_sq_integral(h1.pl, h2.pl)
    from .quadrature import integrate

    return integrate(lambda x: float((h1(np.asarray([x]))[0] - h2(np.asarray([x]))[0]) ** 2),
                     0.0, 1.0, tol=1e-10)


# ---------------------------------------------------------------------------
# Indicator family on [0, 1] (the h-side analogue of B(1))
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndicatorMember:
    """h = 1 on (0, t], 0 elsewhere (right-closed convention)."""

    t: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = ((x > 0.0) & (x <= self.t)).astype(float)
        return out if out.shape else float(out)

    def as_interval(self) -> IntervalUnion:
        return IntervalUnion.from_pairs([(0, self.t)])


@dataclass(frozen=True)
class IndicatorFamily:
    """The uniformly Riemann-integrable class {1_(0,t] : 0 < t <= 1}."""

    envelope_constant: float = 1.0

    def random_member(self, rng: np.random.Generator) -> IndicatorMember:
        return IndicatorMember(float(1.0 - rng.random()))  # in (0, 1]

    def riemann_gap_bound(self, n: int) -> float:
        return 2.0 / n  # B(1) bound at j = 0

    def build_net(self, u: float, metric: str = "d2_lambda",
                  max_members: int = 200_000) -> list[IndicatorMember]:
        mesh = u * u if metric in ("d2_lambda", "d2") else u
        count = math.ceil(1.0 / mesh)
        if count > max_members:
            raise NetTooLargeError(count, max_members)
        return [IndicatorMember(min(1.0, (k + 1) * mesh)) for k in range(count)]


# ---------------------------------------------------------------------------
# Interval-union set classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BVectorMember:
    breakpoints: tuple[float, ...]
    parity: str
    set: IntervalUnion

    def __call__(self, x):
        return self.set.indicator(np.asarray(x, dtype=float))


def _interval_pairs(breakpoints: Sequence, parity: str):
    t = list(breakpoints)
    if parity == "odd":
        pairs = [(0, t[0])]
        rest = t[1:]
    else:
        pairs = []
        rest = t
    pairs.extend((rest[i], rest[i + 1]) for i in range(0, len(rest), 2))
    return pairs


@dataclass(frozen=True)
class BVectorClass:
    """B(2j+1) (parity 'odd': anchored initial interval plus j intervals) or
    B(2j) (parity 'even': j free intervals); half-open (a, b] convention."""

    j: int
    parity: str

    def __post_init__(self):
        if self.parity not in ("odd", "even"):
            raise ValueError("parity must be 'odd' or 'even'")
        if self.j < 0 or (self.parity == "even" and self.j < 1):
            raise ValueError("need j >= 0 (odd) or j >= 1 (even)")

    @property
    def n_breakpoints(self) -> int:
        return 2 * self.j + 1 if self.parity == "odd" else 2 * self.j

    @property
    def vc_dimension(self) -> int:
        return self.n_breakpoints

    def member(self, breakpoints: Sequence[Union[float, Fraction]]) -> BVectorMember:
        t = list(breakpoints)
        if len(t) != self.n_breakpoints:
            raise ValueError(f"expected {self.n_breakpoints} breakpoints")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ValueError("breakpoints must be nondecreasing")
        iu = IntervalUnion.from_pairs(_interval_pairs(t, self.parity))
        return BVectorMember(tuple(float(v) for v in t), self.parity, iu)

    def random_member(self, rng: np.random.Generator) -> BVectorMember:
        t = np.sort(rng.random(self.n_breakpoints))
        return self.member(t)

    def riemann_gap_bound(self, n: int) -> float:
        if self.parity == "odd":
            return 2.0 * (2 * self.j + 1) / n
        return 4.0 * self.j / n

    def sup_lambda_gap(self, n: int) -> float:
        """Exact sup over the class of |lambda_n(B) - lambda(B)| (supremum
        value; approached, not attained).  Tighter than the display bound."""
        if self.parity == "odd":
            return (self.j + 1) / n
        return self.j / n

    def build_net(self, u: float, metric: str = "d2_lambda",
                  max_members: int = 200_000) -> list[BVectorMember]:
        """Net by breakpoint quantization; mesh chosen so the guarantee holds
        in the requested metric (L2 distance between indicators is the square
        root of the symmetric difference measure)."""
        p = self.n_breakpoints
        mesh = (u * u) / p if metric in ("d2_lambda", "d2") else u / (2.0 * p)
        g = math.ceil(1.0 / mesh)
        count = math.comb(g + p, p)
        if count > max_members:
            raise NetTooLargeError(count, max_members)
        grid = [Fraction(k, g) for k in range(g + 1)]
        seen: dict[tuple, BVectorMember] = {}
        for combo in itertools.combinations_with_replacement(range(g + 1), p):
            t = [grid[c] for c in combo]
            member = self.member(t)
            key = member.set.bounds
            if key not in seen:
                seen[key] = member
        return list(seen.values())


@dataclass(frozen=True)
class BInfinityClass:
    """Union over n of B(n); not a VC class, no uniform Riemann gap bound."""

    def witness(self, n: int) -> IntervalUnion:
        return b_infinity_witness(n)


def b_infinity_witness(n: int) -> IntervalUnion:
    """B_n = union over m < n of (m/n, (m+1)/n - eps_n] with eps_n = 1/(n 2^n):
    misses the whole grid while filling Lebesgue measure 1 - 2^{-n}."""
    if n < 1:
        raise ValueError("n >= 1 required")
    eps = Fraction(1, n * 2**n)
    pairs = [(Fraction(m, n), Fraction(m + 1, n) - eps) for m in range(n)]
    return IntervalUnion.from_pairs(pairs)


# ---------------------------------------------------------------------------
# G classes on the sample space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfLine:
    """g = 1 on (-inf, w]."""

    w: float

    def __call__(self, x):
        out = (np.asarray(x, dtype=float) <= self.w).astype(float)
        return out if out.shape else float(out)

    def mean(self, model: NuModel) -> float:
        return float(model.cdf(self.w))

    def pair_mean(self, other, model: NuModel) -> float:
        if isinstance(other, HalfLine):
            return float(model.cdf(min(self.w, other.w)))
        if isinstance(other, InitialInterval):
            lo = min(self.w, other.w)
            return max(0.0, float(model.cdf(lo)) - float(model.cdf(0.0))) if lo >= 0 else 0.0
        if isinstance(other, BoundedPolynomial):
            return other.truncated_mean(model, self.w)
        raise TypeError(type(other))

    def second_moment(self, model: NuModel) -> float:
        return self.mean(model)


@dataclass(frozen=True)
class InitialInterval:
    """g = 1 on [0, w]."""

    w: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = ((x >= 0.0) & (x <= self.w)).astype(float)
        return out if out.shape else float(out)

    def mean(self, model: NuModel) -> float:
        if self.w < 0:
            return 0.0
        return float(model.cdf(self.w)) - float(model.cdf(0.0)) + _mass_at_zero(model)

    def pair_mean(self, other, model: NuModel) -> float:
        if isinstance(other, (HalfLine, InitialInterval)):
            lo = min(self.w, other.w)
            if lo < 0:
                return 0.0
            return float(model.cdf(lo)) - float(model.cdf(0.0)) + _mass_at_zero(model)
        if isinstance(other, BoundedPolynomial):
            return other.truncated_mean(model, self.w) - other.truncated_mean(model, 0.0)
        raise TypeError(type(other))

    def second_moment(self, model: NuModel) -> float:
        return self.mean(model)


def _mass_at_zero(model: NuModel) -> float:
    return 0.0  # all registered models are atomless


@dataclass(frozen=True)
class BoundedPolynomial:
    """g(x) = sum_k c_k x^k with coefficients inside a fixed box."""

    coeffs: tuple[float, ...]

    def __call__(self, x):
        out = np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coeffs)
        return out if np.asarray(out).shape else float(out)

    def mean(self, model: NuModel) -> float:
        return sum(c * model.moment(k) for k, c in enumerate(self.coeffs))

    def truncated_mean(self, model: NuModel, w: float) -> float:
        return sum(c * model.truncated_moment(k, w) for k, c in enumerate(self.coeffs))

    def pair_mean(self, other, model: NuModel) -> float:
        if isinstance(other, BoundedPolynomial):
            prod = np.polynomial.polynomial.polymul(self.coeffs, other.coeffs)
            return sum(c * model.moment(k) for k, c in enumerate(prod))
        return other.pair_mean(self, model)

    def second_moment(self, model: NuModel) -> float:
        return self.pair_mean(self, model)


GMember = Union[HalfLine, InitialInterval, BoundedPolynomial]


@dataclass(frozen=True)
class GClass:
    """A parametric class on the sample space: half-lines, initial intervals,
    or bounded-degree polynomials with a coefficient box."""

    kind: str
    degree: int = 0
    coeff_bound: float = 1.0

    def __post_init__(self):
        if self.kind not in ("half-lines", "initial-intervals", "poly"):
            raise ValueError(f"unknown G kind {self.kind!r}")

    @property
    def envelope_constant(self) -> Optional[float]:
        """Constant envelope value, or None when the envelope is not constant."""
        if self.kind in ("half-lines", "initial-intervals"):
            return 1.0
        return None

    def envelope(self, model: NuModel) -> Callable[[np.ndarray], np.ndarray]:
        if self.kind in ("half-lines", "initial-intervals"):
            return lambda x: np.ones_like(np.asarray(x, dtype=float))
        bound = self.coeff_bound

        def env(x):
            ax = np.abs(np.asarray(x, dtype=float))
            return bound * sum(ax**k for k in range(self.degree + 1))

        return env

    def envelope_sq_mean(self, model: NuModel) -> float:
        """nu(G^2) for the class envelope (exact via model moments)."""
        if self.kind in ("half-lines", "initial-intervals"):
            return 1.0
        b = self.coeff_bound
        total = 0.0
        for k in range(self.degree + 1):
            for l in range(self.degree + 1):
                total += b * b * _abs_moment(model, k + l)
        return total

    def random_member(self, rng: np.random.Generator, model: NuModel) -> GMember:
        if self.kind == "half-lines":
            return HalfLine(float(model.ppf(min(rng.random(), 1 - 1e-12))))
        if self.kind == "initial-intervals":
            return InitialInterval(abs(float(model.ppf(min(rng.random(), 1 - 1e-12)))))
        coeffs = (2 * rng.random(self.degree + 1) - 1) * self.coeff_bound
        return BoundedPolynomial(tuple(coeffs))

    def build_net(self, u: float, model: NuModel, metric: str = "d2_nu",
                  max_members: int = 200_000) -> list[GMember]:
        """Quantile net: d2_nu distance between indicator members is
        sqrt(|F(w) - F(w')|), so an F-quantile grid of mesh u^2 covers."""
        if self.kind == "poly":
            raise NetTooLargeError(10**9, max_members)  # no constructive net shipped
        mesh = u * u if metric in ("d2_nu", "d2") else u
        count = math.ceil(1.0 / mesh)
        if count > max_members:
            raise NetTooLargeError(count, max_members)
        probs = [min((k + 1) * mesh, 1.0 - 1e-12) for k in range(count)]
        ws = sorted({float(model.ppf(p)) for p in probs})
        if self.kind == "half-lines":
            return [HalfLine(w) for w in ws]
        return [InitialInterval(max(w, 0.0)) for w in ws]


def _abs_moment(model: NuModel, k: int) -> float:
    if model.kind == "standard-normal" and k % 2 == 1:
        # E|X|^k for odd k: 2^{k/2} Gamma((k+1)/2) / sqrt(pi)
        return 2 ** (k / 2) * math.gamma((k + 1) / 2) / math.sqrt(math.pi)
    return model.moment(k)


# ---------------------------------------------------------------------------
# Product classes
# ---------------------------------------------------------------------------

_TAXONOMY_TAGS = ("pi(UB,M-VC)", "pi(nuG,J-VC)", "pi(nuG2,J-VC)")


@dataclass(frozen=True)
class ProductClass:
    """F = H * G = {f(s, x) = h(s) g(x)} with a taxonomy tag.

    The uniformly bounded tag requires both component envelopes constant;
    construction is rejected otherwise.
    """

    h_class: Union[HolderClass, IndicatorFamily]
    g_class: GClass
    taxonomy_tag: str = "pi(nuG2,J-VC)"

    def __post_init__(self):
        if self.taxonomy_tag not in _TAXONOMY_TAGS:
            raise ValueError(f"unknown taxonomy tag {self.taxonomy_tag!r}")
        if self.taxonomy_tag == "pi(UB,M-VC)" and self.g_class.envelope_constant is None:
            raise ValueError(
                "pi(UB,M-VC) requires a constant G envelope; "
                f"{self.g_class.kind} has a non-constant envelope"
            )

    @property
    def h_envelope(self) -> float:
        return self.h_class.envelope_constant

    def random_member(self, rng: np.random.Generator, model: NuModel):
        return (self.h_class.random_member(rng), self.g_class.random_member(rng, model))


# ---------------------------------------------------------------------------
# Rate bounds and observed gaps
# ---------------------------------------------------------------------------

AnyClass = Union[HolderClass, BVectorClass, IndicatorFamily, BInfinityClass]


def riemann_gap_bound(cls: AnyClass, n: int) -> float:
    """The closed-form uniform bound on |lambda_n - lambda| over the class."""
    if n <= 0:
        raise ValueError("n must be positive")
    if isinstance(cls, (HolderClass, BVectorClass, IndicatorFamily)):
        return cls.riemann_gap_bound(n)
    raise NoBoundError(f"no closed-form Riemann gap bound for {type(cls).__name__}")


def observed_riemann_gap(member, n: int) -> float:
    """|lambda_n(member) - lambda(member)|, exact per representation."""
    if isinstance(member, HolderMember):
        return abs(member.lambda_n(n) - member.lambda_exact())
    if isinstance(member, IndicatorMember):
        member = member.as_interval()
    if isinstance(member, BVectorMember):
        member = member.set
    if isinstance(member, IntervalUnion):
        gap = member.lambda_n(n) - member.lebesgue()
        return float(abs(gap))
    raise TypeError(f"unsupported member type {type(member).__name__}")


def observed_riemann_gap_exact(member: IntervalUnion, n: int) -> Fraction:
    """Exact rational gap for interval unions (used by the counterexample)."""
    return abs(member.lambda_n(n) - member.lebesgue())


def oscillation_sup_bound(cls: HolderClass, n: int) -> float:
    if not isinstance(cls, HolderClass):
        raise TypeError("oscillation_sup_bound is stated for Holder classes")
    return cls.oscillation_sup_bound(n)


def eval_member(member, point: float) -> float:
    """Pointwise evaluation with the conventions fixed by the class
    representations (right-closed intervals, pl interpolation)."""
    if isinstance(member, IntervalUnion):
        return 1.0 if member.contains(point) else 0.0
    if isinstance(member, BVectorMember):
        return 1.0 if member.set.contains(point) else 0.0
    val = member(np.asarray([point], dtype=float))
    return float(np.asarray(val).ravel()[0])


def parse_class_descriptor(desc: dict):
    """CLI class descriptors: {"class": "holder", "T":..,"C":..,"beta":..},
    {"class": "bvector", "j":.., "parity":..}, {"class": "halflines"},
    {"class": "indicators"}."""
    if not isinstance(desc, dict) or "class" not in desc:
        raise ValueError("class descriptor must be a dict with a 'class' key")
    kind = desc["class"]
    extra = set(desc) - {"class", "T", "C", "beta", "j", "parity"}
    if extra:
        raise ValueError(f"unknown class descriptor keys: {sorted(extra)}")
    if kind == "holder":
        return HolderClass(float(desc.get("T", 1.0)), float(desc.get("C", 1.0)),
                           float(desc.get("beta", 1.0)))
    if kind == "bvector":
        return BVectorClass(int(desc.get("j", 0)), str(desc.get("parity", "odd")))
    if kind == "halflines":
        return GClass("half-lines")
    if kind == "indicators":
        return IndicatorFamily()
    raise ValueError(f"unknown class kind {kind!r}")


def net_to_csv(net: Sequence, path) -> None:
    """Export net members: Holder pl members as knot/value pairs, interval
    members as breakpoint lists, half-lines as their cut points."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["member", "kind", "parameters"])
        for i, m in enumerate(net):
            if isinstance(m, HolderMember) and m.pl is not None:
                params = ";".join(f"{k!r}:{v!r}" for k, v in zip(m.pl.knots, m.pl.values))
                writer.writerow([i, "holder-pl", params])
            elif isinstance(m, IndicatorMember):
                writer.writerow([i, "indicator", repr(m.t)])
            elif isinstance(m, BVectorMember):
                writer.writerow([i, "bvector", ";".join(repr(t) for t in m.breakpoints)])
            elif isinstance(m, (HalfLine, InitialInterval)):
                writer.writerow([i, "half-line", repr(m.w)])
            else:
                raise TypeError(f"cannot export member of type {type(m).__name__}")
