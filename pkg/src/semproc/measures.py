"""Core measures: lambda_n, lambda, the sampling models nu, the sequential
empirical measure P_n and the B-empirical measure nu_{n,B}.

The three sampling models (uniform01, standard-normal, exponential(rate)) are
deliberately the only ones registered: each has closed-form cdf, raw moments
and truncated moments, so product expectations of every registered function
family are exactly computable and bound checks never need nested Monte Carlo.

Determinism contract: draw_sample(model, n, seed) creates a fresh PCG64
generator from the 64-bit seed and draws the n values in a single vectorized
call.  Same (model, n, seed) reproduces the values bit-exactly.  Independent
replicate streams are obtained by deriving child seeds (see cli.derive_seed),
never by reusing a generator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy import integrate as _sciint
from scipy import special as _scisp

from .intervals import IntervalUnion
from .quadrature import DEFAULT_TOL, integrate

__all__ = [
    "NuModel",
    "Sample",
    "DiscreteUniform",
    "QFunction",
    "BEmpiricalValue",
    "parse_model",
    "draw_sample",
    "eval_lambda_n",
    "eval_lambda",
    "eval_semp",
    "eval_b_empirical",
    "k_n_B",
    "grid_points",
    "sample_to_csv",
    "sample_from_csv",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Sampling models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NuModel:
    """A sampling law nu on the real line with closed-form moment machinery.

    kind: one of {"uniform01", "standard-normal", "exponential"}.
    params: (rate,) for exponential, () otherwise.
    """

    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("uniform01", "standard-normal", "exponential"):
            raise ValueError(f"unknown model kind: {self.kind!r}")
        if self.kind == "exponential":
            if len(self.params) != 1 or self.params[0] <= 0:
                raise ValueError("exponential model needs a positive rate")
        elif self.params:
            raise ValueError(f"{self.kind} takes no parameters")

    @property
    def name(self) -> str:
        if self.kind == "exponential":
            return f"exponential({self.params[0]:g})"
        return self.kind

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "uniform01":
            return (0.0, 1.0)
        if self.kind == "standard-normal":
            return (-math.inf, math.inf)
        return (0.0, math.inf)

    # -- distribution primitives -------------------------------------------

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "uniform01":
            out = np.clip(w, 0.0, 1.0)
        elif self.kind == "standard-normal":
            out = _scisp.ndtr(w)
        else:
            rate = self.params[0]
            out = np.where(w > 0, -np.expm1(-rate * np.maximum(w, 0.0)), 0.0)
        return out if out.shape else float(out)

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ValueError("probability outside [0, 1]")
        if self.kind == "uniform01":
            out = p.astype(float)
        elif self.kind == "standard-normal":
            out = _scisp.ndtri(np.clip(p, 1e-300, 1 - 1e-16))
        else:
            rate = self.params[0]
            out = -np.log1p(-np.clip(p, 0.0, 1.0 - 1e-16)) / rate
        return out if out.shape else float(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform01":
            out = ((x >= 0.0) & (x <= 1.0)).astype(float)
        elif self.kind == "standard-normal":
            out = np.exp(-0.5 * x * x) / _SQRT2PI
        else:
            rate = self.params[0]
            out = np.where(x >= 0.0, rate * np.exp(-rate * np.minimum(x, 700 / rate)), 0.0)
        return out if out.shape else float(out)

    # -- closed-form moments -------------------------------------------------

    def moment(self, k: int) -> float:
        """Exact raw moment E[X^k]."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if self.kind == "uniform01":
            return 1.0 / (k + 1)
        if self.kind == "standard-normal":
            if k % 2 == 1:
                return 0.0
            return float(math.prod(range(k - 1, 0, -2))) if k else 1.0
        rate = self.params[0]
        return math.factorial(k) / rate**k

    def truncated_moment(self, k: int, w: float) -> float:
        """Exact integral of x^k over (-inf, w] against nu."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if self.kind == "uniform01":
            c = min(max(w, 0.0), 1.0)
            return c ** (k + 1) / (k + 1)
        if self.kind == "standard-normal":
            phi = math.exp(-0.5 * w * w) / _SQRT2PI
            m0 = float(_scisp.ndtr(w))
            if k == 0:
                return m0
            m1 = -phi
            if k == 1:
                return m1
            prev2, prev1 = m0, m1
            for j in range(2, k + 1):
                cur = -(w ** (j - 1)) * phi + (j - 1) * prev2
                prev2, prev1 = prev1, cur
            return prev1
        rate = self.params[0]
        if w <= 0:
            return 0.0
        return (math.factorial(k) / rate**k) * float(_scisp.gammainc(k + 1, rate * w))

    def expect(self, f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-10) -> float:
        """Quadrature fallback E[f(X)]; flagged by being this method at all."""
        lo, hi = self.support
        val, _ = _sciint.quad(lambda x: float(f(np.asarray([x]))[0]) * float(self.pdf(x)),
                              lo, hi, epsabs=tol, epsrel=tol, limit=200)
        return val

    def sample(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        if self.kind == "uniform01":
            return rng.random(n)
        if self.kind == "standard-normal":
            return rng.standard_normal(n)
        return rng.exponential(1.0 / self.params[0], n)


_MODEL_REGISTRY: dict[str, Callable[[], NuModel]] = {
    "uniform01": lambda: NuModel("uniform01"),
    "standard-normal": lambda: NuModel("standard-normal"),
}


def parse_model(name: str) -> NuModel:
    """Resolve a model identifier such as 'uniform01' or 'exponential(2.5)'."""
    name = name.strip()
    if name in _MODEL_REGISTRY:
        return _MODEL_REGISTRY[name]()
    if name.startswith("exponential(") and name.endswith(")"):
        rate = float(name[len("exponential("):-1])
        return NuModel("exponential", (rate,))
    raise ValueError(
        f"unknown model {name!r}; registered: uniform01, standard-normal, exponential(rate)"
    )


# ---------------------------------------------------------------------------
# Samples and the uniform discrete measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    """An ordered i.i.d. draw (X_1..X_n) paired with the time grid i/n."""

    n: int
    values: tuple[float, ...]
    seed: int
    model: str

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("n must be a positive integer")
        if len(self.values) != self.n:
            raise ValueError("len(values) != n")

    def xs(self) -> np.ndarray:
        cached = self.__dict__.get("_xs")
        if cached is None:
            cached = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "_xs", cached)
        return cached

    def grid(self) -> np.ndarray:
        cached = self.__dict__.get("_grid")
        if cached is None:
            cached = np.arange(1, self.n + 1, dtype=float) / self.n
            object.__setattr__(self, "_grid", cached)
        return cached


@dataclass(frozen=True)
class DiscreteUniform:
    """The uniform discrete measure on the grid {1/n, ..., n/n}."""

    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("n must be a positive integer")

    def atoms(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float) / self.n

    def mass(self) -> Fraction:
        return Fraction(1)

    def atom_mass(self) -> Fraction:
        return Fraction(1, self.n)


def draw_sample(model: Union[NuModel, str], n: int, seed: int) -> Sample:
    """Deterministic sample of size n from the model under the given seed."""
    if isinstance(model, str):
        model = parse_model(model)
    if n <= 0:
        raise ValueError("n must be a positive integer")
    values = model.sample(n, seed)
    return Sample(n=n, values=tuple(float(v) for v in values), seed=seed, model=model.name)


def grid_points(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) / n


def sample_to_csv(sample: Sample, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "grid_s", "x"])
        for i, x in enumerate(sample.values, start=1):
            writer.writerow([i, repr(i / sample.n), repr(x)])


def sample_from_csv(path, seed: int = -1, model: str = "unknown") -> Sample:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "grid_s", "x"]:
            raise ValueError(f"bad sample CSV header: {header}")
        values = [float(row[2]) for row in reader]
    return Sample(n=len(values), values=tuple(values), seed=seed, model=model)


# ---------------------------------------------------------------------------
# Q functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QFunction:
    """A function q(s, x) on [0,1] x U with a dominating envelope in L2(nu).

    fn(s, xs) must accept a scalar s and a float array xs.  nu_mean, when
    provided, returns the exact conditional mean s -> nu(q)(s) vectorized over
    an array of s values; nu_sq likewise for nu(q^2)(s).  Without them the
    model quadrature fallback is used.  sup_bound is the uniform bound when q
    is bounded (None otherwise); s_breakpoints list discontinuity locations of
    s -> q(s, x) shared by the conditional means.
    """

    fn: Callable[[float, np.ndarray], np.ndarray]
    dominating_g: Callable[[np.ndarray], np.ndarray]
    continuous_in_s: bool = True
    label: str = "q"
    nu_mean: Optional[Callable[[NuModel, np.ndarray], np.ndarray]] = None
    nu_sq: Optional[Callable[[NuModel, np.ndarray], np.ndarray]] = None
    sup_bound: Optional[float] = None
    s_breakpoints: tuple[float, ...] = ()
    # optional structure hooks (set by the builders in fclt):
    pair_values: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    h_member: Optional[object] = None
    g_member: Optional[object] = None
    tilde_tail: Optional[Callable[[NuModel, float, float], float]] = None

    def __call__(self, s: float, xs) -> np.ndarray:
        return self.fn(s, np.asarray(xs, dtype=float))

    def conditional_mean(self, model: NuModel, svals) -> np.ndarray:
        svals = np.atleast_1d(np.asarray(svals, dtype=float))
        if self.nu_mean is not None:
            return np.asarray(self.nu_mean(model, svals), dtype=float)
        return np.array([model.expect(lambda x, s=s: self.fn(s, x)) for s in svals])

    def conditional_sq_mean(self, model: NuModel, svals) -> np.ndarray:
        svals = np.atleast_1d(np.asarray(svals, dtype=float))
        if self.nu_sq is not None:
            return np.asarray(self.nu_sq(model, svals), dtype=float)
        return np.array([model.expect(lambda x, s=s: self.fn(s, x) ** 2) for s in svals])

    def product_mean_lambda_n(self, model: NuModel, n: int) -> float:
        """(lambda_n (x) nu)(q), the exact centering of the s.e.m.p."""
        means = self.conditional_mean(model, grid_points(n))
        return float(np.mean(means))

    def product_mean_lambda(self, model: NuModel, tol: float = DEFAULT_TOL) -> float:
        """(lambda (x) nu)(q) by quadrature over s of the conditional mean."""
        return integrate(
            lambda s: float(self.conditional_mean(model, s)[0]),
            0.0, 1.0, tol=tol, breakpoints=self.s_breakpoints,
        )

    def product_sq_mean_lambda_n(self, model: NuModel, n: int) -> float:
        return float(np.mean(self.conditional_sq_mean(model, grid_points(n))))

    def product_sq_mean_lambda(self, model: NuModel, tol: float = DEFAULT_TOL) -> float:
        return integrate(
            lambda s: float(self.conditional_sq_mean(model, s)[0]),
            0.0, 1.0, tol=tol, breakpoints=self.s_breakpoints,
        )


# ---------------------------------------------------------------------------
# The measures as operations
# ---------------------------------------------------------------------------

def _ordered_sum(terms: Iterable[float], compensated: bool = False) -> float:
    """Left-to-right accumulation; optional Kahan compensation."""
    if not compensated:
        acc = 0.0
        for t in terms:
            acc += t
        return acc
    acc = 0.0
    carry = 0.0
    for t in terms:
        y = t - carry
        s = acc + y
        carry = (s - acc) - y
        acc = s
    return acc


def eval_lambda_n(h: Callable[[float], float], n: int, compensated: bool = False) -> float:
    """Exact (1/n) sum h(i/n), summed left to right."""
    if n <= 0:
        raise ValueError("n must be a positive integer")
    return _ordered_sum((float(h(i / n)) for i in range(1, n + 1)), compensated) / n


def eval_lambda(
    h: Callable[[float], float],
    tol: float = DEFAULT_TOL,
    breakpoints: Optional[Sequence[float]] = None,
) -> float:
    """lambda(h) on [0,1] by adaptive quadrature (see quadrature module)."""
    return integrate(lambda x: float(h(x)), 0.0, 1.0, tol=tol, breakpoints=breakpoints)


def eval_semp(q: Union[QFunction, Callable[[float, float], float]], sample: Sample,
              compensated: bool = False) -> float:
    """P_n(q) = (1/n) sum q(i/n, X_i), the sequential empirical measure."""
    n = sample.n
    if isinstance(q, QFunction):
        terms = (float(q.fn(i / n, np.asarray([x]))[0]) for i, x in
                 zip(range(1, n + 1), sample.values))
    else:
        terms = (float(q(i / n, x)) for i, x in zip(range(1, n + 1), sample.values))
    return _ordered_sum(terms, compensated) / n


def semp_value_vec(q: QFunction, sample: Sample) -> float:
    """Vectorized P_n(q); same value as eval_semp up to summation rounding."""
    s = sample.grid()
    xs = sample.xs()
    vals = np.array([q.fn(float(si), xs[i:i + 1])[0] for i, si in enumerate(s)])
    return float(vals.mean())


def k_n_B(B: IntervalUnion, n: int) -> int:
    """card(B n {1/n, ..., 1}), exactly."""
    return B.grid_count(n)


def mean_with_method(model: NuModel, g) -> tuple[float, str]:
    """nu(g) together with how it was obtained: registered members carry
    closed forms, anything else falls back to (flagged) quadrature."""
    if hasattr(g, "mean"):
        return float(g.mean(model)), "closed-form"
    return float(model.expect(lambda xs: np.asarray(g(xs), dtype=float))), "quadrature"


def second_moment_with_method(model: NuModel, g) -> tuple[float, str]:
    """nu(g^2) with the same exactness flag."""
    if hasattr(g, "second_moment"):
        return float(g.second_moment(model)), "closed-form"
    return (
        float(model.expect(lambda xs: np.asarray(g(xs), dtype=float) ** 2)),
        "quadrature",
    )


@dataclass(frozen=True)
class BEmpiricalValue:
    value: float
    k: int
    empty_intersection: bool


def eval_b_empirical(
    B: IntervalUnion,
    W_or_g: Union[IntervalUnion, Callable[[np.ndarray], np.ndarray]],
    sample: Sample,
) -> BEmpiricalValue:
    """nu_{n,B}(g): average of g(X_i) over grid indices with i/n in B.

    Returns 0 with the empty-intersection flag set when B misses the grid,
    matching the defining convention of the B-empirical measure.
    """
    idx = B.grid_indices(sample.n)
    if not idx:
        return BEmpiricalValue(0.0, 0, True)
    xs = sample.xs()[np.asarray(idx) - 1]
    if isinstance(W_or_g, IntervalUnion):
        vals = W_or_g.indicator(xs)
    else:
        vals = np.asarray(W_or_g(xs), dtype=float)
    return BEmpiricalValue(float(vals.mean()), len(idx), False)
