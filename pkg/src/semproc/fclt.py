"""The standardized process Z_n, its Gaussian limit, and the verification
machinery for the functional-CLT side: covariance kernels (generic quadrature
form and factorized product form), a finite-dimensional Gaussian sampler,
Lindeberg and quadrature-limit checks, a fidi convergence test, and the
equicontinuity-modulus proxy.

Weak convergence in the sup-norm sense is not desk-verifiable; what this
module verifies are its two operational pillars.  Fidi convergence is tested
statistically (empirical covariance and KS distances against the analytic
limit, including random linear combinations for the Cramer-Wold reduction).
Tightness is proxied by the direct process-difference modulus over finite
member pools: sup of |Z_n(f1) - Z_n(f2)| over pairs within alpha in the
composite metric, tracked as alpha shrinks.  Both statements and their
thresholds are reported raw so the calibration can be revisited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special as _scisp
from scipy import stats as _scistats

from .covering import pairwise_distances
from .function_classes import (
    BoundedPolynomial,
    HalfLine,
    HolderClass,
    HolderMember,
    IndicatorFamily,
    IndicatorMember,
    InitialInterval,
    ProductClass,
)
from .measures import NuModel, QFunction, Sample, grid_points, parse_model
from .piecewise import diff_sq_integral, prod_integral
from .quadrature import integrate
from .seeds import derive_seed

__all__ = [
    "make_product_q",
    "make_sx_q",
    "make_constant_q",
    "kiefer_cell",
    "center_q",
    "ZProcessEval",
    "eval_Zn",
    "CovKernel",
    "cov_kernel",
    "cov_matrix",
    "quadrature_limit_check",
    "lindeberg_check",
    "NotPSDError",
    "gaussian_fidi_sample",
    "FidiTestReport",
    "fidi_convergence_test",
    "ModulusReport",
    "equicontinuity_modulus",
    "fluctuation_bound_check",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Q builders
# ---------------------------------------------------------------------------

def _h_envelope(h) -> float:
    if isinstance(h, IndicatorMember):
        return 1.0
    if isinstance(h, HolderMember):
        return h.envelope_bound()
    raise TypeError(type(h))


def _h_breakpoints(h) -> tuple[float, ...]:
    if isinstance(h, IndicatorMember):
        return (h.t,)
    return ()


def make_product_q(h, g) -> QFunction:
    """q(s, x) = h(s) g(x) with exact conditional-moment hooks."""
    h_env = _h_envelope(h)
    g_env = 1.0 if isinstance(g, (HalfLine, InitialInterval)) else None

    def fn(s, xs):
        return float(np.asarray(h(np.asarray([s]))).ravel()[0]) * np.asarray(g(xs), dtype=float)

    def pair_values(svals, xvals):
        return np.asarray(h(svals), dtype=float) * np.asarray(g(xvals), dtype=float)

    def nu_mean(model, svals):
        return np.asarray(h(svals), dtype=float) * g.mean(model)

    def nu_sq(model, svals):
        return np.asarray(h(svals), dtype=float) ** 2 * g.second_moment(model)

    tilde_tail = None
    if g_env is not None:
        def tilde_tail(model, s, T):
            # centered product with a two-valued g: exact truncated 2nd
            # moment, vectorized over the time grid
            m = g.mean(model)
            hs = np.asarray(h(np.atleast_1d(np.asarray(s, dtype=float))), dtype=float)
            v_in = hs * (1.0 - m)    # value on {g = 1}, probability m
            v_out = -hs * m          # value on {g = 0}, probability 1 - m
            out = np.where(np.abs(v_in) >= T, v_in**2 * m, 0.0)
            out += np.where(np.abs(v_out) >= T, v_out**2 * (1.0 - m), 0.0)
            return out

    if g_env is not None:
        def dominating(xs):
            return h_env * g_env * np.ones_like(np.asarray(xs, dtype=float))
        sup_bound = h_env * g_env
    else:
        def dominating(xs):
            return h_env * np.abs(np.asarray(g(xs), dtype=float))
        sup_bound = None

    return QFunction(
        fn=fn,
        dominating_g=dominating,
        continuous_in_s=not isinstance(h, IndicatorMember),
        label=f"product[{type(h).__name__}*{type(g).__name__}]",
        nu_mean=nu_mean,
        nu_sq=nu_sq,
        sup_bound=sup_bound,
        s_breakpoints=_h_breakpoints(h),
        pair_values=pair_values,
        h_member=h,
        g_member=g,
        tilde_tail=tilde_tail,
    )


def kiefer_cell(s0: float, x0: float) -> QFunction:
    """q = 1_(0, s0](s) * 1_(-inf, x0](x); under uniform nu the limit process
    restricted to these cells is the classical Kiefer process."""
    return make_product_q(IndicatorMember(s0), HalfLine(x0))


def make_sx_q() -> QFunction:
    """q(s, x) = s * x."""

    def fn(s, xs):
        return s * np.asarray(xs, dtype=float)

    def pair_values(svals, xvals):
        return np.asarray(svals, dtype=float) * np.asarray(xvals, dtype=float)

    def nu_mean(model, svals):
        return np.asarray(svals, dtype=float) * model.moment(1)

    def nu_sq(model, svals):
        return np.asarray(svals, dtype=float) ** 2 * model.moment(2)

    def tilde_tail(model, s, T):
        svals = np.atleast_1d(np.asarray(s, dtype=float))
        mu = model.moment(1)
        if model.kind == "standard-normal":
            # integral of (s x)^2 over {|s x| >= T}: closed normal tail form
            with np.errstate(divide="ignore"):
                t = np.where(svals > 0, T / np.maximum(np.abs(svals), 1e-300), np.inf)
            phi = np.exp(-0.5 * np.minimum(t, 38.0) ** 2) / _SQRT2PI
            phi = np.where(t > 38.0, 0.0, phi)
            upper = t * phi + _scisp.ndtr(-t)
            return svals**2 * 2.0 * np.where(np.isfinite(upper), upper, 0.0)
        out = np.empty(svals.shape)
        for i, sv in enumerate(svals):
            def integrand(xs, sv=sv):
                v = sv * (np.asarray(xs, dtype=float) - mu)
                return np.where(np.abs(v) >= T, v * v, 0.0)
            out[i] = model.expect(integrand, tol=1e-11)
        return out

    return QFunction(
        fn=fn,
        dominating_g=lambda xs: np.abs(np.asarray(xs, dtype=float)),
        continuous_in_s=True,
        label="s*x",
        nu_mean=nu_mean,
        nu_sq=nu_sq,
        pair_values=pair_values,
        tilde_tail=tilde_tail,
    )


def make_constant_q(c: float) -> QFunction:
    """q identically c, realized as the product 1_(0,1] * c so every product
    hook (kernel factorization included) is available."""
    q = make_product_q(IndicatorMember(1.0), BoundedPolynomial((c,)))
    return QFunction(
        fn=q.fn,
        dominating_g=lambda xs: np.full_like(np.asarray(xs, dtype=float), abs(c)),
        label=f"const[{c}]",
        nu_mean=q.nu_mean,
        nu_sq=q.nu_sq,
        sup_bound=abs(c),
        pair_values=q.pair_values,
        h_member=q.h_member,
        g_member=q.g_member,
        tilde_tail=lambda model, s, T: np.zeros_like(
            np.atleast_1d(np.asarray(s, dtype=float))
        ),
    )


def _generic_tilde_tail(q: QFunction, model: NuModel, s, T: float):
    """Quadrature fallback for the truncated second moment of the centered q,
    vectorized over the time grid by an outer loop."""
    svals = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(svals.shape)
    for i, sv in enumerate(svals):
        mean_s = float(q.conditional_mean(model, np.asarray([sv]))[0])

        def integrand(xs, sv=sv, mean_s=mean_s):
            v = q.fn(sv, xs) - mean_s
            return np.where(np.abs(v) >= T, v * v, 0.0)

        out[i] = model.expect(integrand, tol=1e-11)
    return out


def center_q(q: QFunction, model: NuModel) -> QFunction:
    """q_tilde(s, x) = q(s, x) - nu(q)(s); stays in the admissible class with
    the dominating function enlarged by the conditional-mean bound."""
    try:
        probe = q.conditional_mean(model, np.asarray([0.5]))
    except Exception as exc:  # pragma: no cover - defensive
        raise ValueError(f"q is not integrable under {model.name}: {exc}") from exc
    if not np.all(np.isfinite(probe)):
        raise ValueError(f"q is not integrable under {model.name}")

    sgrid = np.linspace(0.0, 1.0, 2001)
    mean_bound = float(np.max(np.abs(q.conditional_mean(model, sgrid)))) + 1e-9

    def fn(s, xs):
        return q.fn(s, xs) - float(q.conditional_mean(model, np.asarray([s]))[0])

    def nu_mean(_model, svals):
        return np.zeros_like(np.asarray(svals, dtype=float))

    def nu_sq(_model, svals):
        base = q.conditional_sq_mean(_model, svals)
        means = q.conditional_mean(_model, svals)
        return base - means**2

    pair_values = None
    if q.pair_values is not None:
        def pair_values(svals, xvals):
            return q.pair_values(svals, xvals) - q.conditional_mean(
                model, np.asarray(svals, dtype=float)
            )

    return QFunction(
        fn=fn,
        dominating_g=lambda xs: np.asarray(q.dominating_g(xs), dtype=float) + mean_bound,
        continuous_in_s=q.continuous_in_s,
        label=f"centered[{q.label}]",
        nu_mean=nu_mean,
        nu_sq=nu_sq,
        sup_bound=None if q.sup_bound is None else q.sup_bound + mean_bound,
        s_breakpoints=q.s_breakpoints,
        pair_values=pair_values,
        tilde_tail=q.tilde_tail,
    )


# ---------------------------------------------------------------------------
# Z_n evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZProcessEval:
    n: int
    values: tuple[float, ...]
    labels: tuple[str, ...]


def eval_Zn(q_list: Sequence[QFunction], sample: Sample,
            model: Optional[NuModel] = None) -> ZProcessEval:
    """Z_n(q) = sqrt(n) (P_n(q) - (lambda_n x nu)(q)) for each q."""
    if model is None:
        model = parse_model(sample.model)
    n = sample.n
    svals = sample.grid()
    xs = sample.xs()
    out = []
    for q in q_list:
        if q.pair_values is not None:
            pn = float(np.mean(q.pair_values(svals, xs)))
        else:
            pn = float(np.mean([q.fn(float(s), xs[i:i + 1])[0] for i, s in enumerate(svals)]))
        center = q.product_mean_lambda_n(model, n)
        out.append(math.sqrt(n) * (pn - center))
    return ZProcessEval(n=n, values=tuple(out), labels=tuple(q.label for q in q_list))


# ---------------------------------------------------------------------------
# Covariance kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovKernel:
    mode: str = "product"  # or "generic"
    tol: float = 1e-10


class NotPSDError(RuntimeError):
    pass


def _lambda_h_product(h1, h2, tol: float) -> float:
    """lambda(h1 h2), exact where the representations allow."""
    if isinstance(h1, IndicatorMember) and isinstance(h2, IndicatorMember):
        return min(h1.t, h2.t)
    if isinstance(h1, HolderMember) and isinstance(h2, HolderMember) \
            and h1.pl is not None and h2.pl is not None:
        return prod_integral(h1.pl, h2.pl)
    breakpoints = tuple(set(_h_breakpoints(h1) + _h_breakpoints(h2)))
    return integrate(
        lambda s: float(np.asarray(h1(np.asarray([s]))).ravel()[0])
        * float(np.asarray(h2(np.asarray([s]))).ravel()[0]),
        0.0, 1.0, tol=tol, breakpoints=breakpoints,
    )


def cov_kernel(q1: QFunction, q2: QFunction, model: NuModel,
               kernel: CovKernel = CovKernel()) -> float:
    """Cov(Z(q1), Z(q2)): the integral over s of
    nu(q1 q2)(s) - nu(q1)(s) nu(q2)(s), factorizing for products as
    lambda(h1 h2) [nu(g1 g2) - nu(g1) nu(g2)]."""
    if kernel.mode == "product":
        if q1.h_member is None or q2.h_member is None:
            raise ValueError("product mode requires product-form q functions")
        g1, g2 = q1.g_member, q2.g_member
        lam = _lambda_h_product(q1.h_member, q2.h_member, kernel.tol)
        return lam * (g1.pair_mean(g2, model) - g1.mean(model) * g2.mean(model))
    if kernel.mode != "generic":
        raise ValueError(f"unknown kernel mode {kernel.mode!r}")

    def integrand(s):
        if q1.h_member is not None and q2.h_member is not None:
            h1v = float(np.asarray(q1.h_member(np.asarray([s]))).ravel()[0])
            h2v = float(np.asarray(q2.h_member(np.asarray([s]))).ravel()[0])
            cross = h1v * h2v * q1.g_member.pair_mean(q2.g_member, model)
        else:
            cross = model.expect(lambda xs: q1.fn(s, xs) * q2.fn(s, xs))
        m1 = float(q1.conditional_mean(model, np.asarray([s]))[0])
        m2 = float(q2.conditional_mean(model, np.asarray([s]))[0])
        return cross - m1 * m2

    breakpoints = tuple(set(q1.s_breakpoints + q2.s_breakpoints))
    return integrate(integrand, 0.0, 1.0, tol=kernel.tol, breakpoints=breakpoints)


def cov_matrix(q_list: Sequence[QFunction], model: NuModel,
               kernel: CovKernel = CovKernel()) -> np.ndarray:
    k = len(q_list)
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            out[i, j] = out[j, i] = cov_kernel(q_list[i], q_list[j], model, kernel)
    return out


# ---------------------------------------------------------------------------
# Quadrature limit and Lindeberg checks
# ---------------------------------------------------------------------------

def quadrature_limit_check(q: QFunction, model: NuModel, n_list: Sequence[int],
                           tol: float = 1e-9) -> list[dict]:
    """Gap |(lambda_n x nu)(q^2) - (lambda x nu)(q^2)| along n_list."""
    limit = q.product_sq_mean_lambda(model, tol=tol)
    rows = []
    for n in n_list:
        val = q.product_sq_mean_lambda_n(model, n)
        rows.append({"n": n, "value": val, "limit": limit, "gap": abs(val - limit)})
    return rows


def lindeberg_check(
    q: QFunction,
    model: NuModel,
    n_list: Sequence[int],
    epsilon_list: Sequence[float],
    degenerate_tol: float = 1e-12,
) -> dict:
    """The triangular-array negligibility ratio

        r(n, eps) = [ sum_i tail_i ] / (n V_n),
        tail_i = integral of q_tilde^2(i/n, x) over {|q_tilde(i/n, x)| >= T},
        T = eps sqrt(n V_n),   V_n = (lambda_n x nu)(q_tilde^2),

    evaluated by closed form or quadrature (no sampling).  When the limiting
    variance (lambda x nu)(q_tilde^2) vanishes the degenerate branch is
    reported instead (the limit is the point mass at zero)."""
    qc = center_q(q, model)
    limit_var = qc.product_sq_mean_lambda(model, tol=1e-11)
    if limit_var < degenerate_tol:
        return {"degenerate": True, "limit_variance": limit_var, "rows": []}

    tail_fn = q.tilde_tail or (lambda m, s, T: _generic_tilde_tail(q, m, s, T))
    rows = []
    for n in n_list:
        svals = grid_points(n)
        vn = float(np.mean(qc.conditional_sq_mean(model, svals)))
        T = None
        for eps in epsilon_list:
            T = eps * math.sqrt(n * vn)
            if qc.sup_bound is not None and T > qc.sup_bound:
                ratio = 0.0  # truncation set empty beyond the bound
            else:
                tails = np.asarray(tail_fn(model, svals, T), dtype=float)
                ratio = float(np.sum(tails)) / (n * vn)
            rows.append({"n": n, "epsilon": eps, "threshold": T, "ratio": ratio,
                         "variance_n": vn})
    return {"degenerate": False, "limit_variance": limit_var, "rows": rows}


# ---------------------------------------------------------------------------
# Gaussian sampling and the fidi test
# ---------------------------------------------------------------------------

def gaussian_fidi_sample(cov: np.ndarray, count: int, seed: int,
                         clamp_rel: float = 1e-10) -> np.ndarray:
    """Centered multivariate normal draws via symmetric eigendecomposition.
    Eigenvalues in [-clamp_rel * trace, 0) are clamped to zero; anything more
    negative signals an inconsistent kernel and raises NotPSDError."""
    cov = np.asarray(cov, dtype=float)
    if not np.allclose(cov, cov.T, atol=1e-12):
        raise NotPSDError("covariance matrix is not symmetric")
    vals, vecs = np.linalg.eigh(cov)
    tr = max(float(np.trace(cov)), 1e-300)
    if np.any(vals < -clamp_rel * tr):
        raise NotPSDError(
            f"eigenvalue {vals.min():.3e} below -{clamp_rel:.0e} * trace; "
            "quadrature tolerance too loose"
        )
    vals = np.clip(vals, 0.0, None)
    root = vecs * np.sqrt(vals)[None, :]
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, cov.shape[0]))
    return z @ root.T


@dataclass
class FidiTestReport:
    n: int
    replicates: int
    analytic_cov: np.ndarray
    empirical_cov: np.ndarray
    max_cov_error: float
    marginal_ks: list
    combo_ks: list
    cov_tolerance: float
    ks_tolerance: float

    @property
    def passed(self) -> bool:
        ks_all = [r["ks"] for r in self.marginal_ks + self.combo_ks if not r["degenerate"]]
        return self.max_cov_error <= self.cov_tolerance and all(
            k <= self.ks_tolerance for k in ks_all
        )


def replicate_Z_values(q_list: Sequence[QFunction], n: int, R: int, seed: int,
                       model: NuModel) -> np.ndarray:
    """(R, K) matrix of Z_n(q) over R independent replicate samples.

    Bulk path: one (R, n) draw matrix from a single derived-seed generator;
    product-form q columns are evaluated by matrix products.
    """
    rng = np.random.default_rng(derive_seed(seed, ["replicate-Z", n, R]))
    if model.kind == "uniform01":
        draws = rng.random((R, n))
    elif model.kind == "standard-normal":
        draws = rng.standard_normal((R, n))
    else:
        draws = rng.exponential(1.0 / model.params[0], (R, n))
    svals = grid_points(n)
    cols = []
    for q in q_list:
        center = q.product_mean_lambda_n(model, n)
        if q.h_member is not None:
            hv = np.asarray(q.h_member(svals), dtype=float)
            gv = np.asarray(q.g_member(draws), dtype=float)
            pn = gv @ hv / n
        elif q.pair_values is not None:
            pn = np.array([np.mean(q.pair_values(svals, draws[r])) for r in range(R)])
        else:
            raise ValueError("replicate runner needs product or pair-value structure")
        cols.append(math.sqrt(n) * (pn - center))
    return np.stack(cols, axis=1)


def fidi_convergence_test(
    q_list: Sequence[QFunction],
    n: int,
    R: int,
    seed: int,
    model: NuModel,
    cov_tolerance: float = 0.05,
    ks_tolerance: float = 0.03,
    n_combos: int = 5,
    kernel: CovKernel = CovKernel(),
) -> FidiTestReport:
    """Statistical check of finite-dimensional convergence: empirical
    covariance against the analytic kernel, marginal KS distances against the
    analytic normals, and KS for random linear combinations (the Cramer-Wold
    reduction exercised directly)."""
    analytic = cov_matrix(q_list, model, kernel)
    Z = replicate_Z_values(q_list, n, R, seed, model)
    empirical = np.cov(Z.T, ddof=1) if len(q_list) > 1 else np.array(
        [[float(np.var(Z[:, 0], ddof=1))]]
    )
    max_err = float(np.max(np.abs(empirical - analytic)))

    def ks_row(values: np.ndarray, var: float, label: str) -> dict:
        if var <= 1e-15:
            degenerate = bool(np.max(np.abs(values)) <= 1e-9)
            return {"label": label, "ks": 0.0 if degenerate else math.inf,
                    "variance": var, "degenerate": True}
        sd = math.sqrt(var)
        stat = float(_scistats.kstest(values, lambda x: _scistats.norm.cdf(x, 0.0, sd)).statistic)
        return {"label": label, "ks": stat, "variance": var, "degenerate": False}

    marginal = [ks_row(Z[:, k], float(analytic[k, k]), f"marginal[{k}]")
                for k in range(len(q_list))]
    rng = np.random.default_rng(derive_seed(seed, ["cramer-wold"]))
    combos = []
    for c in range(n_combos):
        a = rng.standard_normal(len(q_list))
        a /= float(np.linalg.norm(a))
        var = float(a @ analytic @ a)
        combos.append(ks_row(Z @ a, var, f"combo[{c}]"))

    return FidiTestReport(
        n=n, replicates=R,
        analytic_cov=analytic, empirical_cov=empirical,
        max_cov_error=max_err,
        marginal_ks=marginal, combo_ks=combos,
        cov_tolerance=cov_tolerance, ks_tolerance=ks_tolerance,
    )


# ---------------------------------------------------------------------------
# Equicontinuity modulus and the fluctuation bound
# ---------------------------------------------------------------------------

def _h_pool(h_class, net_u: float, cap: int, seed: int):
    """Member pool for modulus experiments: the u-net when it fits, otherwise
    a deterministic subsample that keeps both spread (farthest-first sweep)
    and near pairs (each kept member's nearest net neighbor)."""
    if isinstance(h_class, IndicatorFamily):
        net = h_class.build_net(net_u, "d2_lambda", max_members=10**6)
        dist = np.abs(
            np.sqrt(np.abs(np.subtract.outer([m.t for m in net], [m.t for m in net])))
        )
    elif isinstance(h_class, HolderClass):
        net = h_class.build_net(net_u, max_members=500_000)
        dist = None
    else:
        raise TypeError(type(h_class))
    if len(net) <= cap:
        return net
    if dist is None:
        from .covering import PseudoMetricId, eval_pseudometric

        rng = np.random.default_rng(derive_seed(seed, ["h-pool"]))
        pre_idx = sorted(rng.choice(len(net), size=min(len(net), 4 * cap), replace=False))
        pre = [net[i] for i in pre_idx]
        metric = PseudoMetricId("d2_lambda")
        dist = pairwise_distances(pre, metric)
        net = pre
    chosen = [0]
    mind = dist[0].copy()
    while len(chosen) < cap // 2:
        far = int(np.argmax(mind))
        if mind[far] <= 0:
            break
        chosen.append(far)
        mind = np.minimum(mind, dist[far])
    pool_idx = set(chosen)
    for i in list(chosen):
        d = dist[i].copy()
        d[i] = np.inf
        for k in pool_idx:
            if k != i:
                d[k] = np.inf
        pool_idx.add(int(np.argmin(d)))
        if len(pool_idx) >= cap:
            break
    return [net[i] for i in sorted(pool_idx)]


def _h_distance_matrix(pool) -> np.ndarray:
    from .covering import PseudoMetricId

    return pairwise_distances(pool, PseudoMetricId("d2_lambda"))


@dataclass
class ModulusReport:
    n: int
    replicates: int
    net_u: float
    rows: list = field(default_factory=list)
    h_pool: int = 0
    g_pool: int = 0


def equicontinuity_modulus(
    product_class: ProductClass,
    n: int,
    alpha_list: Sequence[float],
    net_u: float,
    R: int,
    seed: int,
    model: NuModel,
    h_cap: int = 60,
    g_cap: int = 24,
) -> ModulusReport:
    """Mean over replicates of sup over member pairs within alpha (composite
    metric d = d2_lambda + d2_nu) of |Z_n(f1) - Z_n(f2)|, per alpha.  The
    pair pool is the u-net (deterministically thinned to the caps); a subset
    of the class, so the observed modulus is a lower proxy of the class
    modulus, which is the verifiable direction of the tightness statement."""
    h_pool = _h_pool(product_class.h_class, net_u, h_cap, seed)
    g_net = product_class.g_class.build_net(net_u, model, "d2_nu", max_members=10**6)
    if len(g_net) > g_cap:
        idx = np.linspace(0, len(g_net) - 1, g_cap).round().astype(int)
        g_net = [g_net[i] for i in sorted(set(idx.tolist()))]

    d_h = _h_distance_matrix(h_pool)
    means = np.array([g.mean(model) for g in g_net])
    seconds = np.array([g.second_moment(model) for g in g_net])
    cross = np.array([[g1.pair_mean(g2, model) for g2 in g_net] for g1 in g_net])
    d_g = np.sqrt(np.maximum(seconds[:, None] - 2 * cross + seconds[None, :], 0.0))

    kh, kg = len(h_pool), len(g_net)
    svals = grid_points(n)
    h_vals = np.stack([np.asarray(h(svals), dtype=float) for h in h_pool])
    h_center = h_vals.mean(axis=1)

    alpha_max = max(alpha_list)
    pairs_p, pairs_q, pair_d = [], [], []
    for a1 in range(kh):
        for b1 in range(kg):
            p = a1 * kg + b1
            for a2 in range(a1, kh):
                b2_start = b1 + 1 if a2 == a1 else 0
                for b2 in range(b2_start, kg):
                    d = d_h[a1, a2] + d_g[b1, b2]
                    if d <= alpha_max:
                        pairs_p.append(p)
                        pairs_q.append(a2 * kg + b2)
                        pair_d.append(d)
    pairs_p = np.asarray(pairs_p, dtype=np.int64)
    pairs_q = np.asarray(pairs_q, dtype=np.int64)
    pair_d = np.asarray(pair_d)

    rng = np.random.default_rng(derive_seed(seed, ["modulus", n, R]))
    if model.kind == "uniform01":
        draws = rng.random((R, n))
    elif model.kind == "standard-normal":
        draws = rng.standard_normal((R, n))
    else:
        draws = rng.exponential(1.0 / model.params[0], (R, n))

    Z = np.empty((R, kh * kg))
    for b, g in enumerate(g_net):
        gv = np.asarray(g(draws), dtype=float)      # (R, n)
        pn = gv @ h_vals.T / n                      # (R, kh)
        Z[:, b::kg] = math.sqrt(n) * (pn - h_center[None, :] * means[b])

    report = ModulusReport(n=n, replicates=R, net_u=net_u, h_pool=kh, g_pool=kg)
    for alpha in alpha_list:
        mask = pair_d <= alpha
        if not np.any(mask):
            report.rows.append({"alpha": alpha, "mean_modulus": 0.0, "pairs": 0})
            continue
        p_idx, q_idx = pairs_p[mask], pairs_q[mask]
        per_rep = np.zeros(R)
        chunk = 200_000
        for lo in range(0, len(p_idx), chunk):
            sel_p = p_idx[lo:lo + chunk]
            sel_q = q_idx[lo:lo + chunk]
            diff = np.abs(Z[:, sel_p] - Z[:, sel_q])
            per_rep = np.maximum(per_rep, diff.max(axis=1))
        report.rows.append(
            {"alpha": alpha, "mean_modulus": float(per_rep.mean()),
             "pairs": int(mask.sum())}
        )
    return report


def fluctuation_bound_check(
    product_class: ProductClass,
    n_list: Sequence[int],
    alpha_list: Sequence[float],
    net_u: float,
    model: NuModel,
    h_cap: int = 40,
    g_cap: int = 16,
    seed: int = 0,
) -> list[dict]:
    """Deterministic check of the fluctuation bound: for pairs within alpha in
    the composite metric, the (lambda_n x nu) L2 distance is at most

        H_env * d2_nu(g1, g2) + sqrt(nu(G^2)) * (d2_lambda(h1, h2)
                       + sqrt(|lambda_n((h1-h2)^2) - lambda((h1-h2)^2)|)),

    and the sup over alpha-pairs shrinks with alpha."""
    h_pool = _h_pool(product_class.h_class, net_u, h_cap, seed)
    g_net = product_class.g_class.build_net(net_u, model, "d2_nu", max_members=10**6)
    if len(g_net) > g_cap:
        idx = np.linspace(0, len(g_net) - 1, g_cap).round().astype(int)
        g_net = [g_net[i] for i in sorted(set(idx.tolist()))]
    h_env = product_class.h_envelope
    nu_g2 = product_class.g_class.envelope_sq_mean(model)

    d_h = _h_distance_matrix(h_pool)
    seconds = np.array([g.second_moment(model) for g in g_net])
    cross = np.array([[g1.pair_mean(g2, model) for g2 in g_net] for g1 in g_net])
    d_g = np.sqrt(np.maximum(seconds[:, None] - 2 * cross + seconds[None, :], 0.0))

    kh, kg = len(h_pool), len(g_net)
    rows = []
    for n in n_list:
        svals = grid_points(n)
        hv = np.stack([np.asarray(h(svals), dtype=float) for h in h_pool])
        gram_n = hv @ hv.T / n                       # lambda_n(h_a h_b)
        lam_pair = np.zeros((kh, kh))
        for a in range(kh):
            for b in range(a, kh):
                lam_pair[a, b] = lam_pair[b, a] = _lambda_sq_gap(h_pool[a], h_pool[b], n,
                                                                 gram_n[a, a], gram_n[a, b],
                                                                 gram_n[b, b])
        for alpha in alpha_list:
            observed = 0.0
            bound_max = 0.0
            violations = 0
            pairs = 0
            for a1 in range(kh):
                for b1 in range(kg):
                    for a2 in range(a1, kh):
                        for b2 in range(kg):
                            if a2 == a1 and b2 <= b1:
                                continue
                            if d_h[a1, a2] + d_g[b1, b2] > alpha:
                                continue
                            pairs += 1
                            sq = (
                                gram_n[a1, a1] * seconds[b1]
                                - 2.0 * gram_n[a1, a2] * cross[b1, b2]
                                + gram_n[a2, a2] * seconds[b2]
                            )
                            obs = math.sqrt(max(sq, 0.0))
                            bound = h_env * d_g[b1, b2] + math.sqrt(nu_g2) * (
                                d_h[a1, a2] + math.sqrt(lam_pair[a1, a2])
                            )
                            observed = max(observed, obs)
                            bound_max = max(bound_max, bound)
                            if obs > bound + 1e-9:
                                violations += 1
            rows.append({"n": n, "alpha": alpha, "observed": observed,
                         "bound": bound_max, "pairs": pairs,
                         "violations": violations})
    return rows


def _lambda_sq_gap(h1, h2, n: int, gnn_11: float, gnn_12: float, gnn_22: float) -> float:
    """|lambda_n((h1-h2)^2) - lambda((h1-h2)^2)| with the lambda_n part from
    precomputed grid grams; exact lambda part per representation."""
    ln = gnn_11 - 2.0 * gnn_12 + gnn_22
    if isinstance(h1, IndicatorMember) and isinstance(h2, IndicatorMember):
        lam = abs(h1.t - h2.t)
    elif isinstance(h1, HolderMember) and isinstance(h2, HolderMember) \
            and h1.pl is not None and h2.pl is not None:
        lam = diff_sq_integral(h1.pl, h2.pl)
    else:
        lam = integrate(
            lambda s: (float(np.asarray(h1(np.asarray([s]))).ravel()[0])
                       - float(np.asarray(h2(np.asarray([s]))).ravel()[0])) ** 2,
            0.0, 1.0, tol=1e-10,
        )
    return abs(ln - lam)
