"""Experiment orchestration: config parsing, the experiment registry, report
serialization, plot-data emission and the `semproc` executable.

Reproducibility is the product: a report embeds the exact config and the root
seed, every random stream is derived from the root seed through
seeds.derive_seed, and rerunning a config yields byte-identical numeric
results (the volatile wall clock lives in the separate "meta" section).

Exit codes: 0 all assertions passed, 1 assertion failure, 2 usage/config
error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .covering import check_covering_lemmas, random_covering_boundedness
from .fclt import (
    cov_kernel,
    equicontinuity_modulus,
    fidi_convergence_test,
    gaussian_fidi_sample,
    kiefer_cell,
    lindeberg_check,
    make_sx_q,
)
from .function_classes import (
    BVectorClass,
    GClass,
    HolderClass,
    IndicatorFamily,
    ProductClass,
    b_infinity_witness,
    observed_riemann_gap,
    parse_class_descriptor,
    riemann_gap_bound,
)
from .measures import draw_sample, parse_model
from .seeds import derive_seed
from .ulln import (
    GCExperiment,
    gc_experiment,
    gc_tail_bound,
    series_I_closed_form,
    series_I_quadrature,
    series_S_diagnostic,
    sup_deviation_bruteforce,
    sup_deviation_exact_BW,
)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Config schemas
# ---------------------------------------------------------------------------

_SCHEMAS: dict[str, dict[str, tuple]] = {
    "ulln": {
        "class": (str, "bvector"),
        "j": (int, 0),
        "parity": (str, "odd"),
        "model": (str, "uniform01"),
        "n_schedule": (list, [100, 1000, 10000]),
        "replicates": (int, 200),
        "seed": (int, 1),
        "centering": (str, "lambda_n"),
        "net_u": (float, 0.0),
    },
    "fclt": {
        "q_set": (str, "kiefer-3"),
        "q_file": (str, ""),
        "n": (int, 2000),
        "replicates": (int, 5000),
        "seed": (int, 1),
        "model": (str, "uniform01"),
        "alpha_list": (list, [0.05, 0.1, 0.2, 0.4]),
        "net_u": (float, 0.3),
        "h_class": (dict, {"class": "holder", "T": 1.0, "C": 1.0, "beta": 1.0}),
        "modulus_replicates": (int, 100),
        "run_modulus": (bool, True),
        "run_lindeberg": (bool, True),
        "cov_tolerance": (float, 0.05),
        "ks_tolerance": (float, 0.03),
    },
    "covering": {
        "trials": (int, 1000),
        "seed": (int, 1),
        "tau": (float, 0.5),
        "n_list": (list, [10, 100, 1000]),
        "n_seeds": (int, 20),
        "model": (str, "uniform01"),
    },
    "bounds": {
        "members": (int, 1000),
        "seed": (int, 1),
        "n_list": (list, [10, 100, 1000]),
        "witness_max_n": (int, 20),
    },
    "kiefer": {
        "grid": (int, 3),
        "draws": (int, 100000),
        "seed": (int, 1),
        "tolerance": (float, 0.02),
    },
    "selftest": {
        "seed": (int, 1),
    },
}


def parse_config(experiment: str, raw: dict) -> dict:
    """Strict schema application: unknown keys rejected, types coerced only
    int -> float, values echoed back into the report."""
    if experiment not in _SCHEMAS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; registered: {sorted(_SCHEMAS)}"
        )
    schema = _SCHEMAS[experiment]
    out = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {experiment}.{key}")
        want = schema[key][0]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, want) or (want is not bool and isinstance(value, bool)):
            raise ConfigError(
                f"config key {experiment}.{key} must be {want.__name__}, got {value!r}"
            )
        out[key] = value
    for key, (_, default) in schema.items():
        if key not in out:
            out[key] = json.loads(json.dumps(default)) if isinstance(default, (list, dict)) else default
    return out


# ---------------------------------------------------------------------------
# Experiment implementations
# ---------------------------------------------------------------------------

def _ledger_entry(name: str, observed, bound, tolerance: str, ok: bool) -> dict:
    return {"name": name, "observed": observed, "bound": bound,
            "tolerance": tolerance, "ok": bool(ok)}


def _run_ulln(cfg: dict) -> dict:
    if cfg["class"] != "bvector":
        raise ConfigError(
            f"unknown sequential set class {cfg['class']!r}; registered: bvector"
        )
    exp = GCExperiment(
        j=cfg["j"], parity=cfg["parity"], model=cfg["model"],
        n_schedule=tuple(int(n) for n in cfg["n_schedule"]),
        replicates=cfg["replicates"], seed=cfg["seed"], centering=cfg["centering"],
    )
    report = gc_experiment(exp)
    ledger = []
    for row in report.rows:
        ledger.append(_ledger_entry(
            f"lambda-centering correction <= class gap bound (n={row['n']})",
            row["sup_lambda_gap"], row["lambda_gap_bound"],
            "exact <=", row["sup_lambda_gap"] <= row["lambda_gap_bound"],
        ))
    medians = [row["median"] for row in report.rows]
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    ledger.append(_ledger_entry(
        "median deviation strictly decreasing along n schedule",
        medians, None, "strict decrease", decreasing,
    ))
    if cfg["net_u"] > 0 and cfg["j"] == 0 and cfg["parity"] == "odd":
        # net sandwich cross-check against the exact statistic, one sample per n
        from .ulln import sup_deviation_net

        pclass = ProductClass(IndicatorFamily(), GClass("half-lines"), "pi(UB,M-VC)")
        for n in exp.n_schedule:
            if cfg["net_u"] <= 3.0 / n:
                continue
            sample = draw_sample(cfg["model"], int(n),
                                 derive_seed(cfg["seed"], ["gc", int(n), 0]))
            exact = sup_deviation_exact_BW(0, "odd", sample)
            sw = sup_deviation_net(pclass, sample, cfg["net_u"])
            ledger.append(_ledger_entry(
                f"net sandwich contains exact statistic (n={n})",
                {"lower": sw.lower, "exact": exact, "upper": sw.upper}, None,
                "lower <= exact <= upper",
                sw.lower <= exact + 1e-12 and exact <= sw.upper + 1e-12,
            ))
    return {"rows": report.rows, "ledger": ledger,
            "pass": all(e["ok"] for e in ledger)}


def _kiefer_cells(grid: int) -> list:
    cells = []
    for i in range(grid):
        for k in range(grid):
            cells.append(kiefer_cell((i + 1) / grid, (k + 1) / grid))
    return cells


def _holder_product_qs(model) -> list:
    from .fclt import make_product_q
    from .function_classes import HalfLine, HolderClass

    net = HolderClass(1.0, 1.0, 1.0).build_net(0.8)
    picks = [net[0], net[len(net) // 3], net[2 * len(net) // 3], net[-1]]
    gs = [HalfLine(float(model.ppf(1.0 / 3.0))), HalfLine(float(model.ppf(2.0 / 3.0)))]
    return [make_product_q(h, g) for h in picks for g in gs]


def _load_q_file(path: str) -> list:
    from .fclt import make_product_q
    from .function_classes import (
        BoundedPolynomial,
        HalfLine,
        HolderMember,
        IndicatorMember,
        InitialInterval,
    )
    from .piecewise import PiecewiseLinear

    with open(path) as fh:
        entries = json.load(fh)
    if not isinstance(entries, list) or not entries:
        raise ConfigError("q file must hold a nonempty JSON list")
    out = []
    for e in entries:
        h_spec, g_spec = e["h"], e["g"]
        if h_spec["type"] == "indicator":
            h = IndicatorMember(float(h_spec["t"]))
        elif h_spec["type"] == "holder-pl":
            h = HolderMember(
                float(h_spec.get("T", 1.0)), float(h_spec.get("C", 1.0)),
                float(h_spec.get("beta", 1.0)),
                pl=PiecewiseLinear(tuple(h_spec["knots"]), tuple(h_spec["values"])),
            )
        else:
            raise ConfigError(f"unknown h type {h_spec['type']!r}")
        if g_spec["type"] == "half-line":
            g = HalfLine(float(g_spec["w"]))
        elif g_spec["type"] == "initial-interval":
            g = InitialInterval(float(g_spec["w"]))
        elif g_spec["type"] == "poly":
            g = BoundedPolynomial(tuple(float(c) for c in g_spec["coeffs"]))
        else:
            raise ConfigError(f"unknown g type {g_spec['type']!r}")
        out.append(make_product_q(h, g))
    return out


def _run_fclt(cfg: dict) -> dict:
    model = parse_model(cfg["model"])
    if cfg["q_set"] == "kiefer-3":
        q_list = [kiefer_cell(0.5, 0.5), kiefer_cell(1.0, 0.5), kiefer_cell(0.5, 0.25)]
    elif cfg["q_set"] == "kiefer-grid":
        q_list = _kiefer_cells(3)
    elif cfg["q_set"] == "holder-product":
        q_list = _holder_product_qs(model)
    elif cfg["q_set"] == "custom-file":
        q_list = _load_q_file(cfg["q_file"])
    else:
        raise ConfigError(f"unknown q_set {cfg['q_set']!r}")
    fidi = fidi_convergence_test(
        q_list, cfg["n"], cfg["replicates"], cfg["seed"], model,
        cov_tolerance=cfg["cov_tolerance"], ks_tolerance=cfg["ks_tolerance"],
    )
    results: dict[str, Any] = {
        "fidi": {
            "n": fidi.n,
            "replicates": fidi.replicates,
            "analytic_cov": fidi.analytic_cov.tolist(),
            "empirical_cov": fidi.empirical_cov.tolist(),
            "max_cov_error": fidi.max_cov_error,
            "marginal_ks": fidi.marginal_ks,
            "combo_ks": fidi.combo_ks,
            "ks": fidi.marginal_ks + fidi.combo_ks,
        }
    }
    ledger = [
        _ledger_entry("fidi max covariance entry error", fidi.max_cov_error,
                      fidi.cov_tolerance, f"<= {fidi.cov_tolerance}",
                      fidi.max_cov_error <= fidi.cov_tolerance),
    ]
    for row in fidi.marginal_ks + fidi.combo_ks:
        if not row["degenerate"]:
            ledger.append(_ledger_entry(
                f"KS distance {row['label']}", row["ks"], fidi.ks_tolerance,
                f"<= {fidi.ks_tolerance}", row["ks"] <= fidi.ks_tolerance,
            ))
    if cfg["run_modulus"]:
        h_class = parse_class_descriptor(cfg["h_class"])
        if not isinstance(h_class, (HolderClass, IndicatorFamily)):
            raise ConfigError("h_class must describe a holder or indicator family")
        pclass = ProductClass(h_class, GClass("half-lines"), "pi(UB,M-VC)")
        mod = equicontinuity_modulus(
            pclass, cfg["n"], tuple(cfg["alpha_list"]), cfg["net_u"],
            cfg["modulus_replicates"], cfg["seed"], model,
        )
        results["modulus"] = {"net_u": mod.net_u, "h_pool": mod.h_pool,
                              "g_pool": mod.g_pool, "rows": mod.rows,
                              "modulus_by_alpha": {
                                  str(r["alpha"]): r["mean_modulus"] for r in mod.rows
                              }}
        vals = [r["mean_modulus"] for r in mod.rows]
        monotone = all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        ledger.append(_ledger_entry("mean modulus nondecreasing in alpha",
                                    vals, None, "monotone", monotone))
        ledger.append(_ledger_entry(
            "modulus at smallest alpha <= 0.5 x modulus at largest",
            vals[0], 0.5 * vals[-1], "<=", vals[0] <= 0.5 * vals[-1]))
    if cfg["run_lindeberg"]:
        lin = lindeberg_check(make_sx_q(), parse_model("standard-normal"),
                              [10**2, 10**3, 10**4, 10**5, 10**6], [0.1])
        results["lindeberg"] = lin
        final = lin["rows"][-1]["ratio"] if lin["rows"] else None
        ledger.append(_ledger_entry("Lindeberg ratio at n=1e6, eps=0.1",
                                    final, 1e-3, "<= 1e-3",
                                    final is not None and final <= 1e-3))
    return {"results": results, "ledger": ledger,
            "pass": all(e["ok"] for e in ledger)}


def _run_covering(cfg: dict) -> dict:
    lemmas = check_covering_lemmas(cfg["trials"], cfg["seed"])
    model = parse_model(cfg["model"])
    pclass = ProductClass(IndicatorFamily(), GClass("half-lines"), "pi(UB,M-VC)")
    seeds = [derive_seed(cfg["seed"], ["covering", i]) % 2**63
             for i in range(cfg["n_seeds"])]
    bdd = random_covering_boundedness(pclass, cfg["tau"],
                                      [int(n) for n in cfg["n_list"]], seeds, model)
    ledger = [
        _ledger_entry("covering lemma violations", lemmas.total_violations, 0,
                      "== 0", lemmas.total_violations == 0),
        _ledger_entry("random covering numbers within product bound",
                      bdd.violations, 0, "== 0", bdd.violations == 0),
    ]
    return {
        "results": {
            "lemma_checks": lemmas.checks,
            "lemma_reports": lemmas.to_json(),
            "lemma_violations": lemmas.violations,
            "covering_max_observed": bdd.max_observed,
            "covering_trials": bdd.trials,
        },
        "ledger": ledger,
        "pass": all(e["ok"] for e in ledger),
    }


def _run_bounds(cfg: dict) -> dict:
    rng_root = cfg["seed"]
    n_list = [int(n) for n in cfg["n_list"]]
    members = cfg["members"]
    violations = []
    checks = 0

    specs = [("holder-b0.5", HolderClass(1.0, 1.0, 0.5)),
             ("holder-b1", HolderClass(1.0, 1.0, 1.0)),
             ("B1", BVectorClass(0, "odd")), ("B3", BVectorClass(1, "odd")),
             ("B5", BVectorClass(2, "odd")), ("B2", BVectorClass(1, "even")),
             ("B4", BVectorClass(2, "even"))]
    worst = {}
    for label, cls in specs:
        rng = np.random.default_rng(derive_seed(rng_root, ["bounds", label]))
        mems = [cls.random_member(rng) for _ in range(members)]
        for n in n_list:
            bound = riemann_gap_bound(cls, n)
            margin = -math.inf
            for m in mems:
                gap = observed_riemann_gap(m, n)
                checks += 1
                margin = max(margin, gap - bound)
                if gap > bound + 1e-12:
                    violations.append({"class": label, "n": n, "gap": gap,
                                       "bound": bound})
            worst[f"{label}/n={n}"] = margin
    witness_rows = []
    witness_ok = True
    for n in range(1, cfg["witness_max_n"] + 1):
        w = b_infinity_witness(n)
        ln = w.lambda_n(n)
        gap = w.lambda_n(n) - w.lebesgue()
        expected = 1 - 2 ** (-n)
        ok = (ln == 0) and (abs(gap) == expected)
        witness_ok = witness_ok and ok
        witness_rows.append({"n": n, "lambda_n": float(ln), "gap": float(abs(gap)),
                             "expected_gap": float(expected), "ok": ok})

    series_rows = []
    series_ok = True
    for c in (0.5, 1.0, 2.0):
        for d1 in (1, 2, 3):
            for d2 in (1, 2, 3):
                closed = series_I_closed_form(c, d1, d2)
                quad = series_I_quadrature(c, d1, d2)
                rel = abs(closed - quad) / max(abs(quad), 1e-300)
                ok = rel <= 1e-6
                series_ok = series_ok and ok
                series_rows.append({"c": c, "D1": d1, "D2": d2, "closed": closed,
                                    "quadrature": quad, "rel_err": rel, "ok": ok})
    s_class = {}
    for c in (0.5, math.log(2.0), 2.0):
        s_class[f"c={c:.6f}"] = series_S_diagnostic(1, c, 300).classification
    s_ok = (s_class[f"c={0.5:.6f}"] == "divergent"
            and s_class[f"c={math.log(2.0):.6f}"] == "divergent"
            and s_class[f"c={2.0:.6f}"] == "convergent")

    tb = gc_tail_bound(0.5, 10**4, 1)
    ledger = [
        _ledger_entry("Riemann gap bound violations (all classes)",
                      len(violations), 0, "== 0", len(violations) == 0),
        _ledger_entry("counterexample witness exact gaps", witness_ok, True,
                      "exact", witness_ok),
        _ledger_entry("series I closed form vs quadrature (rel 1e-6)",
                      series_ok, True, "<= 1e-6 rel", series_ok),
        _ledger_entry("series S dichotomy classifications", s_class, None,
                      "divergent/divergent/convergent", s_ok),
    ]
    return {
        "results": {"bound_checks": checks, "worst_margins": worst,
                    "witness": witness_rows, "series_I": series_rows,
                    "series_S": s_class,
                    "tail_bound_example": {"value": tb.value, "vacuous": tb.vacuous,
                                           "applicable": tb.applicable}},
        "ledger": ledger,
        "pass": all(e["ok"] for e in ledger),
    }


def _run_kiefer(cfg: dict) -> dict:
    model = parse_model("uniform01")
    grid = cfg["grid"]
    cells = _kiefer_cells(grid)
    analytic = np.zeros((len(cells), len(cells)))
    closed = np.zeros_like(analytic)
    svals = [(i + 1) / grid for i in range(grid) for _ in range(grid)]
    xvals = [(k + 1) / grid for _ in range(grid) for k in range(grid)]
    for a in range(len(cells)):
        for b in range(len(cells)):
            analytic[a, b] = cov_kernel(cells[a], cells[b], model)
            closed[a, b] = min(svals[a], svals[b]) * (
                min(xvals[a], xvals[b]) - xvals[a] * xvals[b]
            )
    kernel_err = float(np.max(np.abs(analytic - closed)))
    draws = gaussian_fidi_sample(analytic, cfg["draws"], cfg["seed"])
    emp = np.cov(draws.T, ddof=1)
    emp_err = float(np.max(np.abs(emp - analytic)))
    ledger = [
        _ledger_entry("product kernel equals Kiefer closed form", kernel_err,
                      1e-8, "<= 1e-8", kernel_err <= 1e-8),
        _ledger_entry("sampler covariance error", emp_err, cfg["tolerance"],
                      f"<= {cfg['tolerance']}", emp_err <= cfg["tolerance"]),
    ]
    return {
        "results": {"analytic_cov": analytic.tolist(),
                    "empirical_cov": emp.tolist(),
                    "kernel_error": kernel_err, "sampler_error": emp_err},
        "ledger": ledger,
        "pass": all(e["ok"] for e in ledger),
    }


def _run_selftest(cfg: dict) -> dict:
    seed = cfg["seed"]
    sections = {}
    ok = True

    sec = _run_bounds(parse_config("bounds", {
        "members": 60, "seed": seed, "n_list": [10, 100], "witness_max_n": 12,
    }))
    sections["bounds"] = sec
    ok = ok and sec["pass"]

    sec = _run_covering(parse_config("covering", {
        "trials": 60, "seed": seed, "tau": 0.5, "n_list": [20, 100], "n_seeds": 4,
    }))
    sections["covering"] = sec
    ok = ok and sec["pass"]

    # DP versus brute force on tiny instances
    mismatches = 0
    for trial in range(40):
        rng = np.random.default_rng(derive_seed(seed, ["selftest-dp", trial]))
        n = int(rng.integers(2, 10))
        j = int(rng.integers(0, 2))
        sample = draw_sample("uniform01", n,
                             derive_seed(seed, ["selftest-dp-sample", trial]) % 2**63)
        a = sup_deviation_exact_BW(j, "odd", sample)
        b = sup_deviation_bruteforce(j, "odd", sample)
        if abs(a - b) > 1e-12:
            mismatches += 1
    sections["dp_oracle"] = {"trials": 40, "mismatches": mismatches}
    ok = ok and mismatches == 0

    sec = _run_ulln(parse_config("ulln", {
        "n_schedule": [50, 400], "replicates": 30, "seed": seed,
    }))
    sections["ulln"] = sec
    ok = ok and sec["pass"]

    sec = _run_kiefer(parse_config("kiefer", {
        "draws": 40000, "seed": seed, "tolerance": 0.05,
    }))
    sections["kiefer"] = sec
    ok = ok and sec["pass"]

    sec = _run_fclt(parse_config("fclt", {
        "n": 400, "replicates": 1200, "seed": seed,
        "cov_tolerance": 0.08, "ks_tolerance": 0.06,
        "alpha_list": [0.1, 0.4], "net_u": 0.4, "modulus_replicates": 20,
    }))
    sections["fclt"] = sec
    ok = ok and sec["pass"]

    return {"results": {"sections": sections}, "ledger": [], "pass": ok}


_RUNNERS: dict[str, Callable[[dict], dict]] = {
    "ulln": _run_ulln,
    "fclt": _run_fclt,
    "covering": _run_covering,
    "bounds": _run_bounds,
    "kiefer": _run_kiefer,
    "selftest": _run_selftest,
}


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def run_experiment(experiment: str, raw_config: dict) -> dict:
    cfg = parse_config(experiment, raw_config)
    start = time.monotonic()
    body = _RUNNERS[experiment](cfg)
    elapsed = time.monotonic() - start
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "config": cfg,
        "results": _jsonable(body.get("results", body.get("rows"))),
        "ledger": _jsonable(body.get("ledger", [])),
        "pass": bool(body["pass"]),
        "meta": {
            "wall_clock_seconds": elapsed,
            "library_version": __version__,
            "rng": {"root_seed": cfg.get("seed"), "algorithm": "PCG64+splitmix64-paths"},
            "threads": os.environ.get("SEMPROC_THREADS", "1"),
        },
    }
    if experiment == "ulln":
        report["results"] = _jsonable(body["rows"])
    return report


def numeric_bytes(report: dict) -> bytes:
    """Canonical bytes of the numeric part of a report (meta stripped)."""
    stripped = {k: v for k, v in report.items() if k != "meta"}
    return json.dumps(stripped, sort_keys=True, indent=1).encode()


def write_report(report: dict, path: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def emit_plotdata(report: dict, prefix: str) -> list[str]:
    """CSV series per figure; header contract documented per experiment."""
    paths = []
    exp = report["experiment"]
    if exp == "ulln":
        path = f"{prefix}_convergence.csv"
        rows = report["results"]
        with open(f"{path}.tmp", "w") as fh:
            fh.write("n,mean,median,q95,max,bound\n")
            for r in rows:
                fh.write(f"{r['n']},{r['mean']!r},{r['median']!r},{r['q95']!r},"
                         f"{r['max']!r},{r['lambda_gap_bound']!r}\n")
        os.replace(f"{path}.tmp", path)
        paths.append(path)
    elif exp == "fclt":
        res = report["results"]
        path = f"{prefix}_modulus.csv"
        with open(f"{path}.tmp", "w") as fh:
            fh.write("alpha,mean_modulus\n")
            for r in res.get("modulus", {}).get("rows", []):
                fh.write(f"{r['alpha']!r},{r['mean_modulus']!r}\n")
        os.replace(f"{path}.tmp", path)
        paths.append(path)
        path = f"{prefix}_lindeberg.csv"
        with open(f"{path}.tmp", "w") as fh:
            fh.write("n,lindeberg_ratio\n")
            for r in res.get("lindeberg", {}).get("rows", []):
                fh.write(f"{r['n']},{r['ratio']!r}\n")
        os.replace(f"{path}.tmp", path)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _parse_override(text: str):
    key, _, value = text.partition("=")
    if not _:
        raise ConfigError(f"override {text!r} must look like key=value")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="semproc",
        description="Sequential empirical measure process experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in _SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="config override (JSON value)")
        p.add_argument("--out", default=None, help="report path (JSON)")
        p.add_argument("--plot-prefix", default=None,
                       help="emit plot-data CSVs with this path prefix")
        p.add_argument("--seed", type=int, default=None)
        if name == "ulln":
            p.add_argument("--class", dest="class_id", default=None)
            p.add_argument("--j", type=int, default=None)
            p.add_argument("--n-schedule", default=None,
                           help="comma separated, e.g. 100,1000,10000")
            p.add_argument("--replicates", type=int, default=None)
            p.add_argument("--centering", choices=["lambda_n", "lambda"], default=None)
            p.add_argument("--net-u", type=float, default=None)
        if name == "fclt":
            p.add_argument("--q-set", default=None,
                           choices=["kiefer-3", "kiefer-grid", "holder-product",
                                    "custom-file"])
            p.add_argument("--q-file", default=None)
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--replicates", type=int, default=None)
            p.add_argument("--alpha-list", default=None, help="comma separated")
            p.add_argument("--net-u", type=float, default=None)

    args = parser.parse_args(argv)
    try:
        raw = _load_config_file(args.config)
        for item in args.set:
            key, value = _parse_override(item)
            raw[key] = value
        for flag, key in (
            ("seed", "seed"), ("j", "j"), ("replicates", "replicates"),
            ("centering", "centering"), ("n", "n"), ("net_u", "net_u"),
            ("q_set", "q_set"), ("q_file", "q_file"), ("class_id", "class"),
        ):
            if getattr(args, flag, None) is not None:
                raw[key] = getattr(args, flag)
        if getattr(args, "n_schedule", None):
            raw["n_schedule"] = [int(v) for v in args.n_schedule.split(",")]
        if getattr(args, "alpha_list", None):
            raw["alpha_list"] = [float(v) for v in args.alpha_list.split(",")]
        report = run_experiment(args.experiment, raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    digest = __import__("hashlib").sha256(numeric_bytes(report)).hexdigest()
    print(f"experiment={args.experiment} pass={report['pass']} numeric_sha256={digest}")
    if args.out:
        write_report(report, args.out)
        print(f"report written to {args.out}")
    if args.plot_prefix:
        for path in emit_plotdata(report, args.plot_prefix):
            print(f"plot data written to {path}")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
