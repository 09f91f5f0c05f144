"""Configuration-driven experiment runner.

Usage::

    nhkit run <config.json> [--out PATH] [--format csv|json]
    nhkit validate <config.json>
    nhkit list-builtins

A config is a JSON document::

    {
      "problem":  {"variant": "separated", "h": [2.718281828459045]},
      "N": 8,
      "grid":     {"nodes_per_dim": 16},
      "operator": {"type": "multiplier", "factors": [{"builtin": "weight_power", "s": 3}]},
      "analysis": {"name": "trace"},
      "seed": 0,
      "output":   {"path": "trace.json", "format": "json"}
    }

Exit status is 0 on success, 2 when the config fails validation and 1 when
the computation raises.
"""
import argparse
import contextlib
import copy
import csv
import io
import json
import math
import os
import sys
import time
import traceback

import numpy as np

from . import __version__
from .errors import ConfigError, NHKitError
from .problems import (
    IndexSet,
    NonlocalProblem,
    QProfile,
    SeparatedProblem,
    eigensystem,
    nonlocal_spectrum,
    verify_system,
)
from .quad import build_grid, grid_for
from .schatten import (
    discretize,
    eigen_summability,
    hs_norm_kernel,
    hs_norm_symbol,
    nuclearity_report,
    schatten_quasi_norm,
    spectrum,
    trace_report,
)
from .stencils import differential_operator
from .symbols import (
    FullSymbol,
    KernelMatrix,
    Multiplier,
    delta,
    indicator,
    kernel_of,
    pd_multiplier,
    resolvent_power,
    weight_power,
)

__all__ = ["main", "validate", "run", "export", "BUILTINS"]

ANALYSES = ("verify", "hs", "schatten", "trace", "nuclearity", "nonlocal-spectrum", "summability")
OPERATOR_ANALYSES = ("hs", "schatten", "trace", "nuclearity", "summability")
MAX_NODES = 4096
MAX_RADIUS = 64

BUILTINS = {
    "problems": {
        "separated": "Laplacian on [0,1]^n, h_j f(x_j=0) = f(x_j=1); keys h (list), s0",
        "nonlocal": "-i d/dx on [0,1], a f(0) + b f(1) + int f q = 0; keys a (number or 'auto'), b, q",
    },
    "q": {
        "zero": "q = 0",
        "cos": "q = amplitude cos(2 pi frequency x); keys amplitude, frequency",
        "poly": "q = sum coeffs[k] x^k; key coeffs",
    },
    "multipliers": {
        "identity": "sigma = 1",
        "delta": "indicator of one index; key xi (default 0)",
        "indicator": "indicator of a set; key members (list of indices)",
        "weight_power": "<xi>^(-s); key s",
        "resolvent_power": "(1 - lambda_xi)^(-s/m), principal power; key s",
        "eigenvalue": "lambda_xi",
        "pd": "sum a_alpha prod (ln h_j + 2 pi i xi_j)^alpha_j; key coeffs [{alpha, a}] (separated only)",
    },
    "windows": {
        "constant": "w = value; key value",
        "trig": "w = 1 + amplitude cos(2 pi frequency x_1); keys amplitude, frequency",
    },
    "kernels": {
        "rank_one": "u_0(x) conj(v_0(y))",
        "constant": "K = 1",
        "dirichlet": "prod_j sum_{|k|<=N} e^{2 pi i k (x_j - y_j)}",
    },
    "operators": {
        "multiplier": "keys factors (list of multiplier builtins), scale",
        "full_symbol": "w(x) sigma(xi); keys window, factors, scale",
        "kernel": "key builtin",
        "fd": "finite-difference P(D) as a black box; keys coeffs [{alpha, a}], width",
    },
    "analyses": {name: "" for name in ANALYSES},
}


# ---------------------------------------------------------------------------
# validation


def _require(cond, path, message):
    if not cond:
        raise ConfigError(path, message)


def _number(node, path, positive=False, integer=False, low=None, high=None):
    _require(isinstance(node, (int, float)) and not isinstance(node, bool), path, f"expected a number, got {node!r}")
    _require(math.isfinite(node), path, "must be finite")
    if integer:
        _require(float(node).is_integer(), path, f"expected an integer, got {node!r}")
    if positive:
        _require(node > 0, path, f"must be positive, got {node!r}")
    if low is not None:
        _require(node >= low, path, f"must be >= {low}, got {node!r}")
    if high is not None:
        _require(node <= high, path, f"must be <= {high}, got {node!r}")
    return int(node) if integer else float(node)


def _complex(node, path):
    if isinstance(node, dict):
        _require(set(node) <= {"re", "im"}, path, "complex numbers are {re, im}")
        return complex(_number(node.get("re", 0.0), f"{path}.re"), _number(node.get("im", 0.0), f"{path}.im"))
    return complex(_number(node, path))


def _index(node, path, dimension, radius):
    if isinstance(node, (int, float)) and dimension == 1:
        node = [node]
    _require(isinstance(node, list) and len(node) == dimension, path, f"expected a list of {dimension} integers")
    xi = tuple(_number(c, f"{path}[{k}]", integer=True) for k, c in enumerate(node))
    _require(max(abs(c) for c in xi) <= radius, path, f"index {xi} lies outside the truncation N = {radius}")
    return xi


def _coeffs(node, path, dimension):
    _require(isinstance(node, list) and node, path, "expected a non-empty list of {alpha, a}")
    out = {}
    for k, term in enumerate(node):
        p = f"{path}[{k}]"
        _require(isinstance(term, dict) and "alpha" in term and "a" in term, p, "expected {alpha, a}")
        alpha = term["alpha"]
        if isinstance(alpha, int) and dimension == 1:
            alpha = [alpha]
        _require(isinstance(alpha, list) and len(alpha) == dimension, f"{p}.alpha", f"expected {dimension} orders")
        alpha = tuple(_number(a, f"{p}.alpha[{j}]", integer=True, low=0, high=8) for j, a in enumerate(alpha))
        out[alpha] = out.get(alpha, 0) + _complex(term["a"], f"{p}.a")
    return out


def _validate_problem(node):
    _require(isinstance(node, dict), "problem", "expected an object")
    variant = node.get("variant")
    _require(variant in BUILTINS["problems"], "problem.variant", f"unknown variant {variant!r}")
    if variant == "separated":
        h = node.get("h")
        if isinstance(h, (int, float)):
            h = [h]
        _require(isinstance(h, list) and 1 <= len(h) <= 3, "problem.h", "expected a list of 1 to 3 positive numbers")
        h = [_number(v, f"problem.h[{j}]", positive=True) for j, v in enumerate(h)]
        out = {"variant": variant, "h": h}
        if node.get("s0") is not None:
            out["s0"] = _number(node["s0"], "problem.s0", positive=True)
            _require(out["s0"] > len(h), "problem.s0", f"must exceed the dimension {len(h)}")
        return out

    qnode = node.get("q", {"name": "zero"})
    _require(isinstance(qnode, dict), "problem.q", "expected an object")
    qname = qnode.get("name")
    _require(qname in BUILTINS["q"], "problem.q.name", f"unknown profile {qname!r}")
    if qname == "zero":
        q = QProfile.zero()
    elif qname == "cos":
        q = QProfile.cos(_number(qnode.get("amplitude"), "problem.q.amplitude"),
                         _number(qnode.get("frequency", 1), "problem.q.frequency", integer=True))
    else:
        cs = qnode.get("coeffs")
        _require(isinstance(cs, list) and cs, "problem.q.coeffs", "expected a non-empty list")
        q = QProfile.poly([_number(c, f"problem.q.coeffs[{k}]") for k, c in enumerate(cs)])
    b = _complex(node.get("b"), "problem.b")
    _require(b != 0, "problem.b", "must be nonzero")
    a = node.get("a", "auto")
    if a == "auto":
        a = 1.0 - b - q.integral()
    else:
        a = _complex(a, "problem.a")
        _require(abs(a + b + q.integral() - 1.0) <= 1e-10, "problem.a", "a + b + int q must equal 1 (or use 'auto')")
    _require(a != 0, "problem.a", "must be nonzero")
    out = {"variant": variant, "a": a, "b": b, "q": q}
    if node.get("s0") is not None:
        out["s0"] = _number(node["s0"], "problem.s0", positive=True)
        _require(out["s0"] > 1, "problem.s0", "must exceed 1")
    return out


def _validate_factors(node, path, problem, radius):
    _require(isinstance(node, list) and node, path, "expected a non-empty list of multiplier builtins")
    out = []
    dim = len(problem["h"]) if problem["variant"] == "separated" else 1
    for k, f in enumerate(node):
        p = f"{path}[{k}]"
        _require(isinstance(f, dict), p, "expected an object")
        name = f.get("builtin")
        _require(name in BUILTINS["multipliers"], f"{p}.builtin", f"unknown multiplier {name!r}")
        item = {"builtin": name}
        if name in ("weight_power", "resolvent_power"):
            item["s"] = _number(f.get("s"), f"{p}.s", positive=True)
        elif name == "delta":
            item["xi"] = _index(f.get("xi", [0] * dim), f"{p}.xi", dim, radius)
        elif name == "indicator":
            members = f.get("members")
            _require(isinstance(members, list) and members, f"{p}.members", "expected a non-empty list")
            item["members"] = [_index(m, f"{p}.members[{j}]", dim, radius) for j, m in enumerate(members)]
        elif name == "pd":
            _require(problem["variant"] == "separated", f"{p}.builtin", "pd multipliers need a separated problem")
            item["coeffs"] = _coeffs(f.get("coeffs"), f"{p}.coeffs", dim)
        out.append(item)
    return out


def _validate_operator(node, problem, radius):
    _require(isinstance(node, dict), "operator", "expected an object")
    kind = node.get("type")
    _require(kind in BUILTINS["operators"], "operator.type", f"unknown operator type {kind!r}")
    out = {"type": kind}
    dim = len(problem["h"]) if problem["variant"] == "separated" else 1
    if kind in ("multiplier", "full_symbol"):
        out["factors"] = _validate_factors(node.get("factors"), "operator.factors", problem, radius)
        out["scale"] = _complex(node.get("scale", 1.0), "operator.scale")
    if kind == "full_symbol":
        w = node.get("window")
        _require(isinstance(w, dict), "operator.window", "expected an object")
        name = w.get("builtin")
        _require(name in BUILTINS["windows"], "operator.window.builtin", f"unknown window {name!r}")
        if name == "constant":
            out["window"] = {"builtin": name, "value": _complex(w.get("value", 1.0), "operator.window.value")}
        else:
            out["window"] = {
                "builtin": name,
                "amplitude": _number(w.get("amplitude"), "operator.window.amplitude"),
                "frequency": _number(w.get("frequency", 1), "operator.window.frequency", integer=True),
            }
    elif kind == "kernel":
        name = node.get("builtin")
        _require(name in BUILTINS["kernels"], "operator.builtin", f"unknown kernel {name!r}")
        out["builtin"] = name
    elif kind == "fd":
        out["coeffs"] = _coeffs(node.get("coeffs"), "operator.coeffs", dim)
        out["width"] = _number(node.get("width", 5), "operator.width", integer=True, low=3, high=15)
        _require(problem["variant"] == "separated", "operator.type", "fd operators need a separated problem")
    return out


def _validate_analysis(node, problem):
    if isinstance(node, str):
        node = {"name": node}
    _require(isinstance(node, dict), "analysis", "expected an object or a name")
    name = node.get("name")
    _require(name in ANALYSES, "analysis.name", f"unknown analysis {name!r}; choose from {', '.join(ANALYSES)}")
    out = {"name": name}
    if name == "nonlocal-spectrum":
        _require(problem["variant"] == "nonlocal", "analysis.name", "nonlocal-spectrum needs a nonlocal problem")
    if name == "hs":
        _require(problem["variant"] == "separated", "analysis.name", "hs needs a separated problem")
    if name == "schatten":
        rs = node.get("r", [0.5, 2.0 / 3.0, 1.0, 2.0])
        rs = rs if isinstance(rs, list) else [rs]
        _require(rs, "analysis.r", "expected at least one exponent")
        out["r"] = [_number(r, f"analysis.r[{k}]", positive=True) for k, r in enumerate(rs)]
    if name in ("nuclearity", "summability"):
        out["r"] = _number(node.get("r", 1.0), "analysis.r", positive=True, high=1.0)
    if name == "nuclearity":
        out["p1"] = _number(node.get("p1", 2.0), "analysis.p1", low=1.0)
        out["p2"] = _number(node.get("p2", 2.0), "analysis.p2", low=1.0)
    if name == "summability":
        out["p"] = _number(node.get("p", 2.0), "analysis.p", low=1.0)
    return out


def validate(config):
    """Check a raw config tree and return its normalised form.

    Nothing expensive is constructed: no grids, eigensystems or matrices.

    Raises
    ------
    ConfigError
        With the dotted path of the first offending field.
    """
    _require(isinstance(config, dict), "<root>", "expected a JSON object")
    known = {"problem", "N", "grid", "operator", "analysis", "seed", "output"}
    extra = sorted(set(config) - known)
    _require(not extra, extra[0] if extra else "", f"unknown key; expected one of {sorted(known)}")
    _require("problem" in config, "problem", "missing")
    _require("analysis" in config, "analysis", "missing")
    problem = _validate_problem(config["problem"])
    dim = len(problem["h"]) if problem["variant"] == "separated" else 1
    radius = _number(config.get("N", 4), "N", integer=True, low=0, high=MAX_RADIUS)
    analysis = _validate_analysis(config["analysis"], problem)

    gnode = config.get("grid", {})
    _require(isinstance(gnode, dict), "grid", "expected an object")
    nodes = _number(gnode.get("nodes_per_dim", 16), "grid.nodes_per_dim", integer=True, low=2, high=64)
    if gnode.get("panels_per_dim") is None:
        panels = None
        per_dim = nodes * max(1, math.ceil((2 * radius + 2) / 3))
    else:
        panels = _number(gnode["panels_per_dim"], "grid.panels_per_dim", integer=True, low=1)
        per_dim = nodes * panels
    _require(per_dim**dim <= MAX_NODES, "grid", f"{per_dim**dim} nodes exceed the limit {MAX_NODES}")

    operator = None
    if analysis["name"] in OPERATOR_ANALYSES:
        _require("operator" in config, "operator", f"analysis {analysis['name']!r} needs an operator")
        operator = _validate_operator(config["operator"], problem, radius)

    seed = _number(config.get("seed", 0), "seed", integer=True, low=0)
    onode = config.get("output", {})
    _require(isinstance(onode, dict), "output", "expected an object")
    fmt = onode.get("format", "json")
    _require(fmt in ("json", "csv"), "output.format", f"must be 'json' or 'csv', got {fmt!r}")
    path = onode.get("path")
    _require(path is None or isinstance(path, str), "output.path", "expected a string")
    return {
        "problem": problem,
        "N": radius,
        "grid": {"nodes_per_dim": nodes, "panels_per_dim": panels},
        "operator": operator,
        "analysis": analysis,
        "seed": seed,
        "output": {"path": path, "format": fmt},
    }


# ---------------------------------------------------------------------------
# construction


def _make_problem(p):
    if p["variant"] == "separated":
        return SeparatedProblem(tuple(p["h"]), p.get("s0"))
    return NonlocalProblem(p["a"], p["b"], p["q"], p.get("s0"))


def _make_multiplier(factors, scale, problem, indices):
    values = np.full(len(indices), complex(scale))
    for f in factors:
        name = f["builtin"]
        if name == "identity":
            m = np.ones(len(indices))
        elif name == "delta":
            m = delta(indices, f["xi"]).values
        elif name == "indicator":
            m = indicator(indices, f["members"]).values
        elif name == "weight_power":
            m = weight_power(problem, f["s"], indices).values
        elif name == "resolvent_power":
            m = resolvent_power(problem, f["s"], indices).values
        elif name == "eigenvalue":
            m = problem.eigenvalues(indices)
        else:
            m = pd_multiplier(f["coeffs"], problem, indices).values
        values = values * m
    return Multiplier(indices, values)


def _make_operator(op, problem, indices, grid):
    kind = op["type"]
    if kind == "multiplier":
        return _make_multiplier(op["factors"], op["scale"], problem, indices)
    if kind == "full_symbol":
        m = _make_multiplier(op["factors"], op["scale"], problem, indices)
        w = op["window"]
        if w["builtin"] == "constant":
            window = grid.constant(w["value"])
        else:
            window = grid.sample(lambda x, *rest: 1.0 + w["amplitude"] * np.cos(2 * math.pi * w["frequency"] * x))
        return FullSymbol.product(window, m)
    if kind == "kernel":
        if op["builtin"] == "rank_one":
            return kernel_of(delta(indices), problem, indices, grid)
        if op["builtin"] == "constant":
            return KernelMatrix(grid, np.ones((grid.size, grid.size)))
        n = indices.radius

        def dirichlet(x, y):
            d = x - y
            k = np.arange(-n, n + 1)
            return np.prod(np.sum(np.exp(2j * math.pi * d[..., None] * k), axis=-1), axis=-1)

        return KernelMatrix.from_function(grid, dirichlet)
    return differential_operator(grid, op["coeffs"], op["width"])


def _make_grid(cfg, dimension):
    g = cfg["grid"]
    if g["panels_per_dim"] is None:
        return grid_for(dimension, cfg["N"], g["nodes_per_dim"])
    return build_grid(dimension, g["nodes_per_dim"], g["panels_per_dim"])


# ---------------------------------------------------------------------------
# analyses; each returns (summary, columns, rows, tails)


def _xi_cols(dim):
    return [f"xi_{j + 1}" for j in range(dim)]


def _run_verify(problem, indices, grid, op, params, seed):
    rep = verify_system(problem, indices, grid, seed=seed)
    summary = {
        "biorthogonality_defect": rep.biorthogonality_defect,
        "riesz_span": list(rep.riesz_span),
        "riesz_span_star": list(rep.riesz_span_star),
        "riesz_batch": list(rep.riesz_batch),
        "m": rep.m,
        "ell": rep.ell,
        "fit_u": list(rep.fit_u),
        "fit_v": list(rep.fit_v),
    }
    cols = _xi_cols(indices.dimension) + ["weight", "u_min", "u_max", "v_min", "v_max", "u_l2", "v_l2"]
    rows = [list(xi) + [rep.weights[k], rep.u_min[k], rep.u_max[k], rep.v_min[k], rep.v_max[k],
                        rep.u_l2[k], rep.v_l2[k]] for k, xi in enumerate(indices)]
    return summary, cols, rows, {}


def _symbol_column(A, grid):
    if isinstance(A, Multiplier):
        return A.values
    if isinstance(A, FullSymbol):
        return np.sqrt(np.abs(A.values) ** 2 @ grid.weights)
    return None


def _run_hs(problem, indices, grid, A, params, seed):
    K = A if isinstance(A, KernelMatrix) else kernel_of(A, problem, indices, grid) \
        if isinstance(A, (Multiplier, FullSymbol)) else discretize(A, problem, indices, grid)
    if isinstance(K, KernelMatrix):
        kernel_value = hs_norm_kernel(K)
    else:
        kernel_value = K.frobenius()
    rep = hs_norm_symbol(A, problem, indices, grid)
    summary = {
        "kernel": kernel_value,
        "plain": rep.plain,
        "convolution": rep.convolution,
        "convolution_truncated": rep.convolution_truncated,
        "c_min": rep.c_min,
        "c_max": rep.c_max,
        "sandwich_holds": rep.sandwich_holds,
        "kernel_vs_convolution_rel": abs(kernel_value - rep.convolution) / max(rep.convolution, 1e-300),
    }
    col = _symbol_column(A, grid)
    cols, rows = [], []
    if col is not None:
        cols = _xi_cols(indices.dimension) + ["sigma"]
        rows = [list(xi) + [col[k]] for k, xi in enumerate(indices)]
    return summary, cols, rows, {"convolution_tail": rep.tail, "truncation_radius": rep.truncation_radius}


def _run_schatten(problem, indices, grid, A, params, seed):
    spec = spectrum(discretize(A, problem, indices, grid))
    s = spec.singular_values
    summary = {
        "norms": {repr(r): schatten_quasi_norm(spec, r) for r in params["r"]},
        "frobenius": float(np.sqrt(np.sum(s**2))),
        "cutoff": spec.cutoff(),
        "rank": int(np.count_nonzero(s > spec.cutoff())),
    }
    rank = summary["rank"]
    cols = ["rank", "singular_value", "eigenvalue"]
    rows = [[k + 1, s[k], spec.eigenvalues[k]] for k in range(rank)]
    return summary, cols, rows, {"discarded_singular_mass": float(np.sum(s[rank:] ** 2))}


def _run_trace(problem, indices, grid, A, params, seed):
    rep = trace_report(A, problem, indices, grid)
    summary = {
        "kernel": rep.kernel,
        "symbol": rep.symbol,
        "eigen": rep.eigen,
        "deviations": {k: {"absolute": a, "relative": r} for k, (a, r) in rep.deviations().items()},
    }
    cols, rows = [], []
    if isinstance(A, Multiplier):
        cols = _xi_cols(indices.dimension) + ["sigma"]
        rows = [list(xi) + [A.values[k]] for k, xi in enumerate(indices)]
    elif isinstance(A, FullSymbol):
        u, v = eigensystem(problem, indices, grid)
        terms = (u * A.values * v.conj()) @ grid.weights
        cols = _xi_cols(indices.dimension) + ["trace_term"]
        rows = [list(xi) + [terms[k]] for k, xi in enumerate(indices)]
    tails = {}
    if isinstance(A, Multiplier):
        tails["last_shell_abs"] = float(np.sum(np.abs(A.values[indices.shell_mask(indices.radius)])))
    return summary, cols, rows, tails


def _run_nuclearity(problem, indices, grid, A, params, seed):
    rep = nuclearity_report(A, problem, indices, grid, params["r"], params["p1"], params["p2"])
    summary = {
        "r": rep.r, "p1": rep.p1, "p2": rep.p2, "q1": rep.q1,
        "sum_value": rep.sum_value,
        "bound": rep.bound,
        "multiplier_sum": rep.multiplier_sum,
        "c_h": rep.c_h,
        "rnuc_bound": rep.rnuc_bound,
        "schatten": rep.schatten,
    }
    cols = _xi_cols(indices.dimension) + ["shell", "term"]
    rows = [list(xi) + [int(indices.shells[k]), rep.terms[k]] for k, xi in enumerate(indices)]
    return summary, cols, rows, {"last_shell_share": rep.tail_share}


def _run_summability(problem, indices, grid, A, params, seed):
    spec = spectrum(discretize(A, problem, indices, grid))
    rep = eigen_summability(spec, params["r"], params["p"])
    summary = {
        "r": rep.r, "p": rep.p, "s": rep.s, "value": rep.value,
        "two_thirds": rep.two_thirds, "lidskii_relation": rep.lidskii_relation,
        "trace_formula_expected": rep.trace_formula_expected,
    }
    keep = np.abs(spec.eigenvalues) > spec.cutoff()
    lam = spec.eigenvalues[keep]
    cols = ["rank", "eigenvalue"]
    rows = [[k + 1, lam[k]] for k in range(lam.size)]
    return summary, cols, rows, {}


def _run_nonlocal(problem, indices, grid, A, params, seed):
    rep = nonlocal_spectrum(problem, indices)
    summary = {
        "count": len(indices),
        "max_residual": float(np.max(rep.residual)),
        "min_abs_derivative": float(np.min(np.abs(rep.derivative))),
        "alpha_abs_sum": rep.alpha_power_sum(1.0),
        "alpha_sq_sum": rep.alpha_power_sum(2.0),
    }
    cols = ["j", "lambda", "alpha", "residual", "derivative", "harmonic_distance", "seed_distance"]
    rows = [[xi[0], rep.eigenvalues[k], rep.alpha[k], rep.residual[k], rep.derivative[k],
             rep.harmonic_distance[k], rep.seed_distance[k]] for k, xi in enumerate(indices)]
    tails = {"harmonic_distance_sum": float(np.sum(rep.harmonic_distance)),
             "seed_distance_sum": float(np.sum(rep.seed_distance))}
    return summary, cols, rows, tails


RUNNERS = {
    "verify": _run_verify,
    "hs": _run_hs,
    "schatten": _run_schatten,
    "trace": _run_trace,
    "nuclearity": _run_nuclearity,
    "summability": _run_summability,
    "nonlocal-spectrum": _run_nonlocal,
}


def _echo(cfg):
    """Config echo with JSON-friendly values."""
    out = copy.deepcopy(cfg)
    p = out["problem"]
    if p["variant"] == "nonlocal":
        p["q"] = {"name": p["q"].name, "params": list(p["q"].params)}
    if out["operator"]:
        for f in out["operator"].get("factors", []):
            if "coeffs" in f:
                f["coeffs"] = [{"alpha": list(a), "a": c} for a, c in f["coeffs"].items()]
        if "coeffs" in out["operator"]:
            out["operator"]["coeffs"] = [{"alpha": list(a), "a": c} for a, c in out["operator"]["coeffs"].items()]
    return out


def run(config):
    """Validate ``config`` (raw or normalised) and execute it; returns the report envelope (a dict)."""
    cfg = config if "_normalised" in config else dict(validate(config), _normalised=True)
    timings = {}
    t0 = time.perf_counter()
    np.random.seed(cfg["seed"])
    problem = _make_problem(cfg["problem"])
    indices = IndexSet(problem.dimension, cfg["N"])
    grid = _make_grid(cfg, problem.dimension)
    A = _make_operator(cfg["operator"], problem, indices, grid) if cfg["operator"] else None
    timings["setup"] = time.perf_counter() - t0
    t1 = time.perf_counter()
    summary, cols, rows, tails = RUNNERS[cfg["analysis"]["name"]](problem, indices, grid, A, cfg["analysis"], cfg["seed"])
    timings["analysis"] = time.perf_counter() - t1
    echo = {k: v for k, v in _echo(cfg).items() if k != "_normalised"}
    return {
        "version": __version__,
        "config": echo,
        "seed": cfg["seed"],
        "grid": {"size": grid.size, "nodes_per_dim": grid.nodes_per_dim, "panels_per_dim": grid.panels_per_dim},
        "analysis": cfg["analysis"]["name"],
        "summary": summary,
        "payload": {"columns": cols, "rows": rows},
        "tails": tails,
        "timings": timings,
    }


# ---------------------------------------------------------------------------
# export


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def to_json(envelope):
    return json.dumps(_jsonable(envelope), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _fmt(x):
    return f"{x:.17g}"


def to_csv(envelope):
    """One row per payload row; complex columns split into ``<name>_re`` and ``<name>_im``."""
    cols = envelope["payload"]["columns"]
    rows = envelope["payload"]["rows"]
    is_complex = [any(isinstance(r[k], (complex, np.complexfloating)) for r in rows) for k in range(len(cols))]
    header = []
    for name, cplx in zip(cols, is_complex):
        header += [f"{name}_re", f"{name}_im"] if cplx else [name]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        line = []
        for v, cplx in zip(r, is_complex):
            if cplx:
                v = complex(v)
                line += [_fmt(v.real), _fmt(v.imag)]
            elif isinstance(v, (bool, np.bool_)):
                line.append(str(bool(v)).lower())
            elif isinstance(v, (int, np.integer)):
                line.append(str(int(v)))
            else:
                line.append(_fmt(float(v)))
        writer.writerow(line)
    return buf.getvalue()


def export(envelope, fmt, path=None):
    """Serialise ``envelope`` as ``fmt`` and write it to ``path`` (stdout when None)."""
    text = to_json(envelope) if fmt == "json" else to_csv(envelope)
    if path is None:
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return text


# ---------------------------------------------------------------------------
# entry point


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"{path} is not valid JSON: {exc}") from exc


def _threads():
    value = os.environ.get("NHKIT_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=int(value))


def _provenance(exc):
    modules = [f.filename for f in traceback.extract_tb(exc.__traceback__) if "nhkit" in f.filename]
    if not modules:
        return "nhkit"
    return "nhkit." + os.path.splitext(os.path.basename(modules[-1]))[0]


def main(argv=None):
    parser = argparse.ArgumentParser(prog="nhkit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output path (default: config output.path or stdout)")
    p_run.add_argument("--format", choices=("csv", "json"), default=None)
    p_val = sub.add_parser("validate", help="validate a config without running it")
    p_val.add_argument("config")
    sub.add_parser("list-builtins", help="list named problems, profiles, multipliers, windows and kernels")
    args = parser.parse_args(argv)

    if args.command == "list-builtins":
        for group, names in BUILTINS.items():
            print(f"{group}:")
            for name, text in names.items():
                print(f"  {name}" + (f"  {text}" if text else ""))
        return 0

    try:
        cfg = validate(_load(args.config))
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        print("ok")
        return 0

    fmt = args.format or cfg["output"]["format"]
    out = args.out or cfg["output"]["path"]
    try:
        with _threads():
            envelope = run(dict(cfg, _normalised=True))
        export(envelope, fmt, out)
    except (NHKitError, ArithmeticError, ValueError) as exc:
        print(f"error in {_provenance(exc)}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
