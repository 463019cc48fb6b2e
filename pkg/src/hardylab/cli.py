"""Command-line entry point: ``hardylab <command> [options]``.

Tables go to standard output as CSV, or with ``--out DIR`` to ``DIR/<command>.csv``
next to ``DIR/<command>.json`` (resolved config plus verdicts).  Diagnostics
go to standard error.  Exit codes: 0 success, 1 failed acceptance criteria, 2
invalid input, 3 numerical non-convergence (bounds are still written).
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

import click
import numpy as np

from . import acceptance
from .basis import BasisModel, matrix_from_json
from .group import cesaro_constant_bound, cesaro_rate_section, group_norm_curve, growth_bound_estimate
from .hardy import hardy_sides, near_extremal
from .nonbasis import (
    basis_failure_certificate,
    expansion_divergence,
    projection_norm_bounds,
    uniform_minimality,
)
from .norms import section_norm
from .sequences import DiffSpaceSpec, lp_norm
from .spectral import SpectralFn
from .spectrum import geometric_condition, k_decompose, rate_check, sk_membership, uniform_gap

SCHEMA_VERSION = 1
WORKERS_ENV = "HARDYLAB_WORKERS"
EXIT_FAIL, EXIT_INVALID, EXIT_NONCONVERGED = 1, 2, 3


class InvalidInput(click.ClickException):
    exit_code = EXIT_INVALID


# grids ---------------------------------------------------------------------

def _decimal(text):
    try:
        return Decimal(text.strip())
    except InvalidOperation:
        raise ValueError(f"not a number: {text!r}") from None


def parse_grid(text, integer: bool = False) -> list:
    """``a,b,c`` and ``start..stop..step`` (inclusive), freely mixed by commas."""
    if isinstance(text, (int, float)):
        text = str(text)
    if isinstance(text, (list, tuple)):
        items = [str(v) for v in text]
    else:
        items = [s for s in str(text).split(",") if s.strip()]
    if not items:
        raise ValueError("grid is empty")
    out = []
    for item in items:
        parts = item.split("..")
        if len(parts) == 1:
            out.append(_decimal(parts[0]))
            continue
        if len(parts) != 3:
            raise ValueError(f"range must read start..stop..step, got {item!r}")
        start, stop, step = (_decimal(p) for p in parts)
        if step <= 0:
            raise ValueError(f"range step must be positive, got {item!r}")
        count = int((stop - start) / step)
        if count < 0:
            raise ValueError(f"range {item!r} is empty")
        out.extend(start + i * step for i in range(count + 1))
    if integer:
        if any(v != v.to_integral_value() for v in out):
            raise ValueError(f"grid {text!r} must contain integers")
        return [int(v) for v in out]
    return [float(v) for v in out]


class GridType(click.ParamType):
    name = "grid"

    def __init__(self, integer=False):
        self.integer = integer

    def convert(self, value, param, ctx):
        try:
            return parse_grid(value, self.integer)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


INT_GRID = GridType(integer=True)
FLOAT_GRID = GridType()


class FnType(click.ParamType):
    name = "function"

    def convert(self, value, param, ctx):
        if isinstance(value, SpectralFn):
            return value
        try:
            return SpectralFn.parse(str(value))
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


SPECTRAL_FN = FnType()


# config and output ---------------------------------------------------------

def _default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InvalidInput(f"{WORKERS_ENV} must be a positive integer, got {env!r}") from None
        if n < 1:
            raise InvalidInput(f"{WORKERS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _load_config(path, command):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InvalidInput("config must be a JSON object")
    unknown = set(cfg) - {"command", "params", "schema_version"}
    if unknown:
        raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
    if cfg.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise InvalidInput(f"unsupported schema_version {cfg['schema_version']!r}; expected {SCHEMA_VERSION}")
    if cfg.get("command", command) != command:
        raise InvalidInput(f"config is for command {cfg['command']!r}, not {command!r}")
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise InvalidInput("config 'params' must be an object")
    return params


def _resolve(ctx: click.Context, params: dict) -> dict:
    """Merge ``--config`` values under explicitly given flags; reject unknown keys."""
    path = params.pop("config", None)
    if path is None:
        return params
    cmd = ctx.command
    known = {p.name: p for p in cmd.params if p.name != "config"}
    loaded = _load_config(path, ctx.info_name)
    unknown = set(loaded) - set(known)
    if unknown:
        raise InvalidInput(f"unknown parameter(s) for {ctx.info_name}: {sorted(unknown)}")
    for name, value in loaded.items():
        if ctx.get_parameter_source(name) in (click.core.ParameterSource.DEFAULT, None):
            try:
                params[name] = known[name].type_cast_value(ctx, value)
            except click.BadParameter as exc:
                raise InvalidInput(f"config value for {name!r}: {exc.message}") from None
    return params


def _echo_value(v):
    if isinstance(v, SpectralFn):
        return v.label
    if isinstance(v, (list, tuple)):
        return [_echo_value(x) for x in v]
    return v


def _run_prefix(command, config):
    blob = json.dumps({"command": command, "params": config}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:10]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return v


def render_csv(rows, prefix) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = ["run_id"] + list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
    writer.writeheader()
    for i, row in enumerate(rows):
        writer.writerow({"run_id": f"{prefix}-{i:04d}", **{k: _fmt(v) for k, v in row.items()}})
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return _echo_value(v)


def emit(command, config, rows, verdicts, out, converged=True):
    echo = {k: _echo_value(v) for k, v in config.items() if k not in ("out", "workers")}
    prefix = _run_prefix(command, echo)
    text = render_csv(rows, prefix)
    summary = {"command": command, "schema_version": SCHEMA_VERSION, "params": echo, "verdicts": verdicts, "converged": converged}
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{command}.csv").write_text(text, newline="")
        (d / f"{command}.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    for key, val in verdicts.items():
        click.echo(f"{command}: {key} = {val}", err=True)
    if not converged:
        click.echo(f"{command}: iteration did not converge; bounds were still written", err=True)
        sys.exit(EXIT_NONCONVERGED)


def _guard(fn):
    """Turn library ``ValueError`` into an exit-2 message."""
    import functools

    @functools.wraps(fn)
    def wrapper(*a, **kw):
        try:
            return fn(*a, **kw)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None

    return wrapper


def common(fn):
    fn = click.option("--out", type=click.Path(file_okay=False), default=None, help="Write <command>.csv/.json here instead of stdout.")(fn)
    fn = click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON config; explicit flags win.")(fn)
    return fn


# commands ------------------------------------------------------------------

@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact finite-section experiments on difference sequence spaces."""


@main.command()
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--family", type=click.Choice(["near-extremal", "impulse", "harmonic"]), default="near-extremal", show_default=True)
@click.option("--eps", type=FLOAT_GRID, default="1,0.1,0.01", show_default=True, help="eps grid (near-extremal only).")
@click.option("--N", "N", type=int, default=10**6, show_default=True)
@common
@click.pass_context
@_guard
def hardy(ctx, **params):
    """Both sides of the discrete Hardy inequality."""
    cfg = _resolve(ctx, params)
    p, N = cfg["p"], cfg["N"]
    if N < 1:
        raise InvalidInput("N must be positive")
    rows = []
    if cfg["family"] == "near-extremal":
        seqs = [(eps, near_extremal(p, eps, N)) for eps in cfg["eps"]]
    elif cfg["family"] == "impulse":
        a = np.zeros(N)
        a[0] = 1.0
        seqs = [("", a)]
    else:
        seqs = [("", 1.0 / np.arange(1, N + 1, dtype=np.float64))]
    for eps, a in seqs:
        r = hardy_sides(a, p)
        rows.append({"family": cfg["family"], "p": p, "eps": eps, "N": N, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio})
    ratios = [r["ratio"] for r in rows]
    verdicts = {"all_ratios_at_most_1": all(x <= 1.0 for x in ratios)}
    if cfg["family"] == "near-extremal" and len(ratios) > 1:
        order = np.argsort([-float(e) for e in cfg["eps"]])
        seq = [ratios[i] for i in order]
        verdicts["ratio_increasing_as_eps_decreases"] = all(b > a for a, b in zip(seq, seq[1:]))
    emit("hardy", cfg, rows, verdicts, cfg["out"])


@main.command()
@click.option("--kind", type=click.Choice(["cesaro", "ones", "matrix"]), default="cesaro", show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--N", "N", type=INT_GRID, default="4,64,1024", show_default=True)
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON matrix of [re, im] pairs (kind=matrix).")
@common
@click.pass_context
@_guard
def norms(ctx, **params):
    """Operator-norm bounds of triangular sections (row-rate matrices, all-ones, or a given matrix)."""
    cfg = _resolve(ctx, params)
    p = cfg["p"]
    rows = []
    if cfg["kind"] == "matrix":
        if not cfg["matrix"]:
            raise InvalidInput("--kind matrix needs --matrix FILE")
        A = matrix_from_json(Path(cfg["matrix"]).read_text())
        b = section_norm(A, p)
        rows.append({"kind": "matrix", "p": p, "N": A.shape[0], "lower": b.lower, "upper": b.upper, "converged": b.converged, "constant_vector": ""})
    else:
        for N in cfg["N"]:
            if N < 1:
                raise InvalidInput("section sizes must be positive")
            if cfg["kind"] == "cesaro":
                A = cesaro_rate_section(p, N).entries
            else:
                A = np.tril(np.ones((N, N)))
            b = section_norm(A, p)
            ones = np.ones(N)
            rows.append({
                "kind": cfg["kind"], "p": p, "N": N, "lower": b.lower, "upper": b.upper, "converged": b.converged,
                "constant_vector": lp_norm(A @ ones, p) / lp_norm(ones, p),
            })
    verdicts = {}
    if cfg["kind"] == "cesaro" and len(rows) > 1:
        verdicts["lower_bounds_increasing"] = all(b["lower"] > a["lower"] for a, b in zip(rows, rows[1:]))
        verdicts["constant_vector_matches_closed_form"] = all(
            abs(r["constant_vector"] - cesaro_constant_bound(p, r["N"])) <= 1e-9 * r["constant_vector"] for r in rows
        )
    emit("norms", cfg, rows, verdicts, cfg["out"], converged=all(r["converged"] for r in rows))


def _basis_model(path):
    if not path:
        return BasisModel.orthonormal()
    return BasisModel.riesz_matrix(matrix_from_json(Path(path).read_text()))


@main.command()
@click.option("--mode", type=click.Choice(["projection", "divergence", "minimality", "certificate"]), default="projection", show_default=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--Nproj", "Nproj", type=INT_GRID, default="3,10,99", show_default=True)
@click.option("--N", "N", type=int, default=None, help="Section size (default: mode dependent).")
@click.option("--n", "n_grid", type=INT_GRID, default=None, help="Indices to tabulate (divergence/minimality).")
@click.option("--basis", type=click.Path(exists=True, dir_okay=False), default=None, help="Riesz matrix S as JSON [re, im] pairs.")
@common
@click.pass_context
@_guard
def nonbasis(ctx, **params):
    """Certificates that the canonical system is not a basis of l_p(Delta^k)."""
    cfg = _resolve(ctx, params)
    k, p, mode = cfg["k"], cfg["p"], cfg["mode"]
    spec = DiffSpaceSpec(p, k)
    model = _basis_model(cfg["basis"])
    rows, verdicts, converged = [], {}, True
    if mode == "projection":
        for Np in cfg["Nproj"]:
            b = projection_norm_bounds(Np, spec, model, cfg["N"])
            converged &= b.converged
            rows.append({"k": k, "p": p, "Nproj": Np, "lower": b.lower, "upper": b.upper, "converged": b.converged})
        verdicts["projection_norms_increasing"] = all(b["lower"] > a["upper"] for a, b in zip(rows, rows[1:]))
    elif mode == "divergence":
        N = cfg["N"] or 10**6
        vals = expansion_divergence(k, N)
        grid = cfg["n_grid"] or sorted({1, 2, 3, 4, 10} | {10**e for e in range(2, int(math.log10(N)) + 1)} | {N})
        for n in grid:
            if not 1 <= n <= N:
                raise InvalidInput(f"index {n} outside 1..{N}")
            rows.append({"k": k, "n": n, "coefficient": float(vals[n - 1])})
        verdicts["strictly_increasing"] = bool(np.all(np.diff(vals) > 0))
        verdicts["final_value"] = float(vals[-1])
    elif mode == "minimality":
        N = cfg["N"] or (model.dim or 1000)
        rep = uniform_minimality(k, model, N, cfg["n_grid"])
        for n, a, b, c in zip(rep.n_grid, rep.phi_norms, rep.psi_norms, rep.products):
            rows.append({"k": k, "n": n, "phi_norm": a, "psi_norm": b, "product": c})
        verdicts["phi_lower_bound"] = rep.phi_lower_bound
        verdicts["phi_bound_holds"] = min(rep.phi_norms) >= rep.phi_lower_bound - 1e-9
        verdicts["product_growth"] = rep.products[-1] / rep.products[0]
    else:
        N = cfg["N"] or 200
        cert = basis_failure_certificate(k, N, p)
        for M, dist in enumerate(cert.tail_distances, start=1):
            rows.append({"k": k, "p": p, "M": M, "tail_distance": float(dist)})
        verdicts["inf_unit_norm"] = cert.inf_unit_norm
        verdicts["partial_sums_not_cauchy"] = cert.inf_unit_norm > 0
        verdicts["distance_floor"] = float(cert.tail_distances.min())
    emit("nonbasis", cfg, rows, verdicts, cfg["out"], converged=bool(converged))


def _classify(sizes, values):
    """Plateau / divergent / undecided from the last grid step, scaled to one doubling."""
    if len(values) < 2:
        return "undecided"
    growth = (values[-1] / values[-2]) ** (1.0 / math.log2(sizes[-1] / sizes[-2])) - 1.0
    if growth < 0.02:
        return "plateau"
    if growth >= 0.10:
        return "divergent"
    return "undecided"


@main.command()
@click.option("--f", "f", type=SPECTRAL_FN, default="log", show_default=True, help="log, sqrt, loglog or power:ALPHA.")
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--N", "N", type=INT_GRID, default="128,512,2048", show_default=True)
@click.option("--t", "t", type=FLOAT_GRID, default="1", show_default=True)
@click.option("--mode", type=click.Choice(["curve", "growth"]), default="curve", show_default=True)
@click.option("--workers", type=int, default=None, help=f"Worker processes (default: ${WORKERS_ENV} or logical cores).")
@common
@click.pass_context
@_guard
def group(ctx, **params):
    """Section norms of the diagonal group exp(t A_k) conjugated into l_p."""
    cfg = _resolve(ctx, params)
    workers = cfg["workers"] or _default_workers()
    spec = DiffSpaceSpec(cfg["p"], cfg["k"])
    f = cfg["f"]
    verdicts = {}
    if cfg["mode"] == "growth":
        if len(cfg["N"]) != 1:
            raise InvalidInput("growth mode takes a single section size")
        est = growth_bound_estimate(f, spec, cfg["N"][0], cfg["t"], workers=workers)
        rows = [{"f": f.label, "k": spec.k, "p": spec.p, "N": cfg["N"][0], "t_max": cfg["t"][-1], "growth_estimate": est}]
        verdicts["growth_estimate"] = est
        emit("group", cfg, rows, verdicts, cfg["out"])
        return
    curve = group_norm_curve(f, spec, cfg["N"], cfg["t"], workers=workers)
    rows = [
        {"f": f.label, "k": spec.k, "p": spec.p, "N": r.N, "t": r.t, "lower": r.lower, "upper": r.upper, "converged": r.converged}
        for r in curve.rows
    ]
    for t in cfg["t"]:
        at = curve.at(t)
        verdicts[f"t={t:g}"] = _classify([r.N for r in at], [r.lower for r in at])
    emit("group", cfg, rows, verdicts, cfg["out"], converged=all(r.converged for r in curve.rows))


def _spectrum_values(cfg):
    if cfg["values"]:
        data = json.loads(Path(cfg["values"]).read_text())
        if not isinstance(data, list) or not data:
            raise InvalidInput("spectrum values must be a non-empty JSON list")
        if all(isinstance(v, list) and len(v) == 2 for v in data):
            return np.array([complex(a, b) for a, b in data])
        return np.asarray(data, dtype=np.float64)
    n = np.arange(1, cfg["N"] + 1, dtype=np.float64)
    return cfg["f"](n)


@main.command()
@click.option("--f", "f", type=SPECTRAL_FN, default="log", show_default=True)
@click.option("--values", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON list of eigenvalue profile values (overrides --f for gap checks).")
@click.option("--mode", type=click.Choice(["summary", "beta"]), default="summary", show_default=True)
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--N", "N", type=int, default=10**4, show_default=True, help="Truncation for gap checks.")
@click.option("--n-max", "n_max", type=int, default=10**6, show_default=True)
@click.option("--K", "K", type=int, default=5, show_default=True)
@click.option("--delta", "delta_", type=float, default=0.01, show_default=True)
@common
@click.pass_context
@_guard
def spectrum(ctx, **params):
    """Gap, K-set decomposition, S_k membership, geometric condition and rate test."""
    cfg = _resolve(ctx, params)
    f = cfg["f"]
    if cfg["mode"] == "beta":
        rep = sk_membership(f, cfg["k"], cfg["n_max"])
        rows = [
            {"f": f.label, "k": rep.k, "j": j, "n": int(n), "beta": float(b)}
            for j in rep.j_values for n, b in zip(rep.n_grid, rep.beta_table[j])
        ]
        emit("spectrum", cfg, rows, {"sk_verdict": rep.verdict}, cfg["out"])
        return
    lam = _spectrum_values(cfg)
    source = "values" if cfg["values"] else f.label
    gap = uniform_gap(lam, min(cfg["N"], lam.size))
    dec = k_decompose(np.sort(lam.real) if not np.iscomplexobj(lam) else lam, cfg["K"], cfg["delta_"])
    rows = [
        {"check": "uniform_gap", "source": source, "value": gap},
        {"check": f"k_decompose K={cfg['K']} delta={cfg['delta_']:g}", "source": source, "value": dec.decomposable_at_threshold},
    ]
    verdicts = {"uniform_gap": gap, "decomposable": dec.decomposable_at_threshold}
    if not cfg["values"]:
        rep = sk_membership(f, cfg["k"], cfg["n_max"])
        rising, shrinking = geometric_condition(f, cfg["n_max"])
        rate = rate_check(f, cfg["p"], cfg["n_max"])
        for j in rep.j_values:
            rows.append({"check": f"beta_{rep.k},{j} tail sup", "source": source, "value": rep.tail_sup[j]})
        rows += [
            {"check": f"S_{rep.k} membership", "source": source, "value": rep.verdict},
            {"check": "f tends to infinity", "source": source, "value": rising},
            {"check": "adjacent steps vanish", "source": source, "value": shrinking},
            {"check": f"rate n^(-1/{cfg['p']:g})|f(n)|", "source": source, "value": rate},
        ]
        verdicts.update({"sk_verdict": rep.verdict, "geometric_condition": [rising, shrinking], "rate": rate})
    emit("spectrum", cfg, rows, verdicts, cfg["out"])


@main.command("report-all")
@click.option("--out", type=str, required=True, help="Directory for the acceptance tables and manifest.")
@click.option("--only", type=INT_GRID, default=None, help="Subset of criterion numbers.")
@click.option("--workers", type=int, default=None)
def report_all(out, only, workers):
    """Run every acceptance experiment and write a PASS/FAIL manifest."""
    if not out.strip():
        raise InvalidInput("--out must be a non-empty directory path")
    only = only or sorted(acceptance.CRITERIA)
    bad = [n for n in only if n not in acceptance.CRITERIA]
    if bad:
        raise InvalidInput(f"unknown criteria {bad}; valid numbers are 1..{len(acceptance.CRITERIA)}")
    workers = workers or _default_workers()
    d = Path(out)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidInput(f"cannot create {out}: {exc}") from None
    manifest = {"schema_version": SCHEMA_VERSION, "criteria": []}
    for n in only:
        res = acceptance.CRITERIA[n](workers)
        click.echo(res.line, err=True)
        name = f"criterion_{n:02d}"
        (d / f"{name}.csv").write_text(render_csv(res.rows, name), newline="")
        manifest["criteria"].append({
            "number": n, "title": res.title, "status": "PASS" if res.passed else "FAIL",
            "detail": res.detail, "runtime_s": round(res.runtime, 3), "limit_s": res.limit, "table": f"{name}.csv",
        })
    failing = [c["number"] for c in manifest["criteria"] if c["status"] == "FAIL"]
    manifest["status"] = "FAIL" if failing else "PASS"
    manifest["failing"] = failing
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    click.echo(f"manifest: {manifest['status']} ({len(failing)} failing)", err=True)
    sys.exit(EXIT_FAIL if failing else 0)


if __name__ == "__main__":
    main()
