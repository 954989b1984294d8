"""``biosc`` command line: figure data, verification suites, configuration.

Configuration is INI text, one section per parameter set; values may use
``pi`` and ``sqrt(.)``.  Built-in presets live in ``presets/presets.ini``
(overridable with the BIOSC_PRESET_DIR environment variable).

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import csv
import io
import json
import math
import operator
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import coherent, model, spectral, suites
from .model import Grid, ModelParams, ParameterError, SingularityError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_PRESET = "fig5a"
PRESET_FILE = "presets.ini"
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; the message names the file, line and field."""


# ------------------------------------------------------------------ numbers

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi}
_FUNCS = {"sqrt": math.sqrt}


def parse_number(text: str) -> float:
    """Float literal or a small arithmetic expression in pi and sqrt."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return float(ev(ast.parse(text, mode="eval")))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot parse number {text!r}: {exc}") from None


def parse_list(text: str):
    return tuple(parse_number(t) for t in text.split(",") if t.strip())


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class RunConfig:
    name: str
    model: ModelParams
    grid: Grid = model.DEFAULT_GRID
    truncation: int = 30
    w_list: tuple = ()
    eps_list: tuple = ()
    gamma_list: tuple = ()
    r_max: float = 6.0
    r_points: int = 61
    output_format: str = "csv"
    output_path: str = "-"


def preset_path() -> Path:
    d = os.environ.get("BIOSC_PRESET_DIR")
    if d:
        return Path(d) / PRESET_FILE
    return Path(__file__).resolve().parent / "presets" / PRESET_FILE


def _key_lines(text):
    """(section, key) -> 1-based line number of its definition."""
    out, section = {}, configparser.DEFAULTSECT
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in line or ":" in line:
            sep = min(i_ for i_ in (line.find("="), line.find(":")) if i_ >= 0)
            out[(section, line[:sep].strip().lower())] = i
    return out


def _where(src, lines, section, key):
    ln = lines.get((section, key)) or lines.get((configparser.DEFAULTSECT, key))
    return f"{src}:{ln}" if ln else f"{src}:[{section}]"


def _section_config(cp, section, src, lines) -> RunConfig:
    sec = cp[section]

    def num(key, default=None):
        if key not in sec:
            if default is None:
                raise ConfigError(f"{src}:[{section}]: field '{key}': missing")
            return default
        try:
            return parse_number(sec[key])
        except ValueError as exc:
            raise ConfigError(f"{_where(src, lines, section, key)}: field '{key}': {exc}") from None

    def lst(key):
        try:
            return parse_list(sec.get(key, ""))
        except ValueError as exc:
            raise ConfigError(f"{_where(src, lines, section, key)}: field '{key}': {exc}") from None

    def integer(key, default):
        v = num(key, float(default))
        if v != int(v) or v < 1:
            raise ConfigError(f"{_where(src, lines, section, key)}: field '{key}': "
                              f"positive integer required, got {sec[key]!r}")
        return int(v)

    vals = {k: num(k) for k in ("eps", "a", "b", "c")}
    lam = num("lam", float("nan"))
    try:
        if math.isnan(lam):
            p = ModelParams.from_abc(vals["eps"], vals["a"], vals["b"], vals["c"])
        else:
            p = ModelParams(lam=lam, **vals)
    except ParameterError as exc:
        msg = str(exc)
        field = next((k for k in ("eps", "a", "b", "c") if msg.startswith(k + " ")), "lam")
        raise ConfigError(f"{_where(src, lines, section, field)}: field '{field}': {msg}") from None
    try:
        grid = Grid(num("x_min", -10.0), num("x_max", 10.0), integer("n_points", 2001))
    except ValueError as exc:
        raise ConfigError(f"{_where(src, lines, section, 'x_max')}: field 'grid': {exc}") from None
    fmt = sec.get("output_format", "csv").strip()
    if fmt not in FORMATS:
        raise ConfigError(f"{_where(src, lines, section, 'output_format')}: field 'output_format': "
                          f"expected one of {FORMATS}, got {fmt!r}")
    if not model.nodeless_check(p, grid):
        raise ConfigError(f"{_where(src, lines, section, 'a')}: field 'a,b,c': "
                          "alpha has a node on the grid")
    return RunConfig(
        name=section, model=p, grid=grid, truncation=integer("truncation", 30),
        w_list=lst("w_list"), eps_list=lst("eps_list"), gamma_list=lst("gamma_list"),
        r_max=num("r_max", 6.0), r_points=integer("r_points", 61),
        output_format=fmt, output_path=sec.get("output_path", "-").strip() or "-")


def load_configs(path=None, preset=None):
    """RunConfigs from a config file (all sections, or just ``preset``) or the presets."""
    src = Path(path) if path else preset_path()
    try:
        text = src.read_text()
    except OSError as exc:
        raise ConfigError(f"{src}: cannot read ({exc.strerror})") from None
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=str(src))
    except configparser.Error as exc:
        raise ConfigError(f"{src}: {exc}") from None
    lines = _key_lines(text)
    if path is None and preset is None:
        preset = DEFAULT_PRESET
    if preset is not None:
        if not cp.has_section(preset):
            raise ConfigError(f"{src}: no parameter set named {preset!r} "
                              f"(available: {', '.join(cp.sections()) or 'none'})")
        names = [preset]
    else:
        names = cp.sections()
    if not names:
        # a file with only [DEFAULT] is one parameter set
        cp.add_section("default")
        names = ["default"]
    return [_section_config(cp, n, src, lines) for n in names]


# ------------------------------------------------------------------ tables

def _cell(v):
    if isinstance(v, str):
        return v
    return repr(float(v))


def format_table(columns, rows, meta, fmt):
    """CSV with '#' footer metadata, or JSON with every number as a string."""
    if fmt == "json":
        doc = {"columns": list(columns),
               "rows": [[_cell(v) for v in row] for row in rows],
               "meta": {k: _cell(v) for k, v in meta.items()}}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    for k, v in meta.items():
        buf.write(f"# {k}={_cell(v)}\n")
    return buf.getvalue()


def parse_table(text, fmt):
    """Inverse of format_table: (columns, rows of float-or-str, meta of str)."""
    def conv(s):
        try:
            return float(s)
        except ValueError:
            return s

    if fmt == "json":
        doc = json.loads(text)
        return doc["columns"], [[conv(s) for s in row] for row in doc["rows"]], doc["meta"]
    body, meta = [], {}
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    return rows[0], [[conv(s) for s in r] for r in rows[1:]], meta


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _pmap(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


# ------------------------------------------------------------------ commands

def cmd_potential(configs, args):
    grid = configs[0].grid
    if any(c.grid != grid for c in configs):
        raise ConfigError("potential: all parameter sets must share one grid")
    x = grid.x
    multi = len(configs) > 1
    columns, cols, meta = ["x"], [x], {}
    for cfg in configs:
        tag = f":{cfg.name}" if multi else ""
        V = model.on_grid(cfg.model, grid).V
        columns += [f"ReV{tag}", f"ImV{tag}"]
        cols += [V.real, V.imag]
        integral, closed = model.zero_total_area(cfg.model, max(abs(grid.x_min), abs(grid.x_max)))
        meta[f"zero_area_residual{tag}"] = abs(integral)
        meta[f"zero_endpoint_residual{tag}"] = abs(integral - closed)
        for k in ("eps", "lam", "a", "b", "c"):
            meta[f"{k}{tag}"] = getattr(cfg.model, k)
    columns.append("x2")
    cols.append(x * x)
    meta = {"preset": ",".join(c.name for c in configs), **meta}
    rows = np.column_stack(cols).tolist()
    _write(format_table(columns, rows, meta, args.format), args.out)
    return EXIT_OK


def _natural_column(task):
    eps, r = task
    return [coherent.natural_variance(ri, eps)[2] for ri in r]


def _distorted_column(task):
    w, r = task
    return [coherent.distorted_variance(ri, w) for ri in r]


def cmd_coherent(configs, args):
    cfg = configs[0]
    r_max = cfg.r_max if args.r_max is None else args.r_max
    n_r = cfg.r_points if args.r_points is None else args.r_points
    if not (r_max >= 0 and n_r >= 1):
        raise ConfigError("coherent: need r_max >= 0 and r_points >= 1")
    r = np.linspace(0.0, r_max, n_r)
    meta = {"preset": cfg.name, "family": args.family}
    if args.family == "natural":
        params = list(cfg.eps_list) or [cfg.model.eps]
        bad = [e for e in params if not e < 1]
        if bad:
            raise ConfigError(f"coherent: eps must be < 1, got {bad}")
        cols = _pmap(_natural_column, [(e, r) for e in params], args.jobs)
        names = [f"dXdP[eps={e!r}]" for e in params]
    else:
        given = list(cfg.w_list) or [1.0]
        params = [w for w in given if w > 0]
        skipped = [w for w in given if not w > 0]
        if skipped:
            meta["skipped_w"] = " ".join(repr(w) for w in skipped)
        if not params:
            raise ConfigError("coherent: distorted family needs some w > 0")
        cols = _pmap(_distorted_column, [(w, r) for w in params], args.jobs)
        names = [f"dXdP[w={w!r}]" for w in params]
    rows = np.column_stack([r] + [np.asarray(c, dtype=float) for c in cols]).tolist()
    _write(format_table(["r"] + names, rows, meta, args.format), args.out)
    return EXIT_OK


def _limits_row(task):
    gamma, grid = task
    try:
        # gamma -> -gamma mirrors x -> -x, which leaves every sup norm unchanged
        dev = spectral.oscillator_limit_deviation(abs(gamma), 4, grid)
        return list(dev), "ok"
    except (SingularityError, ParameterError, ArithmeticError):
        return [math.nan] * 5, "singular"


def cmd_limits(configs, args):
    cfg = configs[0]
    gammas = parse_list(args.gamma) if args.gamma else (list(cfg.gamma_list) or [2.0, 20.0, 1e6])
    results = _pmap(_limits_row, [(g, cfg.grid) for g in gammas], args.jobs)
    rows = [[g] + dev + [status] for g, (dev, status) in zip(gammas, results)]
    # +gamma and -gamma give identical rows, so compare distinct |gamma| only
    ok = sorted({abs(g): max(d) for g, (d, s) in zip(gammas, results) if s == "ok"}.items())
    monotone = all(b[1] < a[1] for a, b in zip(ok, ok[1:]))
    meta = {"preset": cfg.name, "monotone_decrease": "true" if monotone else "false"}
    columns = ["gamma"] + [f"sup_n{n}" for n in range(5)] + ["status"]
    _write(format_table(columns, rows, meta, args.format), args.out)
    return EXIT_OK


def cmd_verify(configs, args):
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    cases = []
    for cfg in configs:
        for s in names:
            for c in suites.build_cases(s, cfg.model, cfg.grid, cfg.truncation,
                                        cfg.eps_list, cfg.w_list, cfg.gamma_list):
                if len(configs) > 1:
                    c = suites.Case(c.key, f"{cfg.name}:{c.label}", c.fn, c.args, c.tol_key)
                cases.append(c)
    outcomes = suites.run_cases(cases, args.jobs)
    scale = args.tolerance_scale
    results = {}
    for key, oc in outcomes.items():
        results[key] = {
            "residual": repr(oc.value),
            "pass": oc.passed(scale),
            "cases": {lbl: {"residual": repr(v), "tolerance": repr(t * scale)}
                      for lbl, (v, t) in oc.cases.items()},
        }
    passed = all(r["pass"] for r in results.values())
    report = {"suite": args.suite, "presets": [c.name for c in configs],
              "tolerance_scale": repr(scale), "passed": passed, "results": results}
    _write(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_OK if passed else EXIT_FAIL


# ------------------------------------------------------------------ entry point

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with one section per parameter set")
    common.add_argument("--preset", help=f"parameter set name (default {DEFAULT_PRESET})")
    common.add_argument("--format", choices=FORMATS, help="overrides output_format")
    common.add_argument("--out", help="output path, '-' for stdout; overrides output_path")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--tolerance-scale", type=float, default=1.0)

    ap = argparse.ArgumentParser(prog="biosc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("potential", parents=[common], help="Re V, Im V and x^2 on the grid")
    v = sub.add_parser("verify", parents=[common], help="residuals of the named identities")
    v.add_argument("--suite", choices=suites.SUITES + ("all",), default="all")
    c = sub.add_parser("coherent", parents=[common], help="uncertainty products against r")
    c.add_argument("--family", choices=("natural", "distorted"), default="natural")
    c.add_argument("--r-max", type=float)
    c.add_argument("--r-points", type=int)
    lim = sub.add_parser("limits", parents=[common], help="sup |psi_n - phi_n| against gamma")
    lim.add_argument("--gamma", help="comma-separated gamma values")
    return ap


COMMANDS = {"potential": cmd_potential, "verify": cmd_verify,
            "coherent": cmd_coherent, "limits": cmd_limits}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if not args.tolerance_scale > 0:
            raise ConfigError("--tolerance-scale must be > 0")
        configs = load_configs(args.config, args.preset)
        configs = [replace(c, output_format=args.format or c.output_format,
                           output_path=args.out or c.output_path) for c in configs]
        args.format, args.out = configs[0].output_format, configs[0].output_path
        return COMMANDS[args.command](configs, args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except ValueError as exc:  # ConfigError, ParameterError
        print(f"biosc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
