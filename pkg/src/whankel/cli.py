"""``whankel`` command line: transforms, windowed fields and the verification suite.

Configuration is a TOML file; a handful of flags override it::

    alpha = 0.0
    seed = 0
    [grid]        # time/frequency axis
    domain_max = 12.0
    panels = 64
    points_per_panel = 8
    [s_axis]      # frequency axis of the product grid
    domain_max = 12.0
    panels = 8
    points_per_panel = 4
    [signal]
    builtin = "gaussian"   # or "laguerre" (n, scale), "raised_cosine", "zero"
    width = 1.0
    [window]
    file = "window.csv"    # t,value samples
    [output]
    dir = "out"
    formats = ["json", "csv"]
    [[suite]]
    name = "heisenberg"
    c = 1
    d = 1

Exit codes: 0 success (vacuous checks included), 1 configuration error,
2 I/O error, 3 a check failed.
"""
from __future__ import annotations

import argparse
import copy
import sys
from pathlib import Path

import numpy as np
import tomli

from . import __version__
from .grid import build_radial_grid, ProductGrid, lp_norm, read_signal_csv, write_signal_csv, RadialSignal
from .hankel import hankel_forward, hankel_inverse, make_plan, parseval_residual
from .report import VACUOUS, compare, format_float, reports_to_csv, reports_to_json
from .signals import KINDS, SignalSpec
from .specfun import HankelOrder
from .suite import CHECKS, DEFAULT_SUITE, SUITE_ALPHAS, CheckContext, random_suite, run_suite
from .uncertainty import dispersion, dispersion_count_check, onb_sequence, shapiro_check
from .windowed import plancherel_residual, wht_fields, write_field_csv, write_field_json

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3
RESIDUAL_TOL = 1e-6
FORMATS = ("json", "csv")

DEFAULTS = {
    "alpha": 0.0,
    "seed": 0,
    "grid": {"domain_max": 12.0, "panels": 64, "points_per_panel": 8},
    "s_axis": {"domain_max": 12.0, "panels": 8, "points_per_panel": 4},
    "signal": {"builtin": "gaussian", "width": 1.0},
    "window": {"builtin": "gaussian", "width": 1.0},
    "output": {"dir": "whankel-out", "formats": ["json", "csv"]},
    "dispersion": {"p": [1.0, 2.0], "N": 4},
}


class ConfigError(ValueError):
    pass


class InputError(OSError):
    pass


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("signal", "window"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path=None, overrides=None) -> dict:
    """Defaults, then the TOML file, then flag overrides. Relative file paths are resolved against the config's folder."""
    cfg = copy.deepcopy(DEFAULTS)
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            with path.open("rb") as fh:
                doc = tomli.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        cfg = _merge(cfg, doc)
        base = path.parent
    ov = overrides or {}
    if ov.get("alpha") is not None:
        cfg["alpha"] = ov["alpha"]
    if ov.get("seed") is not None:
        cfg["seed"] = ov["seed"]
    if ov.get("domain_max") is not None:
        cfg["grid"]["domain_max"] = ov["domain_max"]
    if ov.get("grid_n") is not None:
        ppp = int(cfg["grid"]["points_per_panel"])
        if ov["grid_n"] <= 0 or ov["grid_n"] % ppp:
            raise ConfigError(f"--grid-n must be a positive multiple of points_per_panel={ppp}")
        cfg["grid"]["panels"] = ov["grid_n"] // ppp
    if ov.get("out") is not None:
        cfg["output"]["dir"] = ov["out"]
    for key in ("signal", "window"):
        if "file" in cfg[key]:
            cfg[key]["file"] = str((base / cfg[key]["file"]) if not Path(cfg[key]["file"]).is_absolute() else cfg[key]["file"])
    validate(cfg)
    return cfg


def _positive_int(section, key, value):
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ConfigError(f"{section}.{key} must be a positive integer, got {value!r}")


def validate(cfg: dict):
    try:
        HankelOrder(cfg["alpha"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid alpha: {exc}") from exc
    if isinstance(cfg["seed"], bool) or not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    for sec in ("grid", "s_axis"):
        g = cfg[sec]
        unknown = set(g) - {"domain_max", "panels", "points_per_panel"}
        if unknown:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(unknown)}")
        _positive_int(sec, "panels", g["panels"])
        _positive_int(sec, "points_per_panel", g["points_per_panel"])
        if not float(g["domain_max"]) > 0:
            raise ConfigError(f"{sec}.domain_max must be positive")
    for sec in ("signal", "window"):
        s = cfg[sec]
        if ("file" in s) == ("builtin" in s):
            raise ConfigError(f"[{sec}] needs exactly one of 'builtin' or 'file'")
        if "builtin" in s and s["builtin"] not in KINDS:
            raise ConfigError(f"[{sec}] builtin must be one of {list(KINDS)}, got {s['builtin']!r}")
    fmts = cfg["output"].get("formats", [])
    bad = [f for f in fmts if f not in FORMATS]
    if bad or not fmts:
        raise ConfigError(f"output.formats must be a non-empty subset of {list(FORMATS)}")
    suite = cfg.get("suite")
    if suite is not None:
        if not isinstance(suite, list) or not suite or not all(isinstance(e, dict) and "name" in e for e in suite):
            raise ConfigError("suite must be a non-empty list of tables with a 'name'")
        unknown = [e["name"] for e in suite if e["name"] not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown check(s) {unknown}; registered checks: {', '.join(sorted(CHECKS))}")
    rnd = cfg.get("random")
    if rnd is not None:
        _positive_int("random", "count", rnd.get("count", 50))


def build_plan(cfg: dict):
    g = cfg["grid"]
    tg = build_radial_grid(cfg["alpha"], float(g["domain_max"]), g["panels"], g["points_per_panel"])
    plan = make_plan(tg)
    s = cfg["s_axis"]
    sg = build_radial_grid(cfg["alpha"], float(s["domain_max"]), s["panels"], s["points_per_panel"])
    return plan, ProductGrid(tg, sg)


def load_signal(section: dict, grid) -> RadialSignal:
    if "file" in section:
        try:
            return read_signal_csv(section["file"], grid)
        except (OSError, UnicodeDecodeError, ValueError) as exc:
            raise InputError(f"cannot read signal file {section['file']}: {exc}") from exc
    params = {k: v for k, v in section.items() if k != "builtin"}
    try:
        return SignalSpec(section["builtin"], params).sample(grid)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad builtin signal {section}: {exc}") from exc


def _emit(cfg: dict, stem: str, reports) -> Path:
    out = Path(cfg["output"]["dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        if "json" in cfg["output"]["formats"]:
            (out / f"{stem}.json").write_text(
                reports_to_json(reports, version=__version__, config_echo=cfg, seed=cfg["seed"]), encoding="utf-8")
        if "csv" in cfg["output"]["formats"]:
            (out / f"{stem}.csv").write_text(reports_to_csv(reports), encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    return out


def _status(reports) -> int:
    failed = [r for r in reports if not r.passed and r.status != VACUOUS]
    return EXIT_CHECK if failed else EXIT_OK


def run_transform(cfg: dict) -> int:
    """Forward transform CSV plus round-trip and Parseval residual reports."""
    plan, _ = build_plan(cfg)
    f = load_signal(cfg["signal"], plan.time_grid)
    F = hankel_forward(plan, f)
    back = hankel_inverse(plan, F)
    scale = float(np.abs(f.values).max())
    err = float(np.abs(back.values - f.values).max()) / scale if scale > 0 else 0.0
    reports = [
        compare("roundtrip_residual", err, RESIDUAL_TOL, "<=", rtol=0.0, atol=0.0, params={"alpha": plan.alpha}),
        compare("parseval_residual", parseval_residual(plan, f, f), RESIDUAL_TOL, "<=", rtol=0.0, atol=0.0,
                params={"alpha": plan.alpha}, diagnostics={"signal_norm": lp_norm(plan.time_grid, f)}),
    ]
    out = _emit(cfg, "transform", reports)
    try:
        write_signal_csv(out / "transform_values.csv", F)
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    return _status(reports)


def _field(cfg):
    plan, product = build_plan(cfg)
    f = load_signal(cfg["signal"], plan.time_grid)
    g = load_signal(cfg["window"], plan.time_grid)
    if lp_norm(plan.time_grid, g) == 0:
        raise ConfigError("window must be nonzero")
    return plan, product, f, g, wht_fields(plan, product, [f], [g])[0][0]


def run_windowed(cfg: dict) -> int:
    """Field CSV/JSON; the reported check is the sup bound |W| <= ||f|| ||g||."""
    plan, product, f, g, fld = _field(cfg)
    bound = fld.signal_norm * fld.window_norm
    rep = compare("sup_bound", fld.sup(), bound, "<=", params={"alpha": plan.alpha, "grid": list(product.shape)},
                  diagnostics={"plancherel_residual": plancherel_residual(fld), "field_norm": fld.l2_norm()})
    out = _emit(cfg, "windowed", [rep])
    try:
        write_field_csv(out / "field.csv", fld)
        write_field_json(out / "field.json", fld, version=__version__)
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    return _status([rep])


def run_verify(cfg: dict) -> int:
    """Configured (or default) suite on the signal/window pair, plus the randomized suite when ``[random]`` is set."""
    plan, product = build_plan(cfg)
    f = load_signal(cfg["signal"], plan.time_grid)
    g = load_signal(cfg["window"], plan.time_grid)
    if lp_norm(plan.time_grid, g) == 0:
        raise ConfigError("window must be nonzero")
    suite = cfg.get("suite") or [dict(e) for e in DEFAULT_SUITE]
    reports = run_suite(CheckContext(plan, product, f, g, seed=cfg["seed"]), suite)
    rnd = cfg.get("random")
    if rnd is not None:
        reports += random_suite(rnd.get("alphas", list(SUITE_ALPHAS)), int(rnd.get("count", 50)), cfg["seed"],
                                grid_kwargs=dict(cfg["grid"]),
                                product_kwargs={"s_domain_max": cfg["s_axis"]["domain_max"],
                                                "s_panels": cfg["s_axis"]["panels"],
                                                "s_points": cfg["s_axis"]["points_per_panel"]})
    _emit(cfg, "verify", reports)
    return _status(reports)


def run_dispersion(cfg: dict) -> int:
    """Dispersions of W_g(f) and the dispersion checks on a Laguerre family under the unit window."""
    plan, product, f, g, fld = _field(cfg)
    disp = cfg["dispersion"]
    ps = [float(p) for p in np.atleast_1d(disp.get("p", [1.0, 2.0]))]
    n = int(disp.get("N", 4))
    phis = onb_sequence(plan.time_grid, n)
    fields = [row[0] for row in wht_fields(plan, product, phis, [g.values / lp_norm(plan.time_grid, g)])]
    reports = []
    rows = ["p,rho_p,rho_k_p,rho_s_p"]
    for p in ps:
        d = dispersion(fld, p)
        rows.append(",".join(format_float(x) for x in (d.p, d.rho_p, d.rho_k_p, d.rho_s_p)))
        sh = shapiro_check(plan, product, g, phis, p, fields=fields)
        sh.diagnostics["signal_dispersion"] = {"rho_p": d.rho_p, "rho_k_p": d.rho_k_p, "rho_s_p": d.rho_s_p}
        reports += [sh, dispersion_count_check(fields, p)]
    out = _emit(cfg, "dispersion", reports)
    try:
        (out / "dispersion_values.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    return _status(reports)


COMMANDS = {"transform": run_transform, "windowed": run_windowed, "verify": run_verify, "dispersion": run_dispersion}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="whankel", description="Windowed Hankel transform and uncertainty-inequality checks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        p.add_argument("--config", "-c", help="TOML configuration file")
        p.add_argument("--alpha", type=float, help="Hankel order (alpha >= -1/2)")
        p.add_argument("--grid-n", type=int, help="total nodes on the time axis")
        p.add_argument("--domain-max", type=float, help="truncation radius T of the time axis")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, vars(args))
        code = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"whankel: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"whankel: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_CHECK:
        print("whankel: at least one check failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
