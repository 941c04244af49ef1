"""Command-line entry point.

    lmoments <subcommand> [--config FILE] [--q ...] [--k ...] [--t ...]
             [--h H ... --b B ...] [--window-mode canonical|custom]
             [--window-bounds ...] [--method reference|truncated]
             [--out PATH] [--format csv|json] [--workers N]

Exit codes: 0 success, 1 runtime error, 2 an inequality check failed,
3 unknown config key or flag, 4 invalid value, 5 malformed number,
6 unreadable config file.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import yaml

from . import __version__
from .characters import DEFAULT_Q_MAX, build_modulus, is_prime
from .lfunctions import METHODS, REFERENCE, CriticalPoint, afe_error_profile, l_all
from .mollifier import CANONICAL, CUSTOM, make_params
from .moments import (
    lemma21_check,
    lemma22_check,
    moment,
    normalizer,
    prop24_report,
    prop25_check,
    prop26_check,
    sweep,
)
from .report import render, split_complex
from .twisted import TwistPair, twisted_general, twisted_main

log = logging.getLogger("lmoments")

EXIT_OK, EXIT_RUNTIME, EXIT_VIOLATION = 0, 1, 2
EXIT_UNKNOWN_KEY, EXIT_BAD_VALUE, EXIT_BAD_NUMBER, EXIT_BAD_FILE = 3, 4, 5, 6

SUBCOMMANDS = (
    "moments", "lemma21", "lemma22", "twisted", "twisted-general",
    "prop24", "prop25", "prop26", "afe-profile", "sweep",
)
DEFAULT_CUSTOM_BOUNDS = (7.0,)

COLUMNS = {
    "moments": ["q", "k", "t", "moment", "normalizer", "ratio"],
    "sweep": ["q", "k", "t", "moment", "normalizer", "ratio", "status"],
    "lemma21": ["q", "k", "t", "window_mode", "R", "lhs_re", "lhs_im", "lhs_abs", "rhs",
                "slack_ratio", "holds"],
    "lemma22": ["q", "k", "t", "window_mode", "R", "lhs", "rhs", "constant", "slack_ratio",
                "holds"],
    "twisted": ["q", "t", "h", "b", "lhs_re", "lhs_im", "s1_re", "s1_im", "s2_re", "s2_im",
                "correction_re", "correction_im", "main_re", "main_im", "abs_deviation",
                "rel_deviation", "error_budget"],
    "twisted-general": ["q", "s_re", "s_im", "s_prime_re", "s_prime_im", "h", "b", "lhs_re",
                        "lhs_im", "main_re", "main_im", "abs_deviation", "rel_deviation"],
    "prop24": ["q", "k", "t", "window_mode", "R", "diagonal", "phi_star", "diagonal_ratio",
               "lhs_re", "lhs_im", "offdiag_re", "offdiag_im"],
    "prop25": ["q", "k", "t", "window_mode", "v", "ell_next", "direct", "reference_scale",
               "ratio", "coef_sum", "max_abs_u", "log_scale", "s1_re", "s1_im", "s2_re",
               "s2_im", "correction_re", "correction_im", "predicted_re", "predicted_im"],
    "prop26": ["q", "k", "t", "window_mode", "R", "product_sum", "v_sum", "normalizer",
               "product_ratio", "v_sum_ratio"],
    "afe-profile": ["q", "t", "X", "median_error", "empirical_constant", "slope"],
}


class ConfigError(Exception):
    def __init__(self, code: int, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.code = code
        self.key = key


@dataclass
class RunConfig:
    subcommand: str
    q: list[int] = field(default_factory=lambda: [101])
    k: list[float] = field(default_factory=lambda: [0.5])
    t: list[float] = field(default_factory=lambda: [0.0])
    h: list[int] = field(default_factory=lambda: [1])
    b: list[int] = field(default_factory=lambda: [1])
    N: int = 2
    M: int = 1
    window_mode: str = CANONICAL
    window_bounds: list[float] | None = None
    ell: list[int] | None = None
    method: str = REFERENCE
    X: float | None = None
    v: list[int] | None = None
    sigma: float = 0.6
    sigma_prime: float = 0.55
    t_prime: list[float] | None = None
    x_grid: list[float] | None = None
    constant: float = 1.0
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    @property
    def pairs(self) -> list[TwistPair]:
        return [TwistPair(h, b) for h, b in zip(self.h, self.b)]

    def resolved(self) -> dict:
        return {f.name.replace("_", "-"): getattr(self, f.name) for f in dataclasses.fields(self)}


# key -> (kind, is_list); kinds: int, float, str
_KEYS: dict[str, tuple[str, bool]] = {
    "subcommand": ("str", False),
    "q": ("int", True), "k": ("float", True), "t": ("float", True),
    "h": ("int", True), "b": ("int", True),
    "N": ("int", False), "M": ("int", False),
    "window-mode": ("str", False), "window-bounds": ("float", True), "ell": ("int", True),
    "method": ("str", False), "X": ("float", False), "v": ("int", True),
    "sigma": ("float", False), "sigma-prime": ("float", False), "t-prime": ("float", True),
    "x-grid": ("float", True), "constant": ("float", False),
    "out": ("str", False), "format": ("str", False), "workers": ("int", False),
}


def _convert(key: str, raw: Any) -> Any:
    kind, is_list = _KEYS[key]
    items = raw if isinstance(raw, list) else [raw]
    if not is_list and len(items) != 1:
        raise ConfigError(EXIT_BAD_VALUE, key, "expects a single value")
    out = []
    for item in items:
        try:
            if kind == "int":
                if isinstance(item, bool) or (isinstance(item, float) and not item.is_integer()):
                    raise ValueError
                value = int(item) if not isinstance(item, str) else int(item.strip())
            elif kind == "float":
                if isinstance(item, bool):
                    raise ValueError
                value = float(item)
                if math.isnan(value):
                    raise ValueError
            else:
                value = str(item)
        except (TypeError, ValueError):
            raise ConfigError(EXIT_BAD_NUMBER, key, f"malformed {kind} {item!r}") from None
        out.append(value)
    return out if is_list else out[0]


def _load_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(EXIT_BAD_FILE, "config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(EXIT_BAD_FILE, "config", f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(EXIT_BAD_FILE, "config", "top level must be a key/value mapping")
    return data


def _normalize_key(key: str) -> str:
    key = str(key).replace("_", "-")
    return {"n": "N", "m": "M", "x": "X"}.get(key, key) if key not in _KEYS else key


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(EXIT_UNKNOWN_KEY, "arguments", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lmoments", description="Moments of Dirichlet L-functions mod a prime.")
    p.add_argument("subcommand", nargs="?", help=" | ".join(SUBCOMMANDS))
    p.add_argument("--config", help="YAML file with the same keys as the flags")
    p.add_argument("--version", action="version", version=f"lmoments {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    for key, (kind, is_list) in _KEYS.items():
        if key == "subcommand":
            continue
        p.add_argument(f"--{key}", dest=key, nargs="+" if is_list else None, default=None)
    return p


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """Merge the config file (if any) with flags; flags win."""
    args = build_parser().parse_args(argv)
    values: dict[str, Any] = {}
    if args.config:
        for key, raw in _load_file(args.config).items():
            nk = _normalize_key(key)
            if nk not in _KEYS:
                raise ConfigError(EXIT_UNKNOWN_KEY, str(key), "unknown config key")
            values[nk] = _convert(nk, raw)
    if args.subcommand is not None:
        values["subcommand"] = args.subcommand
    for key in _KEYS:
        raw = getattr(args, key, None) if key != "subcommand" else None
        if raw is not None:
            values[key] = _convert(key, raw)
    if "subcommand" not in values:
        raise ConfigError(EXIT_BAD_VALUE, "subcommand", "missing subcommand")
    cfg = RunConfig(**{k.replace("-", "_"): v for k, v in values.items()})
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    def bad(key, msg):
        raise ConfigError(EXIT_BAD_VALUE, key, msg)

    if cfg.subcommand not in SUBCOMMANDS:
        bad("subcommand", f"unknown subcommand {cfg.subcommand!r}")
    if not cfg.q:
        bad("q", "needs at least one modulus")
    for q in cfg.q:
        if not is_prime(q):
            bad("q", f"q must be prime (got {q})")
        if q < 5:
            bad("q", f"q must be at least 5 (got {q})")
        if q > DEFAULT_Q_MAX:
            bad("q", f"q={q} exceeds the table cap {DEFAULT_Q_MAX}")
    if cfg.format not in ("csv", "json"):
        bad("format", "must be csv or json")
    if cfg.method not in METHODS:
        bad("method", f"must be one of {', '.join(METHODS)}")
    if cfg.window_mode not in (CANONICAL, CUSTOM):
        bad("window-mode", "must be canonical or custom")
    if cfg.workers < 1:
        bad("workers", "must be >= 1")
    if cfg.N < 1 or cfg.M < 1:
        bad("N" if cfg.N < 1 else "M", "must be a positive integer")
    if cfg.X is not None and cfg.X < 1:
        bad("X", "must be >= 1")
    if any(k < 0 for k in cfg.k):
        bad("k", "must be non-negative")
    sub = cfg.subcommand
    if sub in ("lemma21", "prop24", "prop26"):
        if any(k == 0 or k == 1 for k in cfg.k):
            bad("k", "k must differ from 0 and 1 for mollifier checks")
    if sub in ("lemma22", "prop25"):
        if any(not 0 < k < 1 for k in cfg.k):
            bad("k", "requires 0 < k < 1")
    if sub in ("twisted", "twisted-general"):
        if len(cfg.h) != len(cfg.b):
            bad("h", "h and b lists must have equal length")
        try:
            pairs = cfg.pairs
        except ValueError as exc:
            bad("h", str(exc))
        for pair in pairs:
            for q in cfg.q:
                if (pair.h * pair.b) % q == 0:
                    bad("h", f"q={q} divides h*b for (h, b)=({pair.h}, {pair.b})")
    if sub == "twisted-general":
        for key, val in (("sigma", cfg.sigma), ("sigma-prime", cfg.sigma_prime)):
            if not 0 < val < 1:
                bad(key, "must lie in (0, 1)")
    if cfg.x_grid is not None and any(b <= a for a, b in zip(cfg.x_grid, cfg.x_grid[1:])):
        bad("x-grid", "must be strictly ascending")


# ---------------------------------------------------------------------------
# Per-modulus jobs.  Each returns the rows for one q, in input order.

def _params(cfg: RunConfig, k: float, q: int):
    bounds = None
    if cfg.window_mode == CUSTOM:
        bounds = cfg.window_bounds or list(DEFAULT_CUSTOM_BOUNDS)
    return make_params(k, q, N=cfg.N, M=cfg.M, window_mode=cfg.window_mode,
                       bounds=bounds, ell=cfg.ell)


def _lvectors(cfg, mod):
    return {t: l_all(mod, CriticalPoint(t), cfg.method, cfg.X) for t in cfg.t}


def _job_moments(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    lv = _lvectors(cfg, mod)
    rows = []
    for k in cfg.k:
        for t in cfg.t:
            m = moment(mod, t, k, lvec=lv[t])
            nz = normalizer(q, k)
            rows.append({"q": q, "k": k, "t": t, "moment": m, "normalizer": nz, "ratio": m / nz})
    return rows


def _job_lemma(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    lv = _lvectors(cfg, mod)
    rows = []
    for k in cfg.k:
        params = _params(cfg, k, q)
        for t in cfg.t:
            base = {"q": q, "k": k, "t": t, "window_mode": cfg.window_mode, "R": params.R}
            if cfg.subcommand == "lemma21":
                r = lemma21_check(mod, t, k, params, lvec=lv[t])
                base.update(split_complex("lhs", r.lhs))
                base.update(lhs_abs=r.lhs_abs)
            else:
                r = lemma22_check(mod, t, k, params, lvec=lv[t], constant=cfg.constant)
                base.update(lhs=r.lhs.real, constant=r.constant)
            base.update(rhs=r.rhs, slack_ratio=r.slack_ratio, holds=r.holds)
            rows.append(base)
    return rows


def _job_twisted(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    lv = _lvectors(cfg, mod)
    rows = []
    for t in cfg.t:
        for pair in cfg.pairs:
            r = twisted_main(mod, t, pair, lvec=lv[t])
            row = {"q": q, "t": t, "h": pair.h, "b": pair.b}
            row.update(split_complex("lhs", r.lhs))
            row.update(split_complex("s1", r.s1_term))
            row.update(split_complex("s2", r.s2_term))
            row.update(split_complex("correction", r.correction_term))
            row.update(split_complex("main", r.main_total))
            row.update(abs_deviation=r.abs_deviation, rel_deviation=r.rel_deviation,
                       error_budget=r.error_budget)
            rows.append(row)
    return rows


def _job_twisted_general(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    rows = []
    for t in cfg.t:
        t_primes = cfg.t_prime if cfg.t_prime is not None else [-t]
        for tp in t_primes:
            s = complex(cfg.sigma, t)
            sp = complex(cfg.sigma_prime, tp)
            for pair in cfg.pairs:
                lhs, main = twisted_general(mod, s, sp, pair, cfg.method)
                row = {"q": q, "h": pair.h, "b": pair.b}
                row.update(split_complex("s", s))
                row.update(split_complex("s_prime", sp))
                row.update(split_complex("lhs", lhs))
                row.update(split_complex("main", main))
                dev = abs(lhs - main)
                row.update(abs_deviation=dev, rel_deviation=dev / abs(main))
                rows.append(row)
    return rows


def _job_props(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    lv = _lvectors(cfg, mod)
    rows = []
    for k in cfg.k:
        params = _params(cfg, k, q)
        for t in cfg.t:
            base = {"q": q, "k": k, "t": t, "window_mode": cfg.window_mode}
            if cfg.subcommand == "prop24":
                r = prop24_report(mod, t, k, params, lvec=lv[t])
                row = dict(base, R=params.R, diagonal=r.diagonal, phi_star=q - 2,
                           diagonal_ratio=r.diagonal / (q - 2))
                row.update(split_complex("lhs", r.lhs))
                row.update(split_complex("offdiag", r.off_diagonal))
                rows.append(row)
            elif cfg.subcommand == "prop26":
                r = prop26_check(mod, t, k, params)
                rows.append(dict(base, R=params.R, product_sum=r.product_sum, v_sum=r.v_sum,
                                 normalizer=r.normalizer, product_ratio=r.product_ratio,
                                 v_sum_ratio=r.v_sum_ratio))
            else:
                vs = cfg.v if cfg.v is not None else range(params.R + 1)
                for v in vs:
                    r = prop25_check(mod, t, k, params, v, lvec=lv[t])
                    row = dict(base, v=v, ell_next=r.ell_next, direct=r.direct,
                               reference_scale=r.reference_scale, ratio=r.ratio,
                               coef_sum=r.coef_sum, max_abs_u=r.max_abs_u,
                               log_scale=r.log_scale)
                    row.update(split_complex("s1", r.s1_part))
                    row.update(split_complex("s2", r.s2_part))
                    row.update(split_complex("correction", r.correction_part))
                    row.update(split_complex("predicted", r.predicted))
                    rows.append(row)
    return rows


def _job_afe(cfg: RunConfig, q: int) -> list[dict]:
    mod = build_modulus(q)
    grid = cfg.x_grid if cfg.x_grid is not None else [q * f for f in (1, 4, 16, 64)]
    rows = []
    for t in cfg.t:
        prof = afe_error_profile(mod, CriticalPoint(t), grid)
        for (X, err), c in zip(prof.rows, prof.constants):
            rows.append({"q": q, "t": t, "X": X, "median_error": err,
                         "empirical_constant": c, "slope": prof.slope})
    return rows


_JOBS: dict[str, Callable[[RunConfig, int], list[dict]]] = {
    "moments": _job_moments,
    "lemma21": _job_lemma,
    "lemma22": _job_lemma,
    "twisted": _job_twisted,
    "twisted-general": _job_twisted_general,
    "prop24": _job_props,
    "prop25": _job_props,
    "prop26": _job_props,
    "afe-profile": _job_afe,
}


def _run_job(args):
    cfg, q = args
    return _JOBS[cfg.subcommand](cfg, q)


def compute_rows(cfg: RunConfig) -> list[dict]:
    if cfg.subcommand == "sweep":
        return [dataclasses.asdict(r) for r in sweep(cfg.q, cfg.k, cfg.t, cfg.method, cfg.workers)]
    jobs = [(cfg, q) for q in cfg.q]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            chunks = list(ex.map(_run_job, jobs))
    else:
        chunks = [_run_job(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def run(cfg: RunConfig) -> int:
    """Compute the report, write it, and return the exit code."""
    try:
        rows = compute_rows(cfg)
    except Exception as exc:
        log.error("run failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    metadata = {"tool": "lmoments", "version": __version__, "config": cfg.resolved()}
    text = render(cfg.format, COLUMNS[cfg.subcommand], rows, metadata)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_RUNTIME
    if any(row.get("holds") is False for row in rows):
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
