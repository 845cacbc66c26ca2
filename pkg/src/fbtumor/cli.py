"""Batch front end.

Subcommands ``stationary``, ``stability``, ``modes``, ``evolve`` and
``verify`` read a flat ``key = value`` configuration with dotted section
prefixes and write CSV or JSON artifacts.  Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bessel import SeriesConfig, verify_identities
from .errors import DomainError, FBTumorError, InvariantViolation
from .perturbation import (
    classify,
    first_order_coefficients,
    growth_rate,
    make_mode,
    mode_threshold,
    mu_star,
    rho1_trajectory,
    stability_bracket,
)
from .radial_sim import SimConfig, run_to_steady
from .stationary import (
    A_coefficient,
    B_coefficient,
    FixedPointConfig,
    ModelParams,
    build_zeroth,
    compute_tau_expansion,
    fixed_point_solve,
    solve_R0,
)

log = logging.getLogger("fbtumor")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 2, 3, 4


class ConfigError(FBTumorError):
    """Malformed or unknown configuration entry."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def _float(text):
    return float(text)


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError("not an integer")
    return int(v)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean")


def _floats(text):
    """Comma list ``a, b, c`` or linspace ``start:stop:count``; may be empty."""
    t = text.strip()
    if not t:
        return []
    if ":" in t:
        a, b, n = t.split(":")
        return [float(v) for v in np.linspace(float(a), float(b), _int(n))]
    return [float(v) for v in t.split(",")]


def _ints(text):
    t = text.strip()
    if not t:
        return []
    if ":" in t:
        a, b = t.split(":")
        return list(range(_int(a), _int(b) + 1))
    return [_int(v) for v in t.split(",")]


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {options}")
        return t
    return parse


# key -> (parser, default)
SCHEMA = {
    "model.mu": (_float, 1.0),
    "model.sigma_tilde": (_float, 0.5),
    "model.tau": (_float, 0.0),
    "series.max_terms": (_int, 200),
    "series.term_tolerance": (_float, 1e-16),
    "series.argument_cap": (_float, 30.0),
    "sweep.mu": (_floats, None),
    "sweep.sigma_tilde": (_floats, None),
    "sweep.tau": (_floats, None),
    "sweep.n": (_ints, None),
    "stationary.grid_size": (_int, 256),
    "stationary.max_iter": (_int, 60),
    "stationary.tol": (_float, 1e-13),
    "stationary.profile_points": (_int, 129),
    "stability.n_max": (_int, 16),
    "stability.mu_over_mu_star": (_floats, [0.5, 0.9, 1.1, 2.0]),
    "modes.t_end": (_float, 20.0),
    "modes.dt": (_float, 0.0),
    "modes.rho0_init": (_float, 1.0),
    "modes.rho1_init": (_float, 0.0),
    "modes.forcing": (_bool, True),
    "modes.grid_size": (_int, 400),
    "evolve.R_init_factor": (_floats, [1.2]),
    "evolve.dt": (_float, 0.0),
    "evolve.t_end": (_float, 300.0),
    "evolve.variant": (_choice("full_delay", "dropped_Otau"), "full_delay"),
    "evolve.characteristic_substeps": (_int, 8),
    "evolve.grid_size": (_int, 128),
    "evolve.steady_tol": (_float, 1e-8),
    "verify.x_grid": (_floats, None),
    "verify.x_min": (_float, 0.05),
    "verify.x_max": (_float, 10.0),
    "verify.points": (_int, 200),
    "verify.n_max": (_int, 8),
    "verify.mu_values": (_floats, [0.1, 0.5, 1.0, 2.0, 5.0]),
    "verify.inject_fault": (_choice("none", "A_sign"), "none"),
    "output.dir": (str, "."),
    "output.format": (_choice("csv", "json"), "csv"),
}

_POSITIVE = {
    "series.term_tolerance", "series.argument_cap", "stationary.tol", "modes.t_end",
    "evolve.t_end", "evolve.steady_tol", "verify.x_max",
}


@dataclass
class RunConfig:
    """Parsed configuration with every key of :data:`SCHEMA` resolved."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def series(self) -> SeriesConfig:
        return SeriesConfig(self["series.max_terms"], self["series.term_tolerance"], self["series.argument_cap"])

    @property
    def params(self) -> ModelParams:
        return ModelParams(self["model.mu"], self["model.sigma_tilde"], self["model.tau"])

    def axis(self, name: str) -> list:
        """Sweep values for ``name`` or the single model value."""
        sw = self[f"sweep.{name}"]
        return list(sw) if sw is not None else [self[f"model.{name}"]]


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key '{key}'")
        if key in raw:
            raise ConfigError(f"duplicate config key '{key}'")
        raw[key] = value
    values = {k: default for k, (_, default) in SCHEMA.items()}
    for key, value in raw.items():
        parser = SCHEMA[key][0]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for '{key}': {value!r} ({exc})") from None
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    _validate(values)
    return RunConfig(values)


def _validate(values):
    for key in _POSITIVE:
        if not values[key] > 0:
            raise ConfigError(f"'{key}' must be positive")
    for key in ("sweep.mu", "sweep.sigma_tilde", "sweep.tau", "sweep.n"):
        seq = values[key]
        if seq is None:
            continue
        if not seq:
            raise ConfigError(f"'{key}' must not be empty")
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise ConfigError(f"'{key}' must be strictly increasing")
    if values["stability.n_max"] < 2:
        raise ConfigError("'stability.n_max' must be >= 2")
    if values["modes.dt"] < 0 or values["evolve.dt"] < 0:
        raise ConfigError("time steps must be non-negative (0 selects the default)")
    try:
        ModelParams(values["model.mu"], values["model.sigma_tilde"], values["model.tau"])
        SeriesConfig(values["series.max_terms"], values["series.term_tolerance"], values["series.argument_cap"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if not math.isfinite(v) else v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _json_rows(header, rows):
    out = []
    for row in rows:
        d = {}
        for k, v in zip(header, row):
            d[k] = _json_value(v)
            if isinstance(v, (float, np.floating)) and math.isinf(v):
                d["infinite"] = True
        out.append(d)
    return out


class Writer:
    """Deterministic artifact writer (LF line endings, repr floats)."""

    def __init__(self, directory: str, fmt: str):
        self.dir = directory
        self.fmt = fmt
        os.makedirs(directory, exist_ok=True)
        self.written = []

    def _path(self, name):
        return os.path.join(self.dir, name)

    def table(self, name: str, header, rows):
        if self.fmt == "csv":
            lines = [",".join(header)] + [",".join(_fmt(v) for v in row) for row in rows]
            text = "\n".join(lines) + "\n"
            path = self._path(name + ".csv")
        else:
            text = json.dumps(_json_rows(header, rows), indent=1, sort_keys=False) + "\n"
            path = self._path(name + ".json")
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.written.append(path)
        return path


def _map(fn, items, jobs):
    """Ordered map, optionally over a process pool."""
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _stationary_point(args):
    mu, st, tau, fp_cfg, sc = args
    p = ModelParams(mu, st, tau)
    z = build_zeroth(p, sc)
    te = compute_tau_expansion(p, z)
    fp = fixed_point_solve(p, cfg=fp_cfg)
    return p, z, te, fp


def cmd_stationary(cfg: RunConfig, out: Writer, jobs: int = 1) -> int:
    sc = cfg.series
    fp_cfg = FixedPointConfig(grid_size=cfg["stationary.grid_size"], max_iter=cfg["stationary.max_iter"],
                              tol=cfg["stationary.tol"], series=sc)
    points = sorted((mu, st, tau) for mu in cfg.axis("mu") for st in cfg.axis("sigma_tilde")
                    for tau in cfg.axis("tau"))
    results = _map(_stationary_point, [(mu, st, tau, fp_cfg, sc) for mu, st, tau in points], jobs)
    rows, rich = [], []
    for i, (p, z, te, fp) in enumerate(results):
        gap = fp.R_star - te.radius(p.tau)
        rows.append([i, p.mu, p.sigma_tilde, p.tau, z.R0, te.R1, fp.R_star, te.radius(p.tau), gap,
                     fp.iterations, fp.contraction_estimate])
        m = cfg["stationary.profile_points"]
        r = np.linspace(0.0, fp.R_star, m)
        p_star = fp.p_grid(r / fp.R_star) / fp.R_star
        r0 = np.linspace(0.0, z.R0, m)
        out.table(f"profile_{i:03d}", ["r", "p_star", "r0", "p0", "sigma0"],
                  zip(r, p_star, r0, z.p0(r0), z.sigma0(r0)))
    # Richardson table: successive tau values at fixed (mu, sigma_tilde)
    by_case = {}
    for row in rows:
        by_case.setdefault((row[1], row[2]), []).append(row)
    for (mu, st), grp in sorted(by_case.items()):
        grp.sort(key=lambda r: r[3])
        for a, b in zip(grp, grp[1:]):
            # gap(tau) / gap(smaller tau); tends to 4 under halving
            ratio = b[8] / a[8] if a[8] != 0 else math.nan
            rich.append([mu, st, b[3], a[3], b[8], a[8], ratio])
    out.table("stationary", ["index", "mu", "sigma_tilde", "tau", "R0", "R1", "R_star", "R_linear",
                             "gap", "iterations", "contraction_estimate"], rows)
    out.table("richardson", ["mu", "sigma_tilde", "tau", "tau_prev", "gap", "gap_prev", "ratio"], rich)
    for row in rows:
        print(f"mu={row[1]:g} sigma_tilde={row[2]:g} tau={row[3]:g}: R0={row[4]:.12g} "
              f"R1={row[5]:.12g} R*={row[6]:.12g}")
    return EXIT_OK


def cmd_stability(cfg: RunConfig, out: Writer, jobs: int = 1) -> int:
    sc = cfg.series
    n_max = cfg["stability.n_max"]
    th_rows, summary, grid = [], [], []
    for st in cfg.axis("sigma_tilde"):
        R0 = solve_R0(st, cfg=sc)
        ths = [mode_threshold(n, R0, sc) for n in range(n_max + 1)]
        finite = ths[2:]
        if any(b <= a for a, b in zip(finite, finite[1:])):
            raise InvariantViolation(f"thresholds not strictly increasing for sigma_tilde={st}")
        ms = mu_star(R0, sc, scan_to=max(n_max, 32))
        if ms != ths[2]:
            raise InvariantViolation("mu* differs from the n = 2 threshold")
        th_rows += [[st, n, th] for n, th in enumerate(ths)]
        summary.append([st, R0, ms])
        mus = cfg["sweep.mu"] or [f * ms for f in cfg["stability.mu_over_mu_star"]]
        for mu in mus:
            p = ModelParams(mu, st)
            for n in range(n_max + 1):
                g = growth_rate(n, p, R0, sc)
                grid.append([st, mu, n, g, classify(g, scale=mu)])
    out.table("thresholds", ["sigma_tilde", "n", "mu_n0"], th_rows)
    out.table("mu_star", ["sigma_tilde", "R0", "mu_star"], summary)
    out.table("classification", ["sigma_tilde", "mu", "n", "growth_rate", "class"], grid)
    for st, R0, ms in summary:
        print(f"sigma_tilde={st:g}: R0={R0:.12g} mu*={ms:.12g}")
    return EXIT_OK


def cmd_modes(cfg: RunConfig, out: Writer, jobs: int = 1) -> int:
    sc = cfg.series
    modes = cfg["sweep.n"] or [0, 1, 2]
    dt = cfg["modes.dt"] or None
    rows = []
    for mu in cfg.axis("mu"):
        for st in cfg.axis("sigma_tilde"):
            for tau in cfg.axis("tau"):
                p = ModelParams(mu, st, tau)
                z = build_zeroth(p, sc)
                te = compute_tau_expansion(p, z)
                for n in modes:
                    m = make_mode(n, p, z, te, cfg["modes.rho0_init"], cfg["modes.rho1_init"],
                                  grid_size=cfg["modes.grid_size"])
                    tr = rho1_trajectory(n, m, p, cfg["modes.t_end"], dt=dt, forcing=cfg["modes.forcing"])
                    idx = len(rows)
                    out.table(f"mode_{idx:03d}", ["t", "rho0", "rho1", "combined"],
                              zip(tr.t, tr.rho0, tr.rho1, tr.combined))
                    c = m.coefficients
                    rows.append([idx, mu, st, tau, n, m.growth_rate, c.homogeneous, c.forcing, m.threshold])
    out.table("modes", ["index", "mu", "sigma_tilde", "tau", "n", "growth_rate", "homogeneous",
                        "forcing", "threshold"], rows)
    print(f"{len(rows)} mode trajectories written")
    return EXIT_OK


def _evolve_point(args):
    R_init, p, sim = args
    return run_to_steady(R_init, p, sim)


def cmd_evolve(cfg: RunConfig, out: Writer, jobs: int = 1) -> int:
    sc = cfg.series
    p = cfg.params
    fp = fixed_point_solve(p, cfg=FixedPointConfig(grid_size=cfg["stationary.grid_size"],
                                                   max_iter=cfg["stationary.max_iter"],
                                                   tol=cfg["stationary.tol"], series=sc))
    dt = cfg["evolve.dt"] or (p.tau / 8 if p.tau > 0 else 0.01)
    sim = SimConfig(dt=dt, t_end=cfg["evolve.t_end"], variant=cfg["evolve.variant"],
                    characteristic_substeps=cfg["evolve.characteristic_substeps"],
                    grid_size=cfg["evolve.grid_size"], steady_tol=cfg["evolve.steady_tol"], series=sc)
    factors = cfg["evolve.R_init_factor"]
    trajs = _map(_evolve_point, [(f * fp.R_star, p, sim) for f in factors], jobs)
    rows = []
    for i, (f, tr) in enumerate(zip(factors, trajs)):
        out.table(f"trajectory_{i:03d}", ["t", "R", "Rdot"], zip(tr.times, tr.R_values, tr.Rdot_values))
        converged = abs(tr.Rdot) < sim.steady_tol
        rows.append([i, f, tr.R_values[0], tr.R, fp.R_star, tr.R - fp.R_star, tr.t, tr.Rdot,
                     tr.max_endpoint_error(), converged])
        print(f"R_init={tr.R_values[0]:.6g}: R(t={tr.t:.6g})={tr.R:.12g}, R*={fp.R_star:.12g}")
    out.table("evolve", ["index", "R_init_factor", "R_init", "R_final", "R_star", "gap", "t_final",
                         "Rdot_final", "max_endpoint_error", "converged"], rows)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Writer, jobs: int = 1) -> int:
    sc = cfg.series
    x = cfg["verify.x_grid"]
    if x is None:
        x = list(np.linspace(cfg["verify.x_min"], cfg["verify.x_max"], cfg["verify.points"]))
    if not x:
        raise ConfigError("verification grid is empty")
    try:
        rep = verify_identities(x, cfg["verify.n_max"], sc)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    xs = np.asarray(x)
    rows = []

    def check(name, value, limit, ok):
        rows.append([name, value, limit, "pass" if ok else "fail"])

    for key, val in rep.residuals.items():
        check(f"bessel.{key}", val, 1e-12, val < 1e-12)
    for key, ok in rep.inequalities.items():
        check(f"bessel.{key}", float(ok), 1.0, ok)
    br = min(float(np.min(stability_bracket(n, xs, sc))) for n in range(2, cfg["verify.n_max"] + 1))
    check("sign.bracket_n_ge_2", br, 0.0, br > 0)
    sign = -1.0 if cfg["verify.inject_fault"] == "A_sign" else 1.0
    a_max = float(np.max(sign * A_coefficient(xs, sc)))
    b_max = float(np.max(B_coefficient(xs, sc)))
    check("sign.A_negative", a_max, 0.0, a_max < 0)
    check("sign.B_negative", b_max, 0.0, b_max < 0)
    st = cfg["model.sigma_tilde"]
    R0 = solve_R0(st, cfg=sc)
    g1 = max(abs(growth_rate(1, ModelParams(mu, st), R0, sc)) for mu in cfg["verify.mu_values"])
    check("spectrum.g1_zero", g1, 1e-13, g1 < 1e-13)
    g0 = max(growth_rate(0, ModelParams(mu, st), R0, sc) for mu in cfg["verify.mu_values"])
    check("spectrum.g0_negative", g0, 0.0, g0 < 0)
    drift = 0.0
    for mu in cfg["verify.mu_values"]:
        p = ModelParams(mu, st, cfg["model.tau"])
        z = build_zeroth(p, sc)
        c = first_order_coefficients(1, p, z, compute_tau_expansion(p, z))
        drift = max(drift, abs(c.homogeneous) + abs(c.forcing))
    check("modes.n1_drift", drift, 1e-9, drift < 1e-9)
    out.table("verify", ["check", "value", "limit", "status"], rows)
    width = max(len(r[0]) for r in rows)
    for name, value, limit, status in rows:
        print(f"{name:<{width}}  {_fmt(value):>24}  {_fmt(limit):>8}  {status.upper()}")
    failed = [r[0] for r in rows if r[3] == "fail"]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


COMMANDS = {
    "stationary": cmd_stationary,
    "stability": cmd_stability,
    "modes": cmd_modes,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fbtumor", description="Delayed free-boundary tumor model solvers.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", metavar="PATH", help="key = value configuration file")
    ap.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    ap.add_argument("--format", choices=("csv", "json"), help="artifact format (overrides output.format)")
    ap.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for sweeps")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=os.environ.get("FBTUMOR_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = parse_config(text, {"output.dir": args.out, "output.format": args.format})
        writer = Writer(cfg["output.dir"], cfg["output.format"])
        return COMMANDS[args.command](cfg, writer, args.jobs)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FBTumorError, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
