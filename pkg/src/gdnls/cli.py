"""Command-line entry point: experiment orchestration and persistence.

Subcommands
-----------
soliton   profile construction, conserved quantities, identity report
critical  threshold root, Hessian degeneracy, null direction, spectrum report
evolve    time integration with modulation + virial observers
sweep     instability experiments over a list of perturbation sizes
check     full identity/property battery, scriptable pass/fail

Configuration comes from a flat JSON file (--config) with flags overriding
file values. Outputs are CSV (RFC-4180, '.' decimal, LF endings) or JSON
arrays, one manifest JSON per run, plus rendered PNG figures.

Exit codes: 0 success (tube exit on instability runs is a success, flagged
"escaped"); 2 configuration error; 3 numerical identity failure; 4 solver
abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field as dc_field, asdict
from pathlib import Path

import numpy as np

from . import __version__, plots
from .conserved import action, conserved_set, lp_power_norm, orbit_distance
from .critical import (CriticalData, action_hessian, critical_constants,
                       critical_speed_ratio, eigen_direction,
                       mass_momentum_closed_form, threshold_function)
from .errors import DomainViolation, GdnlsError, Kappa0Mismatch, OutsideTube, NewtonDiverged
from .evolve import EvolveConfig, integrate
from .linop import (coercivity_constant, kernel_correlation,
                    negative_count, spectrum)
from .modulation import Tracker, coupling_constant
from .numerics import Field, Grid, h1_norm, spectral_derivative
from .soliton import (SolitonParams, default_grid, elliptic_residual,
                      perturbation_direction, soliton_field)
from .virial import (Cutoff, a_functional, a_functional_leading_coefficient,
                     default_radius, localized_mass, localized_momentum)

SERIES_COLUMNS = ["t", "M", "P", "E", "J", "theta", "y", "lambda", "eps_h1",
                  "I1", "I2", "I", "orbit_dist"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IDENTITY = 3
EXIT_SOLVER = 4


@dataclass
class ExperimentConfig:
    sigma: float = 1.5
    omega: float = 1.0
    c: object = 0.5            # number or the literal "critical"
    grid_l: object = "auto"    # number or "auto" (box rule)
    grid_n: int = 2048
    dt: object = "auto"
    t_final: float = 10.0
    delta1: float = 0.0
    delta1_list: list = dc_field(default_factory=list)
    radius: object = "auto"
    record_every: int = 0      # 0 -> resolved to ~0.1 time units
    exit_fraction: float = 0.05
    seed: int = 0
    output_dir: str = "runs"
    format: str = "csv"

    def resolved(self) -> dict:
        out = asdict(self)
        out["version"] = __version__
        return out


class ConfigError(Exception):
    pass


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    data = {}
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat JSON object")
        data.update(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    return cfg


def resolve_speed(cfg: ExperimentConfig) -> float:
    if cfg.c == "critical":
        if not (1.0 < cfg.sigma < 2.0):
            raise ConfigError(
                f"c='critical' needs sigma in (1, 2), got {cfg.sigma}")
        z0 = critical_speed_ratio(cfg.sigma)
        return 2.0 * z0 * float(np.sqrt(cfg.omega))
    try:
        return float(cfg.c)
    except (TypeError, ValueError):
        raise ConfigError(f"c must be a number or 'critical', got {cfg.c!r}") from None


def resolve_grid(cfg: ExperimentConfig, params: SolitonParams) -> Grid:
    if cfg.grid_l == "auto":
        return default_grid(params, n=int(cfg.grid_n))
    return Grid(float(cfg.grid_l), int(cfg.grid_n))


def resolve_dt(cfg: ExperimentConfig, params: SolitonParams, grid: Grid) -> float:
    if cfg.dt == "auto":
        stepper_guard = 0.8 * grid.dx / max(
            1.0, float(np.max(np.abs(soliton_field(params, grid).values))
                       ** (2 * params.sigma)))
        return min(2e-3, 0.5 * stepper_guard)
    return float(cfg.dt)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path: Path, columns, rows, fmt: str):
    """Rows are dicts. CSV with a fixed, versioned column order; JSON mirrors it."""
    if fmt == "json":
        payload = [{c: row.get(c) for c in columns} for row in rows]
        path.with_suffix(".json").write_text(
            json.dumps(payload, indent=1, default=float) + "\n", encoding="utf-8")
        return path.with_suffix(".json")
    out = path.with_suffix(".csv")
    with out.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# columns v1: {','.join(columns)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return out


def write_manifest(outdir: Path, cfg: ExperimentConfig, extra: dict):
    manifest = {"config": cfg.resolved(), **extra}
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True, default=float) + "\n",
        encoding="utf-8")


# ---------------------------------------------------------------------------
# soliton subcommand
# ---------------------------------------------------------------------------

def identity_report(params: SolitonParams, grid: Grid) -> list[dict]:
    """The closed-form identity suite on one sampled profile."""
    phi = soliton_field(params, grid)
    cs = conserved_set(phi, params.sigma)
    dphi = spectral_derivative(phi, 1)
    grad2 = l2_norm(dphi) ** 2
    mass2 = 2.0 * cs.M
    rows = []

    def add(name, value, reference, tol):
        scale = max(abs(reference), 1e-30)
        rel = abs(value - reference) / scale
        rows.append({"check": name, "value": value, "reference": reference,
                     "rel_error": rel, "tolerance": tol, "passed": rel <= tol})

    add("gradient_mass_ratio", grad2, params.omega * mass2, 1e-8)
    add("aux_functional", cs.J, 4 * params.omega * cs.M + 2 * params.c * cs.P, 1e-8)
    add("aux_energy_relation", (params.sigma - 1) / (params.sigma + 1) * cs.J,
        2 * params.c * cs.P + 4 * cs.E, 1e-8)
    add("power_norm_relation", lp_power_norm(phi, params.sigma),
        4 * (params.sigma + 1) * (params.c / 2 * cs.M + cs.P), 1e-8)
    m_cf, p_cf = mass_momentum_closed_form(params)
    add("mass_closed_form", cs.M, m_cf, 1e-8)
    add("momentum_closed_form", cs.P, p_cf, 1e-8)
    resid = elliptic_residual(params, grid)
    rows.append({"check": "profile_equation_residual", "value": resid,
                 "reference": 0.0, "rel_error": resid, "tolerance": 1e-8,
                 "passed": resid <= 1e-8})
    return rows


def cmd_soliton(cfg: ExperimentConfig) -> int:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    c = resolve_speed(cfg)
    params = SolitonParams(cfg.sigma, cfg.omega, c)
    grid = resolve_grid(cfg, params)
    phi = soliton_field(params, grid)
    rows = identity_report(params, grid)
    prof_rows = [{"x": x, "re_u": v.real, "im_u": v.imag, "abs_u": abs(v)}
                 for x, v in zip(grid.x, phi.values)]
    write_table(outdir / "profile", ["x", "re_u", "im_u", "abs_u"],
                prof_rows, cfg.format)
    write_table(outdir / "identities",
                ["check", "value", "reference", "rel_error", "tolerance", "passed"],
                rows, cfg.format)
    plots.plot_profile(grid, phi.values, params, outdir / "profile.png")
    write_manifest(outdir, cfg, {
        "command": "soliton", "resolved_c": c, "grid_l": grid.L,
        "grid_n": grid.N, "all_passed": all(r["passed"] for r in rows)})
    if not all(r["passed"] for r in rows):
        print("identity suite: FAIL", file=sys.stderr)
        return EXIT_IDENTITY
    print(f"identity suite: all {len(rows)} checks passed -> {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# critical subcommand
# ---------------------------------------------------------------------------

def cmd_critical(cfg: ExperimentConfig) -> int:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    sigma, omega = cfg.sigma, cfg.omega
    if sigma <= 1.0:
        note = ("stable for all |c| < 2*sqrt(omega) per cited results; "
                "critical machinery skipped")
        write_manifest(outdir, cfg, {"command": "critical", "note": note})
        print(note)
        return EXIT_OK
    if sigma >= 2.0:
        note = "unstable regime sigma >= 2; threshold root undefined"
        write_manifest(outdir, cfg, {"command": "critical", "note": note})
        print(note)
        return EXIT_OK
    try:
        crit = critical_constants(sigma, omega)
    except Kappa0Mismatch as exc:
        print(f"kappa0 extraction mismatch: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    params = SolitonParams(sigma, omega, crit.c_crit)
    n_spec = min(int(cfg.grid_n), 1024)
    grid = default_grid(params, n=n_spec)
    phi = soliton_field(params, grid)
    evals, efields = spectrum(phi, params, k=8)
    nneg = negative_count(evals)
    corr = kernel_correlation(
        evals, efields,
        [Field(grid, 1j * phi.values), spectral_derivative(phi, 1)])
    coerc = coercivity_constant(phi, params)
    mu_ratio_residual = abs(crit.mu / crit.nu - np.sqrt(omega))
    report = {
        "sigma": sigma, "omega": omega, "z0": crit.z0, "c_crit": crit.c_crit,
        "a0": crit.a0, "mu": crit.mu, "nu": crit.nu,
        "mass": crit.mass, "momentum": crit.momentum,
        "kappa0": crit.kappa0,
        "kappa0_from_mass": crit.kappa0_from_mass,
        "kappa0_from_momentum": crit.kappa0_from_momentum,
        "b1": crit.b1, "b2": crit.b2,
        "mu_over_nu_minus_sqrt_omega": mu_ratio_residual,
        "negative_eigenvalues": nneg,
        "kernel_correlation_iphi": corr[0],
        "kernel_correlation_dphi": corr[1],
        "coercivity_constant": coerc,
    }
    write_table(outdir / "critical", list(report.keys()), [report], cfg.format)
    zs = np.linspace(-0.99, 0.99, 121)
    fvals = [threshold_function(sigma, z, 1e-10) for z in zs]
    plots.plot_threshold_root(zs, fvals, crit.z0, sigma, outdir / "threshold.png")
    cmax = 2.0 * np.sqrt(omega)
    cs_scan = np.linspace(-0.9 * cmax, 0.9 * cmax, 41)
    dets = [float(np.linalg.det(action_hessian(SolitonParams(sigma, omega, cj))))
            for cj in cs_scan]
    plots.plot_determinant_scan(cs_scan, dets, crit.c_crit, sigma, omega,
                                outdir / "determinant.png")
    ok = (nneg == 1 and min(corr) > 0.999 and coerc > 0
          and crit.kappa0 > 0 and crit.b1 > 0 and crit.b2 > 0
          and mu_ratio_residual <= 1e-5 * max(1.0, np.sqrt(omega)))
    write_manifest(outdir, cfg, {"command": "critical", "report": report,
                                 "all_passed": bool(ok)})
    if not ok:
        print("critical report: unexpected spectral structure", file=sys.stderr)
        return EXIT_IDENTITY
    print(f"critical report: z0={crit.z0:.9f}, c_crit={crit.c_crit:.9f}, "
          f"one negative eigenvalue, coercivity {coerc:.4f} -> {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evolve subcommand
# ---------------------------------------------------------------------------

@dataclass
class EvolutionSetup:
    params: SolitonParams
    grid: Grid
    phi: Field
    direction: object
    crit: CriticalData | None
    coupling: float
    cutoff: Cutoff
    eps_exit: float
    u0: Field
    dt: float


def build_evolution(cfg: ExperimentConfig) -> EvolutionSetup:
    c = resolve_speed(cfg)
    params = SolitonParams(cfg.sigma, cfg.omega, c)
    if not (1.0 < params.sigma < 2.0):
        raise ConfigError("evolve requires sigma in (1, 2) for the modulation "
                          "and virial observers")
    grid = resolve_grid(cfg, params)
    phi = soliton_field(params, grid)
    direction = eigen_direction_or_extension(params)
    crit = critical_constants(cfg.sigma, cfg.omega)
    coupling = coupling_constant(params, grid, direction)
    if cfg.radius == "auto":
        radius = default_radius(crit, max(cfg.delta1, 1e-6), grid)
    else:
        radius = float(cfg.radius)
    cutoff = Cutoff(radius, grid)
    eps_exit = cfg.exit_fraction * h1_norm(phi)
    u0 = (perturbation_direction(params, grid, cfg.delta1)
          if cfg.delta1 != 0.0 else phi)
    dt = resolve_dt(cfg, params, grid)
    return EvolutionSetup(params=params, grid=grid, phi=phi, direction=direction,
                          crit=crit, coupling=coupling, cutoff=cutoff,
                          eps_exit=eps_exit, u0=u0, dt=dt)


def eigen_direction_or_extension(params: SolitonParams):
    """Null direction at critical speed; its (sqrt(omega), 1) extension away
    from it, so stable-branch runs can still track a lambda coordinate."""
    from .critical import EigenDirection
    try:
        return eigen_direction(params)
    except GdnlsError:
        return EigenDirection(mu=float(np.sqrt(params.omega)))


def run_evolution(cfg: ExperimentConfig, setup: EvolutionSetup | None = None):
    """Integrate with the full observer stack; returns (result, metadata)."""
    setup = setup or build_evolution(cfg)
    params, grid = setup.params, setup.grid
    record_every = cfg.record_every or max(1, int(round(0.1 / setup.dt)))
    econf = EvolveConfig(dt=setup.dt, t_final=cfg.t_final,
                         record_every=record_every,
                         frame_omega=params.omega, frame_c=params.c)
    tracker = Tracker(params, setup.direction, grid)

    def observe(i, t, u):
        cs = conserved_set(u, params.sigma)
        fit = orbit_distance(u, params, reference=setup.phi)
        rec = {"M": cs.M, "P": cs.P, "E": cs.E, "J": cs.J,
               "orbit_dist": fit.distance}
        try:
            state = tracker.update(t, u)
            rec.update({"theta": state.theta, "y": state.y, "lambda": state.lam,
                        "eps_h1": state.eps_h1, "tube_exit": False})
            y_center = state.y
            lam = state.lam
        except (OutsideTube, NewtonDiverged):
            rec.update({"theta": float("nan"), "y": float("nan"),
                        "lambda": float("nan"), "eps_h1": float("nan"),
                        "tube_exit": True})
            y_center = fit.y
            lam = 0.0
        i1 = localized_mass(u, y_center, setup.cutoff)
        i2 = localized_momentum(u, y_center, setup.cutoff)
        ctilde = 2.0 * setup.coupling * (setup.crit.mass + setup.crit.momentum)
        rec.update({"I1": i1, "I2": i2,
                    "I": -np.sqrt(params.omega) * i1 + i2 + ctilde * lam})
        return rec

    def stop(rec):
        return rec["orbit_dist"] > setup.eps_exit

    result = integrate(setup.u0, params.sigma, econf, observers=[observe],
                       stop_when=stop)
    escaped = result.status == "stopped"
    status = "escaped" if escaped else (
        "stayed" if result.status == "completed" else result.status)
    meta = {"status": status, "t_reached": result.t_reached,
            "eps_exit": setup.eps_exit, "resolved_c": params.c,
            "resolved_dt": setup.dt, "grid_l": grid.L, "grid_n": grid.N,
            "record_every": record_every, "cutoff_radius": setup.cutoff.R,
            "coupling_constant": setup.coupling, "error": result.error}
    return result, meta


def cmd_evolve(cfg: ExperimentConfig) -> int:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    setup = build_evolution(cfg)
    result, meta = run_evolution(cfg, setup)
    write_table(outdir / "series", SERIES_COLUMNS, result.records, cfg.format)
    plots.plot_run_series(result.records, outdir / "series.png",
                          eps0=setup.eps_exit)
    write_manifest(outdir, cfg, {"command": "evolve", **meta})
    if meta["status"] in ("blowup", "step_too_large"):
        print(f"run aborted: {meta['status']}: {meta['error']}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"run {meta['status']} at t={meta['t_reached']:g} -> {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep subcommand
# ---------------------------------------------------------------------------

def sweep_row(cfg: ExperimentConfig, delta1: float) -> dict:
    sub = ExperimentConfig(**{**asdict(cfg), "delta1": delta1})
    setup = build_evolution(sub)
    result, meta = run_evolution(sub, setup)
    recs = [r for r in result.records if not r.get("tube_exit")]
    lam = np.array([r["lambda"] for r in recs], dtype=float)
    eps = np.array([r["eps_h1"] for r in recs], dtype=float)
    ivals = np.array([r["I"] for r in recs], dtype=float)
    ts = np.array([r["t"] for r in recs], dtype=float)
    phi_cs = conserved_set(setup.phi, setup.params.sigma)
    phi_ac = action(setup.phi, setup.params)
    a_u0 = a_functional(setup.u0, setup.params, phi_cs, phi_ac)
    a_pred = a_functional_leading_coefficient(setup.crit) * delta1
    sel = lam * delta1 > 0
    b3 = float(np.max(eps[sel] ** 2 / (lam[sel] * delta1))) if sel.any() else float("nan")
    mono = bool(np.all(np.diff(ivals) > 0)) if len(ivals) > 2 else False
    rate = np.gradient(ivals, ts) if len(ivals) > 2 else np.array([])
    thr = 0.25 * setup.crit.b2 * delta1
    frac = float(np.mean(rate[1:-1] >= thr)) if len(rate) > 4 else float("nan")
    return {"delta1": delta1, "status": meta["status"],
            "escaped": meta["status"] == "escaped",
            "escape_time": meta["t_reached"],
            "a_u0": a_u0, "a_u0_predicted": a_pred,
            "a_u0_over_b2_delta1": a_u0 / (setup.crit.b2 * delta1),
            "b3_fit": b3, "virial_monotone": mono,
            "rate_above_quarter_b2_delta1": frac}


SWEEP_COLUMNS = ["delta1", "status", "escaped", "escape_time", "a_u0",
                 "a_u0_predicted", "a_u0_over_b2_delta1", "b3_fit",
                 "virial_monotone", "rate_above_quarter_b2_delta1", "error"]


def cmd_sweep(cfg: ExperimentConfig) -> int:
    if not cfg.delta1_list:
        print("sweep requires a non-empty delta1_list", file=sys.stderr)
        return EXIT_CONFIG
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for d1 in cfg.delta1_list:
        try:
            row = sweep_row(cfg, float(d1))
            row["error"] = ""
        except GdnlsError as exc:
            row = {"delta1": d1, "status": "error", "escaped": False,
                   "escape_time": float("nan"), "a_u0": float("nan"),
                   "a_u0_predicted": float("nan"),
                   "a_u0_over_b2_delta1": float("nan"), "b3_fit": float("nan"),
                   "virial_monotone": False,
                   "rate_above_quarter_b2_delta1": float("nan"),
                   "error": str(exc)}
        rows.append(row)
        print(f"delta1={d1:g}: {row['status']} (t={row.get('escape_time', '-')})")
    write_table(outdir / "sweep", SWEEP_COLUMNS, rows, cfg.format)
    try:
        plots.plot_sweep_summary(rows, outdir / "sweep.png")
    except Exception:
        pass
    write_manifest(outdir, cfg, {"command": "sweep",
                                 "rows": len(rows),
                                 "all_escaped": all(r["escaped"] for r in rows)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# check subcommand
# ---------------------------------------------------------------------------

def cmd_check(cfg: ExperimentConfig, fast: bool = False) -> int:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = []
    rows = []
    sigmas = (1.2, 1.5, 1.8)
    omegas = (0.5, 1.0, 2.0)
    fracs = (-0.5, 0.0, 0.5)
    n = 2048  # resolves every sweep point; fast mode skips the slow extras
    for s in sigmas:
        for om in omegas:
            for fr in fracs:
                params = SolitonParams(s, om, fr * 2.0 * np.sqrt(om))
                grid = default_grid(params, n=n)
                for row in identity_report(params, grid):
                    row = {"sigma": s, "omega": om, "c": params.c, **row}
                    rows.append(row)
                    if not row["passed"]:
                        failures.append(row)
    if not fast:
        for s in sigmas:
            crit = critical_constants(s, 1.0)
            ok = crit.kappa0 > 0 and crit.b1 > 0 and crit.b2 > 0
            resid = abs(crit.mu / crit.nu - 1.0)
            row = {"sigma": s, "omega": 1.0, "c": crit.c_crit,
                   "check": "critical_constants", "value": crit.kappa0,
                   "reference": float("nan"), "rel_error": resid,
                   "tolerance": 1e-5, "passed": ok and resid <= 1e-5}
            rows.append(row)
            if not row["passed"]:
                failures.append(row)
    write_table(outdir / "check_report",
                ["sigma", "omega", "c", "check", "value", "reference",
                 "rel_error", "tolerance", "passed"], rows, cfg.format)
    write_manifest(outdir, cfg, {"command": "check", "checks": len(rows),
                                 "failures": len(failures)})
    if failures:
        print(f"check: {len(failures)} of {len(rows)} checks failed",
              file=sys.stderr)
        return EXIT_IDENTITY
    print(f"check: all {len(rows)} checks passed -> {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _num_or_literal(value: str, literal: str):
    if value == literal:
        return value
    return float(value)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gdnls",
        description="Solitary-wave laboratory for the generalized "
                    "derivative NLS equation")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat JSON config file")
        sp.add_argument("--sigma", type=float)
        sp.add_argument("--omega", type=float)
        sp.add_argument("--c", type=lambda v: _num_or_literal(v, "critical"))
        sp.add_argument("--grid-l", dest="grid_l",
                        type=lambda v: _num_or_literal(v, "auto"))
        sp.add_argument("--grid-n", dest="grid_n", type=int)
        sp.add_argument("--dt", type=lambda v: _num_or_literal(v, "auto"))
        sp.add_argument("--t-final", dest="t_final", type=float)
        sp.add_argument("--delta1", type=float)
        sp.add_argument("--radius", type=lambda v: _num_or_literal(v, "auto"))
        sp.add_argument("--record-every", dest="record_every", type=int)
        sp.add_argument("--exit-fraction", dest="exit_fraction", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output-dir", dest="output_dir")
        sp.add_argument("--format", choices=("csv", "json"))

    common(sub.add_parser("soliton", help="profile + identity report"))
    common(sub.add_parser("critical", help="threshold + spectral report"))
    common(sub.add_parser("evolve", help="time integration with observers"))
    sp = sub.add_parser("sweep", help="instability experiments over delta1 list")
    common(sp)
    sp.add_argument("--delta1-list", dest="delta1_list", type=float, nargs="*")
    sp = sub.add_parser("check", help="identity/property battery")
    common(sp)
    sp.add_argument("--fast", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "fast")}
    try:
        cfg = load_config(args.config, overrides)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "soliton":
            return cmd_soliton(cfg)
        if args.command == "critical":
            return cmd_critical(cfg)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "check":
            return cmd_check(cfg, fast=args.fast)
    except (DomainViolation, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GdnlsError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
