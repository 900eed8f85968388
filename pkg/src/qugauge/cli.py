"""``qugauge`` command-line driver.

Every subcommand reads a JSON run configuration, computes closed-form values
next to their oracle values, and writes CSV or JSON. Exit status: 0 when all
deltas are within tolerance, 1 when any delta exceeds its tolerance, 2 for
usage or configuration errors (reported as JSON on stderr).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from qugauge import __version__
from qugauge import dynamics, entropy, gauge, geometry, oracle
from qugauge.dynamics import MixingConfig, SpectrumConfig
from qugauge.gauge import GaugeFunction, MediumConfig
from qugauge.linalg2 import DomainError

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG = 0, 1, 2

DEFAULT_TOLERANCES = {
    "evolve_oracle": 1e-8,
    "beta": 1e-8,
    "beta_numerical": 1e-6,
    "dw2": 1e-10,
    "ds_dt": 1e-6,
    "s_over_period": 1e-9,
    "gauge_residual": 1e-7,
    "gauge_law": 1e-8,
    "entropy": 1e-12,
}

SWEEP_AXES = ("theta", "omega1", "omega2", "n2", "t")
SWEEP_TARGETS = ("phases", "entropy", "gauge")
RK4_MAX_STEP = 1e-3
FS_ORACLE_DT = 1e-4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    samples: int

    def times(self) -> np.ndarray:
        if self.samples == 1:
            return np.array([self.t0])
        return np.linspace(self.t0, self.t1, self.samples)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    target: str


@dataclass(frozen=True)
class RunConfig:
    spectrum: SpectrumConfig
    mixing: MixingConfig
    time_grid: TimeGrid | None = None
    gauge_function: GaugeFunction | None = None
    medium: MediumConfig | None = None
    output_format: str = "json"
    output_path: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    sweep: SweepSpec | None = None


def _number(obj: dict, key: str, where: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{where}.{key} is required")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number, got {v!r}")
    return float(v)


def _object(raw: dict, key: str) -> dict | None:
    v = raw.get(key)
    if v is not None and not isinstance(v, dict):
        raise ConfigError(f"{key} must be an object")
    return v


def parse_gauge_function(obj: dict) -> GaugeFunction:
    family = obj.get("family")
    coupled = bool(obj.get("product_form", False))
    w = "gauge_function"
    if family == "zero":
        return GaugeFunction.zero(coupled)
    if family == "constant":
        return GaugeFunction.constant(_number(obj, "c", w), coupled)
    if family == "linear":
        return GaugeFunction.linear(_number(obj, "a", w), coupled)
    if family == "sinusoidal":
        return GaugeFunction.sinusoidal(_number(obj, "a", w), _number(obj, "b", w), coupled)
    if family == "polynomial":
        coeffs = obj.get("coefficients")
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("gauge_function.coefficients must be a non-empty list")
        return GaugeFunction.polynomial(coeffs, coupled)
    if family == "sampled":
        return GaugeFunction.sampled(obj.get("times", []), obj.get("values", []), coupled)
    raise ConfigError(f"gauge_function.family must be one of {gauge.GAUGE_FAMILIES}, got {family!r}")


def parse_sweep(obj: dict) -> SweepSpec:
    axis = obj.get("axis")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    target = obj.get("target")
    if target not in SWEEP_TARGETS:
        raise ConfigError(f"sweep.target must be one of {SWEEP_TARGETS}, got {target!r}")
    if "values" in obj:
        vals = obj["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sweep.values must be a non-empty list")
        values = [_number({"v": v}, "v", "sweep.values") for v in vals]
    else:
        count = obj.get("count")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ConfigError("sweep.count must be an integer >= 1")
        start = _number(obj, "start", "sweep")
        stop = _number(obj, "stop", "sweep")
        values = [start] if count == 1 else list(np.linspace(start, stop, count))
    return SweepSpec(axis, tuple(sorted(float(v) for v in values)), target)


def parse_config(raw) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    spec_obj = _object(raw, "spectrum")
    medium_obj = _object(raw, "medium")
    if (spec_obj is None) == (medium_obj is None):
        raise ConfigError("exactly one of 'spectrum' or 'medium' must be given")
    medium = None
    if medium_obj is not None:
        medium = MediumConfig(
            _number(medium_obj, "omega", "medium"),
            _number(medium_obj, "n1", "medium"),
            _number(medium_obj, "n2", "medium"),
            _number(medium_obj, "ell", "medium", 1.0),
            _number(medium_obj, "v0", "medium", 1.0),
        )
        spectrum = gauge.medium_to_spectrum(medium)
    else:
        spectrum = SpectrumConfig(_number(spec_obj, "omega1", "spectrum"), _number(spec_obj, "omega2", "spectrum"))

    mix_obj = _object(raw, "mixing")
    if mix_obj is None:
        raise ConfigError("'mixing' is required")
    mixing = MixingConfig(
        _number(mix_obj, "theta", "mixing"),
        _number(mix_obj, "gamma1", "mixing", 0.0),
        _number(mix_obj, "gamma2", "mixing", 0.0),
    )

    grid = None
    grid_obj = _object(raw, "time_grid")
    if grid_obj is not None:
        samples = grid_obj.get("samples")
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 2:
            raise ConfigError("time_grid.samples must be an integer >= 2")
        t0 = _number(grid_obj, "t0", "time_grid")
        t1 = _number(grid_obj, "t1", "time_grid")
        if not t1 > t0:
            raise ConfigError("time_grid.t1 must be greater than time_grid.t0")
        grid = TimeGrid(t0, t1, samples)

    gf_obj = _object(raw, "gauge_function")
    gf = parse_gauge_function(gf_obj) if gf_obj is not None else None

    out = _object(raw, "output") or {}
    fmt = out.get("format", "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")

    tolerances = dict(DEFAULT_TOLERANCES)
    tol_obj = _object(raw, "tolerances") or {}
    for k in tol_obj:
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {k!r}; known: {sorted(DEFAULT_TOLERANCES)}")
        v = _number(tol_obj, k, "tolerances")
        if v < 0:
            raise ConfigError(f"tolerances.{k} must be >= 0")
        tolerances[k] = v

    sweep_obj = _object(raw, "sweep")
    sweep = parse_sweep(sweep_obj) if sweep_obj is not None else None
    return RunConfig(spectrum, mixing, grid, gf, medium, fmt, path, tolerances, sweep)


def load_config(path: str) -> tuple[RunConfig, bytes]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(raw), data


def _require_grid(cfg: RunConfig, command: str) -> TimeGrid:
    if cfg.time_grid is None:
        raise ConfigError(f"'{command}' needs a time_grid")
    return cfg.time_grid


class Report:
    """Rows (or one flat record) plus the names of failed tolerance checks."""

    def __init__(self, rows, header=None, failures=None):
        self.rows = rows
        self.header = header or {}
        self.failures = failures or []

    def check(self, name: str, delta: float, tol: float) -> None:
        if not delta <= tol and name not in self.failures:
            self.failures.append(name)


def evolve_report(cfg: RunConfig) -> Report:
    grid = _require_grid(cfg, "evolve")
    s, m = cfg.spectrum, cfg.mixing
    d0 = dynamics.build_mixed_basis(m)
    hm = dynamics.build_hamiltonian(s)
    max_step = min(RK4_MAX_STEP, 0.01 * 2 * math.pi / max(abs(s.omega1), abs(s.omega2), 1.0))
    tol = cfg.tolerances["evolve_oracle"]
    report = Report([])
    # RK4 propagates the columns [phi, psi] from t = 0 through the grid
    rk_state = d0.as_array().T
    rk_time = 0.0
    for t in grid.times():
        t = float(t)
        d = dynamics.evolve(d0, s, m, t, general=not m.real_coefficients)
        rk_state = oracle.rk4_propagate(hm, rk_state, t - rk_time, max_step)
        rk_time = t
        delta = float(np.max(np.abs(d.as_array() - rk_state.T)))
        row = {"t": t}
        for name, v in (("phi", d.phi), ("psi", d.psi)):
            for k in range(2):
                row[f"{name}{k}_re"] = float(v[k].real)
                row[f"{name}{k}_im"] = float(v[k].imag)
        row["norm_phi"] = float(np.linalg.norm(d.phi))
        row["norm_psi"] = float(np.linalg.norm(d.psi))
        row["overlap_phi_psi"] = abs(np.vdot(d.phi, d.psi))
        row["p_stay"] = abs(np.vdot(d0.phi, d.phi)) ** 2
        row["rk4_max_delta"] = delta
        report.rows.append(row)
        report.check("evolve_oracle", delta, tol)
    return report


def _g_value(w) -> float | str:
    return "undefined" if w.g is None else w.g


def phases_record(cfg: RunConfig) -> Report:
    s, m = cfg.spectrum, cfg.mixing
    s.require_gap("phases")
    tol = cfg.tolerances
    w = dynamics.omega_elements(s, m)
    T = dynamics.period(s)
    report = Report({})
    rec = report.rows
    rec["theta"] = m.theta
    rec["omega1"] = s.omega1
    rec["omega2"] = s.omega2
    rec["g"] = _g_value(w)
    rec["a0"] = w.a0
    for which in ("phi", "psi"):
        closed = geometry.berry_phase(s, m, which, "closed")
        quad = geometry.berry_phase(s, m, which, "quadrature")
        num = geometry.berry_phase(s, m, which, "numerical")
        rec[f"beta_{which}"] = closed
        rec[f"beta_{which}_oracle"] = quad
        rec[f"beta_{which}_delta"] = abs(closed - quad)
        rec[f"beta_{which}_numerical"] = num
        rec[f"beta_{which}_numerical_delta"] = abs(closed - num)
        report.check("beta", abs(closed - quad), tol["beta"])
        report.check("beta_numerical", abs(closed - num), tol["beta_numerical"])
    rec["beta_sum"] = rec["beta_phi"] + rec["beta_psi"]
    rec["varphi"] = dynamics.total_phase(s)
    rec["period"] = T

    dw2 = geometry.energy_variance(s, m).dw2
    dw2_oracle = geometry.energy_variance_from_state(s, m, 0.0)
    rec["dw2"] = dw2
    rec["dw2_oracle"] = dw2_oracle
    rec["dw2_delta"] = abs(dw2 - dw2_oracle)
    report.check("dw2", rec["dw2_delta"], tol["dw2"])

    t0, t1 = (0.0, T) if T > 0 else (T, 0.0)
    fs = geometry.fs_distance(s, m, t0, t1)
    rate_oracle = geometry.fs_rate_from_overlap(s, m, 0.0, FS_ORACLE_DT)
    rec["ds_dt"] = fs.ds_dt
    rec["ds_dt_oracle"] = rate_oracle
    rec["ds_dt_delta"] = abs(fs.ds_dt - rate_oracle)
    report.check("ds_dt", rec["ds_dt_delta"], tol["ds_dt"])

    aa = geometry.aa_invariant_quadrature(s, m, t0, t1)
    ts_quad = gauge.ts_integral_quadrature(s, m, t0, t1)
    rec["s_over_period"] = fs.s_accum
    rec["s_over_period_oracle"] = aa
    rec["s_over_period_delta"] = abs(fs.s_accum - aa)
    rec["ts_over_period_oracle"] = ts_quad
    rec["ts_over_period_delta"] = abs(abs(ts_quad) - fs.s_accum)
    report.check("s_over_period", rec["s_over_period_delta"], tol["s_over_period"])
    report.check("s_over_period", rec["ts_over_period_delta"], tol["s_over_period"])
    return report


def gauge_record(cfg: RunConfig, times=None) -> Report:
    s, m = cfg.spectrum, cfg.mixing
    s.require_gap("gauge-check")
    if cfg.gauge_function is None:
        raise ConfigError("'gauge-check' needs a gauge_function")
    gf = cfg.gauge_function
    w = dynamics.omega_elements(s, m)
    if w.g is None and not gf.coupled:
        raise gauge.UndefinedCouplingError(
            "g = tan(2 theta) is undefined for this theta (cos 2theta = 0); "
            "set gauge_function.product_form = true to give g*lambda directly"
        )
    if times is None:
        times = _require_grid(cfg, "gauge-check").times()
    worst = dict.fromkeys(
        ("evolution", "covariant", "covariance", "transformation_law", "literal_form", "free_energy", "field_strength"),
        0.0,
    )
    for t in times:
        t = float(t)
        inv = gauge.gauge_invariance_residual(gf, s, m, t)
        vals = {
            "evolution": dynamics.evolution_residual(s, m, t),
            "covariant": gauge.covariant_derivative_residual(s, m, t),
            "covariance": inv.covariance,
            "transformation_law": inv.transformation_law,
            "literal_form": inv.literal_form,
            "free_energy": gauge.free_energy_residual(s, m, t),
            "field_strength": gauge.field_strength_is_zero(s, m, t).da0_dt,
        }
        for k, v in vals.items():
            worst[k] = max(worst[k], v)
    tol = cfg.tolerances
    report = Report({})
    rec = report.rows
    rec["theta"] = m.theta
    rec["omega1"] = s.omega1
    rec["omega2"] = s.omega2
    rec["g"] = _g_value(w)
    rec["a0"] = w.a0
    rec["gauge_family"] = gf.family
    rec["product_form"] = gf.coupled
    rec["evolution_residual"] = worst["evolution"]
    rec["covariant_residual"] = worst["covariant"]
    rec["transformed_residual"] = worst["covariance"]
    rec["transformation_law_residual"] = worst["transformation_law"]
    rec["free_energy_residual"] = worst["free_energy"]
    rec["field_strength_witness"] = worst["field_strength"]
    # reported only: holds when omega_d commutes with U(t)
    rec["literal_form_residual"] = worst["literal_form"]
    for key in ("evolution_residual", "covariant_residual", "transformed_residual"):
        report.check(key, rec[key], tol["gauge_residual"])
    report.check("transformation_law_residual", rec["transformation_law_residual"], tol["gauge_law"])
    report.check("free_energy_residual", rec["free_energy_residual"], tol["entropy"])
    if worst["field_strength"] != 0.0:
        report.failures.append("field_strength_witness")
    rec["pass"] = not report.failures
    return report


def _entropy_oracle(s, m, t):
    pur = oracle.purification_tensor(m, s, t, "phi-psi")
    s_sys = entropy.linear_entropy(pur.rho_system)
    s_til = entropy.linear_entropy(pur.rho_tilde)
    return pur, s_sys, s_til


def entropy_report(cfg: RunConfig, times=None) -> Report:
    s, m = cfg.spectrum, cfg.mixing
    tol = cfg.tolerances["entropy"]
    if times is None:
        times = _require_grid(cfg, "entropy").times()
    static = entropy.linear_entropy(entropy.reduce_static(m))
    pur0 = oracle.purification_tensor(m, s, 0.0, "computational")
    static_oracle = entropy.linear_entropy(pur0.rho_system)
    static_tilde = entropy.linear_entropy(pur0.rho_tilde)
    report = Report([])
    report.header = {
        "static_S_L": static,
        "static_S_L_oracle": static_oracle,
        "static_S_L_delta": abs(static - static_oracle),
        "static_symmetry_delta": abs(static_oracle - static_tilde),
    }
    report.check("static_S_L", report.header["static_S_L_delta"], tol)
    report.check("static_symmetry", report.header["static_symmetry_delta"], tol)
    for t in times:
        t = float(t)
        p = entropy.transition_probabilities(s, m, t)
        sl = entropy.dynamic_entropy(s, m, t)
        pur, s_sys, s_til = _entropy_oracle(s, m, t)
        row = {
            "t": t,
            "p_stay": p.p_stay,
            "p_flip": p.p_flip,
            "p_stay_oracle": float(pur.rho_system[0, 0].real),
            "p_stay_delta": abs(p.p_stay - float(pur.rho_system[0, 0].real)),
            "S_L": sl,
            "S_L_oracle": s_sys,
            "S_L_delta": abs(sl - s_sys),
            "S_L_tilde_oracle": s_til,
            "symmetry_delta": abs(s_sys - s_til),
        }
        report.rows.append(row)
        report.check("p_stay", row["p_stay_delta"], tol)
        report.check("S_L", row["S_L_delta"], tol)
        report.check("symmetry", row["symmetry_delta"], tol)
    return report


def _point_config(cfg: RunConfig, axis: str, value: float) -> tuple[RunConfig, list | None]:
    if axis == "theta":
        return replace(cfg, mixing=replace(cfg.mixing, theta=value)), None
    if axis in ("omega1", "omega2"):
        return replace(cfg, spectrum=replace(cfg.spectrum, **{axis: value})), None
    if axis == "n2":
        medium = replace(cfg.medium, n2=value)
        return replace(cfg, medium=medium, spectrum=gauge.medium_to_spectrum(medium)), None
    return cfg, [value]


def _sweep_point(args) -> tuple[dict, list]:
    cfg, axis, value, target = args
    point, times = _point_config(cfg, axis, value)
    if target == "phases":
        rep = phases_record(point)
        row = dict(rep.rows)
    elif target == "gauge":
        rep = gauge_record(point, times)
        row = dict(rep.rows)
    else:
        rep = entropy_report(point, times)
        row = {"theta": point.mixing.theta, "omega1": point.spectrum.omega1, "omega2": point.spectrum.omega2}
        row.update(rep.header)
        row["max_S_L"] = max(r["S_L"] for r in rep.rows)
        row["max_S_L_delta"] = max(r["S_L_delta"] for r in rep.rows)
        row["max_symmetry_delta"] = max(r["symmetry_delta"] for r in rep.rows)
    return {axis: value, **{k: v for k, v in row.items() if k != axis}}, rep.failures


def sweep_report(cfg: RunConfig, jobs: int = 1) -> Report:
    sw = cfg.sweep
    if sw is None:
        raise ConfigError("'sweep' needs a sweep object in the config")
    if sw.axis == "t" and sw.target == "phases":
        raise ConfigError("axis 't' is not valid for target 'phases' (phases are per period)")
    if sw.axis == "n2" and cfg.medium is None:
        raise ConfigError("axis 'n2' needs a medium config")
    if sw.axis in ("omega1", "omega2") and cfg.medium is not None:
        raise ConfigError(f"axis {sw.axis!r} needs a spectrum config, not a medium")
    if sw.axis == "n2" and any(v < 1.0 for v in sw.values):
        raise ConfigError("sweep over n2 needs values >= 1")
    work = [(cfg, sw.axis, v, sw.target) for v in sw.values]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, work))
    else:
        results = [_sweep_point(w) for w in work]
    report = Report([r for r, _ in results])
    for _, failed in results:
        for name in failed:
            if name not in report.failures:
                report.failures.append(name)
    return report


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return "undefined"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating,)):
        return float(v)
    if v is None:
        return "undefined"
    return v


def render(report: Report, command: str, fmt: str, meta: dict | None = None) -> str:
    rows = report.rows if isinstance(report.rows, list) else [report.rows]
    if fmt == "json":
        if isinstance(report.rows, dict):
            obj = dict(report.rows)
        else:
            obj = {"command": command}
            if report.header:
                obj["static"] = report.header
            obj["rows"] = report.rows
        obj["failures"] = list(report.failures)
        if meta is not None:
            obj["meta"] = meta
        return json.dumps(_jsonable(obj), indent=2) + "\n"
    buf = io.StringIO()
    if meta is not None:
        buf.write("# meta " + json.dumps(meta, sort_keys=True) + "\n")
    if report.header:
        buf.write("# " + ",".join(f"{k}={_fmt(v)}" for k, v in report.header.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0].keys())
        writer.writerow(keys)
        for r in rows:
            writer.writerow([_fmt(r.get(k)) for k in keys])
    return buf.getvalue()


COMMANDS = {
    "evolve": lambda cfg, jobs: evolve_report(cfg),
    "phases": lambda cfg, jobs: phases_record(cfg),
    "gauge-check": lambda cfg, jobs: gauge_record(cfg),
    "entropy": lambda cfg, jobs: entropy_report(cfg),
    "sweep": lambda cfg, jobs: sweep_report(cfg, jobs),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qugauge", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--meta", action="store_true", help="include run metadata (not deterministic)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _error(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return EXIT_CONFIG


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        return _error("usage", "--jobs must be >= 1")
    try:
        cfg, raw = load_config(args.config)
        report = COMMANDS[args.command](cfg, args.jobs)
    except (ConfigError, DomainError) as exc:
        return _error(type(exc).__name__, str(exc))
    meta = None
    if args.meta:
        meta = {
            "version": __version__,
            "command": args.command,
            "config_sha256": hashlib.sha256(raw).hexdigest(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "created": datetime.now(timezone.utc).isoformat(),
        }
    text = render(report, args.command, cfg.output_format, meta)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.failures:
        sys.stderr.write(json.dumps({"tolerance_failures": report.failures}) + "\n")
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
