"""Batch driver: parse scenario configs, run builds, sweeps and
certificates, and emit CSV / JSON results.

Config files are INI-style text (sections in brackets, key = value,
multiline values indented).  A minimal heat-bath run::

    [scenario]
    kind = heat_bath
    preset = qubit-gibbs

    [schedule]
    lambda = 0.3 0.1 0.03
    xi = 1.0
    t_ref = 1.0

    [time]
    mode = explicit
    start = 0.0
    stop = 10.0
    count = 6

    [run]
    seed = 0

    [output]
    csv = run.csv
    json = run.json

Custom models inline their matrices in the interchange format (first
line "rows cols", then row-major "re im" pairs)::

    [scenario]
    kind = qfgr
    sector_dims = 1 1
    h0 = 2 2
        0.3 0  0 0
        0 0  -0.5 0
    hp = 2 2
        0.2 0  0.7 0
        0.7 0  -0.1 0

Exit codes: 0 when every asserted invariant passed, 1 on invariant
failure (witnesses in the JSON summary), 2 on a config parse error.
The CSV is byte-identical across repeated runs with the same config
and seed.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .coarsegrain import CoarseGrainSchedule
from .generator import evolve, expm, qds_certificate, steady_state
from .linalg import choi_matrix, is_psd, matrix_from_text
from .scenarios import (
    PRESETS,
    HeatBathModel,
    QfgrModel,
    bath_correlation,
    dual_path_residual,
    general_heat_bath_bundle,
    gibbs_limit_study,
    heat_bath_generator,
    projected_error_curve,
    qfgr_generator,
)

__all__ = ["main", "run_config", "validate_config", "ScenarioConfig", "RunReport"]

OUT_DIR_ENV = "CGLIND_OUT_DIR"
CERTIFICATE_TIMES = (0.1, 1.0, 10.0, 100.0)
FULL_CHOI_DIM_LIMIT = 9


class ConfigError(Exception):
    """Config parse or validation failure; carries (field, message) pairs."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.issues))


@dataclass
class ScenarioConfig:
    kind: str
    preset: Optional[str]
    sector_dims: Optional[list]
    matrices: Dict[str, np.ndarray]
    beta: Optional[float]
    lambdas: List[float]
    xi: float
    t_ref: float
    time_mode: str
    t_start: float
    t_stop: float
    t_count: int
    tau_bar: float
    seed: int
    csv_name: str
    json_name: str


def _parse_floats(raw: str) -> List[float]:
    return [float(tok) for tok in raw.split()]


def parse_config(path: str) -> ScenarioConfig:
    """Parse and semantically validate a config file.  All problems are
    collected and raised together as a ConfigError."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    issues = []
    if not read:
        raise ConfigError([("file", f"cannot read config file {path!r}")])

    def need(section, key, cast=str, default=None, required=True):
        if not cp.has_option(section, key):
            if required and default is None:
                issues.append((f"[{section}].{key}",
                               f"missing required field {key}"))
                return None
            return default
        raw = cp.get(section, key)
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            issues.append((f"[{section}].{key}", f"bad value {raw!r}: {exc}"))
            return None

    kind = need("scenario", "kind")
    if kind is not None and kind not in ("qfgr", "heat_bath", "custom"):
        issues.append(("[scenario].kind",
                       f"kind must be qfgr, heat_bath or custom, got {kind!r}"))
    preset = need("scenario", "preset", required=False)
    if preset is not None and preset not in PRESETS:
        issues.append(("[scenario].preset",
                       f"unknown preset {preset!r}; see 'presets list'"))
        raise ConfigError(issues)

    sector_dims = None
    matrices: Dict[str, np.ndarray] = {}
    beta = None
    if preset is None and kind in ("qfgr", "heat_bath", "custom"):
        if kind in ("qfgr", "custom"):
            raw = need("scenario", "sector_dims")
            if raw is not None:
                try:
                    sector_dims = [int(t) for t in raw.split()]
                except ValueError:
                    issues.append(("[scenario].sector_dims",
                                   f"expected integers, got {raw!r}"))
            if sector_dims is not None and sum(sector_dims) > FULL_CHOI_DIM_LIMIT:
                issues.append(("[scenario].sector_dims",
                               "sector scenarios need total dimension <= "
                               f"{FULL_CHOI_DIM_LIMIT} (full-space certificates)"))
            for key in ("h0", "hp"):
                raw = need("scenario", key)
                if raw is not None:
                    try:
                        matrices[key] = matrix_from_text(raw)
                    except ValueError as exc:
                        issues.append((f"[scenario].{key}", str(exc)))
            if sector_dims is not None and "h0" in matrices:
                d = sum(sector_dims)
                for key in ("h0", "hp"):
                    if key in matrices and matrices[key].shape != (d, d):
                        issues.append((f"[scenario].{key}",
                                       f"shape {matrices[key].shape} does not "
                                       f"match sector total {d}"))
        else:
            for key in ("h_a", "h_b", "q", "phi"):
                raw = need("scenario", key)
                if raw is not None:
                    try:
                        matrices[key] = matrix_from_text(raw)
                    except ValueError as exc:
                        issues.append((f"[scenario].{key}", str(exc)))
            beta = need("scenario", "beta", float)
            if "h_a" in matrices and "h_b" in matrices:
                full = matrices["h_a"].shape[0] * matrices["h_b"].shape[0]
                if full > 32:
                    issues.append(("[scenario].h_b",
                                   f"full space dimension {full} exceeds the "
                                   "sweepable limit 32"))
    elif preset is not None:
        preset_kind = PRESETS[preset].kind
        if kind not in (preset_kind, "custom"):
            issues.append(("[scenario].kind",
                           f"preset {preset!r} is a {preset_kind} scenario"))
        kind = preset_kind

    lambdas = []
    raw = need("schedule", "lambda")
    if raw is not None:
        try:
            lambdas = _parse_floats(raw)
        except ValueError:
            issues.append(("[schedule].lambda", f"expected numbers, got {raw!r}"))
    if not lambdas and raw is not None:
        issues.append(("[schedule].lambda", "need at least one coupling value"))
    for lam in lambdas:
        if lam == 0.0:
            issues.append(("[schedule].lambda",
                           "lambda must be nonzero (the semigroup construction "
                           "requires a nonzero coupling)"))
    xi = need("schedule", "xi", float)
    if xi is not None and not 0.0 < xi < 2.0:
        issues.append(("[schedule].xi",
                       f"xi must satisfy 0 < xi < 2, got {xi}"))
    t_ref = need("schedule", "t_ref", float)
    if t_ref is not None and t_ref <= 0.0:
        issues.append(("[schedule].t_ref", f"t_ref must be positive, got {t_ref}"))

    time_mode = need("time", "mode", default="explicit", required=False)
    if time_mode not in ("explicit", "auto"):
        issues.append(("[time].mode",
                       f"mode must be explicit or auto, got {time_mode!r}"))
    t_start = need("time", "start", float, default=0.0, required=False)
    t_stop = need("time", "stop", float,
                  default=(None if time_mode == "explicit" else 10.0),
                  required=(time_mode == "explicit"))
    t_count = need("time", "count", int, default=6, required=False)
    tau_bar = need("time", "tau_bar", float,
                   default=(None if time_mode == "auto" else 1.0),
                   required=(time_mode == "auto"))
    if t_count is not None and t_count < 1:
        issues.append(("[time].count", f"count must be >= 1, got {t_count}"))
    if time_mode == "auto" and tau_bar is not None and tau_bar <= 0:
        issues.append(("[time].tau_bar", f"tau_bar must be positive, got {tau_bar}"))

    seed = need("run", "seed", int, default=0, required=False)
    csv_name = need("output", "csv", default="run.csv", required=False)
    json_name = need("output", "json", default="run.json", required=False)

    if issues:
        raise ConfigError(issues)
    return ScenarioConfig(
        kind=kind, preset=preset, sector_dims=sector_dims, matrices=matrices,
        beta=beta, lambdas=lambdas, xi=xi, t_ref=t_ref, time_mode=time_mode,
        t_start=t_start, t_stop=t_stop, t_count=t_count, tau_bar=tau_bar,
        seed=seed, csv_name=csv_name, json_name=json_name)


def _build_model(cfg: ScenarioConfig, lam: float):
    sched = CoarseGrainSchedule(lam=lam, xi=cfg.xi, T_ref=cfg.t_ref)
    if cfg.preset is not None:
        model = PRESETS[cfg.preset].builder(lam)
        return replace(model, schedule=sched)
    if cfg.kind in ("qfgr", "custom"):
        return QfgrModel(sector_dims=cfg.sector_dims, H0=cfg.matrices["h0"],
                         Hp=cfg.matrices["hp"], schedule=sched)
    return HeatBathModel(H_A=cfg.matrices["h_a"], H_B=cfg.matrices["h_b"],
                         Q=cfg.matrices["q"], Phi=cfg.matrices["phi"],
                         beta=cfg.beta, schedule=sched)


@dataclass
class LambdaResult:
    lam: float
    times: np.ndarray
    error_norm: np.ndarray
    trace_dev: np.ndarray
    min_choi_eig: np.ndarray
    min_state_eig: np.ndarray
    certificate: dict
    extras: dict
    failures: List[str]


@dataclass
class RunReport:
    config_path: str
    kind: str
    results: List[LambdaResult]
    gibbs_distances: Optional[list]
    wall_clock_s: float
    failures: List[str] = field(default_factory=list)

    def passed(self) -> bool:
        return not self.failures and all(not r.failures for r in self.results)


def _times_for(cfg: ScenarioConfig, lam: float) -> np.ndarray:
    if cfg.time_mode == "auto":
        return np.linspace(0.0, cfg.tau_bar / (lam * lam), cfg.t_count)
    return np.linspace(cfg.t_start, cfg.t_stop, cfg.t_count)


def _choi_min_curve(schrodinger: np.ndarray, times) -> np.ndarray:
    return np.array([is_psd(choi_matrix(expm(t * schrodinger))).min_eig
                     for t in times])


def _run_lambda(cfg: ScenarioConfig, lam: float) -> LambdaResult:
    times = _times_for(cfg, lam)
    failures: List[str] = []
    extras: dict = {}

    if cfg.kind in ("qfgr", "custom"):
        model = _build_model(cfg, lam)
        qgen = qfgr_generator(model)
        bundle = qgen.bundle
        extras["sector_residual"] = qgen.residual_vs_general
        if qgen.residual_vs_general > 1e-8:
            failures.append(
                f"sector equations vs general generator: {qgen.residual_vs_general:.3e}")
        sub = bundle.subsystem
        errors = projected_error_curve(sub, model.H0, model.Hp, model.schedule,
                                       times, bundle=bundle)
        d = sub.dim
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1.0
        rho0 = sub.project_state(rho0)
        rho0 = rho0 / np.trace(rho0).real
        traj = evolve(bundle, rho0, times)
        if d <= FULL_CHOI_DIM_LIMIT:
            choi_min = _choi_min_curve(bundle.schrodinger, times)
        else:
            choi_min = _choi_min_curve(bundle.restricted_schrodinger()[0], times)
        state_bundle = bundle
    else:
        model = _build_model(cfg, lam)
        spec_bundle = heat_bath_generator(model)
        gen_bundle = general_heat_bath_bundle(model)
        residual = dual_path_residual(model, general=gen_bundle,
                                      specialized=spec_bundle)
        extras["dual_path_residual"] = residual
        if residual > 1e-7:
            failures.append(f"dual-path generator mismatch: {residual:.3e}")
        errors = projected_error_curve(
            gen_bundle.subsystem, *model.full_hamiltonian_parts(),
            model.schedule, times, bundle=gen_bundle)
        dA = model.dim_A
        rho0 = np.zeros((dA, dA), dtype=complex)
        rho0[0, 0] = 1.0
        traj = evolve(spec_bundle, rho0, times)
        full_dim = model.dim_A * model.dim_B
        if full_dim <= FULL_CHOI_DIM_LIMIT:
            choi_min = _choi_min_curve(gen_bundle.schrodinger, times)
        else:
            # reduced channel on the system algebra
            choi_min = _choi_min_curve(spec_bundle.schrodinger, times)
        ss = steady_state(spec_bundle)
        extras["steady_state_nullspace_dim"] = ss.nullspace_dim
        extras["steady_state_flagged"] = bool(ss.flagged)
        bundle = spec_bundle
        state_bundle = spec_bundle

    cert = qds_certificate(state_bundle, CERTIFICATE_TIMES, rng=cfg.seed)
    cert_dict = {
        "times": list(cert.times),
        "choi_min_eig": list(cert.choi_min_eig),
        "unitality_dev": list(cert.unitality_dev),
        "trace_preservation_dev": list(cert.trace_preservation_dev),
        "restricted_heis_norm": list(cert.restricted_heis_norm),
        "semigroup_dev": cert.semigroup_dev,
        "trace_norm_growth": cert.trace_norm_growth,
        "passed": cert.passed,
    }
    if not cert.passed:
        failures.append("semigroup certificate failed")
    if traj.max_trace_dev > 1e-9:
        failures.append(f"trace deviation {traj.max_trace_dev:.3e} > 1e-9")
    if traj.min_state_eig < -1e-9:
        failures.append(f"state eigenvalue {traj.min_state_eig:.3e} < -1e-9")
    d_eff = int(np.sqrt(len(bundle.schrodinger)))
    if np.min(choi_min) < -1e-9 * (1.0 + d_eff):
        failures.append(f"Choi minimum eigenvalue {np.min(choi_min):.3e}")

    return LambdaResult(
        lam=lam, times=times, error_norm=np.asarray(errors),
        trace_dev=traj.trace_dev,
        min_choi_eig=choi_min,
        min_state_eig=traj.min_eig,
        certificate=cert_dict, extras=extras, failures=failures)


def run_config(cfg: ScenarioConfig, config_path: str,
               threads: int = 1) -> RunReport:
    t0 = time.monotonic()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda lam: _run_lambda(cfg, lam),
                                    cfg.lambdas))
    else:
        results = [_run_lambda(cfg, lam) for lam in cfg.lambdas]

    gibbs = None
    top_failures: List[str] = []
    if cfg.kind == "heat_bath":
        model = _build_model(cfg, cfg.lambdas[0])
        if abs(bath_correlation(model).mean) <= 1e-10:
            rows = gibbs_limit_study(model, cfg.lambdas)
            gibbs = [{"lambda": r.lam, "distance": r.distance,
                      "nullspace_dim": r.nullspace_dim,
                      "flagged": bool(r.flagged)} for r in rows]
        else:
            gibbs = None

    return RunReport(config_path=config_path, kind=cfg.kind, results=results,
                     gibbs_distances=gibbs,
                     wall_clock_s=time.monotonic() - t0,
                     failures=top_failures)


def _write_csv(path: str, report: RunReport) -> None:
    lines = ["lambda,t,error_norm,trace_dev,min_choi_eig,min_state_eig"]
    for res in report.results:
        for i, t in enumerate(res.times):
            vals = (res.lam, t, res.error_norm[i], res.trace_dev[i],
                    res.min_choi_eig[i], res.min_state_eig[i])
            lines.append(",".join(f"{v:.17g}" for v in vals))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _config_echo(cfg: ScenarioConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["matrices"] = {k: [v.shape[0], v.shape[1]]
                        for k, v in cfg.matrices.items()}
    return echo


def _write_json(path: str, cfg: ScenarioConfig, report: RunReport) -> None:
    payload = {
        "tool_version": __version__,
        "config": _config_echo(cfg),
        "kind": report.kind,
        "wall_clock_s": report.wall_clock_s,
        "passed": report.passed(),
        "gibbs_distances": report.gibbs_distances,
        "results": [
            {
                "lambda": r.lam,
                "sup_error_norm": float(np.max(r.error_norm)),
                "max_trace_dev": float(np.max(r.trace_dev)),
                "min_choi_eig": float(np.min(r.min_choi_eig)),
                "min_state_eig": float(np.min(r.min_state_eig)),
                "certificate": r.certificate,
                "extras": r.extras,
                "failures": r.failures,
            }
            for r in report.results
        ],
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def validate_config(path: str) -> int:
    try:
        parse_config(path)
    except ConfigError as exc:
        for fld, msg in exc.issues:
            print(f"config error: {fld}: {msg}", file=sys.stderr)
        return 2
    print("ok")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cglind",
        description="batch driver for coarse-grained generator scenarios")
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_DIR_ENV} or cwd)")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel per-coupling jobs")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="parse and check a config only")
    p_val.add_argument("config")
    p_presets = sub.add_parser("presets", help="preset registry")
    p_presets.add_argument("action", choices=["list"])

    args = parser.parse_args(argv)

    if args.command == "presets":
        for name, preset in PRESETS.items():
            print(f"{name}  [{preset.kind}]  {preset.doc}")
        return 0

    if args.command == "validate":
        return validate_config(args.config)

    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        for fld, msg in exc.issues:
            print(f"config error: {fld}: {msg}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed

    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    os.makedirs(out_dir, exist_ok=True)

    report = run_config(cfg, args.config, threads=max(1, args.threads))
    _write_csv(os.path.join(out_dir, cfg.csv_name), report)
    _write_json(os.path.join(out_dir, cfg.json_name), cfg, report)

    if not report.passed():
        for res in report.results:
            for msg in res.failures:
                print(f"invariant failure (lambda={res.lam}): {msg}",
                      file=sys.stderr)
        for msg in report.failures:
            print(f"invariant failure: {msg}", file=sys.stderr)
        return 1
    print(f"ok: {len(report.results)} coupling values, "
          f"results in {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
