"""Batch front end: ``unified-qme run`` and ``unified-qme show``.

Exit codes: 0 success, 2 configuration error, 3 propagation divergence,
4 an enabled property check failed.  The default output directory comes
from ``$UNIFIED_QME_OUT`` (falling back to ``./unified_qme_out``).

Outputs of ``run``
------------------
``traj_<method>.csv``
    ``t_fs, rho_re_i_j..., rho_im_i_j..., min_eig, trace``.
``distance_<method>_vs_<reference>.csv``
    Trace distance to the reference method (``heom`` when requested,
    otherwise the first method).
``coherence.csv``
    The scenario's coherence ``<e_i|rho|e_j>`` in the eigenbasis of H_S.
``summary.json``
    Resolved scenario echo, certificates, validity, thermo, HEOM convergence
    scan, fitted rates and check outcomes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .dynamics import (
    PropagationDiverged,
    TimeGrid,
    coherence_series,
    default_dt,
    fit_decay_rate,
    positivity_monitor,
    propagate,
    trace_distance_series,
)
from .generators import KINDS, build, gkls_certificate
from .heom import UnsupportedBathError, build_hierarchy, convergence_scan
from .linalg import InvariantError
from .scenarios import BUILTINS, ScenarioError, ScenarioSpec, builtin
from .spectral import validity_diagnostics
from .thermo import covariance_residual, entropy_production, gibbs_state, stationarity_residual
from .units import CM_TO_RAD_PER_FS

__all__ = ["RunConfig", "ScenarioParseError", "parse_scenario", "dump_scenario", "run", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_CHECK = 0, 2, 3, 4
CHECKS = ("gkls", "stationarity", "covariance", "entropy", "positivity")
OUT_ENV = "UNIFIED_QME_OUT"

# check thresholds
GKLS_TOL = 1e-12
STATIONARITY_TOL = 1e-10
COVARIANCE_TOL = 1e-10
ENTROPY_TOL = 1e-8
POSITIVITY_TOL = 1e-8
COVARIANCE_TIMES_FS = (10.0, 100.0, 1000.0)
COVARIANCE_SAMPLES = 20
COVARIANCE_SEED = 20240611


class ScenarioParseError(ValueError):
    """Scenario file problem with a ``path:line`` prefix."""


# --- scenario files ---------------------------------------------------------------

def _locate(node, path) -> int | None:
    """1-based line of the YAML node at ``path`` (deepest reachable ancestor)."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in path:
        nxt = None
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    nxt = v
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        if nxt is None:
            break
        node = nxt
        line = node.start_mark.line + 1
    return line


def parse_scenario(source) -> ScenarioSpec:
    """Read a scenario from a YAML file path (or a built-in name).

    Errors carry the file name and line of the offending entry.
    """
    if isinstance(source, str) and source in BUILTINS:
        return builtin(source)
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"{path}: cannot read scenario ({exc.strerror})") from None
    return parse_scenario_text(text, str(path))


def parse_scenario_text(text: str, name: str = "<string>") -> ScenarioSpec:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{name}:{mark.line + 1}" if mark is not None else name
        raise ScenarioParseError(f"{where}: invalid YAML: {getattr(exc, 'problem', exc)}") from None
    try:
        return ScenarioSpec.from_dict(data)
    except ScenarioError as exc:
        line = _locate(root, exc.path)
        loc = ".".join(str(p) for p in exc.path) or "<top>"
        raise ScenarioParseError(f"{name}:{line}: {loc}: {exc}") from None


def dump_scenario(spec: ScenarioSpec) -> str:
    return yaml.safe_dump(spec.to_dict(), sort_keys=False, default_flow_style=None, width=1000)


# --- run -----------------------------------------------------------------------

@dataclass
class RunConfig:
    scenario: str
    methods: list[str] | None = None  # None: the scenario's list
    out: str | None = None
    kB: float | None = None
    heom_depth: int | None = None
    dt_fs: float | None = None
    t_max_fs: float | None = None
    level_tolerance: float | None = None
    checks: list[str] = field(default_factory=list)

    def output_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV) or "unified_qme_out")


def _resolve(config: RunConfig) -> ScenarioSpec:
    spec = parse_scenario(config.scenario)
    changes = {}
    if config.methods is not None:
        changes["methods"] = list(config.methods)
    for name in ("kB", "heom_depth", "dt_fs", "t_max_fs", "level_tolerance"):
        val = getattr(config, name)
        if val is not None:
            changes[name] = val
    if config.level_tolerance is not None and spec.h0_matrix is not None:
        raise ScenarioError("--level-tolerance conflicts with the scenario's explicit H0")
    if config.kB is not None and not config.kB > 0:
        raise ScenarioError("kB must be positive")
    for c in config.checks:
        if c not in CHECKS:
            raise ScenarioError(f"unknown check {c!r}; expected a subset of {CHECKS}")
    return spec.with_overrides(**changes) if changes else spec


def _write_csv(path: Path, header: list[str], rows: np.ndarray):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join("%.17g" % v for v in r) + "\n")


def _trajectory_rows(traj):
    d = traj.dim
    s = traj.states.reshape(len(traj), d * d)
    return np.column_stack([traj.times, s.real, s.imag, positivity_monitor(traj), traj.traces()])


def _trajectory_header(d):
    idx = [(i, j) for i in range(d) for j in range(d)]
    return (["t_fs"] + [f"rho_re_{i}_{j}" for i, j in idx] + [f"rho_im_{i}_{j}" for i, j in idx]
            + ["min_eig", "trace"])


def _random_states(dim, n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        r = g @ g.conj().T
        out.append(r / np.trace(r).real)
    return out


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _run(config: RunConfig, log) -> int:
    spec = _resolve(config)
    out = config.output_dir()
    out.mkdir(parents=True, exist_ok=True)

    h = spec.hamiltonian()
    couplings = spec.coupling_operators()
    baths = spec.bath_descriptors()
    split = spec.split()
    rho0 = spec.initial_state()
    gen_methods = [m for m in spec.methods if m in KINDS]
    generators = {m: build(m, split, couplings, baths) for m in gen_methods}

    if spec.dt_fs is not None:
        dt = spec.dt_fs
    elif generators:
        dt = min(default_dt(g) for g in generators.values())
    else:
        dt = default_dt(build("davies", split, couplings, baths))
    grid = TimeGrid.spanning(spec.t_max_fs, dt)

    trajs = {}
    scan = None
    for m in spec.methods:
        log(f"propagating {m} ({grid.steps} steps of {grid.dt:.6g} fs)")
        if m == "heom":
            depths = [spec.heom_depth, spec.heom_depth + 2]
            scan = convergence_scan(lambda L: build_hierarchy(h, couplings, baths, L), rho0, grid, depths)
            trajs[m] = scan.trajectories[spec.heom_depth]
        else:
            trajs[m] = propagate(generators[m], rho0, grid)

    reference = "heom" if "heom" in trajs else spec.methods[0]
    d = spec.dim
    for m, tr in trajs.items():
        _write_csv(out / f"traj_{m}.csv", _trajectory_header(d), _trajectory_rows(tr))
    distances = {}
    for m, tr in trajs.items():
        if m == reference:
            continue
        dist = trace_distance_series(tr, trajs[reference])
        distances[m] = float(np.max(dist))
        _write_csv(out / f"distance_{m}_vs_{reference}.csv", ["t_fs", "trace_distance"],
                   np.column_stack([tr.times, dist]))

    fitted = {}
    if spec.coherence is not None:
        i, j = spec.coherence
        basis = spec.eigenbasis()
        cols, header = [grid.times], ["t_fs"]
        for m, tr in trajs.items():
            x = coherence_series(tr, basis, i, j)
            cols += [x.real, x.imag, np.abs(x)]
            header += [f"{m}_re", f"{m}_im", f"{m}_abs"]
            lo, hi = spec.fit_window_fs or (np.inf, -np.inf)
            if np.count_nonzero((tr.times >= lo) & (tr.times <= hi)) >= 2:
                fitted[m] = fit_decay_rate(tr.times, x, spec.fit_window_fs) / CM_TO_RAD_PER_FS
        _write_csv(out / "coherence.csv", header, np.column_stack(cols))

    # per-method properties
    labels = list(dict.fromkeys(b.label for b in baths))
    betas = {b.label: b.beta for b in baths}
    temps = {b.label: b.meta.get("temperature") for b in baths}
    uniform_beta = len(set(betas.values())) == 1
    methods_info = {}
    checks = {c: {} for c in config.checks}
    states = _random_states(d, COVARIANCE_SAMPLES, COVARIANCE_SEED)
    for m, tr in trajs.items():
        pos = positivity_monitor(tr)
        info = {"min_eigenvalue_trajectory": float(pos.min()),
                "first_negative_step": int(np.argmax(pos < -POSITIVITY_TOL)) if np.any(pos < -POSITIVITY_TOL) else None,
                "max_trace_drift": float(np.max(np.abs(tr.traces() - 1.0)))}
        if m in distances:
            info["max_trace_distance_to_reference"] = distances[m]
        if m in fitted:
            info["fitted_coherence_rate_cm"] = fitted[m]
        if "positivity" in checks:
            checks["positivity"][m] = _status(info["min_eigenvalue_trajectory"] >= -POSITIVITY_TOL)
        g = generators.get(m)
        if g is not None:
            cert = gkls_certificate(g)
            info["gkls_certificate"] = {"min_eigenvalue": cert.min_eigenvalue,
                                        "max_eigenvalue": cert.max_eigenvalue, "blocks": cert.summary()}
            h_ref = split.h0 if m.startswith("unified") else h
            thermo = {}
            if uniform_beta:
                thermo["stationarity_residual"] = stationarity_residual(g, gibbs_state(h_ref, betas[labels[0]]))
            samples = [(t, r) for t in COVARIANCE_TIMES_FS for r in states]
            thermo["covariance_residual"] = covariance_residual(g, h_ref, samples)
            ep = entropy_production(tr, g, betas, h0=h_ref)
            thermo["entropy_production_min"] = ep.min_sigma
            thermo["entropy_production_flagged_steps"] = list(ep.flagged)
            thermo["heat_current_final"] = {k: float(v[-1]) for k, v in ep.heat_currents.items()}
            info["thermo"] = thermo
            if "gkls" in checks:
                checks["gkls"][m] = _status(cert.is_psd(GKLS_TOL))
            if "stationarity" in checks:
                checks["stationarity"][m] = (_status(thermo["stationarity_residual"] <= STATIONARITY_TOL)
                                             if uniform_beta else "skipped: baths at different temperatures")
            if "covariance" in checks:
                checks["covariance"][m] = _status(thermo["covariance_residual"] <= COVARIANCE_TOL)
            if "entropy" in checks:
                checks["entropy"][m] = _status(ep.min_sigma >= -ENTROPY_TOL)
        methods_info[m] = info

    failed = [f"{c}:{m}" for c, res in checks.items() for m, s in res.items() if s == "fail"]
    summary = {
        "scenario": spec.to_dict(),
        "resolved": {
            "grid": {"t0_fs": grid.t0, "dt_fs": grid.dt, "steps": grid.steps, "t_max_fs": grid.t_max},
            "kB_cm_per_K": spec.kB,
            "temperatures_K": temps,
            "reference_method": reference,
            "heom_depth": spec.heom_depth if "heom" in trajs else None,
            "checks": list(config.checks),
            "units": {"energy": "cm^-1", "time": "fs", "temperature": "K"},
        },
        "split": {
            "h0_levels": [float(lv.energy) for lv in split.h0_levels],
            "centers": [float(c) for c in split.centers],
            "clusters": [[float(split.bohr.frequencies[k]) for k in c.members] for c in split.clusters],
            "diagnostics": {k: v for k, v in split.diagnostics.items() if isinstance(v, (int, float, str, list))},
        },
        "validity": validity_diagnostics(split, baths, couplings).as_dict(),
        "methods": methods_info,
        "convergence": scan.as_dict() if scan is not None else None,
        "checks": checks,
        "failed_checks": failed,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False, default=float)
        fh.write("\n")
    if failed:
        log("failed checks: " + ", ".join(failed))
        return EXIT_CHECK
    return EXIT_OK


def run(config: RunConfig, log=None) -> int:
    """Execute a run; returns the process exit code."""
    log = log or (lambda msg: print(msg, file=sys.stderr))
    if config.methods is not None and not config.methods:
        log("error: at least one method is required")
        return EXIT_CONFIG
    try:
        return _run(config, log)
    except (ScenarioError, ScenarioParseError, UnsupportedBathError, InvariantError) as exc:
        log(f"error: {exc}")
        return EXIT_CONFIG
    except PropagationDiverged as exc:
        log(f"error: propagation diverged: {exc}")
        return EXIT_DIVERGED


# --- argument parsing --------------------------------------------------------------

def _methods_arg(text: str) -> list[str]:
    return [m.strip() for m in text.split(",") if m.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unified-qme", description="Quantum master equations versus HEOM.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="propagate a scenario and write CSV/JSON output")
    r.add_argument("--scenario", required=True, help=f"built-in name {sorted(BUILTINS)} or YAML path")
    r.add_argument("--methods", type=_methods_arg, default=None,
                   help="comma-separated subset of " + ",".join(KINDS + ("heom",)))
    r.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./unified_qme_out)")
    r.add_argument("--kB", type=float, default=None, help="Boltzmann constant in cm^-1/K")
    r.add_argument("--heom-depth", type=int, default=None)
    r.add_argument("--dt-fs", type=float, default=None)
    r.add_argument("--t-max-fs", type=float, default=None)
    r.add_argument("--level-tolerance", type=float, default=None, help="reference-split tolerance in cm^-1")
    r.add_argument("--checks", type=_methods_arg, default=[], help="comma-separated subset of " + ",".join(CHECKS))

    s = sub.add_parser("show", help="print a scenario as YAML (useful as a template)")
    s.add_argument("--scenario", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "show":
        try:
            sys.stdout.write(dump_scenario(parse_scenario(args.scenario)))
        except (ScenarioError, ScenarioParseError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    config = RunConfig(scenario=args.scenario, methods=args.methods, out=args.out, kB=args.kB,
                       heom_depth=args.heom_depth, dt_fs=args.dt_fs, t_max_fs=args.t_max_fs,
                       level_tolerance=args.level_tolerance, checks=list(args.checks))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
