"""Command-line runner: config ingestion, experiment orchestration, output.

Usage:
    collapse-lab <experiment> --config <path> [--seed N] [--out <path>]
                 [--format csv|json]
    collapse-lab validate --config <path>

Configs are INI files with a single section named after the experiment.  All
physical inputs are in natural units (hbar = 1); lambda carries units
energy^-2 time^-1, so the smearing width T_cal = sqrt(lambda*t) is a time.

Outputs: a data table (CSV by default, one leading t or x abscissa column,
floats at 17 significant digits so they round-trip exactly) and a JSON
summary with the resolved parameters, seed, version and key scalars.  The
data table is byte-identical across reruns with the same config and seed;
the summary additionally records wall time.

Exit codes: 0 success, 2 configuration error, 3 numerical-contract
violation.  The optional environment variable COLLAPSE_LAB_MAX_WORKERS caps
trajectory-level parallelism; results are independent of the worker count
because every trajectory owns a counter-based random stream.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .decay import DecayModelParams, KGrid, integrate_kgrid, occupation, occupation_collapsed
from .engine import CollapseParams, sample_step
from .hilbert import (
    DiscreteSpectrum,
    DomainError,
    EnergyLevel,
    ObservableMatrix,
    SpectralState,
    energy_distribution,
    expectation,
)
from .ensemble import ensemble_density_matrix, ensemble_expectation_mc
from .measurement import branch_weight_ratio, fixture_path, load_branch_fixture
from .records import RecordScenario, bhattacharyya, record_violation_bound
from .rng import trajectory_rng
from .spin import SpinModelParams, sigma1_collapsed, sigma1_standard

__all__ = ["main", "ConfigError", "ExperimentConfig"]

EXPERIMENTS = ("collapse", "ensemble", "measurement", "records", "spin", "decay")


class ConfigError(Exception):
    """Configuration file is malformed or violates an experiment schema."""


def _float(raw: str) -> float:
    return float(raw)


def _positive(raw: str) -> float:
    v = float(raw)
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"must be positive, got {raw}")
    return v


def _nonneg(raw: str) -> float:
    v = float(raw)
    if not (math.isfinite(v) and v >= 0):
        raise ValueError(f"must be >= 0, got {raw}")
    return v


def _int_pos(raw: str) -> int:
    v = int(raw)
    if v <= 0:
        raise ValueError(f"must be a positive integer, got {raw}")
    return v


def _int_nonneg(raw: str) -> int:
    v = int(raw)
    if v < 0:
        raise ValueError(f"must be a nonnegative integer, got {raw}")
    return v


def _floats(raw: str) -> tuple[float, ...]:
    vals = tuple(float(x) for x in raw.replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals


def _choice(*options):
    def parse(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"must be one of {options}, got {raw!r}")
        return raw

    return parse


def _str(raw: str) -> str:
    return raw


# key -> (parser, required, default); every experiment also accepts "seed".
SCHEMAS: dict[str, dict] = {
    "collapse": {
        "lambda": (_positive, True, None),
        "energies": (_floats, True, None),
        "weights": (_floats, True, None),
        "t_max": (_positive, True, None),
        "n_steps": (_int_pos, False, 50),
        "n_traj": (_int_pos, False, 200),
        "threshold": (_positive, False, 0.999),
    },
    "ensemble": {
        "lambda": (_positive, True, None),
        "energies": (_floats, True, None),
        "magnitudes": (_floats, True, None),
        "phases": (_floats, False, None),
        "t_max": (_positive, True, None),
        "n_t": (_int_pos, False, 100),
        "n_traj": (_int_nonneg, False, 0),
    },
    "measurement": {
        "fixture": (_str, True, None),
        "lambda": (_positive, True, None),
        "t_max": (_positive, True, None),
        "n_t": (_int_pos, False, 20),
        "b_max": (_positive, True, None),
        "n_b": (_int_pos, False, 20),
    },
    "records": {
        "spectra": (_choice("disjoint", "identical", "half_overlap"), True, None),
        "lambda": (_positive, True, None),
        "b_plus": (_float, True, None),
        "b_minus": (_float, True, None),
        "t0": (_nonneg, False, 0.0),
        "t_max": (_positive, True, None),
        "n_t": (_int_pos, False, 100),
    },
    "spin": {
        "a": (_float, True, None),
        "b": (_float, True, None),
        "epsilon": (_positive, True, None),
        "sigma": (_positive, True, None),
        "t_cal": (_nonneg, False, 0.0),
        "s_min": (_float, False, None),
        "s_max": (_float, True, None),
        "n_s": (_int_pos, False, 200),
    },
    "decay": {
        "epsilon": (_positive, True, None),
        "gamma": (_positive, True, None),
        "sigma": (_positive, True, None),
        "x0": (_float, False, 0.0),
        "t_cal": (_nonneg, False, 0.0),
        "mode": (_choice("closed", "kgrid"), False, "closed"),
        "s_max": (_positive, True, None),
        "n_s": (_int_pos, False, 200),
        "n_modes": (_int_pos, False, 4096),
        "half_width": (_positive, False, 40.0),
        "dt": (_positive, False, 5e-4),
        "record_every": (_int_pos, False, 20),
        "packet": (_choice("decay", "excitation"), False, "decay"),
    },
}


class ExperimentConfig:
    """Validated experiment parameters plus output plumbing."""

    def __init__(self, experiment, parameters, master_seed=0,
                 output_path=None, output_format="csv"):
        self.experiment = experiment
        self.parameters = parameters
        self.master_seed = master_seed
        self.output_path = output_path
        self.output_format = output_format

    @classmethod
    def from_file(cls, path, experiment=None) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            read = parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not read:
            raise ConfigError(f"config file not found: {path}")
        sections = parser.sections()
        if len(sections) != 1:
            raise ConfigError(
                f"config must contain exactly one experiment section, "
                f"found {sections}"
            )
        section = sections[0]
        if section not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment section [{section}]")
        if experiment is not None and section != experiment:
            raise ConfigError(
                f"config section [{section}] does not match experiment "
                f"{experiment!r}"
            )
        schema = SCHEMAS[section]
        raw = dict(parser[section])
        seed = 0
        if "seed" in raw:
            try:
                seed = int(raw.pop("seed"))
            except ValueError as exc:
                raise ConfigError(f"invalid value for key 'seed': {exc}") from exc
            if not 0 <= seed < 2**64:
                raise ConfigError("key 'seed' must be a 64-bit unsigned integer")
        for key in raw:
            if key not in schema:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
        params = {}
        for key, (parse, required, default) in schema.items():
            if key in raw:
                try:
                    params[key] = parse(raw[key])
                except ValueError as exc:
                    raise ConfigError(f"invalid value for key '{key}': {exc}") from exc
            elif required:
                raise ConfigError(f"missing required key '{key}' in [{section}]")
            else:
                params[key] = default
        cfg = cls(section, params, master_seed=seed)
        cfg.validate_domain()
        return cfg

    def validate_domain(self):
        """Cross-key checks that a single-key parser cannot express."""
        p = self.parameters
        e = self.experiment
        if e in ("collapse", "ensemble"):
            key = "weights" if e == "collapse" else "magnitudes"
            if len(p["energies"]) != len(p[key]):
                raise ConfigError(f"keys 'energies' and '{key}' must align")
            if len(set(p["energies"])) != len(p["energies"]):
                raise ConfigError("key 'energies' must not repeat values")
            if any(w < 0 for w in p[key]) or sum(p[key]) <= 0:
                raise ConfigError(f"key '{key}' must be nonnegative, not all zero")
        if e == "ensemble" and p["phases"] is not None:
            if len(p["phases"]) != len(p["energies"]):
                raise ConfigError("keys 'energies' and 'phases' must align")
        if e == "records" and p["b_plus"] == p["b_minus"]:
            raise ConfigError("keys 'b_plus' and 'b_minus' must differ")
        if e == "records" and p["t_max"] <= p["t0"]:
            raise ConfigError("key 't_max' must exceed 't0'")
        if e == "spin":
            if abs(p["a"] ** 2 + p["b"] ** 2 - 1.0) > 1e-9:
                raise ConfigError("keys 'a' and 'b' must satisfy a^2 + b^2 = 1")
            if p["s_min"] is None:
                p["s_min"] = -p["s_max"]
            if p["s_min"] >= p["s_max"]:
                raise ConfigError("key 's_min' must be below 's_max'")

    def derived_t_cal(self) -> float | None:
        """Smearing width sqrt(lambda*t) implied by the config, if any."""
        p = self.parameters
        if self.experiment in ("collapse", "ensemble", "measurement"):
            return math.sqrt(p["lambda"] * p["t_max"])
        if self.experiment == "records":
            return math.sqrt(p["lambda"] * (p["t_max"] - p["t0"]))
        return p["t_cal"]


def _max_workers() -> int:
    raw = os.environ.get("COLLAPSE_LAB_MAX_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        v = int(raw)
    except ValueError as exc:
        raise ConfigError(f"COLLAPSE_LAB_MAX_WORKERS must be an integer: {raw!r}") from exc
    if v < 1:
        raise ConfigError("COLLAPSE_LAB_MAX_WORKERS must be >= 1")
    return v


# --- experiment runners -----------------------------------------------------
# Each returns (column names incl. units, rows, summary scalars).


def _build_state(energies, weights, phases=None):
    levels = [EnergyLevel(float(e)) for e in energies]
    mags = np.sqrt(np.asarray(weights, float) / np.sum(weights))
    ph = np.zeros(len(levels)) if phases is None else np.asarray(phases, float)
    return SpectralState.from_amplitudes(levels, mags * np.exp(1j * ph)).normalized()


def _run_collapse(p, seed):
    params = CollapseParams(p["lambda"])
    state0 = _build_state(p["energies"], p["weights"])
    n_traj, n_steps = p["n_traj"], p["n_steps"]
    times = np.linspace(p["t_max"] / n_steps, p["t_max"], n_steps)
    n_lev = len(p["energies"])
    weights = np.empty((n_traj, n_steps, n_lev))
    collapsed = np.empty((n_traj, n_steps), bool)

    def one(i):
        rng = trajectory_rng(seed, i)
        state, t_prev = state0, 0.0
        for s, t in enumerate(times):
            _, state = sample_step(state, params, t - t_prev, rng)
            t_prev = t
            # energies are unique per config validation, so the distribution
            # grid coincides with the (sorted) config energies
            _, w = energy_distribution(state).as_arrays()
            weights[i, s] = w
            collapsed[i, s] = w.max() >= p["threshold"]

    workers = _max_workers()
    if workers == 1:
        for i in range(n_traj):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(n_traj)))
    frac = collapsed.mean(axis=0)
    mean_w = weights.mean(axis=0)
    cols = ["t (time)", "collapsed_fraction (dimensionless)"] + [
        f"mean_weight_E{i} (dimensionless)" for i in range(n_lev)
    ]
    rows = [
        [times[s], frac[s], *mean_w[s]] for s in range(n_steps)
    ]
    summary = {
        "T_cal": math.sqrt(p["lambda"] * p["t_max"]),
        "collapsed_fraction": float(frac[-1]),
        "n_traj": n_traj,
    }
    return cols, rows, summary


def _run_ensemble(p, seed):
    params = CollapseParams(p["lambda"])
    state0 = _build_state(p["energies"], np.square(p["magnitudes"]), p["phases"])
    times = np.linspace(0.0, p["t_max"], p["n_t"])
    n = len(p["energies"])
    iu = np.triu_indices(n, 1)
    cols = ["t (time)", "mean_energy (energy)", "purity (dimensionless)"] + [
        f"offdiag_abs_{i}{j} (dimensionless)" for i, j in zip(*iu)
    ]
    ham = ObservableMatrix.hamiltonian(state0.levels)
    rows = []
    for t in times:
        rho = ensemble_density_matrix(state0, params, float(t)).entries
        rows.append(
            [
                float(t),
                float(np.trace(rho @ ham.entries).real),
                float(np.trace(rho @ rho).real),
                *np.abs(rho[iu]),
            ]
        )
    summary = {
        "T_cal": math.sqrt(p["lambda"] * p["t_max"]),
        "mean_energy": float(expectation(state0, ham)),
    }
    if p["n_traj"]:
        mc, se = ensemble_expectation_mc(
            state0, params, p["t_max"], ham, p["n_traj"], seed
        )
        summary["mc_mean_energy"] = mc
        summary["mc_standard_error"] = se
    return cols, rows, summary


def _run_measurement(p, seed):
    path = Path(p["fixture"])
    if not path.exists():
        path = fixture_path(p["fixture"])
    spec = load_branch_fixture(path)
    params = CollapseParams(p["lambda"])
    ts = np.linspace(p["t_max"] / p["n_t"], p["t_max"], p["n_t"])
    bs = np.linspace(-p["b_max"], p["b_max"], p["n_b"])
    cols = ["t (time)", "B (record)", "weight_ratio (dimensionless)"]
    rows = []
    ratios = []
    for t in ts:
        for b in bs:
            r = branch_weight_ratio(spec, params, float(t), float(b))
            rows.append([float(t), float(b), r])
            ratios.append(r)
    ratios = np.asarray(ratios)
    summary = {
        "shared_spectrum": spec.shared_spectrum,
        "ratio_min": float(ratios.min()),
        "ratio_max": float(ratios.max()),
        "ratio_spread_rel": float(ratios.max() / ratios.min() - 1.0),
    }
    return cols, rows, summary


def builtin_record_spectra(name: str) -> tuple[DiscreteSpectrum, DiscreteSpectrum]:
    """Shared-grid spectra pairs: disjoint, identical, or half-overlapping.

    The half-overlap pair puts 1000 equal weights each on a 1500-point grid
    with 500 points in common, so the Bhattacharyya overlap is exactly 0.5.
    """
    grid = tuple(i * 1e-3 for i in range(1500))
    def uniform(lo, hi):
        w = np.zeros(len(grid))
        w[lo:hi] = 1.0 / (hi - lo)
        return DiscreteSpectrum(grid, tuple(w))

    if name == "disjoint":
        return uniform(0, 750), uniform(750, 1500)
    if name == "identical":
        return uniform(0, 1500), uniform(0, 1500)
    if name == "half_overlap":
        return uniform(0, 1000), uniform(500, 1500)
    raise DomainError(f"unknown builtin spectra {name!r}")


def _run_records(p, seed):
    plus, minus = builtin_record_spectra(p["spectra"])
    scenario = RecordScenario(
        plus, minus, p["b_plus"], p["b_minus"], p["lambda"], p["t0"]
    )
    dt0 = (p["t_max"] - p["t0"]) / p["n_t"]
    ts = np.linspace(p["t0"] + dt0, p["t_max"], p["n_t"])
    cols = ["t (time)", "record_bound (dimensionless)"]
    rows = []
    for t in ts:
        v, _ = record_violation_bound(scenario, float(t))
        rows.append([float(t), v])
    summary = {
        "bound_sup": bhattacharyya(plus, minus),
        "bhattacharyya": bhattacharyya(plus, minus),
        "T_cal": math.sqrt(p["lambda"] * (p["t_max"] - p["t0"])),
    }
    return cols, rows, summary


def _run_spin(p, seed):
    sp = SpinModelParams(p["a"], p["b"], p["epsilon"], p["sigma"], p["t_cal"])
    ss = np.linspace(p["s_min"], p["s_max"], p["n_s"])
    cols = [
        "t (time)",
        "sigma1_standard (dimensionless)",
        "sigma1_collapsed (dimensionless)",
    ]
    rows = [[float(s), sigma1_standard(float(s), sp), sigma1_collapsed(float(s), sp)]
            for s in ss]
    summary = {"envelope": sp.envelope, "epsilon_T_cal": p["epsilon"] * p["t_cal"]}
    return cols, rows, summary


def _run_decay(p, seed):
    dp = DecayModelParams(p["epsilon"], p["gamma"], p["sigma"], p["x0"], p["t_cal"])
    if p["mode"] == "closed":
        ss = np.linspace(-p["s_max"], p["s_max"], p["n_s"])
        cols = [
            "t (time)",
            "occupation (dimensionless)",
            "occupation_collapsed (dimensionless)",
        ]
        rows = [
            [float(s), occupation(float(s), dp), occupation_collapsed(float(s), dp)]
            for s in ss
        ]
        summary = {"T_cal": p["t_cal"], "Gamma_T_cal": p["gamma"] * p["t_cal"]}
        return cols, rows, summary
    grid = KGrid.for_params(dp, p["half_width"], p["n_modes"], p["dt"])
    res = integrate_kgrid(dp, grid, p["packet"], p["s_max"], p["record_every"])
    cols = [
        "t (time)",
        "occupation (dimensionless)",
        "total_probability (dimensionless)",
    ]
    rows = [
        [float(t), float(o), float(q)]
        for t, o, q in zip(res.times, res.occupation, res.total_probability)
    ]
    span = res.times[-1] - res.times[0]
    summary = {
        "T_cal": p["t_cal"],
        "probability_drift_per_unit_time": float(
            abs(res.total_probability[-1] - res.total_probability[0]) / span
        ),
        "recurrence_time": grid.recurrence_time,
    }
    return cols, rows, summary


RUNNERS = {
    "collapse": _run_collapse,
    "ensemble": _run_ensemble,
    "measurement": _run_measurement,
    "records": _run_records,
    "spin": _run_spin,
    "decay": _run_decay,
}


# --- output -----------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, cols, rows):
    lines = [",".join(cols)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _summary_doc(cfg, summary, wall_time):
    return {
        "experiment": cfg.experiment,
        "parameters": {k: v for k, v in cfg.parameters.items()},
        "seed": cfg.master_seed,
        "version": f"collapse-lab-v{__version__}",
        "wall_time_s": wall_time,
        "scalars": summary,
    }


def run(cfg: ExperimentConfig) -> int:
    start = time.perf_counter()
    cols, rows, summary = RUNNERS[cfg.experiment](cfg.parameters, cfg.master_seed)
    wall = time.perf_counter() - start
    out = Path(cfg.output_path or f"{cfg.experiment}_out.{cfg.output_format}")
    doc = _summary_doc(cfg, summary, wall)
    if cfg.output_format == "csv":
        write_csv(out, cols, rows)
        out.with_suffix(".summary.json").write_text(
            json.dumps(doc, indent=2, default=float) + "\n"
        )
    else:
        doc["columns"] = cols
        doc["rows"] = [[_fmt(v) for v in row] for row in rows]
        out.write_text(json.dumps(doc, indent=2, default=float) + "\n")
    print(f"wrote {out}")
    return 0


def validate(path) -> int:
    cfg = ExperimentConfig.from_file(path)
    print(f"experiment: {cfg.experiment}")
    for key, val in sorted(cfg.parameters.items()):
        print(f"  {key} = {val}")
    print(f"  seed = {cfg.master_seed}")
    tcal = cfg.derived_t_cal()
    if tcal is not None:
        print(f"derived T_cal = sqrt(lambda*t) = {_fmt(tcal)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="collapse-lab",
        description="Energy-driven collapse experiments on finite spectral models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
    vp = sub.add_parser("validate", help="check a config without running it")
    vp.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            return validate(args.config)
        cfg = ExperimentConfig.from_file(args.config, experiment=args.command)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            cfg.master_seed = args.seed
        cfg.output_path = args.out
        cfg.output_format = args.format
        _max_workers()  # validate the env var before doing any work
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
