"""Reproducible experiment runner.

Configurations are JSON documents with a fixed schema (unknown keys are
rejected so typos cannot silently change physics).  Every run writes its
artifacts (CSV tables, Wigner grids, JSON reports) plus a manifest that
lists each output file with a content checksum; identical configuration,
seed and package version produce byte-identical artifacts.

Exit codes: 0 success, 1 a physics check failed, 2 configuration error.
"""

import argparse
import dataclasses
import hashlib
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, conventions
from .gkp import GeneralDyneOutcome, run_gkp_protocol
from .gridrep import XGrid
from .metrics import partial_trace
from .opo import OPOConfig, run_opo_trajectories
from .params import BogoliubovDomainError, SystemParams
from .qnd import QNDProtocolConfig, make_kraus_family, povm_purity, run_qnd_protocol
from .spaces import ModeSpace
from .validate import run_validation_suite
from .wigner import wigner, wigner_from_wavefunction

EXPERIMENTS = ("qnd-protocol", "povm-purity", "gkp-generate", "opo-trajectories", "validate")

_PRESET_FILES = {
    "qnd-protocol": "qnd-readout.json",
    "povm-purity": "povm-purity-scan.json",
    "gkp-generate": "gkp-15db.json",
    "opo-trajectories": "opo-monitored.json",
    "validate": "validate.json",
}


class ConfigError(ValueError):
    """Configuration rejected (unknown key, missing key, unphysical value)."""


_SCHEMA = {
    "experiment": str,
    "seed": int,
    "output_dir": str,
    "threads": int,
    "system": dict,
    "truncation": dict,
    "protocol": dict,
}
_SYSTEM_KEYS = {"Delta", "g_eff", "delta", "beta", "g", "kappa_a", "kappa_b", "lam"}
_TRUNCATION_KEYS = {"n_signal", "n_pump"}
_PROTOCOL_KEYS = {
    "qnd-protocol": {
        "t", "alpha", "pump_width", "hamiltonian", "input_basis",
        "wigner", "wigner_half_width", "wigner_points", "health_tol",
    },
    "povm-purity": {"d", "widths", "n_max"},
    "gkp-generate": {
        "pump_width_db", "eps", "phi", "meter_amplitude",
        "grid_half_width", "grid_step", "wigner", "n_levels", "signal_fock_dim",
    },
    "opo-trajectories": {
        "t_final", "dt", "n_traj", "n_levels", "n_pump_levels",
        "record_every", "initial_level", "initial_pump",
    },
    "validate": set(),
}


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    output_dir: str
    threads: int
    system: dict
    truncation: dict
    protocol: dict

    def to_dict(self):
        return dataclasses.asdict(self)

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def system_params(self) -> SystemParams:
        sys_d = dict(self.system)
        rates = {k: float(sys_d.get(k, 0.0)) for k in ("kappa_a", "kappa_b", "lam")}
        g = float(sys_d.get("g", 1.0))
        try:
            if "Delta" in sys_d:
                return SystemParams.from_targets(
                    float(sys_d["Delta"]), float(sys_d.get("g_eff", 0.0)), g=g, **rates
                )
            return SystemParams(
                delta=float(sys_d["delta"]), beta=float(sys_d.get("beta", 0.0)), g=g, **rates
            )
        except (BogoliubovDomainError, ValueError) as exc:
            raise ConfigError(f"unphysical system parameters: {exc}") from exc

    def space(self) -> ModeSpace:
        return ModeSpace(int(self.truncation["n_signal"]), int(self.truncation["n_pump"]))


def _reject_unknown(section, allowed, where):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def parse_config(text) -> ExperimentConfig:
    """Parse and validate a JSON configuration document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(raw, set(_SCHEMA), "top level")
    if "experiment" not in raw:
        raise ConfigError(f"missing required key 'experiment' (one of {EXPERIMENTS})")
    exp = raw["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; expected one of {EXPERIMENTS}")
    required = {"validate": ()}.get(exp, ("system", "truncation"))
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r} for experiment {exp}")
    system = dict(raw.get("system", {}))
    _reject_unknown(system, _SYSTEM_KEYS, "'system'")
    if "Delta" in system and "delta" in system:
        raise ConfigError("give either target form (Delta, g_eff) or primitive form (delta, beta)")
    truncation = dict(raw.get("truncation", {"n_signal": 2, "n_pump": 2}))
    _reject_unknown(truncation, _TRUNCATION_KEYS, "'truncation'")
    protocol = dict(raw.get("protocol", {}))
    _reject_unknown(protocol, _PROTOCOL_KEYS[exp], f"'protocol' of {exp}")
    cfg = ExperimentConfig(
        experiment=exp,
        seed=int(raw.get("seed", 0)),
        output_dir=str(raw.get("output_dir", "out")),
        threads=int(raw.get("threads", 1)),
        system=system,
        truncation=truncation,
        protocol=protocol,
    )
    if exp != "validate":
        params = cfg.system_params()  # fail early on unphysical parameters
        try:
            params.Delta  # squeezed-basis domain check (delta > r)
        except BogoliubovDomainError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.space()
    return cfg


def load_preset(experiment) -> str:
    """Text of the shipped default configuration for an experiment."""
    name = _PRESET_FILES[experiment]
    return resources.files("opaqnd.presets").joinpath(name).read_text()


def seed_policy(base_seed, trajectory_index):
    """Counter-based per-trajectory stream: Philox keyed by (seed, index)."""
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(trajectory_index,))
    return np.random.Generator(np.random.Philox(seq))


# ---------------------------------------------------------------------------
# artifact writing


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, columns: dict, header_lines=()):
    """CSV with '#' header comments; deterministic float formatting."""
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(",".join(names) + "\n")
        for r in range(rows):
            f.write(",".join(_fmt(columns[n][r]) for n in names) + "\n")


def write_matrix_csv(path: Path, matrix, header_lines=()):
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        for row in np.asarray(matrix):
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _write_wigner(outdir: Path, stem, grid, header):
    write_matrix_csv(
        outdir / f"{stem}.csv",
        grid.values,
        header_lines=header + ["rows: p axis, columns: x axis (see axes sidecar)"],
    )
    write_csv(
        outdir / f"{stem}.axes.csv",
        {
            "axis": ["x"] * len(grid.xs) + ["p"] * len(grid.ps),
            "index": list(range(len(grid.xs))) + list(range(len(grid.ps))),
            "value": list(grid.xs) + list(grid.ps),
        },
        header_lines=header + ["axis sidecar for the matching Wigner matrix"],
    )


def _sha256(path: Path):
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    raise TypeError(f"not JSON serializable: {type(o)}")


def write_json(path: Path, payload):
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# experiments


def _units_header(extra=()):
    return [
        "opaqnd v" + __version__,
        "units: time in 1/g, rates in g, quadratures dimensionless (vacuum width 0.5)",
        *extra,
    ]


def _run_qnd(cfg: ExperimentConfig, outdir: Path):
    p = cfg.protocol
    params = cfg.system_params()
    space = cfg.space()
    qcfg = QNDProtocolConfig(
        params=params,
        space=space,
        t=float(p.get("t", 1.0)),
        alpha=complex(p.get("alpha", 0.7)),
        w=float(p.get("pump_width", 0.25)),
        hamiltonian=p.get("hamiltonian", "effective"),
        input_basis=p.get("input_basis", "fock-coherent"),
        health_tol=float(p.get("health_tol", 5e-3)),
    )
    res = run_qnd_protocol(qcfg)
    files = []

    write_csv(
        outdir / "outcome_density.csv",
        {"p_b": res.grid, "density": res.density, "kraus_fidelity": res.kraus_fidelities},
        header_lines=_units_header(
            ["formula: pump-displacement readout density, peaks at g_eff*t*(N+1/2)"]
        ),
    )
    files.append("outcome_density.csv")

    write_csv(
        outdir / "conditional_fidelity.csv",
        {
            "level": [b.level for b in res.bins],
            "window_lo": [b.window[0] for b in res.bins],
            "window_hi": [b.window[1] for b in res.bins],
            "probability": [b.probability for b in res.bins],
            "fidelity": [b.fidelity for b in res.bins],
        },
        header_lines=_units_header(
            ["formula: binned conditional states vs squeezed number states"]
        ),
    )
    files.append("conditional_fidelity.csv")

    checks = {
        "normalization_defect_below_5pc": res.normalization_defect < 0.05,
        "top_population_within_gate": res.top_population <= qcfg.health_tol,
    }
    meta = {
        "params": {"Delta": params.Delta, "g_eff": params.g_eff, "u": params.u,
                   "delta": params.delta, "beta": params.beta},
        "displacement_per_level": params.g_eff * qcfg.t,
        "n_max": res.family.n_max,
        "top_population": res.top_population,
        "normalization_defect": res.normalization_defect,
        "fidelities": {str(b.level): b.fidelity for b in res.bins},
    }
    write_json(outdir / "metadata.json", meta)
    files.append("metadata.json")

    if p.get("wigner", True):
        half = float(p.get("wigner_half_width", 4.0))
        pts = int(p.get("wigner_points", 121))
        xs = np.linspace(-half, half, pts)
        ps_pump = np.linspace(-2.0, params.g_eff * qcfg.t * 3.5 + 1.0, pts)
        panels = {
            "wigner_signal_initial": wigner(res.initial_signal, xs, xs),
            "wigner_pump_initial": wigner(res.initial_pump, xs, xs),
            "wigner_signal_final": wigner(
                partial_trace(res.evolved, space, keep="signal"), xs, xs
            ),
            "wigner_pump_final": wigner(
                partial_trace(res.evolved, space, keep="pump"), xs, ps_pump
            ),
        }
        for b in res.bins[:3]:
            panels[f"wigner_conditional_{b.level}"] = wigner(b.rho, xs, xs)
        for stem, gridw in panels.items():
            _write_wigner(outdir / ".", stem, gridw, _units_header())
            files.extend([f"{stem}.csv", f"{stem}.axes.csv"])
    return files, checks


def _run_povm_purity(cfg: ExperimentConfig, outdir: Path):
    p = cfg.protocol
    params = cfg.system_params()
    d = float(p.get("d", 1.0))
    widths = [float(w) for w in p.get("widths", (0.5, 0.25, 0.125))]
    n_max = int(p.get("n_max", 8))
    grid = None
    columns = {}
    completeness = {}
    for w in widths:
        fam = make_kraus_family(cfg.space().n_signal, params.u, d, w, n_max=n_max, grid=grid)
        if grid is None:
            grid = fam.grid
            columns["p_b"] = grid
        columns[f"purity_w{w:g}"] = np.array([povm_purity(pb, fam) for pb in grid])
        completeness[f"w{w:g}"] = fam.completeness_defect()
    write_csv(
        outdir / "purity.csv",
        columns,
        header_lines=_units_header(
            [f"formula: tr(F^2)/tr(F)^2 for the readout family, d = g_eff*t = {d:g}"]
        ),
    )
    write_json(outdir / "completeness.json", completeness)
    checks = {"completeness_below_1e-3": max(completeness.values()) < 1e-3}
    return ["purity.csv", "completeness.json"], checks


def _run_gkp(cfg: ExperimentConfig, outdir: Path):
    p = cfg.protocol
    params = cfg.system_params()
    w = conventions.width_from_db(float(p.get("pump_width_db", 15.0)))
    half = float(p.get("grid_half_width", 10.24))
    step = float(p.get("grid_step", 0.01))
    size = int(round(2 * half / step))
    size += size % 2
    grid = XGrid(size=size, dx=step)
    outcome = GeneralDyneOutcome(float(p.get("eps", 0.1)), float(p.get("phi", np.pi / 4)))
    rep = run_gkp_protocol(
        w,
        outcome,
        params=params,
        A0=p.get("meter_amplitude"),
        grid=grid,
        n_levels=int(p.get("n_levels", 56)),
        signal_fock_dim=int(p.get("signal_fock_dim", 90)),
    )
    write_csv(
        outdir / "marginal_x.csv",
        {"x": grid.xs, "density": rep.marginal_x},
        header_lines=_units_header(["position marginal of the prepared comb state"]),
    )
    ps, dens_p = rep.marginal_p
    write_csv(
        outdir / "marginal_p.csv",
        {"p": ps, "density": dens_p},
        header_lines=_units_header(["momentum marginal of the prepared comb state"]),
    )
    sq = rep.squeezing
    report = {
        "outcome": {"eps": rep.outcome.eps, "phi": rep.outcome.phi},
        "x_phi": rep.x_phi,
        "meter_amplitude": rep.A0,
        "pump_width": rep.w,
        "db_x_stabilizer": sq.db_x_stabilizer,
        "db_p_stabilizer": sq.db_p_stabilizer,
        "db_x_tooth": sq.db_x_tooth,
        "db_p_tooth": sq.db_p_tooth,
        "tooth_spacing_x": sq.tooth_spacing_x,
        "fidelity_to_analytic": rep.fidelity_to_analytic,
        "fidelity_exact_vs_kraus": rep.fidelity_exact_vs_kraus,
        "fidelity_exact_vs_approx": rep.fidelity_exact_vs_approx,
        "outcome_density": rep.outcome_density,
    }
    write_json(outdir / "report.json", report)
    files = ["marginal_x.csv", "marginal_p.csv", "report.json"]
    if p.get("wigner", True):
        sub = slice(None, None, max(1, int(round(0.05 / step))))
        xs = grid.xs[sub]
        keep = np.abs(xs) <= 8.0
        Wg = wigner_from_wavefunction(rep.state[sub][keep], xs[keep], np.linspace(-4, 4, 161))
        _write_wigner(outdir, "wigner_gkp", Wg, _units_header())
        files.extend(["wigner_gkp.csv", "wigner_gkp.axes.csv"])
    checks = {
        "kraus_route_agrees": rep.fidelity_exact_vs_kraus > 0.999,
        "analytic_fidelity_reasonable": rep.fidelity_to_analytic > 0.5,
    }
    return files, checks


def _run_opo(cfg: ExperimentConfig, outdir: Path):
    p = cfg.protocol
    params = cfg.system_params()
    ocfg = OPOConfig(
        params=params,
        n_levels=int(p.get("n_levels", 7)),
        n_pump=int(p.get("n_pump_levels", 26)),
        t_final=float(p.get("t_final", 100.0)),
        dt=float(p.get("dt", 1e-3)),
        n_traj=int(p.get("n_traj", 20)),
        base_seed=cfg.seed,
        record_every=int(p.get("record_every", 50)),
        initial_level=int(p.get("initial_level", 1)),
        initial_pump=p.get("initial_pump", "stationary"),
    )
    out = run_opo_trajectories(ocfg)
    files = []
    for i, rec in enumerate(out.records):
        name = f"trajectory_{i:02d}.csv"
        write_csv(
            outdir / name,
            {
                "t": rec.times,
                "level": rec.expectations["level"],
                "pump_p": rec.expectations["pump_p"],
                "signal_db": rec.expectations["signal_db"],
                "current": rec.current,
            },
            header_lines=_units_header(
                ["formula: conditional moments under pump-quadrature monitoring",
                 f"stream: philox (seed={cfg.seed}, trajectory={i})"]
            ),
        )
        files.append(name)
    write_csv(
        outdir / "reference.csv",
        {
            "t": out.reference_record.times,
            "level": out.reference_record.expectations["level"],
            "pump_p": out.reference_record.expectations["pump_p"],
            "signal_db": out.reference_record.expectations["signal_db"],
        },
        header_lines=_units_header(["unconditioned evolution, same discretization"]),
    )
    files.append("reference.csv")
    summary = {
        "stationary_levels": out.stationary_levels,
        "mean_final_trace_distance": out.mean_final_trace_distance,
        "trace_distance_bound": 5.0 / np.sqrt(ocfg.n_traj),
        "jump_times": {str(i): out.jumps[i] for i in range(ocfg.n_traj)},
        "plateaus": {
            str(i): [dataclasses.asdict(s) for s in out.plateaus[i]]
            for i in range(ocfg.n_traj)
        },
        "seeds": [[cfg.seed, i] for i in range(ocfg.n_traj)],
        "dt": ocfg.dt,
    }
    write_json(outdir / "summary.json", summary)
    files.append("summary.json")
    checks = {
        "unraveling_consistent": out.mean_final_trace_distance <= 5.0 / np.sqrt(ocfg.n_traj),
        "every_trajectory_jumps": all(len(j) >= 1 for j in out.jumps),
    }
    return files, checks


def _run_validate(cfg: ExperimentConfig, outdir: Path):
    results = run_validation_suite()
    payload = {name: {"passed": ok, "detail": detail} for name, ok, detail in results}
    write_json(outdir / "validation.json", payload)
    checks = {name: ok for name, ok, _ in results}
    return ["validation.json"], checks


_RUNNERS = {
    "qnd-protocol": _run_qnd,
    "povm-purity": _run_povm_purity,
    "gkp-generate": _run_gkp,
    "opo-trajectories": _run_opo,
    "validate": _run_validate,
}


def run_experiment(cfg: ExperimentConfig):
    """Execute an experiment; returns the manifest dictionary."""
    if cfg.threads > 0:
        try:
            import numba

            numba.set_num_threads(max(1, cfg.threads))
        except (ImportError, ValueError):
            pass
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    files, checks = _RUNNERS[cfg.experiment](cfg, outdir)
    manifest = {
        "experiment": cfg.experiment,
        "version": __version__,
        "config": cfg.to_dict(),
        "config_hash": hashlib.sha256(cfg.canonical_json().encode()).hexdigest(),
        "seed_policy": "philox streams keyed by (seed, trajectory_index)",
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "files": [{"path": f, "sha256": _sha256(outdir / f)} for f in sorted(files)],
        "checks": checks,
    }
    write_json(outdir / "manifest.json", manifest)
    return manifest


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="opaqnd",
        description="two-mode quadratic-interaction simulator: experiment runner",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", type=Path, default=None,
                        help="JSON configuration (defaults to the shipped preset)")
        sp.add_argument("--seed", type=int, default=None, help="override the base seed")
        sp.add_argument("--out", type=Path, default=None, help="override the output directory")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads for trajectory ensembles")
    args = parser.parse_args(argv)

    try:
        text = args.config.read_text() if args.config else load_preset(args.experiment)
        cfg = parse_config(text)
        if cfg.experiment != args.experiment:
            raise ConfigError(
                f"config is for {cfg.experiment!r} but subcommand was {args.experiment!r}"
            )
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = str(args.out)
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        manifest = run_experiment(cfg)
    except Exception as exc:  # physics/runtime failure
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    failed = [k for k, ok in manifest["checks"].items() if not ok]
    for name, ok in manifest["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"artifacts in {cfg.output_dir} (manifest.json lists checksums)")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
