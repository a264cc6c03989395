"""Reproducible experiment driver: validated run configs, seeded ensembles, artifacts.

A RunConfig describes one experiment (walk kind, angles, disorder, seeding,
sweep axes); run() executes it deterministically and write_artifacts() emits
CSV data files plus a manifest that suffices to re-run the experiment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import ConfigError
from .pair import (
    EntropySeries,
    InitialPairState,
    joint_distribution_direct,
    make_pair_state,
    pair_coin_density_from_singles,
    pair_split_step,
    product_terms,
)
from .states import (
    LatticeWindow,
    position_distribution,
    make_single_state,
    reduce_to_coin,
    von_neumann_entropy,
)
from .topology import PhaseDiagram, phase_diagram
from .walk import (
    AngleField,
    BoundarySpec,
    DisorderSpec,
    STRONG_HALF_WIDTH,
    WEAK_HALF_WIDTH,
    boundary_angle_field,
    constant_angle_field,
    evolve,
    hadamard_step,
    randomize_field,
    split_step,
)

ANGLES_WINDING_1 = (-np.pi / 2.0, np.pi / 4.0)
ANGLES_WINDING_0 = (-np.pi / 2.0, 3.0 * np.pi / 4.0)

RUN_KINDS = ("hadamard", "single_split", "tptpw", "tptbw", "entropy_sweep", "phase_diagram")
SWEEP_SCALARS = ("final", "longmean")

# Sweep axis name -> (particle, angle index, boundary side). Side None means the
# plain angle in a uniform field, or both sides of a boundary field.
SWEEP_PARAMETERS = {
    "theta1a": ("a", 0, None),
    "theta2a": ("a", 1, None),
    "theta1b": ("b", 0, None),
    "theta2b": ("b", 1, None),
    "theta1a_minus": ("a", 0, "minus"),
    "theta1a_plus": ("a", 0, "plus"),
    "theta2a_minus": ("a", 1, "minus"),
    "theta2a_plus": ("a", 1, "plus"),
    "theta1b_minus": ("b", 0, "minus"),
    "theta1b_plus": ("b", 0, "plus"),
    "theta2b_minus": ("b", 1, "minus"),
    "theta2b_plus": ("b", 1, "plus"),
}

OUTPUT_KINDS = ("entropy", "distribution", "joint", "heatmap", "phase")

_FLOAT_FMT = "{:.16e}"


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass
class RunConfig:
    run_kind: str = "hadamard"
    steps: int = 100
    window: int | None = None  # None means auto: steps + 1
    # Per-particle coin angles: (theta1, theta2) tuples, or BoundarySpec for
    # position-dependent two-phase walks.
    angles: dict = field(
        default_factory=lambda: {"a": ANGLES_WINDING_1, "b": ANGLES_WINDING_0}
    )
    initial_state: InitialPairState = field(default_factory=InitialPairState)
    coin_amps: tuple = (1.0 + 0.0j, 0.0j)  # single-walker runs
    disorder: DisorderSpec = field(default_factory=DisorderSpec)
    ensemble_size: int = 1
    master_seed: int = 0
    sweep_grid: list = field(default_factory=list)  # [SweepAxis, SweepAxis]
    sweep_scalar: str = "final"
    sweep_kind: str = "tptpw"  # walk executed per sweep cell
    outputs: list | None = None
    k_points: int = 1024
    grid_n: int = 64


@dataclass
class HeatmapResult:
    axis_names: tuple[str, str]
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    values: np.ndarray  # (len(axis1), len(axis2))
    scalar: str


@dataclass
class RunArtifacts:
    config: RunConfig
    positions: np.ndarray | None = None
    entropy: EntropySeries | None = None
    entropy_std: np.ndarray | None = None
    distributions: dict = field(default_factory=dict)  # label -> (size,) probs
    joint: np.ndarray | None = None
    heatmap: HeatmapResult | None = None
    phase: PhaseDiagram | None = None


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for a replicate or sweep cell."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


# -- config parsing and validation ------------------------------------------------


def _parse_angle_entry(value, field_name: str):
    if isinstance(value, BoundarySpec):
        return value
    if isinstance(value, dict):
        try:
            minus = value["minus"]
            plus = value["plus"]
        except KeyError as exc:
            raise ConfigError(field_name, f"boundary angles need 'minus' and 'plus': missing {exc}")
        if len(minus) != 2 or len(plus) != 2:
            raise ConfigError(field_name, "boundary angle pairs must have 2 entries")
        return BoundarySpec(
            (float(minus[0]), float(minus[1])), (float(plus[0]), float(plus[1]))
        )
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ConfigError(field_name, f"expected [theta1, theta2] or minus/plus mapping, got {value!r}")


def _parse_disorder(value, field_name: str) -> DisorderSpec:
    if isinstance(value, DisorderSpec):
        return value
    if not isinstance(value, dict):
        raise ConfigError(field_name, f"expected a mapping, got {value!r}")
    kind = value.get("kind", "none")
    target = value.get("target", "a")
    seed = int(value.get("seed", 0))
    presets = {"weak": WEAK_HALF_WIDTH, "strong": STRONG_HALF_WIDTH}
    try:
        if kind in presets:
            return DisorderSpec("uniform", presets[kind], target, seed)
        half_width = float(value.get("half_width", 0.0))
        return DisorderSpec(kind, half_width, target, seed)
    except ValueError as exc:
        raise ConfigError(field_name, str(exc))


def _parse_initial_state(value, field_name: str) -> InitialPairState:
    if isinstance(value, InitialPairState):
        return value
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict):
        raise ConfigError(field_name, f"expected a mapping or state name, got {value!r}")
    try:
        positions = value.get("positions", (0, 0))
        return InitialPairState(value.get("kind", "psi_plus"), tuple(positions))
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(field_name, str(exc))


def _parse_sweep_grid(value, field_name: str) -> list:
    axes = []
    for i, item in enumerate(value):
        if isinstance(item, SweepAxis):
            axes.append(item)
            continue
        if not isinstance(item, dict):
            raise ConfigError(field_name, f"axis {i} must be a mapping, got {item!r}")
        try:
            axes.append(
                SweepAxis(
                    str(item["name"]),
                    float(item["min"]),
                    float(item["max"]),
                    int(item["count"]),
                )
            )
        except KeyError as exc:
            raise ConfigError(field_name, f"axis {i} is missing key {exc}")
    return axes


def _parse_coin_amps(value, field_name: str) -> tuple:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        out = []
        for comp in value:
            if isinstance(comp, (list, tuple)) and len(comp) == 2:
                out.append(complex(float(comp[0]), float(comp[1])))
            else:
                out.append(complex(comp))
        return (out[0], out[1])
    raise ConfigError(field_name, "coin_amps must be two components, each [re, im] or a number")


_CONFIG_PARSERS = {
    "run_kind": lambda v, f: str(v),
    "steps": lambda v, f: int(v),
    "window": lambda v, f: None if v in (None, "auto") else int(v),
    "angles": lambda v, f: {p: _parse_angle_entry(e, f"{f}.{p}") for p, e in v.items()},
    "initial_state": _parse_initial_state,
    "coin_amps": _parse_coin_amps,
    "disorder": _parse_disorder,
    "ensemble_size": lambda v, f: int(v),
    "master_seed": lambda v, f: int(v),
    "sweep_grid": _parse_sweep_grid,
    "sweep_scalar": lambda v, f: str(v),
    "sweep_kind": lambda v, f: str(v),
    "outputs": lambda v, f: None if v is None else [str(x) for x in v],
    "k_points": lambda v, f: int(v),
    "grid_n": lambda v, f: int(v),
}


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a JSON-style mapping."""
    kwargs = {}
    for key, value in data.items():
        parser = _CONFIG_PARSERS.get(key)
        if parser is None:
            raise ConfigError(key, "unknown config field")
        try:
            kwargs[key] = parser(value, key)
        except ConfigError:
            raise
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(key, str(exc))
    return validate_config(RunConfig(**kwargs))


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def config_to_dict(config: RunConfig) -> dict:
    """JSON-able mapping that round-trips through config_from_dict."""

    def angle_entry(entry):
        if isinstance(entry, BoundarySpec):
            return {"minus": list(entry.theta_minus), "plus": list(entry.theta_plus)}
        return [entry[0], entry[1]]

    return {
        "run_kind": config.run_kind,
        "steps": config.steps,
        "window": "auto" if config.window is None else config.window,
        "angles": {p: angle_entry(e) for p, e in config.angles.items()},
        "initial_state": {
            "kind": config.initial_state.kind,
            "positions": list(config.initial_state.positions),
        },
        "coin_amps": [[c.real, c.imag] for c in config.coin_amps],
        "disorder": {
            "kind": config.disorder.kind,
            "half_width": config.disorder.half_width,
            "target": config.disorder.target,
            "seed": config.disorder.seed,
        },
        "ensemble_size": config.ensemble_size,
        "master_seed": config.master_seed,
        "sweep_grid": [
            {"name": ax.name, "min": ax.lo, "max": ax.hi, "count": ax.count}
            for ax in config.sweep_grid
        ],
        "sweep_scalar": config.sweep_scalar,
        "sweep_kind": config.sweep_kind,
        "outputs": config.outputs,
        "k_points": config.k_points,
        "grid_n": config.grid_n,
    }


def validate_config(config: RunConfig) -> RunConfig:
    if config.run_kind not in RUN_KINDS:
        raise ConfigError("run_kind", f"must be one of {RUN_KINDS}, got {config.run_kind!r}")
    if config.steps < 0:
        raise ConfigError("steps", "must be >= 0")
    if config.window is not None and config.window < 1:
        raise ConfigError("window", "must be >= 1 (or auto)")
    if config.ensemble_size < 1:
        raise ConfigError("ensemble_size", "must be >= 1")
    if config.sweep_scalar not in SWEEP_SCALARS:
        raise ConfigError("sweep_scalar", f"must be one of {SWEEP_SCALARS}")
    if config.k_points < 64:
        raise ConfigError("k_points", "must be >= 64")
    if config.grid_n < 16:
        raise ConfigError("grid_n", "must be >= 16")
    for particle in config.angles:
        if particle not in ("a", "b"):
            raise ConfigError(f"angles.{particle}", "particles are 'a' and 'b'")
    if config.run_kind == "entropy_sweep":
        if len(config.sweep_grid) != 2:
            raise ConfigError("sweep_grid", "entropy_sweep needs exactly 2 axes")
        if config.sweep_kind not in ("tptpw", "tptbw"):
            raise ConfigError("sweep_kind", "must be 'tptpw' or 'tptbw'")
        for ax in config.sweep_grid:
            if ax.name not in SWEEP_PARAMETERS:
                raise ConfigError(
                    "sweep_grid", f"unknown parameter {ax.name!r}; known: {sorted(SWEEP_PARAMETERS)}"
                )
            if ax.count < 1:
                raise ConfigError("sweep_grid", f"axis {ax.name!r} count must be >= 1")
    if config.outputs is not None:
        for name in config.outputs:
            if name not in OUTPUT_KINDS:
                raise ConfigError("outputs", f"unknown artifact selector {name!r}")
    walk_kind = config.sweep_kind if config.run_kind == "entropy_sweep" else config.run_kind
    if walk_kind in ("tptpw", "tptbw"):
        for particle in ("a", "b"):
            entry = _particle_angles(config, particle)
            if walk_kind == "tptpw" and isinstance(entry, BoundarySpec):
                raise ConfigError(f"angles.{particle}", "tptpw takes plain (theta1, theta2) angles")
    return config


# -- angle plumbing ---------------------------------------------------------------


def _particle_angles(config: RunConfig, particle: str):
    """Angles for one particle; particle b falls back to a's entry for boundary
    walks (the two-phase field applies to both walkers unless overridden)."""
    entry = config.angles.get(particle)
    if config.run_kind == "tptbw" or (
        config.run_kind == "entropy_sweep" and config.sweep_kind == "tptbw"
    ):
        if isinstance(entry, BoundarySpec):
            return entry
        other = config.angles.get("a")
        if isinstance(other, BoundarySpec):
            return other
        if entry is not None:  # uniform angles act as a degenerate boundary
            return BoundarySpec(tuple(entry), tuple(entry))
        raise ConfigError(f"angles.{particle}", "tptbw needs boundary angles for at least particle a")
    if entry is None:
        raise ConfigError(f"angles.{particle}", "missing angles")
    return entry


def _build_field(entry, disorder: DisorderSpec, steps: int, window: LatticeWindow, particle: str) -> AngleField:
    if isinstance(entry, BoundarySpec):
        base = boundary_angle_field(entry, steps, window)
    else:
        base = constant_angle_field(entry[0], entry[1], steps, window)
    return randomize_field(base, disorder, particle)


def _with_axis_value(angles: dict, name: str, value: float) -> dict:
    particle, component, side = SWEEP_PARAMETERS[name]
    entry = angles.get(particle)
    if entry is None:
        raise ConfigError("sweep_grid", f"axis {name!r} targets particle {particle!r} with no angles")
    updated = dict(angles)
    if isinstance(entry, BoundarySpec):
        minus = list(entry.theta_minus)
        plus = list(entry.theta_plus)
        if side in (None, "minus"):
            minus[component] = value
        if side in (None, "plus"):
            plus[component] = value
        updated[particle] = BoundarySpec((minus[0], minus[1]), (plus[0], plus[1]))
    else:
        if side is not None:
            raise ConfigError(
                "sweep_grid", f"axis {name!r} needs boundary angles for particle {particle!r}"
            )
        pair = list(entry)
        pair[component] = value
        updated[particle] = (pair[0], pair[1])
    return updated


# -- run execution ----------------------------------------------------------------


def _resolved_window(config: RunConfig) -> LatticeWindow:
    return LatticeWindow(config.window if config.window is not None else config.steps + 1)


def _coin_entropy(state) -> float:
    return von_neumann_entropy(reduce_to_coin(state))


def _aggregate_entropy(series_list: list) -> tuple[EntropySeries, np.ndarray | None]:
    stacked = np.array(series_list, dtype=float)
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0) if stacked.shape[0] > 1 else None
    series = EntropySeries(list(range(stacked.shape[1])), [float(v) for v in mean])
    return series, std


def _run_single(config: RunConfig) -> RunArtifacts:
    window = _resolved_window(config)
    coin = np.asarray(config.coin_amps, dtype=complex)
    entropy_runs = []
    dist_sum = None
    for r in range(config.ensemble_size):
        state = make_single_state(window, 0, coin)
        if config.run_kind == "hadamard":
            stepper = lambda s, step: hadamard_step(s)
        else:
            dis = replace(config.disorder, seed=derive_seed(config.master_seed, r))
            fld = _build_field(_particle_angles(config, "a"), dis, config.steps, window, "a")
            stepper = lambda s, step: split_step(s, fld, step)
        final, records = evolve(state, stepper, config.steps, {"entropy": _coin_entropy})
        entropy_runs.append(records["entropy"])
        dist = position_distribution(final)
        dist_sum = dist if dist_sum is None else dist_sum + dist
    entropy, std = _aggregate_entropy(entropy_runs)
    return RunArtifacts(
        config=config,
        positions=window.positions(),
        entropy=entropy,
        entropy_std=std,
        distributions={"walk": dist_sum / config.ensemble_size},
    )


def _run_pair(config: RunConfig) -> RunArtifacts:
    window = _resolved_window(config)
    entropy_runs = []
    joint_sum = None
    for r in range(config.ensemble_size):
        dis = replace(config.disorder, seed=derive_seed(config.master_seed, r))
        field_a = _build_field(_particle_angles(config, "a"), dis, config.steps, window, "a")
        field_b = _build_field(_particle_angles(config, "b"), dis, config.steps, window, "b")
        state = make_pair_state(config.initial_state, window)
        final, records = evolve(
            state,
            lambda s, step: pair_split_step(s, field_a, field_b, step),
            config.steps,
            {"entropy": _coin_entropy},
        )
        entropy_runs.append(records["entropy"])
        joint = joint_distribution_direct(final).values
        joint_sum = joint if joint_sum is None else joint_sum + joint
    entropy, std = _aggregate_entropy(entropy_runs)
    joint_mean = joint_sum / config.ensemble_size
    marg_a = joint_mean.sum(axis=1)
    marg_b = joint_mean.sum(axis=0)
    return RunArtifacts(
        config=config,
        positions=window.positions(),
        entropy=entropy,
        entropy_std=std,
        distributions={"a": marg_a, "b": marg_b},
        joint=joint_mean,
    )


def _sweep_cell_scalar(config: RunConfig, cell_angles: dict, cell_seed: int) -> float:
    """Pair coin entropy for one sweep cell.

    Runs the four per-particle single walks and assembles the 4x4 coin
    reduction through the product decomposition, which is exact for a
    noninteracting pair and far cheaper than the tensor evolution.
    """
    window = _resolved_window(config)
    cell = replace(
        config,
        run_kind=config.sweep_kind,
        angles=cell_angles,
        master_seed=cell_seed,
        sweep_grid=[],
    )
    dis = replace(cell.disorder, seed=derive_seed(cell_seed, 0))
    field_a = _build_field(_particle_angles(cell, "a"), dis, cell.steps, window, "a")
    field_b = _build_field(_particle_angles(cell, "b"), dis, cell.steps, window, "b")
    xa, xb = cell.initial_state.positions
    walkers = {
        "a": [make_single_state(window, xa, (1, 0)), make_single_state(window, xa, (0, 1))],
        "b": [make_single_state(window, xb, (1, 0)), make_single_state(window, xb, (0, 1))],
    }
    terms = product_terms(cell.initial_state)

    def entropy_now() -> float:
        rho = pair_coin_density_from_singles(tuple(walkers["a"]), tuple(walkers["b"]), terms)
        return von_neumann_entropy(rho)

    tail = max(1, cell.steps // 4)  # long-time mean: last 25% of steps
    samples = []
    for step in range(cell.steps):
        walkers["a"] = [split_step(s, field_a, step) for s in walkers["a"]]
        walkers["b"] = [split_step(s, field_b, step) for s in walkers["b"]]
        if config.sweep_scalar == "longmean" and step >= cell.steps - tail:
            samples.append(entropy_now())
    if config.sweep_scalar == "final":
        return entropy_now()
    return float(np.mean(samples))


def entropy_sweep(config: RunConfig) -> RunArtifacts:
    """Scalar entropy over a 2-axis angle grid; cells are seeded independently."""
    config = validate_config(config)
    if config.run_kind != "entropy_sweep":
        raise ConfigError("run_kind", "entropy_sweep() needs run_kind == 'entropy_sweep'")
    ax1, ax2 = config.sweep_grid
    vals1, vals2 = ax1.values(), ax2.values()
    grid = np.empty((len(vals1), len(vals2)), dtype=float)
    for i, v1 in enumerate(vals1):
        row_angles = _with_axis_value(config.angles, ax1.name, float(v1))
        for j, v2 in enumerate(vals2):
            cell_angles = _with_axis_value(row_angles, ax2.name, float(v2))
            grid[i, j] = _sweep_cell_scalar(
                config, cell_angles, derive_seed(config.master_seed, i, j)
            )
    heatmap = HeatmapResult(
        (ax1.name, ax2.name), vals1, vals2, grid, config.sweep_scalar
    )
    return RunArtifacts(config=config, heatmap=heatmap)


def run(config: RunConfig) -> RunArtifacts:
    """Execute any run kind; artifacts are deterministic in (config, master_seed)."""
    config = validate_config(config)
    if config.run_kind in ("hadamard", "single_split"):
        return _run_single(config)
    if config.run_kind in ("tptpw", "tptbw"):
        return _run_pair(config)
    if config.run_kind == "entropy_sweep":
        return entropy_sweep(config)
    diagram = phase_diagram(config.grid_n, config.k_points)
    return RunArtifacts(config=config, phase=diagram)


# -- artifact files ----------------------------------------------------------------


def _fmt(value: float) -> str:
    return _FLOAT_FMT.format(float(value))


def _write_rows(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_artifacts(artifacts: RunArtifacts, out_dir) -> list[Path]:
    """Write selected CSV artifacts plus manifest.json; returns the paths written.

    Data files are byte-stable for a fixed (config, master_seed); wall-clock
    metadata lives only in the manifest.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = artifacts.config
    selected = config.outputs  # None means every computed artifact
    written: list[Path] = []

    def wanted(name: str) -> bool:
        return selected is None or name in selected

    if artifacts.entropy is not None and wanted("entropy"):
        path = out / "entropy.csv"
        if artifacts.entropy_std is None:
            rows = (
                (str(s), _fmt(e))
                for s, e in zip(artifacts.entropy.steps, artifacts.entropy.entropy_bits)
            )
            _write_rows(path, "step,entropy_bits", rows)
        else:
            rows = (
                (str(s), _fmt(e), _fmt(sd))
                for s, e, sd in zip(
                    artifacts.entropy.steps,
                    artifacts.entropy.entropy_bits,
                    artifacts.entropy_std,
                )
            )
            _write_rows(path, "step,entropy_bits,std", rows)
        written.append(path)

    if artifacts.distributions and wanted("distribution"):
        for label, dist in sorted(artifacts.distributions.items()):
            name = "distribution.csv" if label == "walk" else f"distribution_{label}.csv"
            path = out / name
            rows = ((str(int(x)), _fmt(p)) for x, p in zip(artifacts.positions, dist))
            _write_rows(path, "x,probability", rows)
            written.append(path)

    if artifacts.joint is not None and wanted("joint"):
        path = out / "joint.csv"
        positions = artifacts.positions

        def joint_rows():
            for i, xi in enumerate(positions):
                for j, xj in enumerate(positions):
                    yield (str(int(xi)), str(int(xj)), _fmt(artifacts.joint[i, j]))

        _write_rows(path, "i,j,probability", joint_rows())
        written.append(path)

    if artifacts.heatmap is not None and wanted("heatmap"):
        path = out / "heatmap.csv"
        hm = artifacts.heatmap

        def heatmap_rows():
            for i, v1 in enumerate(hm.axis1_values):
                for j, v2 in enumerate(hm.axis2_values):
                    yield (_fmt(v1), _fmt(v2), _fmt(hm.values[i, j]))

        _write_rows(path, "axis1,axis2,scalar", heatmap_rows())
        written.append(path)

    if artifacts.phase is not None and wanted("phase"):
        path = out / "phase.csv"
        ph = artifacts.phase

        def phase_rows():
            for i, t1 in enumerate(ph.theta1_values):
                for j, t2 in enumerate(ph.theta2_values):
                    yield (_fmt(t1), _fmt(t2), str(int(ph.winding[i, j])), _fmt(ph.gap[i, j]))

        _write_rows(path, "theta1,theta2,winding,gap", phase_rows())
        written.append(path)

    import datetime

    manifest = {
        "config": config_to_dict(config),
        "master_seed": config.master_seed,
        "package_version": __version__,
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": [p.name for p in written],
    }
    if artifacts.heatmap is not None:
        manifest["heatmap_axes"] = list(artifacts.heatmap.axis_names)
        manifest["heatmap_scalar"] = artifacts.heatmap.scalar
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    written.append(manifest_path)
    return written
