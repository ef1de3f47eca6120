"""Seeded Monte Carlo scenarios over the (spreading factor, user count) grid.

All scenarios run on normalised grids with bin_duration = 1, so frequencies
are quoted in units of 1/T. Every trial derives its own generator from
(rng_seed, scenario, cell, trial), which makes runs order-independent and
byte-for-byte reproducible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .codes import LfsrSpec, msequence_code
from .metrics import (
    COW_LABELS,
    cow_states,
    crosstalk_probability,
    fidelity,
    loss_probability,
    per_bin_detection,
)
from .network import (
    NetworkPlan,
    UserChannel,
    propagate_envelope,
    propagate_photon,
    receiver_density,
)
from .optics import FbgSpec
from .signal import TimeGrid

__all__ = [
    "DEFAULT_SIGMA_FILT",
    "ScenarioConfig",
    "ReportCell",
    "MetricsReport",
    "TraceResult",
    "loss_config",
    "crosstalk_config",
    "fidelity_config",
    "trace_config",
    "REPRODUCTION_SETTINGS",
    "reproduction_config",
    "run_loss",
    "run_crosstalk",
    "run_fidelity",
    "run_trace",
    "run_experiment",
]

# default grating width: (8 pi / 5) times the packet spectral width
# 1 / (2 pi sigma_t) with sigma_t = 0.1 T, i.e. 8 cycles per bin duration
DEFAULT_SIGMA_FILT = 8.0

_KINDS = ("loss", "crosstalk", "fidelity", "trace")
_DEFAULT_TRIALS = {"loss": 50, "crosstalk": 32, "fidelity": 64, "trace": 1}
_METRIC_NAMES = {
    "loss": "loss_probability",
    "crosstalk": "crosstalk_probability",
    "fidelity": "one_minus_fidelity",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a scenario run depends on, hashable for output headers.

    sigma_filt is quoted in units of 1/T; None picks DEFAULT_SIGMA_FILT.
    crosstalk_per_bin divides the integrated word crosstalk by bits_per_user;
    empty_drop_first puts the probed receiver first in the drop chain instead
    of at its user position.
    """

    kind: str
    n_registers: tuple[int, ...] = (8, 10, 12)
    users: tuple[int, ...] = (5, 20, 50)
    trials: int | None = None
    bits_per_user: int = 8
    samples_per_chip: int = 4
    sigma_filt: float | None = None
    transition_time: float = 0.0
    rng_seed: int = 12345
    crosstalk_per_bin: bool = True
    empty_drop_first: bool = False

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "n_registers", tuple(int(n) for n in self.n_registers))
        object.__setattr__(self, "users", tuple(int(u) for u in self.users))
        if not self.n_registers or not self.users:
            raise ValueError("n_registers and users must be non-empty")
        if any(u < 1 for u in self.users):
            raise ValueError(f"user counts must be >= 1, got {self.users}")
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.bits_per_user < 1:
            raise ValueError(f"bits_per_user must be >= 1, got {self.bits_per_user}")
        if self.sigma_filt is not None and not self.sigma_filt > 0:
            raise ValueError(f"sigma_filt must be positive, got {self.sigma_filt}")
        if self.transition_time < 0:
            raise ValueError("transition_time must be non-negative")

    @property
    def resolved_trials(self) -> int:
        return _DEFAULT_TRIALS[self.kind] if self.trials is None else self.trials

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def loss_config(**overrides) -> ScenarioConfig:
    return ScenarioConfig(kind="loss", **overrides)


def crosstalk_config(**overrides) -> ScenarioConfig:
    return ScenarioConfig(kind="crosstalk", **overrides)


def fidelity_config(**overrides) -> ScenarioConfig:
    overrides.setdefault("n_registers", (10,))
    return ScenarioConfig(kind="fidelity", **overrides)


def trace_config(**overrides) -> ScenarioConfig:
    overrides.setdefault("n_registers", (15,))
    overrides.setdefault("users", (5,))
    return ScenarioConfig(kind="trace", **overrides)


# conventions pinned by the published-table calibration, see README
REPRODUCTION_SETTINGS = {
    "sigma_filt": DEFAULT_SIGMA_FILT,
    "crosstalk_per_bin": True,
    "empty_drop_first": True,
}


def reproduction_config(kind: str, full: bool = False, **overrides) -> ScenarioConfig:
    """Grid and conventions used for the published-table reproduction.

    full extends the crosstalk grid to the slowest spreading factor; the
    loss grid is cheap enough to run whole either way.
    """
    grids = {
        "loss": {"n_registers": (8, 10, 12, 14), "users": (5, 20, 50)},
        "crosstalk": {
            "n_registers": (8, 10, 12, 14) if full else (8, 10, 12),
            "users": (5, 20, 50),
        },
        "fidelity": {"n_registers": (10,), "users": (5, 20, 50)},
    }
    if kind not in grids:
        raise ValueError(f"no reproduction preset for kind {kind!r}")
    params = {**grids[kind], **REPRODUCTION_SETTINGS, **overrides}
    return ScenarioConfig(kind=kind, **params)


@dataclass(frozen=True)
class ReportCell:
    n_registers: int
    spreading: int
    users: int
    mean: float
    stderr: float
    trials: int
    label: str = ""


@dataclass(frozen=True, eq=False)
class MetricsReport:
    kind: str
    metric: str
    cells: tuple[ReportCell, ...]
    config: ScenarioConfig

    def cell(self, n_registers: int, users: int, label: str = "") -> ReportCell:
        for c in self.cells:
            if (c.n_registers, c.users, c.label) == (n_registers, users, label):
                return c
        raise KeyError(f"no cell for n={n_registers}, users={users}, label={label!r}")

    def header_lines(self) -> list[str]:
        from . import __version__

        return [
            f"# spreadmux {__version__}",
            f"# kind: {self.kind}",
            f"# metric: {self.metric}",
            f"# seed: {self.config.rng_seed}",
            f"# config_hash: {self.config.config_hash()}",
        ]

    def to_csv_text(self) -> str:
        lines = self.header_lines()
        labelled = any(c.label for c in self.cells)
        cols = "S,N,state,mean,stderr,trials" if labelled else "S,N,mean,stderr,trials"
        lines.append(cols)
        for c in self.cells:
            fields = [str(c.spreading), str(c.users)]
            if labelled:
                fields.append(c.label)
            fields += [f"{c.mean:.10g}", f"{c.stderr:.10g}", str(c.trials)]
            lines.append(",".join(fields))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        from . import __version__

        payload = {
            "artifact": {"name": "spreadmux", "version": __version__},
            "kind": self.kind,
            "metric": self.metric,
            "seed": self.config.rng_seed,
            "config_hash": self.config.config_hash(),
            "config": self.config.as_dict(),
            "cells": [dataclasses.asdict(c) for c in self.cells],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True, eq=False)
class TraceResult:
    """Per-receiver densities and bin detections for one transmitted word."""

    grid: TimeGrid
    users: tuple[int, ...]
    bits: dict[int, tuple[int, ...]]
    densities: dict[int, np.ndarray]
    detections: dict[int, np.ndarray]
    config: ScenarioConfig


_KIND_INDEX = {k: i for i, k in enumerate(_KINDS)}


def _trial_rng(config: ScenarioConfig, n: int, users: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        (config.rng_seed, _KIND_INDEX[config.kind], n, users, trial)
    )


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


def _grating(config: ScenarioConfig) -> FbgSpec:
    sigma = DEFAULT_SIGMA_FILT if config.sigma_filt is None else config.sigma_filt
    return FbgSpec(sigma_filt=sigma)


def run_loss(config: ScenarioConfig) -> MetricsReport:
    """Mean loss at the matched receiver, one occupied channel per trial."""
    trials = config.resolved_trials
    fbg = _grating(config)
    cells = []
    for n in config.n_registers:
        spreading = 2**n - 1
        base = msequence_code(LfsrSpec(n))
        grid = TimeGrid(1.0, spreading, config.samples_per_chip, n_bins=1)
        for n_users in config.users:
            plan = NetworkPlan.fifo(
                grid, fbg, base, n_users, config.transition_time
            )
            values = []
            for trial in range(trials):
                rng = _trial_rng(config, n, n_users, trial)
                sender = int(rng.integers(1, n_users + 1))
                channel = UserChannel(sender, plan.codes[sender], (1,))
                trace = propagate_photon(channel, sender, plan)
                values.append(loss_probability(trace))
            mean, stderr = _mean_stderr(values)
            cells.append(ReportCell(n, spreading, n_users, mean, stderr, trials))
    return MetricsReport("loss", _METRIC_NAMES["loss"], tuple(cells), config)


def run_crosstalk(config: ScenarioConfig) -> MetricsReport:
    """Foreign probability collected by one silent receiver per run."""
    trials = config.resolved_trials
    fbg = _grating(config)
    bits_per_user = config.bits_per_user
    metric = _METRIC_NAMES["crosstalk"]
    metric += "_per_bin" if config.crosstalk_per_bin else "_word"
    cells = []
    for n in config.n_registers:
        spreading = 2**n - 1
        base = msequence_code(LfsrSpec(n))
        grid = TimeGrid(1.0, spreading, config.samples_per_chip, n_bins=bits_per_user)
        for n_users in config.users:
            add_order = list(range(1, n_users + 1))
            values = []
            for trial in range(trials):
                rng = _trial_rng(config, n, n_users, trial)
                empty = int(rng.integers(1, n_users + 1))
                if config.empty_drop_first:
                    drop_order = [empty] + [u for u in add_order if u != empty]
                else:
                    drop_order = add_order
                plan = NetworkPlan.from_orders(
                    grid, fbg, base, add_order, drop_order, config.transition_time
                )
                collected = []
                for uid in add_order:
                    if uid == empty:
                        continue
                    bits = tuple(int(b) for b in rng.integers(0, 2, bits_per_user))
                    phase = float(rng.uniform(0.0, 2.0 * np.pi))
                    if not any(bits):
                        continue  # nothing launched, nothing delivered
                    channel = UserChannel(uid, plan.codes[uid], bits, phase)
                    collected.append(propagate_photon(channel, empty, plan))
                value = crosstalk_probability(collected)
                if config.crosstalk_per_bin:
                    value /= bits_per_user
                values.append(value)
            mean, stderr = _mean_stderr(values)
            cells.append(ReportCell(n, spreading, n_users, mean, stderr, trials))
    return MetricsReport("crosstalk", metric, tuple(cells), config)


def run_fidelity(config: ScenarioConfig) -> MetricsReport:
    """Waveform infidelity of the four two-bin test states.

    Each trial draws one random add/drop arrangement of the N users and sends
    all four states through the same arrangement, which keeps the per-state
    means directly comparable.
    """
    trials = config.resolved_trials
    fbg = _grating(config)
    cells = []
    for n in config.n_registers:
        spreading = 2**n - 1
        base = msequence_code(LfsrSpec(n))
        grid = TimeGrid(1.0, spreading, config.samples_per_chip, n_bins=2)
        states = cow_states(grid)
        for n_users in config.users:
            per_label: dict[str, list[float]] = {label: [] for label in COW_LABELS}
            for trial in range(trials):
                rng = _trial_rng(config, n, n_users, trial)
                add_order = [int(u) for u in rng.permutation(n_users) + 1]
                drop_order = [int(u) for u in rng.permutation(n_users) + 1]
                sender = int(rng.integers(1, n_users + 1))
                plan = NetworkPlan.from_orders(
                    grid, fbg, base, add_order, drop_order, config.transition_time
                )
                for state in states:
                    delivered = propagate_envelope(
                        state.envelope, sender, sender, plan
                    )
                    value = 1.0 - fidelity(state.envelope, delivered, normalize=True)
                    per_label[state.label].append(value)
            for label in COW_LABELS:
                mean, stderr = _mean_stderr(per_label[label])
                cells.append(
                    ReportCell(n, spreading, n_users, mean, stderr, trials, label)
                )
    return MetricsReport("fidelity", _METRIC_NAMES["fidelity"], tuple(cells), config)


def run_trace(config: ScenarioConfig) -> TraceResult:
    """One full word from every user, densities at every receiver."""
    n = config.n_registers[0]
    n_users = config.users[0]
    spreading = 2**n - 1
    base = msequence_code(LfsrSpec(n))
    grid = TimeGrid(
        1.0, spreading, config.samples_per_chip, n_bins=config.bits_per_user
    )
    plan = NetworkPlan.fifo(grid, _grating(config), base, n_users, config.transition_time)
    rng = _trial_rng(config, n, n_users, 0)
    bits: dict[int, tuple[int, ...]] = {}
    channels = []
    for uid in range(1, n_users + 1):
        word = tuple(int(b) for b in rng.integers(0, 2, config.bits_per_user))
        bits[uid] = word
        channels.append(UserChannel(uid, plan.codes[uid], word))
    densities: dict[int, np.ndarray] = {}
    detections: dict[int, np.ndarray] = {}
    for receiver in plan.receivers:
        traces = [propagate_photon(ch, receiver, plan) for ch in channels]
        density = receiver_density(traces)
        densities[receiver] = density
        detections[receiver] = per_bin_detection(density, grid)
    return TraceResult(
        grid=grid,
        users=tuple(range(1, n_users + 1)),
        bits=bits,
        densities=densities,
        detections=detections,
        config=config,
    )


def run_experiment(config: ScenarioConfig):
    """Dispatch on config.kind."""
    runner = {
        "loss": run_loss,
        "crosstalk": run_crosstalk,
        "fidelity": run_fidelity,
        "trace": run_trace,
    }[config.kind]
    return runner(config)
