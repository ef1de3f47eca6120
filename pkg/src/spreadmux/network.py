"""Add-drop chains: who modulates, who filters, and in which order.

A plan is an ordered list of Add/Drop stages on one fibre. Photons never
interact, so propagation is computed per (source, receiver) pair: the source
photon enters at its own Add, is disturbed by every later Add and by every
Drop ahead of the target, and is finally despread and reflected out at the
target's Drop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .codes import SpreadingCode, shift_code
from .optics import (
    FbgSpec,
    demux_drop_path,
    demux_through_path,
    mux_new_path,
    mux_old_path,
)
from .signal import (
    PacketSpec,
    SampledEnvelope,
    TimeGrid,
    gaussian_packet,
    zero_envelope,
)

__all__ = [
    "Stage",
    "UserChannel",
    "NetworkPlan",
    "PhotonTrace",
    "channel_envelope",
    "propagate_envelope",
    "propagate_photon",
    "propagate_all",
    "receiver_density",
]

_KINDS = ("add", "drop")


@dataclass(frozen=True)
class Stage:
    kind: str
    user_id: int

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"stage kind must be one of {_KINDS}, got {self.kind!r}")


@dataclass(frozen=True, eq=False)
class UserChannel:
    """One sender: identity, spreading code, bit pattern and launch phase."""

    user_id: int
    code: SpreadingCode
    bits: tuple[int, ...]
    global_phase: float = 0.0

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0/1, got {self.bits}")
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True, eq=False)
class NetworkPlan:
    """Stage order plus the shared hardware description.

    Every user appearing in the stage list must hold exactly one Add; a Drop
    is optional but must come after the user's own Add. The codes mapping
    supplies the modulator code for every staged user.
    """

    grid: TimeGrid
    fbg: FbgSpec
    codes: Mapping[int, SpreadingCode]
    stages: tuple[Stage, ...]
    transition_time: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        add_seen: dict[int, int] = {}
        drop_seen: dict[int, int] = {}
        for pos, stage in enumerate(self.stages):
            table = add_seen if stage.kind == "add" else drop_seen
            if stage.user_id in table:
                raise ValueError(
                    f"user {stage.user_id} has more than one {stage.kind} stage"
                )
            table[stage.user_id] = pos
        for uid, pos in drop_seen.items():
            if uid not in add_seen:
                raise ValueError(f"user {uid} has a Drop stage but no Add stage")
            if pos < add_seen[uid]:
                raise ValueError(f"user {uid} drops before its own Add stage")
        for uid in add_seen:
            code = self.codes.get(uid)
            if code is None:
                raise ValueError(f"no code supplied for staged user {uid}")
            if len(code) != self.grid.chips_per_bin:
                raise ValueError(
                    f"code for user {uid} has {len(code)} chips, grid expects "
                    f"{self.grid.chips_per_bin}"
                )

    @classmethod
    def from_orders(
        cls,
        grid: TimeGrid,
        fbg: FbgSpec,
        base_code: SpreadingCode,
        add_order: Sequence[int],
        drop_order: Sequence[int],
        transition_time: float = 0.0,
    ) -> "NetworkPlan":
        """All Adds in add_order followed by all Drops in drop_order.

        User i modulates with the base code circularly shifted by i.
        """
        users = sorted(set(add_order) | set(drop_order))
        codes = {uid: shift_code(base_code, uid) for uid in users}
        stages = tuple(Stage("add", uid) for uid in add_order) + tuple(
            Stage("drop", uid) for uid in drop_order
        )
        return cls(
            grid=grid,
            fbg=fbg,
            codes=codes,
            stages=stages,
            transition_time=transition_time,
        )

    @classmethod
    def fifo(
        cls,
        grid: TimeGrid,
        fbg: FbgSpec,
        base_code: SpreadingCode,
        n_users: int,
        transition_time: float = 0.0,
    ) -> "NetworkPlan":
        """Default chain: Add(1..N) then Drop(1..N), first in first out."""
        if n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {n_users}")
        if n_users >= len(base_code):
            raise ValueError(
                f"at most {len(base_code) - 1} users fit one code family, "
                f"got {n_users}"
            )
        order = list(range(1, n_users + 1))
        return cls.from_orders(grid, fbg, base_code, order, order, transition_time)

    @property
    def receivers(self) -> tuple[int, ...]:
        return tuple(s.user_id for s in self.stages if s.kind == "drop")


@dataclass(frozen=True, eq=False)
class PhotonTrace:
    """Delivered amplitude for one (source, receiver) pair."""

    source_id: int
    receiver_id: int
    envelope: SampledEnvelope


def channel_envelope(channel: UserChannel, grid: TimeGrid) -> SampledEnvelope:
    """Initial amplitude: one unit Gaussian packet per 1-bit, common phase."""
    if len(channel.bits) != grid.n_bins:
        raise ValueError(
            f"channel sends {len(channel.bits)} bits but grid has "
            f"{grid.n_bins} bins"
        )
    env = zero_envelope(grid)
    for idx, bit in enumerate(channel.bits):
        if bit:
            env = env + gaussian_packet(
                grid, PacketSpec(bin_index=idx, global_phase=channel.global_phase)
            )
    return env


def propagate_envelope(
    env: SampledEnvelope,
    source_id: int,
    receiver_id: int,
    plan: NetworkPlan,
) -> SampledEnvelope:
    """Walk an arbitrary input amplitude through the chain.

    Stages ahead of the source's own Add cannot touch the photon and are
    skipped. If the target Drop precedes the source Add the delivered
    amplitude is identically zero.
    """
    if env.grid != plan.grid:
        raise ValueError("envelope grid does not match the plan grid")
    source_code = plan.codes.get(source_id)
    if source_code is None or not any(
        s.kind == "add" and s.user_id == source_id for s in plan.stages
    ):
        raise ValueError(f"source user {source_id} has no Add stage in the plan")
    if receiver_id not in plan.receivers:
        raise ValueError(f"receiver {receiver_id} has no Drop stage in the plan")

    tau = plan.transition_time
    fbg = plan.fbg
    in_line = False
    for stage in plan.stages:
        code = plan.codes[stage.user_id]
        if not in_line:
            if stage.kind == "drop" and stage.user_id == receiver_id:
                return zero_envelope(plan.grid)  # dropped before insertion
            if stage.kind == "add" and stage.user_id == source_id:
                env = mux_new_path(env, code, fbg, tau)
                in_line = True
            continue
        if stage.kind == "add":
            env = mux_old_path(env, code, fbg, tau)
        elif stage.user_id == receiver_id:
            return demux_drop_path(env, code, fbg, tau)
        else:
            env = demux_through_path(env, code, fbg, tau)
    raise AssertionError("unreachable: receiver drop stage was validated")


def propagate_photon(
    channel: UserChannel,
    receiver_id: int,
    plan: NetworkPlan,
) -> PhotonTrace:
    """Deliver one sender's photon amplitude to one receiver."""
    planned = plan.codes.get(channel.user_id)
    if planned is not None and not np.array_equal(planned.chips, channel.code.chips):
        raise ValueError(
            f"channel {channel.user_id} carries a code that differs from the "
            f"plan assignment"
        )
    env = channel_envelope(channel, plan.grid)
    if not any(channel.bits):
        # nothing launched; skip the walk but keep the trace shape
        if receiver_id not in plan.receivers:
            raise ValueError(f"receiver {receiver_id} has no Drop stage in the plan")
        return PhotonTrace(channel.user_id, receiver_id, env)
    delivered = propagate_envelope(env, channel.user_id, receiver_id, plan)
    return PhotonTrace(channel.user_id, receiver_id, delivered)


def propagate_all(
    channels: Sequence[UserChannel],
    plan: NetworkPlan,
) -> list[PhotonTrace]:
    """Every sender to every receiver, in deterministic order."""
    traces = []
    for receiver in plan.receivers:
        for channel in channels:
            traces.append(propagate_photon(channel, receiver, plan))
    return traces


def receiver_density(
    traces: Iterable[PhotonTrace],
    coherent: bool = False,
) -> np.ndarray:
    """Photon-number density at one receiver.

    Independent single photons add at the density level, so the result is
    sum_p |psi_p(t)|^2 over the given traces. Amplitudes belonging to the
    same source already interfere inside each trace envelope. The coherent
    flag is reserved; only the additive mode exists.
    """
    if coherent:
        raise NotImplementedError("coherent summation is reserved, use coherent=False")
    traces = list(traces)
    if not traces:
        raise ValueError("receiver_density needs at least one trace")
    grid = traces[0].envelope.grid
    receiver = traces[0].receiver_id
    density = np.zeros(grid.n_samples, dtype=np.float64)
    for tr in traces:
        if tr.envelope.grid != grid:
            raise ValueError("traces mix different grids")
        if tr.receiver_id != receiver:
            raise ValueError("traces mix different receivers")
        density += tr.envelope.density
    return density
