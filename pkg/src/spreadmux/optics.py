"""Optical building blocks: chip-rate phase modulators and reflection gratings.

The modulator multiplies the envelope by a unimodular code waveform m(t), one
chip per interval bin_duration / S, with the code restarting at every bin
boundary. The grating is modelled as a zero-phase spectral splitter with a
Gaussian reflection amplitude; reflection and transmission are energy
complementary by construction.
"""

from __future__ import annotations

import functools
import math
import weakref
from dataclasses import dataclass

import numpy as np

from .codes import SpreadingCode
from .signal import SampledEnvelope, TimeGrid

__all__ = [
    "ModulatorSpec",
    "FbgSpec",
    "modulation_waveform",
    "modulate",
    "filter_response",
    "fbg_reflect",
    "fbg_transmit",
    "mux_new_path",
    "mux_old_path",
    "demux_drop_path",
    "demux_through_path",
]


@dataclass(frozen=True, eq=False)
class ModulatorSpec:
    """Phase modulator driven by one spreading code.

    transition_time is the duration of the raised-cosine phase ramp centred
    on each chip boundary; 0 means ideal instantaneous switching, and the
    ramp must fit inside a chip (transition_time < bin_duration / S).

    half_pi selects the (+pi/2, -pi/2) drive instead of the default (0, pi);
    the two differ by a global factor of 1j per pass.
    """

    code: SpreadingCode
    bin_duration: float
    transition_time: float = 0.0
    half_pi: bool = False

    def __post_init__(self) -> None:
        if not self.bin_duration > 0:
            raise ValueError(f"bin_duration must be positive, got {self.bin_duration}")
        chip = self.bin_duration / len(self.code)
        if not 0.0 <= self.transition_time < chip:
            raise ValueError(
                f"transition_time must lie in [0, {chip:.3e}) to fit inside "
                f"one chip, got {self.transition_time}"
            )


def modulation_waveform(spec: ModulatorSpec, grid: TimeGrid) -> np.ndarray:
    """Sampled m(t) for one modulator on one grid.

    With transition_time = 0 the waveform takes the chip values exactly
    (+-1, or +-1j for the half_pi convention), so a same-code double pass is
    an exact identity. With a finite transition time the phase follows a
    raised-cosine ramp through each chip boundary and |m| stays 1.
    """
    if len(spec.code) != grid.chips_per_bin:
        raise ValueError(
            f"code length {len(spec.code)} does not match grid chips_per_bin "
            f"{grid.chips_per_bin}"
        )
    if spec.bin_duration != grid.bin_duration:
        raise ValueError("modulator and grid disagree on bin_duration")

    q = grid.samples_per_chip
    chips_full = np.tile(spec.code.chips, grid.n_bins).astype(np.float64)
    base = np.repeat(chips_full, q)
    wave = (1j * base) if spec.half_pi else base.astype(np.complex128)

    tau = spec.transition_time
    if tau == 0.0:
        return wave

    # chip phases under the active drive convention
    if spec.half_pi:
        chip_phase = chips_full * (math.pi / 2.0)
    else:
        chip_phase = (1.0 - chips_full) * (math.pi / 2.0)

    dt = grid.dt
    n = grid.n_samples
    j = np.arange(n)
    nearest = np.rint(j / q).astype(np.int64)  # chip boundary index
    delta_t = (j - nearest * q) * dt  # signed offset from that boundary
    total_chips = chips_full.size
    in_ramp = (np.abs(delta_t) < tau / 2.0) & (nearest >= 1) & (nearest <= total_chips - 1)
    if np.any(in_ramp):
        m = nearest[in_ramp]
        left = chip_phase[m - 1]
        right = chip_phase[m]
        s = (delta_t[in_ramp] + tau / 2.0) / tau
        blend = 0.5 * (1.0 - np.cos(math.pi * s))
        phases = left + (right - left) * blend
        wave = wave.copy()
        wave[in_ramp] = np.exp(1j * phases)
    return wave


# waveforms are reused across every stage walk of a plan, so cache them per
# code object; the weak keying lets throwaway codes be collected
_WAVEFORM_CACHE: "weakref.WeakKeyDictionary[SpreadingCode, dict]" = (
    weakref.WeakKeyDictionary()
)


def _cached_waveform(spec: ModulatorSpec, grid: TimeGrid) -> np.ndarray:
    per_code = _WAVEFORM_CACHE.get(spec.code)
    if per_code is None:
        per_code = {}
        _WAVEFORM_CACHE[spec.code] = per_code
    key = (grid, spec.bin_duration, spec.transition_time, spec.half_pi)
    wave = per_code.get(key)
    if wave is None:
        wave = modulation_waveform(spec, grid)
        wave.setflags(write=False)
        per_code[key] = wave
    return wave


def modulate(env: SampledEnvelope, spec: ModulatorSpec) -> SampledEnvelope:
    """Apply the code waveform pointwise. Exactly norm preserving."""
    wave = _cached_waveform(spec, env.grid)
    return SampledEnvelope(env.grid, env.samples * wave)


@dataclass(frozen=True)
class FbgSpec:
    """Gaussian reflection grating.

    Reflection amplitude R(f) = peak_reflectivity * exp(-(f - center)^2 /
    (2 sigma_filt^2)) and transmission T(f) = sqrt(1 - R^2), both zero phase.
    sigma_filt = inf gives a perfect mirror, peak_reflectivity = 0 a
    degenerate all-pass element.
    """

    sigma_filt: float
    center_offset: float = 0.0
    peak_reflectivity: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma_filt > 0:
            raise ValueError(f"sigma_filt must be positive, got {self.sigma_filt}")
        if not 0.0 <= self.peak_reflectivity <= 1.0:
            raise ValueError(
                f"peak_reflectivity must lie in [0, 1], got {self.peak_reflectivity}"
            )


@functools.lru_cache(maxsize=64)
def filter_response(grid: TimeGrid, fbg: FbgSpec) -> tuple[np.ndarray, np.ndarray]:
    """FFT-ordered (reflect, transmit) amplitude responses, cached read-only."""
    f = grid.frequencies
    if math.isinf(fbg.sigma_filt):
        r = np.full(f.shape, fbg.peak_reflectivity)
    else:
        x = (f - fbg.center_offset) / fbg.sigma_filt
        r = fbg.peak_reflectivity * np.exp(-0.5 * x * x)
    t = np.sqrt(np.maximum(0.0, 1.0 - r * r))
    r.setflags(write=False)
    t.setflags(write=False)
    return r, t


def _apply_filter(env: SampledEnvelope, response: np.ndarray) -> SampledEnvelope:
    spectrum = np.fft.fft(env.samples)
    return SampledEnvelope(env.grid, np.fft.ifft(spectrum * response))


def fbg_reflect(env: SampledEnvelope, fbg: FbgSpec) -> SampledEnvelope:
    """Band-pass branch: amplitude R(f) applied in the frequency domain."""
    reflect, _ = filter_response(env.grid, fbg)
    return _apply_filter(env, reflect)


def fbg_transmit(env: SampledEnvelope, fbg: FbgSpec) -> SampledEnvelope:
    """Band-stop branch: amplitude sqrt(1 - R^2)."""
    _, transmit = filter_response(env.grid, fbg)
    return _apply_filter(env, transmit)


def _modulator(env: SampledEnvelope, code: SpreadingCode, transition_time: float) -> ModulatorSpec:
    return ModulatorSpec(
        code=code,
        bin_duration=env.grid.bin_duration,
        transition_time=transition_time,
    )


def mux_new_path(
    env: SampledEnvelope,
    code: SpreadingCode,
    fbg: FbgSpec,
    transition_time: float = 0.0,
) -> SampledEnvelope:
    """Add stage seen by the photon being inserted: reflect, then spread.

    The narrowband packet is reflected into the line by the grating and
    spread by the user's modulator on the way out. The transmitted part of
    the packet spectrum leaves through the grating and is discarded as loss.
    """
    spread = _modulator(env, code, transition_time)
    return modulate(fbg_reflect(env, fbg), spread)


def mux_old_path(
    env: SampledEnvelope,
    code: SpreadingCode,
    fbg: FbgSpec,
    transition_time: float = 0.0,
) -> SampledEnvelope:
    """Add stage seen by light already on the line.

    The incoming superposition is despread with the local code, the grating
    transmits everything outside its stop band (the reflected sliver goes
    back up the input fibre and is lost), and a second modulator restores
    the original spreading.
    """
    mod = _modulator(env, code, transition_time)
    return modulate(fbg_transmit(modulate(env, mod), fbg), mod)


def demux_drop_path(
    env: SampledEnvelope,
    code: SpreadingCode,
    fbg: FbgSpec,
    transition_time: float = 0.0,
) -> SampledEnvelope:
    """Drop stage towards the local receiver: despread, keep the reflection."""
    mod = _modulator(env, code, transition_time)
    return fbg_reflect(modulate(env, mod), fbg)


def demux_through_path(
    env: SampledEnvelope,
    code: SpreadingCode,
    fbg: FbgSpec,
    transition_time: float = 0.0,
) -> SampledEnvelope:
    """Drop stage seen by photons passing on to later receivers.

    Same optical chain as mux_old_path: modulate, transmit through the
    grating, modulate back. The reflected sliver is what the local receiver
    sees as crosstalk.
    """
    return mux_old_path(env, code, fbg, transition_time)
