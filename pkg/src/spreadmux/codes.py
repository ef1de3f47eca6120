"""Maximal-length spreading codes from linear feedback shift registers.

Binary m-sequences are generated with a Fibonacci LFSR and mapped to bipolar
chips via 0 -> +1, 1 -> -1. Each user of the shared fibre gets a circular
shift of one base sequence; shifted copies of an m-sequence stay inside the
same family and keep the two-valued correlation structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_TAPS",
    "LfsrSpec",
    "SpreadingCode",
    "lfsr_sequence",
    "msequence_code",
    "shift_code",
    "code_inner",
]

# Feedback tap positions (exponents of the characteristic polynomial,
# x**n + x**a + ... + 1) for one primitive polynomial per register count.
# Entries are never trusted as-is: lfsr_sequence re-verifies the full period
# on first use and raises if an entry were ever wrong.
#
# n = 10 uses a pentanomial rather than the classic trinomial x**10 + x**3
# + 1: with adjacent shift assignments, trinomial families map chip-wise
# products of nearby shifts onto nearby shifts again, which correlates the
# spectral bites taken by successive chain stages and roughly halves the
# effective per-stage attenuation. The four-tap generator behaves like the
# other multi-tap defaults.
DEFAULT_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 1),
    8: (8, 4, 3, 2),
    9: (9, 4),
    10: (10, 4, 3, 1),
    11: (11, 2),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 10, 6, 1),
    15: (15, 1),
    16: (16, 12, 3, 1),
}

_MIN_REGISTERS = 2
_MAX_REGISTERS = 20


@dataclass(frozen=True)
class LfsrSpec:
    """Shift-register description: size, feedback taps and initial fill.

    taps = None picks the built-in primitive polynomial for n_registers.
    The seed is the register contents as an integer bitmask; the default
    all-ones fill matches the convention used by every built-in scenario.
    """

    n_registers: int
    taps: tuple[int, ...] | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        n = self.n_registers
        if not _MIN_REGISTERS <= n <= _MAX_REGISTERS:
            raise ValueError(
                f"n_registers must be within [{_MIN_REGISTERS}, {_MAX_REGISTERS}], "
                f"got {n}"
            )
        if self.taps is None:
            if n not in DEFAULT_TAPS:
                supported = sorted(DEFAULT_TAPS)
                raise ValueError(
                    f"no built-in taps for n_registers={n}; supply taps "
                    f"explicitly (built-ins cover {supported})"
                )
        else:
            taps = tuple(sorted(set(int(t) for t in self.taps), reverse=True))
            if not taps or any(t < 1 or t > n for t in taps):
                raise ValueError(f"taps must be positions in [1, {n}], got {self.taps}")
            if n not in taps:
                raise ValueError(f"taps must include the register length {n}")
            object.__setattr__(self, "taps", taps)
        if self.seed is not None:
            if not 1 <= self.seed < (1 << n):
                raise ValueError(
                    f"seed must be a non-zero {n}-bit fill, got {self.seed}"
                )

    @property
    def resolved_taps(self) -> tuple[int, ...]:
        return self.taps if self.taps is not None else DEFAULT_TAPS[self.n_registers]

    @property
    def resolved_seed(self) -> int:
        return self.seed if self.seed is not None else (1 << self.n_registers) - 1

    @property
    def period(self) -> int:
        return (1 << self.n_registers) - 1


@dataclass(frozen=True, eq=False)
class SpreadingCode:
    """Bipolar chip sequence plus its shift index within the code family."""

    chips: np.ndarray
    family_shift: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.chips, dtype=np.int8)
        if arr.ndim != 1 or arr.size < 3:
            raise ValueError("chips must be a 1-d sequence of length >= 3")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("chips must take values in {+1, -1}")
        arr.setflags(write=False)
        object.__setattr__(self, "chips", arr)

    def __len__(self) -> int:
        return int(self.chips.size)

    @property
    def spreading_factor(self) -> int:
        return int(self.chips.size)


# verified output sequences keyed by (n, taps, seed); entries are read-only
_SEQUENCE_CACHE: dict[tuple[int, tuple[int, ...], int], np.ndarray] = {}


def lfsr_sequence(spec: LfsrSpec) -> np.ndarray:
    """Run the register for one full period and return the 0/1 output bits.

    The state cycle is checked while generating: the register must return to
    its seed after exactly 2**n - 1 steps and never earlier, i.e. the taps
    must describe a primitive polynomial. Anything else raises ValueError.
    """
    n = spec.n_registers
    taps = spec.resolved_taps
    seed = spec.resolved_seed
    key = (n, taps, seed)
    cached = _SEQUENCE_CACHE.get(key)
    if cached is not None:
        return cached

    # bit (n - i) of the state holds register cell i; cell n is the output
    mask = 0
    for t in taps:
        mask |= 1 << (n - t)
    period = spec.period
    bits = np.empty(period, dtype=np.uint8)
    state = seed
    for step in range(period):
        bits[step] = state & 1
        fb = bin(state & mask).count("1") & 1
        state = (state >> 1) | (fb << (n - 1))
        if state == seed and step != period - 1:
            raise ValueError(
                f"taps {taps} are not primitive for n={n}: register cycle "
                f"closed after {step + 1} steps instead of {period}"
            )
    if state != seed:
        raise ValueError(
            f"taps {taps} are not primitive for n={n}: register did not "
            f"return to its seed after {period} steps"
        )
    bits.setflags(write=False)
    _SEQUENCE_CACHE[key] = bits
    return bits


def msequence_code(spec: LfsrSpec) -> SpreadingCode:
    """Bipolar base code for the family, shift index 0."""
    bits = lfsr_sequence(spec)
    chips = (1 - 2 * bits.astype(np.int8)).astype(np.int8)
    return SpreadingCode(chips=chips, family_shift=0)


def shift_code(code: SpreadingCode, shift: int) -> SpreadingCode:
    """Circularly shift a code; user i conventionally takes shift i."""
    length = len(code)
    offset = int(shift) % length
    return SpreadingCode(
        chips=np.roll(code.chips, offset),
        family_shift=(code.family_shift + offset) % length,
    )


def code_inner(a: SpreadingCode, b: SpreadingCode) -> int:
    """Integer chip-wise inner product (S on a match, -1 across the family)."""
    if len(a) != len(b):
        raise ValueError(f"code lengths differ: {len(a)} vs {len(b)}")
    return int(np.dot(a.chips.astype(np.int64), b.chips.astype(np.int64)))
