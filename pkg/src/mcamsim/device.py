"""Behavioral multi-level FeFET device model.

A FeFET is reduced to a programmable threshold voltage: the device is
programmed to one of 2^bits nominal levels and conducts iff its gate-source
voltage strictly exceeds the (possibly variation-shifted) effective
threshold. Polarization dynamics, write pulses, retention and endurance are
not modeled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_BITS = 3
DEFAULT_BITS = 3
DEFAULT_VTH_MIN = 0.4
DEFAULT_VTH_MAX = 2.5


@dataclass(frozen=True)
class ThresholdLadder:
    """Nominal threshold levels interleaved with search wordline voltages.

    ``levels[k]`` is the k-th programmable threshold (ascending) and
    ``search_levels[k]`` sits half a level spacing below it, so a gate driven
    at search level j turns on exactly the devices programmed strictly below
    level j. ``v_sl`` is the sourceline bias added to physical gate drives;
    match evaluation is referenced to it and therefore bias-independent.
    """

    bits: int
    levels: tuple[float, ...]
    search_levels: tuple[float, ...]
    v_sl: float = 0.0

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def spacing(self) -> float:
        """Nominal gap between adjacent threshold levels."""
        return (self.levels[-1] - self.levels[0]) / (self.num_levels - 1)

    def level(self, index: int) -> float:
        """Nominal threshold voltage for a 1-based level index."""
        if not 1 <= index <= self.num_levels:
            raise ValueError(
                f"level index {index} outside 1..{self.num_levels}"
            )
        return self.levels[index - 1]

    def search_level(self, index: int) -> float:
        """Search wordline voltage (source-referenced) for a 1-based index."""
        if not 1 <= index <= self.num_levels:
            raise ValueError(
                f"search level index {index} outside 1..{self.num_levels}"
            )
        return self.search_levels[index - 1]


@dataclass
class VariationModel:
    """Gaussian threshold-voltage spread applied at programming time.

    One instance owns one RNG stream: identical seed and draw order give
    identical samples. Draws are standard normals scaled by ``sigma_vth``,
    so sweeping sigma with a fixed seed reuses the same underlying noise
    (common random numbers). Never share an instance across threads; give
    each worker its own.
    """

    sigma_vth: float
    seed: int
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.sigma_vth < 0:
            raise ValueError(f"sigma_vth must be >= 0, got {self.sigma_vth}")
        self._rng = np.random.default_rng(self.seed)

    def draw(self) -> float:
        """One threshold offset sample in volts."""
        return float(self._rng.standard_normal()) * self.sigma_vth

    def draw_block(self, shape: tuple[int, ...]) -> np.ndarray:
        """Block of offset samples, filled in C order."""
        return self._rng.standard_normal(shape) * self.sigma_vth


@dataclass(frozen=True)
class FefetInstance:
    """A programmed device: nominal level plus its sampled offset."""

    level_index: int
    vth_offset: float
    effective_vth: float


def build_ladder(
    bits: int,
    vth_min: float,
    vth_max: float,
    v_sl: float = 0.0,
) -> ThresholdLadder:
    """Equally spaced 2^bits threshold levels over [vth_min, vth_max].

    Search levels are placed at the midpoints below each threshold level
    (the first one half a spacing below the lowest level), which yields the
    strict interleaving V_WL1 < V_TH1 < V_WL2 < ... < V_WLL < V_THL.
    """
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"unsupported precision: bits must be 1..{MAX_BITS}, got {bits}")
    if not vth_min < vth_max:
        raise ValueError(f"invalid range: vth_min {vth_min} must be < vth_max {vth_max}")
    num = 2**bits
    spacing = (vth_max - vth_min) / (num - 1)
    levels = tuple(vth_min + k * spacing for k in range(num))
    search = tuple(lv - spacing / 2 for lv in levels)
    return ThresholdLadder(bits=bits, levels=levels, search_levels=search, v_sl=v_sl)


def default_ladder(v_sl: float = 0.0) -> ThresholdLadder:
    """3-bit ladder over the default simulated threshold window."""
    return build_ladder(DEFAULT_BITS, DEFAULT_VTH_MIN, DEFAULT_VTH_MAX, v_sl)


def program(
    ladder: ThresholdLadder,
    level_index: int,
    var: VariationModel | None = None,
) -> FefetInstance:
    """Program a device to a 1-based threshold level, sampling variation.

    Without a variation model the offset is exactly zero; with one, a single
    Gaussian(0, sigma_vth) offset is drawn from the model's stream.
    """
    nominal = ladder.level(level_index)
    offset = 0.0 if var is None else var.draw()
    return FefetInstance(
        level_index=level_index,
        vth_offset=offset,
        effective_vth=nominal + offset,
    )


def conducts(fefet: FefetInstance, gate_voltage: float) -> bool:
    """True iff the gate-source voltage strictly exceeds the threshold."""
    return gate_voltage > fefet.effective_vth
