"""INI-style run configuration: one section per simulator subsystem.

Every key is validated before any simulation starts; unknown sections or
keys are rejected. Command-line flags override file values, and the file
path itself can come from the MCAMSIM_CONFIG environment variable.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from . import device
from .cam import Topology
from .datasets import DATASET_FORMATS
from .device import ThresholdLadder, VariationModel, build_ladder
from .energy import CapacitanceSet, TimingSet, default_constants
from .hdc import SIMILARITY_MODES

CONFIG_ENV_VAR = "MCAMSIM_CONFIG"


class ConfigError(Exception):
    """Bad configuration file or parameter set."""


@dataclass
class RunSection:
    seed: int = 7


@dataclass
class LadderSection:
    bits: int = device.DEFAULT_BITS
    vth_min: float = device.DEFAULT_VTH_MIN
    vth_max: float = device.DEFAULT_VTH_MAX
    v_sl: float = 1.0


@dataclass
class VariationSection:
    sigma_vth: float = 0.054
    seed: int = 2


@dataclass
class ArraySection:
    topology: str = "nor"
    rows: int = 16
    cols: int = 32


@dataclass
class CapacitanceSection:
    c_d_p: float = 0.0
    c_fefet: float = 0.0
    c_nmos: float = 0.0
    c_parasitic: float = 0.0


@dataclass
class TimingSection:
    v_dd: float = 1.0
    v_ref: float = 0.5
    r_discharge: float = 0.0
    t_precharge: float = 0.0
    t_stage: float = 0.0
    e_sl_per_on_cell: float = 0.0
    t_sense: float = 0.0


@dataclass
class SweepSection:
    rows: str = "16:128"
    cols: str = "32"
    queries: int = 8


@dataclass
class MonteCarloSection:
    trials: int = 100
    # Optional explicit scenario: comma-separated symbol lists plus the
    # expected outcome ("match", "mismatch", or "auto" to derive it from
    # the words). Empty strings select the built-in worst case.
    stored: str = ""
    query: str = ""
    expect: str = "auto"


@dataclass
class HdcSection:
    dataset: str = "generic_csv"
    data_dir: str = "data"
    hyper_dim: int = 1024
    bits: int = 3
    learning_rate: float = 0.03
    epochs: int = 20
    similarity: str = "cam_match_count"


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    ladder: LadderSection = field(default_factory=LadderSection)
    variation: VariationSection = field(default_factory=VariationSection)
    array: ArraySection = field(default_factory=ArraySection)
    capacitance: CapacitanceSection = field(default_factory=CapacitanceSection)
    timing: TimingSection = field(default_factory=TimingSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    montecarlo: MonteCarloSection = field(default_factory=MonteCarloSection)
    hdc: HdcSection = field(default_factory=HdcSection)

    def build_ladder(self) -> ThresholdLadder:
        try:
            return build_ladder(
                self.ladder.bits,
                self.ladder.vth_min,
                self.ladder.vth_max,
                self.ladder.v_sl,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def variation_model(self) -> VariationModel:
        try:
            return VariationModel(self.variation.sigma_vth, self.variation.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def topology(self) -> Topology:
        try:
            return Topology(self.array.topology)
        except ValueError:
            raise ConfigError(
                f"topology must be 'nor' or 'nand', got {self.array.topology!r}"
            ) from None

    def capacitance_set(self) -> CapacitanceSet:
        try:
            return CapacitanceSet(**dataclasses.asdict(self.capacitance))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def timing_set(self) -> TimingSet:
        try:
            return TimingSet(**dataclasses.asdict(self.timing))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> None:
        if self.montecarlo.expect not in ("auto", "match", "mismatch"):
            raise ConfigError(
                "montecarlo.expect must be 'auto', 'match', or 'mismatch', "
                f"got {self.montecarlo.expect!r}"
            )
        if bool(self.montecarlo.stored) != bool(self.montecarlo.query):
            raise ConfigError(
                "montecarlo.stored and montecarlo.query must be given together"
            )
        if self.hdc.dataset not in DATASET_FORMATS:
            raise ConfigError(
                f"hdc.dataset must be one of {DATASET_FORMATS}, got {self.hdc.dataset!r}"
            )
        if self.hdc.similarity not in SIMILARITY_MODES:
            raise ConfigError(
                f"hdc.similarity must be one of {SIMILARITY_MODES}, "
                f"got {self.hdc.similarity!r}"
            )
        self.topology()
        self.build_ladder()


_SECTIONS = {
    "run": RunSection,
    "ladder": LadderSection,
    "variation": VariationSection,
    "array": ArraySection,
    "capacitance": CapacitanceSection,
    "timing": TimingSection,
    "sweep": SweepSection,
    "montecarlo": MonteCarloSection,
    "hdc": HdcSection,
}


def default_config() -> RunConfig:
    """Defaults with cost constants calibrated to the published endpoints."""
    caps, timing = default_constants()
    cfg = RunConfig()
    cfg.capacitance = CapacitanceSection(**dataclasses.asdict(caps))
    cfg.timing = TimingSection(**dataclasses.asdict(timing))
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate an INI config; unknown sections/keys are errors."""
    parser = configparser.ConfigParser()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    cfg = default_config()
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        target = getattr(cfg, section)
        fields = {f.name: f.type for f in dataclasses.fields(target)}
        for key, raw in parser.items(section):
            if key not in fields:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            kind = type(getattr(target, key))
            try:
                value = kind(raw) if kind is not bool else raw.lower() in ("1", "true")
            except ValueError:
                raise ConfigError(
                    f"{path}: [{section}] {key} = {raw!r} is not a valid {kind.__name__}"
                ) from None
            setattr(target, key, value)
    cfg.validate()
    return cfg


def save_config(cfg: RunConfig, path: str | Path) -> None:
    """Write every section; floats use repr so reloads are value-identical."""
    parser = configparser.ConfigParser()
    for name in _SECTIONS:
        section = getattr(cfg, name)
        parser[name] = {
            f.name: repr(getattr(section, f.name))
            if isinstance(getattr(section, f.name), float)
            else str(getattr(section, f.name))
            for f in dataclasses.fields(section)
        }
    with open(path, "w") as fh:
        parser.write(fh)


def load_default_or_env() -> RunConfig:
    """Config from MCAMSIM_CONFIG when set, built-in defaults otherwise."""
    import os

    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return load_config(env_path)
    return default_config()
