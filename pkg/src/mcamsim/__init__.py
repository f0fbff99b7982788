"""Behavioral simulator and benchmark harness for multi-bit FeFET CAMs."""

from .cam import (
    CamArray,
    SearchReport,
    Topology,
    read_contents_csv,
    write_contents_csv,
)
from .cell import (
    Level,
    MibCell,
    QueryDrive,
    conduction_margins,
    encode_query,
    encode_store,
    evaluate,
)
from .config import ConfigError, RunConfig, default_config, load_config, save_config
from .datasets import SplitDataset, load_dataset
from .device import (
    FefetInstance,
    ThresholdLadder,
    VariationModel,
    build_ladder,
    conducts,
    default_ladder,
    program,
)
from .energy import (
    CalibrationError,
    CalibrationTargets,
    CapacitanceSet,
    SweepPoint,
    TimingSet,
    calibrate,
    cml_fecam,
    cml_nor,
    default_constants,
    energy_per_bit,
    nand_search_cost,
    nor_search_cost,
    published_targets,
    search_cost,
    sweep,
    write_sweep_csv,
)
from .hdc import (
    BenchmarkResult,
    ClassPrototype,
    DegenerateVectorError,
    EncoderConfig,
    HdcModel,
    QuantScheme,
    build_model,
    encode,
    infer,
    load_model,
    make_quant_scheme,
    quantize,
    retrain_epoch,
    run_benchmark,
    save_model,
    train_single_pass,
)
from .montecarlo import MonteCarloSummary, SearchScenario, run_monte_carlo

__version__ = "0.1.0"
