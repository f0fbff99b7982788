"""Quantized hyperdimensional classification over the simulated CAM.

Samples are lifted into D dimensions with a Gaussian random projection,
class prototypes are accumulated and refined at full precision, then
prototypes and queries are quantized into 2^bits symbols through
equal-probability standard-normal bins. Inference searches the quantized
query against a CAM holding one prototype word per class and picks the row
with the highest per-cell match count.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .cam import CamArray, SearchReport, Topology
from .device import DEFAULT_VTH_MAX, DEFAULT_VTH_MIN, ThresholdLadder, build_ladder
from .energy import CapacitanceSet, TimingSet, default_constants, nor_search_cost

SIMILARITY_MODES = ("cam_match_count", "cosine_full", "cosine_quantized")


class DegenerateVectorError(ValueError):
    """A vector with zero spread cannot be z-scored."""


@dataclass(frozen=True)
class EncoderConfig:
    """Fixed Gaussian random projection from feature space to D dimensions."""

    feature_dim: int
    hyper_dim: int
    seed: int
    projection: np.ndarray

    @classmethod
    def create(cls, feature_dim: int, hyper_dim: int, seed: int) -> "EncoderConfig":
        if feature_dim < 1 or hyper_dim < 1:
            raise ValueError(
                f"dimensions must be >= 1, got {feature_dim}x{hyper_dim}"
            )
        rng = np.random.default_rng(seed)
        projection = rng.standard_normal((feature_dim, hyper_dim))
        return cls(
            feature_dim=feature_dim,
            hyper_dim=hyper_dim,
            seed=seed,
            projection=projection,
        )


def encode(features: np.ndarray, encoder: EncoderConfig) -> np.ndarray:
    """Project features into D dimensions; accepts (d,) or (batch, d)."""
    feats = np.asarray(features, dtype=float)
    if feats.shape[-1] != encoder.feature_dim:
        raise ValueError(
            f"feature dimension {feats.shape[-1]} != encoder {encoder.feature_dim}"
        )
    return feats @ encoder.projection


@dataclass
class ClassPrototype:
    """Accumulated hypervector of one class."""

    label: int
    vector: np.ndarray


def train_single_pass(
    hypervectors: np.ndarray,
    labels: np.ndarray,
    num_classes: int,
) -> np.ndarray:
    """Sum encoded samples per class into a (K, D) prototype matrix."""
    hv = np.asarray(hypervectors, dtype=float)
    y = np.asarray(labels)
    if hv.ndim != 2 or y.shape != (hv.shape[0],):
        raise ValueError("need (M, D) hypervectors and matching (M,) labels")
    if y.size and (y.min() < 0 or y.max() >= num_classes):
        raise ValueError(f"labels must be in 0..{num_classes - 1}")
    prototypes = np.empty((num_classes, hv.shape[1]))
    missing = []
    for k in range(num_classes):
        members = y == k
        if not members.any():
            missing.append(k)
            continue
        prototypes[k] = hv[members].sum(axis=0)
    if missing:
        raise ValueError(f"empty class(es) in training data: {missing}")
    return prototypes


def _cosine_to_prototypes(prototypes: np.ndarray, hv: np.ndarray) -> np.ndarray:
    """Cosine similarity of one or many hypervectors against each prototype.

    Zero-norm rows on either side contribute similarity 0.
    """
    p_norm = np.linalg.norm(prototypes, axis=1)
    p_safe = np.where(p_norm > 0, p_norm, 1.0)
    single = hv.ndim == 1
    q = hv[None, :] if single else hv
    q_norm = np.linalg.norm(q, axis=1)
    q_safe = np.where(q_norm > 0, q_norm, 1.0)
    sims = (q @ prototypes.T) / (q_safe[:, None] * p_safe[None, :])
    sims[:, p_norm == 0] = 0.0
    sims[q_norm == 0, :] = 0.0
    return sims[0] if single else sims


def predict_cosine(prototypes: np.ndarray, hypervectors: np.ndarray) -> np.ndarray:
    """Argmax-cosine labels; ties resolve to the lowest class index."""
    sims = _cosine_to_prototypes(prototypes, np.asarray(hypervectors, dtype=float))
    return np.atleast_2d(sims).argmax(axis=1)


def retrain_epoch(
    prototypes: np.ndarray,
    hypervectors: np.ndarray,
    labels: np.ndarray,
    learning_rate: float,
) -> int:
    """One pass of misprediction-driven updates, in sample order.

    A sample predicted as l' != l moves both prototypes by
    eta * (1 - delta) * Q, toward the true class l and away from l', where
    delta is the cosine similarity between Q and the current true-class
    prototype, clamped to [0, 1]. Correct predictions change nothing.
    Returns the number of mispredictions. Mutates ``prototypes`` in place.
    """
    hv = np.asarray(hypervectors, dtype=float)
    y = np.asarray(labels)
    # Prototype norms change only on an update, so cache them per row.
    p_norms = np.linalg.norm(prototypes, axis=1)
    q_norms = np.linalg.norm(hv, axis=1)
    mispredicted = 0
    for i in range(hv.shape[0]):
        q = hv[i]
        denom = np.where(p_norms > 0, p_norms, 1.0) * (q_norms[i] or 1.0)
        sims = (prototypes @ q) / denom
        sims[p_norms == 0] = 0.0
        if q_norms[i] == 0:
            sims[:] = 0.0
        predicted = int(sims.argmax())
        truth = int(y[i])
        if predicted == truth:
            continue
        mispredicted += 1
        delta = min(max(float(sims[truth]), 0.0), 1.0)
        step = learning_rate * (1.0 - delta)
        prototypes[truth] += step * q
        prototypes[predicted] -= step * q
        p_norms[truth] = np.linalg.norm(prototypes[truth])
        p_norms[predicted] = np.linalg.norm(prototypes[predicted])
    return mispredicted


@dataclass(frozen=True)
class QuantScheme:
    """Equal-probability z-score bins: 2^bits symbols, right-open."""

    bits: int
    boundaries: np.ndarray


def make_quant_scheme(bits: int) -> QuantScheme:
    """Bin boundaries at the standard-normal quantiles k/2^bits."""
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    num = 2**bits
    boundaries = np.array([NormalDist().inv_cdf(k / num) for k in range(1, num)])
    return QuantScheme(bits=bits, boundaries=boundaries)


def quantize(vector: np.ndarray, scheme: QuantScheme) -> np.ndarray:
    """Map each element to its z-score bin, standardizing per vector.

    Every row of a (M, D) input is standardized with its own mean and
    population standard deviation; bin k covers [q_k, q_{k+1}) so an element
    sitting exactly on a boundary takes the higher symbol.
    """
    x = np.asarray(vector, dtype=float)
    single = x.ndim == 1
    rows = x[None, :] if single else x
    mu = rows.mean(axis=1, keepdims=True)
    sigma = rows.std(axis=1, keepdims=True)
    if (sigma == 0).any():
        bad = np.flatnonzero(sigma.ravel() == 0).tolist()
        raise DegenerateVectorError(
            f"vector(s) {bad} have zero spread and cannot be z-scored"
        )
    z = (rows - mu) / sigma
    symbols = np.searchsorted(scheme.boundaries, z, side="right")
    return symbols[0] if single else symbols


@dataclass
class HdcModel:
    """Trained encoder, prototypes, and the CAM acting as associative memory.

    The CAM stores one quantized prototype word per class, row index equal
    to the class label.
    """

    encoder: EncoderConfig
    prototypes: list[ClassPrototype]
    quant: QuantScheme
    am: CamArray
    learning_rate: float

    @property
    def num_classes(self) -> int:
        return len(self.prototypes)

    def prototype_matrix(self) -> np.ndarray:
        return np.stack([p.vector for p in self.prototypes])


def _am_ladder(bits: int) -> ThresholdLadder:
    return build_ladder(bits, DEFAULT_VTH_MIN, DEFAULT_VTH_MAX)


def build_model(
    train_x: np.ndarray,
    train_y: np.ndarray,
    num_classes: int,
    hyper_dim: int,
    bits: int,
    seed: int,
    learning_rate: float = 0.03,
    epochs: int = 20,
    ladder: ThresholdLadder | None = None,
) -> HdcModel:
    """Encode, train (single pass plus refinement epochs), quantize, store.

    Training runs at full precision and stops early on the first epoch with
    zero mispredictions; only the final prototypes are quantized into the
    associative memory.
    """
    encoder = EncoderConfig.create(train_x.shape[1], hyper_dim, seed)
    hv = encode(train_x, encoder)
    prototypes = train_single_pass(hv, train_y, num_classes)
    for _ in range(epochs):
        if retrain_epoch(prototypes, hv, train_y, learning_rate) == 0:
            break
    scheme = make_quant_scheme(bits)
    symbols = quantize(prototypes, scheme)
    am = CamArray.from_contents(
        Topology.NOR_1T, ladder or _am_ladder(bits), symbols.tolist()
    )
    return HdcModel(
        encoder=encoder,
        prototypes=[ClassPrototype(k, prototypes[k]) for k in range(num_classes)],
        quant=scheme,
        am=am,
        learning_rate=learning_rate,
    )


def infer_symbols(model: HdcModel, symbols: list[int]) -> tuple[int, SearchReport]:
    """Best-matching class for an already-quantized query word."""
    report = model.am.search_nor(symbols)
    counts = np.asarray(report.match_count)
    return int(counts.argmax()), report


def infer(model: HdcModel, query_features: np.ndarray) -> int:
    """Encode, quantize, and search one feature vector; ties pick the lowest label."""
    hv = encode(np.asarray(query_features, dtype=float), model.encoder)
    if hv.ndim != 1:
        raise ValueError("infer takes a single feature vector")
    symbols = quantize(hv, model.quant)
    label, _ = infer_symbols(model, symbols.tolist())
    return label


MODEL_FORMAT = "mcamsim-hdc-model-v1"


def save_model(model: HdcModel, path) -> None:
    """Persist a trained model as one self-describing .npz archive.

    The projection matrix is not stored; the encoder seed regenerates it
    bit-identically on load. Stored symbols are kept explicitly so the
    associative memory reloads without re-quantizing.
    """
    symbols = np.array([model.am.stored_word(k) for k in range(model.num_classes)])
    np.savez_compressed(
        path,
        format=np.array(MODEL_FORMAT),
        feature_dim=model.encoder.feature_dim,
        hyper_dim=model.encoder.hyper_dim,
        encoder_seed=model.encoder.seed,
        learning_rate=model.learning_rate,
        bits=model.quant.bits,
        boundaries=model.quant.boundaries,
        prototypes=model.prototype_matrix(),
        symbols=symbols,
    )


def load_model(path) -> HdcModel:
    """Rebuild a model saved by :func:`save_model`."""
    with np.load(path) as archive:
        if "format" not in archive or str(archive["format"]) != MODEL_FORMAT:
            raise ValueError(f"{path} is not a {MODEL_FORMAT} archive")
        encoder = EncoderConfig.create(
            int(archive["feature_dim"]),
            int(archive["hyper_dim"]),
            int(archive["encoder_seed"]),
        )
        bits = int(archive["bits"])
        scheme = QuantScheme(bits=bits, boundaries=archive["boundaries"].copy())
        prototypes = archive["prototypes"].copy()
        symbols = archive["symbols"].astype(np.int64)
        am = CamArray.from_contents(Topology.NOR_1T, _am_ladder(bits), symbols.tolist())
        return HdcModel(
            encoder=encoder,
            prototypes=[
                ClassPrototype(k, prototypes[k]) for k in range(prototypes.shape[0])
            ],
            quant=scheme,
            am=am,
            learning_rate=float(archive["learning_rate"]),
        )


@dataclass
class BenchmarkResult:
    """Accuracy and, for CAM-backed inference, aggregate search cost."""

    dataset: str
    similarity: str
    bits: int
    hyper_dim: int
    accuracy: float
    queries: int
    epochs_run: int
    energy_j_total: float | None = None
    latency_s_per_search: float | None = None

    @property
    def energy_fj_per_inference(self) -> float | None:
        if self.energy_j_total is None or self.queries == 0:
            return None
        return self.energy_j_total / self.queries * 1e15


def run_benchmark(
    data,
    bits: int,
    hyper_dim: int,
    similarity: str,
    seed: int,
    learning_rate: float = 0.03,
    epochs: int = 20,
    caps: CapacitanceSet | None = None,
    timing: TimingSet | None = None,
) -> BenchmarkResult:
    """Train on the split's training half and score its test half.

    ``similarity`` selects the inference route: full-precision cosine,
    cosine over quantized symbols, or the CAM match-count search. The CAM
    route also aggregates search energy over every query (each search
    charges all class rows) and reports the per-search latency.
    """
    if similarity not in SIMILARITY_MODES:
        raise ValueError(
            f"similarity must be one of {SIMILARITY_MODES}, got {similarity!r}"
        )
    encoder = EncoderConfig.create(data.train_x.shape[1], hyper_dim, seed)
    hv_train = encode(data.train_x, encoder)
    prototypes = train_single_pass(hv_train, data.train_y, data.num_classes)
    epochs_run = 0
    for _ in range(epochs):
        epochs_run += 1
        if retrain_epoch(prototypes, hv_train, data.train_y, learning_rate) == 0:
            break
    hv_test = encode(data.test_x, encoder)
    queries = hv_test.shape[0]

    if similarity == "cosine_full":
        predictions = predict_cosine(prototypes, hv_test)
        return BenchmarkResult(
            dataset=data.name,
            similarity=similarity,
            bits=bits,
            hyper_dim=hyper_dim,
            accuracy=float((predictions == data.test_y).mean()),
            queries=queries,
            epochs_run=epochs_run,
        )

    scheme = make_quant_scheme(bits)
    proto_symbols = quantize(prototypes, scheme)
    query_symbols = quantize(hv_test, scheme)

    if similarity == "cosine_quantized":
        predictions = predict_cosine(
            proto_symbols.astype(float), query_symbols.astype(float)
        )
        return BenchmarkResult(
            dataset=data.name,
            similarity=similarity,
            bits=bits,
            hyper_dim=hyper_dim,
            accuracy=float((predictions == data.test_y).mean()),
            queries=queries,
            epochs_run=epochs_run,
        )

    if caps is None or timing is None:
        caps, timing = default_constants()
    am = CamArray.from_contents(Topology.NOR_1T, _am_ladder(bits), proto_symbols.tolist())
    correct = 0
    total_energy = 0.0
    latency = 0.0
    for i in range(queries):
        report = am.search_nor(query_symbols[i].tolist())
        energy, latency = nor_search_cost(report, hyper_dim, caps, timing)
        total_energy += energy
        predicted = int(np.asarray(report.match_count).argmax())
        correct += predicted == int(data.test_y[i])
    return BenchmarkResult(
        dataset=data.name,
        similarity=similarity,
        bits=bits,
        hyper_dim=hyper_dim,
        accuracy=correct / queries,
        queries=queries,
        epochs_run=epochs_run,
        energy_j_total=total_energy,
        latency_s_per_search=latency,
    )
