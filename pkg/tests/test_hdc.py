"""Encoder, training, quantization, and CAM-backed inference tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from mcamsim.datasets import SplitDataset
from mcamsim.hdc import (
    DegenerateVectorError,
    EncoderConfig,
    build_model,
    encode,
    infer,
    load_model,
    make_quant_scheme,
    predict_cosine,
    quantize,
    retrain_epoch,
    run_benchmark,
    save_model,
    train_single_pass,
)


@pytest.fixture
def encoder():
    return EncoderConfig.create(feature_dim=4, hyper_dim=8, seed=3)


def test_encoder_is_reproducible():
    a = EncoderConfig.create(10, 32, seed=5)
    b = EncoderConfig.create(10, 32, seed=5)
    assert np.array_equal(a.projection, b.projection)
    assert a.projection.shape == (10, 32)


def test_encode_zero_vector_is_zero(encoder):
    assert np.array_equal(encode(np.zeros(4), encoder), np.zeros(8))


def test_encode_unit_basis_selects_projection_rows(encoder):
    for i in range(4):
        basis = np.zeros(4)
        basis[i] = 1.0
        assert np.array_equal(encode(basis, encoder), encoder.projection[i])


def test_encode_matches_explicit_dot_products(encoder):
    rng = np.random.default_rng(0)
    feats = rng.normal(size=4)
    got = encode(feats, encoder)
    for j in range(8):
        expected = math.fsum(feats[i] * encoder.projection[i, j] for i in range(4))
        assert got[j] == pytest.approx(expected, rel=1e-12)


def test_encode_is_linear(encoder):
    rng = np.random.default_rng(1)
    f1, f2 = rng.normal(size=4), rng.normal(size=4)
    lhs = encode(2.5 * f1 - 0.75 * f2, encoder)
    rhs = 2.5 * encode(f1, encoder) - 0.75 * encode(f2, encoder)
    assert np.allclose(lhs, rhs, rtol=1e-9)


def test_encode_rejects_dimension_mismatch(encoder):
    with pytest.raises(ValueError, match="dimension"):
        encode(np.zeros(5), encoder)


def test_single_pass_aggregates_identical_samples():
    hv = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
    prototypes = train_single_pass(hv, np.array([0, 0]), 1)
    assert np.array_equal(prototypes[0], 2 * hv[0])


def test_single_pass_is_order_invariant():
    rng = np.random.default_rng(2)
    hv = rng.normal(size=(12, 6))
    labels = rng.integers(0, 3, size=12)
    while len(set(labels.tolist())) < 3:
        labels = rng.integers(0, 3, size=12)
    perm = rng.permutation(12)
    a = train_single_pass(hv, labels, 3)
    b = train_single_pass(hv[perm], labels[perm], 3)
    assert np.allclose(a, b)


def test_single_pass_matches_per_class_sums():
    rng = np.random.default_rng(4)
    hv = rng.normal(size=(9, 16))
    labels = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2])
    prototypes = train_single_pass(hv, labels, 3)
    for k in range(3):
        assert np.allclose(prototypes[k], hv[labels == k].sum(axis=0))


def test_single_pass_rejects_empty_class():
    hv = np.ones((2, 4))
    with pytest.raises(ValueError, match="empty class"):
        train_single_pass(hv, np.array([0, 2]), 3)


def test_retrain_fixed_point_when_all_correct():
    prototypes = np.array([[1.0, 0.0], [0.0, 1.0]])
    hv = np.array([[2.0, 0.1], [0.1, 2.0]])
    before = prototypes.copy()
    assert retrain_epoch(prototypes, hv, np.array([0, 1]), 0.03) == 0
    assert np.array_equal(prototypes, before)


def test_retrain_single_misprediction_with_zero_delta_moves_by_eta_q():
    # Sample orthogonal to its true-class prototype: delta = cos(Q, C_l) = 0,
    # so both prototypes move by exactly eta * Q.
    prototypes = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
    q = np.array([1.0, 0.0, 0.0])
    hv = q[None, :]
    # Make class 1 win the prediction while 0 is the truth.
    prototypes[1] += 0.5 * q
    before = prototypes.copy()
    eta = 0.03
    assert retrain_epoch(prototypes, hv, np.array([0]), eta) == 1
    assert np.allclose(prototypes[0], before[0] + eta * q)
    assert np.allclose(prototypes[1], before[1] - eta * q)


def test_retrain_epoch_matches_scripted_replay():
    rng = np.random.default_rng(7)
    hv = rng.normal(size=(10, 5))
    labels = rng.integers(0, 2, size=10)
    labels[:2] = [0, 1]
    eta = 0.03
    prototypes = train_single_pass(hv, labels, 2)
    replay = prototypes.copy()

    # Independent replay with plain Python arithmetic.
    def cos(a, b):
        na = math.sqrt(math.fsum(x * x for x in a))
        nb = math.sqrt(math.fsum(x * x for x in b))
        if na == 0 or nb == 0:
            return 0.0
        return math.fsum(x * y for x, y in zip(a, b)) / (na * nb)

    for i in range(10):
        sims = [cos(hv[i], replay[k]) for k in range(2)]
        predicted = 0 if sims[0] >= sims[1] else 1
        truth = int(labels[i])
        if predicted != truth:
            delta = min(max(sims[truth], 0.0), 1.0)
            step = eta * (1 - delta)
            replay[truth] = replay[truth] + step * hv[i]
            replay[predicted] = replay[predicted] - step * hv[i]

    retrain_epoch(prototypes, hv, labels, eta)
    assert np.allclose(prototypes, replay, rtol=1e-12)


@pytest.mark.parametrize("bits", [1, 2, 3])
def test_quantile_boundaries_match_inverse_cdf_oracle(bits):
    scheme = make_quant_scheme(bits)
    num = 2**bits
    assert scheme.boundaries.shape == (num - 1,)
    expected = norm.ppf(np.arange(1, num) / num)
    assert np.allclose(scheme.boundaries, expected, atol=1e-6)


def test_quantize_low_tail_maps_to_symbol_zero():
    scheme = make_quant_scheme(3)
    rng = np.random.default_rng(8)
    vec = rng.standard_normal(20000)
    symbols = quantize(vec, scheme)
    mu, sigma = vec.mean(), vec.std()
    z = (vec - mu) / sigma
    low_tail = norm.cdf(z) < 0.125
    # Every element below the 12.5% point of the CDF lands in symbol 0.
    assert np.all(symbols[low_tail & (norm.cdf(z) < 0.1249)] == 0)
    assert np.all(symbols[norm.cdf(z) > 0.1251] != 0)


def test_quantize_zero_z_score_sits_on_bin_four():
    scheme = make_quant_scheme(3)
    # Symmetric vector: mean 0; the element at exactly z=0 takes bin 4
    # because bins are right-open.
    vec = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    symbols = quantize(vec, scheme)
    assert symbols[2] == 4


def test_quantize_is_monotone_within_a_vector():
    rng = np.random.default_rng(9)
    vec = rng.normal(size=500)
    scheme = make_quant_scheme(2)
    symbols = quantize(vec, scheme)
    order = np.argsort(vec)
    assert np.all(np.diff(symbols[order]) >= 0)


@pytest.mark.parametrize("scale", [2.0, 0.5, 1024.0])
def test_quantize_is_exactly_scale_invariant_for_dyadic_scales(scale):
    rng = np.random.default_rng(10)
    vec = rng.normal(size=256)
    scheme = make_quant_scheme(3)
    assert np.array_equal(quantize(vec, scheme), quantize(scale * vec, scheme))


def test_quantize_scale_invariance_for_generic_positive_scale():
    rng = np.random.default_rng(11)
    vec = rng.normal(size=256)
    scheme = make_quant_scheme(3)
    assert np.array_equal(quantize(vec, scheme), quantize(3.7 * vec, scheme))


@given(bits=st.integers(min_value=1, max_value=3), seed=st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_quantize_occupancy_is_roughly_uniform(bits, seed):
    rng = np.random.default_rng(seed)
    n = 20000
    vec = rng.standard_normal(n)
    symbols = quantize(vec, make_quant_scheme(bits))
    num = 2**bits
    p = 1 / num
    bound = 4 * math.sqrt(n * p * (1 - p))  # generous: property, not acceptance
    counts = np.bincount(symbols, minlength=num)
    assert np.all(np.abs(counts - n * p) < bound)


def test_quantize_rejects_degenerate_vector():
    with pytest.raises(DegenerateVectorError):
        quantize(np.ones(8), make_quant_scheme(2))


def test_quantize_batch_uses_per_row_statistics():
    rng = np.random.default_rng(12)
    rows = rng.normal(size=(5, 64))
    scheme = make_quant_scheme(2)
    batch = quantize(rows, scheme)
    for i in range(5):
        assert np.array_equal(batch[i], quantize(rows[i], scheme))


def toy_split(seed=13, classes=3, dim=6, per_class=30, spread=0.4):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(classes, dim))
    xs, ys = [], []
    for k in range(classes):
        xs.append(centers[k] + spread * rng.normal(size=(per_class, dim)))
        ys.append(np.full(per_class, k))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    perm = rng.permutation(len(y))
    x, y = x[perm], y[perm]
    cut = int(0.7 * len(y))
    return SplitDataset(
        name="toy",
        train_x=x[:cut],
        train_y=y[:cut],
        test_x=x[cut:],
        test_y=y[cut:],
        num_classes=classes,
    )


def test_infer_returns_stored_prototype_class():
    data = toy_split()
    model = build_model(
        data.train_x, data.train_y, data.num_classes, hyper_dim=64, bits=3, seed=1
    )
    # Querying with a stored word must return its own row with a full match.
    for k in range(data.num_classes):
        word = model.am.stored_word(k)
        report = model.am.search_nor(word)
        assert report.match_count[k] == 64
        counts = np.asarray(report.match_count)
        assert counts.argmax() == k


def test_infer_prefers_fewer_symbol_differences():
    data = toy_split(classes=2)
    model = build_model(
        data.train_x, data.train_y, 2, hyper_dim=16, bits=3, seed=2
    )
    word = model.am.stored_word(0)
    other = model.am.stored_word(1)
    # Build a query 1 symbol away from class 0 and >=3 away from class 1.
    query = list(word)
    pos = next(i for i in range(16) if word[i] == other[i])
    query[pos] = (query[pos] + 1) % 8
    diff0 = sum(a != b for a, b in zip(query, word))
    diff1 = sum(a != b for a, b in zip(query, other))
    if diff1 - diff0 >= 2:
        report = model.am.search_nor(query)
        assert int(np.asarray(report.match_count).argmax()) == 0


def test_cam_inference_equals_software_hamming_classifier():
    data = toy_split(seed=21)
    model = build_model(
        data.train_x, data.train_y, data.num_classes, hyper_dim=96, bits=2, seed=3
    )
    proto_symbols = np.array(
        [model.am.stored_word(k) for k in range(data.num_classes)]
    )
    for i in range(len(data.test_y)):
        predicted = infer(model, data.test_x[i])
        hv = encode(data.test_x[i], model.encoder)
        q = quantize(hv, model.quant)
        hamming = (proto_symbols == q[None, :]).sum(axis=1)
        assert predicted == int(hamming.argmax())


def test_benchmark_modes_agree_on_an_easy_dataset():
    data = toy_split(seed=31, spread=0.15)
    results = {}
    for mode in ("cosine_full", "cosine_quantized", "cam_match_count"):
        results[mode] = run_benchmark(
            data, bits=3, hyper_dim=128, similarity=mode, seed=5
        )
    for mode, result in results.items():
        assert result.accuracy > 0.9, mode
    cam = results["cam_match_count"]
    assert cam.energy_j_total > 0
    assert cam.latency_s_per_search > 0
    assert cam.queries == len(data.test_y)


def test_benchmark_is_deterministic_for_fixed_seed():
    data = toy_split(seed=41)
    a = run_benchmark(data, bits=2, hyper_dim=64, similarity="cam_match_count", seed=6)
    b = run_benchmark(data, bits=2, hyper_dim=64, similarity="cam_match_count", seed=6)
    assert a.accuracy == b.accuracy
    assert a.energy_j_total == b.energy_j_total


def test_benchmark_rejects_unknown_similarity():
    data = toy_split()
    with pytest.raises(ValueError, match="similarity"):
        run_benchmark(data, bits=2, hyper_dim=32, similarity="euclidean", seed=0)


def test_predict_cosine_breaks_ties_toward_lower_label():
    prototypes = np.array([[1.0, 0.0], [1.0, 0.0]])
    assert predict_cosine(prototypes, np.array([[2.0, 0.0]]))[0] == 0


def test_model_persistence_round_trip(tmp_path):
    data = toy_split(seed=51)
    model = build_model(
        data.train_x, data.train_y, data.num_classes, hyper_dim=48, bits=3, seed=9
    )
    path = tmp_path / "model.npz"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.encoder.seed == model.encoder.seed
    assert np.array_equal(loaded.encoder.projection, model.encoder.projection)
    assert np.array_equal(loaded.quant.boundaries, model.quant.boundaries)
    assert np.array_equal(loaded.prototype_matrix(), model.prototype_matrix())
    for k in range(data.num_classes):
        assert loaded.am.stored_word(k) == model.am.stored_word(k)
    for i in range(len(data.test_y)):
        assert infer(loaded, data.test_x[i]) == infer(model, data.test_x[i])


def test_load_model_rejects_foreign_archives(tmp_path):
    path = tmp_path / "other.npz"
    np.savez(path, whatever=np.ones(3))
    with pytest.raises(ValueError, match="archive"):
        load_model(path)
