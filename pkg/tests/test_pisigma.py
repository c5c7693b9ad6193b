import json
import re

import numpy as np
import pytest
from numba import njit

from mtp_fuzzy import _kernels, pisigma
from mtp_fuzzy.datasets import load_fixture
from mtp_fuzzy.errors import FuzzyInputError, NoActiveRuleError, TrainingDivergedError
from mtp_fuzzy.experiments import PartitionSpec, Scaler, build_rule_grid
from mtp_fuzzy.pisigma import (
    CHECKPOINTS,
    FnnParams,
    TrainConfig,
    TrainTrace,
    checkpoint_schedule,
    fnn_forward,
    fnn_gradients,
    fnn_loss,
    fnn_train,
    learning_error,
    predict,
    product_forward,
)
from oracles import gradient_suite, random_network, weighted_average_oracle

MTP = TrainConfig()
SUG = TrainConfig(gating="sugeno_product")


def _single(center=0.5, width=0.1, coef=(1.0, 2.0)):
    return FnnParams([[center]], [[width]], [list(coef)])


def test_params_validation_and_json():
    with pytest.raises(FuzzyInputError):
        FnnParams([[0, 0]], [[1]], [[0, 0, 0]])
    with pytest.raises(FuzzyInputError):
        FnnParams([[0]], [[1]], [[0]])
    with pytest.raises(FuzzyInputError):
        FnnParams([[0]], [[0]], [[0, 0]])
    p, _, _ = random_network(np.random.default_rng(1), 5, 3)
    doc = json.loads(p.to_json())
    assert doc["centers"]["rows"] == 5 and doc["centers"]["cols"] == 3
    assert doc["coefficients"]["cols"] == 4
    q = FnnParams.from_json(p.to_json())
    for name in ("centers", "widths", "coefficients"):
        np.testing.assert_array_equal(getattr(q, name), getattr(p, name))


def test_config_validation():
    for bad in (
        dict(learning_rate=-1),
        dict(epsilon=1.5),
        dict(support_factor=0),
        dict(iterations=-1),
        dict(gating="max"),
        dict(min_width=0),
    ):
        with pytest.raises(FuzzyInputError):
            TrainConfig(**bad)


def test_forward_single_rule_exact():
    p = FnnParams([[0.2, 0.8], [0.9, 0.1]], [[0.01, 0.01], [0.01, 0.01]], [[1, 2, 3], [7, 0, 0]])
    cfg = TrainConfig(epsilon=0.9)
    r = fnn_forward(p, cfg, [0.2, 0.8])
    assert r.y0 == 1 + 2 * 0.2 + 3 * 0.8
    assert list(r.active) == [0]


def test_forward_equal_degrees_is_mean():
    p = FnnParams([[0.5], [0.5], [0.5]], [[0.1]] * 3, [[1, 0], [2, 0], [6, 0]])
    for cfg in (MTP, SUG):
        assert fnn_forward(p, cfg, [0.6]).y0 == pytest.approx(3.0, abs=1e-15)


def test_forward_matches_loop_oracle():
    rng = np.random.default_rng(7)
    for k in range(300):
        params, x, _ = random_network(rng)
        cfg = MTP if k % 2 else SUG
        try:
            got = fnn_forward(params, cfg, x)
        except NoActiveRuleError:
            continue
        assert got.y0 == pytest.approx(weighted_average_oracle(params, cfg, x), abs=1e-12)
        ys = params.coefficients[:, 0] + params.coefficients[:, 1:] @ x
        assert ys[got.active].min() - 1e-12 <= got.y0 <= ys[got.active].max() + 1e-12


def test_forward_no_active_rule():
    p = _single(center=0.0, width=0.01)
    with pytest.raises(NoActiveRuleError):
        fnn_forward(p, MTP, [5.0])
    with pytest.raises(FuzzyInputError):
        fnn_forward(p, MTP, [1.0, 2.0])
    # underflowing Gaussians also leave no weight
    with pytest.raises(NoActiveRuleError):
        fnn_forward(p, SUG, [50.0])


def test_mtp_path_never_calls_gauss(monkeypatch):
    calls = []
    real = pisigma.gauss_membership

    def counting(s, u):
        calls.append(1)
        return real(s, u)

    monkeypatch.setattr(pisigma, "gauss_membership", counting)
    rng = np.random.default_rng(0)
    params, x, yd = random_network(rng, 6, 2)
    cfg = TrainConfig(epsilon=0.0)
    fnn_forward(params, cfg, x)
    fnn_gradients(params, cfg, x, yd)
    assert calls == []
    fnn_forward(params, SUG, x)
    assert len(calls) == 12


def _exp_symbols(kernel, *args):
    # cached dispatchers carry no IR, so compile a fresh copy
    fresh = njit(kernel.py_func)
    fresh(*args)
    ir = "\n".join(fresh.inspect_llvm().values())
    return set(re.findall(r"@[\w.]*\bexp[\w.]*", ir))


def test_compiled_mtp_kernels_have_no_exp():
    n, s = 3, 2
    a, b, c = np.zeros((n, s)), np.ones((n, s)), np.zeros((n, s + 1))
    x = np.zeros(s)
    vec, idx = np.zeros(n), np.zeros(n, dtype=np.int64)
    assert _exp_symbols(_kernels.mtp_forward, a, b, c, x, 3.0, 0.1, vec, vec.copy(), idx, vec.copy()) == set()
    assert _exp_symbols(
        _kernels.mtp_step, a, b, c, x, 1.0, 0.05, 3.0, 0.1, 1e-6, vec, vec.copy(), idx, vec.copy()
    ) == set()
    # positive control: the Gaussian kernel does call exp
    assert _exp_symbols(_kernels.sugeno_forward, a, b, c, x, vec, vec.copy(), np.zeros((n, s)))


def test_loss():
    assert fnn_loss(3.0, 3.0) == 0
    assert fnn_loss(0.0, 2.0) == 2
    assert fnn_loss(1.0, 4.0) == fnn_loss(7.0, 4.0)


def test_gradients_zero_residual_and_single_rule():
    p = _single()
    cfg = MTP
    y0 = fnn_forward(p, cfg, [0.55]).y0
    g = fnn_gradients(p, cfg, [0.55], y0)
    for arr in g:
        assert np.all(arr == 0)
    g = fnn_gradients(p, cfg, [0.55], y0 + 1.5)
    assert g.coefficients[0, 0] == pytest.approx(-1.5)
    assert g.coefficients[0, 1] == pytest.approx(-1.5 * 0.55)
    # a lone rule's antecedent does not move the output
    assert g.centers[0, 0] == 0 and g.widths[0, 0] == 0


def test_inactive_rules_get_zero_gradient():
    p = FnnParams([[0.1], [5.0]], [[0.05], [0.05]], [[1, 1], [3, 3]])
    g = fnn_gradients(p, MTP, [0.12], 10.0)
    assert np.all(g.centers[1] == 0) and np.all(g.widths[1] == 0) and np.all(g.coefficients[1] == 0)


def test_gradients_match_finite_differences():
    checked, components, worst = gradient_suite(200, seed=1)
    assert checked == 200 and components > 2000
    assert worst < 1e-4


def _kernel_step(params, cfg, x, yd):
    a, b, c = params.centers.copy(), params.widths.copy(), params.coefficients.copy()
    n, s = a.shape
    X = np.ascontiguousarray([x], dtype=float)
    Y = np.array([yd], dtype=float)
    if cfg.gating == "mtp_movement":
        _kernels.mtp_epochs(a, b, c, X, Y, 1, cfg.learning_rate, cfg.support_factor, cfg.epsilon, cfg.min_width)
    else:
        _kernels.sugeno_epochs(a, b, c, X, Y, 1, cfg.learning_rate, cfg.min_width)
    return a, b, c


def test_kernel_step_matches_reference_update():
    rng = np.random.default_rng(9)
    done = 0
    while done < 200:
        params, x, yd = random_network(rng)
        cfg = MTP if done % 2 else SUG
        try:
            g = fnn_gradients(params, cfg, x, yd)
        except NoActiveRuleError:
            continue
        a, b, c = _kernel_step(params, cfg, x, yd)
        eta = cfg.learning_rate
        np.testing.assert_allclose(a, params.centers - eta * g.centers, atol=1e-12)
        np.testing.assert_allclose(b, np.maximum(params.widths - eta * g.widths, cfg.min_width), atol=1e-12)
        np.testing.assert_allclose(c, params.coefficients - eta * g.coefficients, atol=1e-12)
        done += 1


def test_predict_matches_forward():
    rng = np.random.default_rng(4)
    params, _, _ = random_network(rng, 8, 2)
    X = rng.uniform(0, 1, (30, 2))
    for cfg in (MTP, SUG):
        out = predict(params, cfg, X)
        for x, y in zip(X, out):
            try:
                assert y == pytest.approx(fnn_forward(params, cfg, x).y0, abs=1e-12)
            except NoActiveRuleError:
                assert np.isnan(y)


def test_checkpoint_schedule():
    assert checkpoint_schedule(0) == []
    assert checkpoint_schedule(50) == [50]
    assert checkpoint_schedule(100) == [100]
    assert checkpoint_schedule(1200) == [100, 500, 1000, 1200]
    assert checkpoint_schedule(32670) == list(CHECKPOINTS)


def _scaled(name, levels):
    data = load_fixture(name)
    scaled = Scaler.fit(data).transform(data)
    params, _ = build_rule_grid(PartitionSpec(levels), scaled)
    return params, scaled


def test_zero_learning_rate_leaves_params():
    params, data = _scaled("precipitation", 6)
    cfg = TrainConfig(learning_rate=0.0, iterations=600)
    trained, trace = fnn_train(params, cfg, data)
    for name in ("centers", "widths", "coefficients"):
        np.testing.assert_array_equal(getattr(trained, name), getattr(params, name))
    errs = {p.learning_error_percent for p in trace.points}
    assert len(errs) == 1
    assert [p.iteration for p in trace.points] == [0, 100, 500, 600]


def test_single_sample_descent_monotone():
    p = _single(center=0.3, width=0.2, coef=(0.0, 0.0))
    cfg = TrainConfig(learning_rate=0.1, epsilon=0.0)
    X, Y = np.array([[0.4]]), np.array([2.0])
    residuals = []
    for _ in range(30):
        residuals.append(abs(2.0 - fnn_forward(p, cfg, [0.4]).y0))
        p, _ = fnn_train(p, TrainConfig(learning_rate=0.1, epsilon=0.0, iterations=1), (X, Y))
    assert all(b < a for a, b in zip(residuals, residuals[1:]))


def test_training_deterministic():
    params, data = _scaled("security", 3)
    for gating in ("mtp_movement", "sugeno_product"):
        cfg = TrainConfig(iterations=300, gating=gating)
        p1, t1 = fnn_train(params, cfg, data)
        p2, t2 = fnn_train(params, cfg, data)
        assert [p.learning_error_percent for p in t1.points] == [p.learning_error_percent for p in t2.points]
        np.testing.assert_array_equal(p1.centers, p2.centers)
        np.testing.assert_array_equal(p1.coefficients, p2.coefficients)
        # inputs are not mutated
        assert t1.final.learning_error_percent < t1.points[0].learning_error_percent


def test_widths_floored():
    params, data = _scaled("precipitation", 6)
    cfg = TrainConfig(iterations=200, min_width=1e-3)
    trained, _ = fnn_train(params, cfg, data)
    assert trained.widths.min() >= 1e-3


@pytest.mark.parametrize("gating", ["mtp_movement", "sugeno_product"])
def test_runaway_training_raises_with_iteration(gating):
    params, data = _scaled("precipitation", 6)
    with pytest.raises(TrainingDivergedError) as info:
        fnn_train(params, TrainConfig(learning_rate=1e3, iterations=500, gating=gating), data)
    assert 1 <= info.value.iteration <= 500


def test_non_finite_loss_raises():
    p = _single(center=0.0, width=1.0, coef=(0.0, 0.0))
    X, Y = np.array([[0.1]]), np.array([1e308])
    with pytest.raises(TrainingDivergedError) as info:
        fnn_train(p, TrainConfig(iterations=5, epsilon=0.0), (X, Y))
    assert info.value.iteration == 1


def test_train_rejects_bad_data():
    p = _single()
    with pytest.raises(FuzzyInputError):
        fnn_train(p, MTP, (np.zeros((0, 1)), np.zeros(0)))
    with pytest.raises(FuzzyInputError):
        fnn_train(p, MTP, (np.zeros((3, 2)), np.ones(3)))


def test_trace(tmp_path):
    t = TrainTrace()
    t.append(0, 0.0, 50.0)
    t.append(100, 0.5, 20.0)
    with pytest.raises(ValueError):
        t.append(100, 0.6, 10.0)
    assert t.error_at(100) == 20.0
    path = tmp_path / "trace.csv"
    t.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,seconds,error_percent"
    assert lines[2].startswith("100,0.5")


def test_learning_error_counts_missing_as_full_miss():
    assert learning_error([100, 200], [90, 220]) == pytest.approx(10)
    assert learning_error([100, 200], [100, np.nan]) == pytest.approx(50)


def test_product_forward():
    p = FnnParams([[0.0], [0.0]], [[1.0], [1.0]], [[1, 2], [3, 0]])
    assert product_forward(p, [2.0]) == 15


def test_mtp_iteration_faster_than_sugeno():
    params, data = _scaled("precipitation", 6)
    times = {}
    for gating in ("mtp_movement", "sugeno_product"):
        best = np.inf
        for _ in range(3):
            _, trace = fnn_train(params, TrainConfig(iterations=1000, gating=gating), data)
            best = min(best, trace.final.wall_time_seconds)
        times[gating] = best
    assert times["mtp_movement"] < times["sugeno_product"]
