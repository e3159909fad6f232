import numpy as np
import pytest

from ebsw.errors import FlowDivergedError
from ebsw.estimators import EstimatorConfig
from ebsw.flows import (
    FlowConfig,
    color_transfer,
    match_palette_size,
    round_palette,
    run_flow,
)
from ebsw.measures import EmpiricalMeasure
from ebsw.reference import exact_w2

from conftest import random_measure


def small_cfg(method="sw", **kw):
    defaults = dict(
        steps=20,
        step_size=0.01,
        estimator=EstimatorConfig(method=method, num_projections=10, seed=5),
        eval_every=5,
    )
    defaults.update(kw)
    return FlowConfig(**defaults)


def test_source_equals_target_is_stationary():
    rng = np.random.default_rng(0)
    m = random_measure(rng, 12, 2)
    final, trace = run_flow(m, m, small_cfg())
    assert np.array_equal(final.points, m.points)
    assert all(rec.eval_w2 == 0.0 for rec in trace.records)


def test_hand_computed_single_euler_step():
    # one-point clouds in one dimension: every sampled direction is +-1, so
    # the update is exactly x <- x - gamma * sign(x - y)
    x0, y0, gamma = 2.0, -1.0, 0.05
    src = EmpiricalMeasure([[x0]])
    tgt = EmpiricalMeasure([[y0]])
    cfg = FlowConfig(
        steps=1,
        step_size=gamma,
        estimator=EstimatorConfig(method="sw", num_projections=1, seed=3),
        eval_every=1,
    )
    final, _ = run_flow(src, tgt, cfg)
    assert final.points[0, 0] == pytest.approx(x0 - gamma * np.sign(x0 - y0), abs=1e-15)


def test_trace_is_deterministic():
    rng = np.random.default_rng(1)
    src = random_measure(rng, 10, 2)
    tgt = random_measure(rng, 10, 2, shift=1.0)
    for policy in ("fresh_per_step", "fixed"):
        cfg = small_cfg(seed_policy=policy)
        _, first = run_flow(src, tgt, cfg)
        _, second = run_flow(src, tgt, cfg)
        assert first.records == second.records


def test_trace_checkpoints_and_csv(tmp_path):
    rng = np.random.default_rng(2)
    src = random_measure(rng, 8, 2)
    tgt = random_measure(rng, 8, 2, shift=0.5)
    _, trace = run_flow(src, tgt, small_cfg(steps=17, eval_every=5))
    steps = [rec.step for rec in trace.records]
    assert steps == [0, 5, 10, 15, 17]
    assert all(np.isfinite(rec.estimator_value) for rec in trace.records)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "step,estimator_value,eval_w2"
    assert len(lines) == len(trace.records) + 1


def test_no_step_explodes_w2():
    rng = np.random.default_rng(3)
    src = random_measure(rng, 15, 2)
    tgt = random_measure(rng, 15, 2, shift=1.0)
    _, trace = run_flow(src, tgt, small_cfg(steps=30, eval_every=1))
    w2 = [rec.eval_w2 for rec in trace.records]
    for prev, cur in zip(w2, w2[1:]):
        assert cur <= 10.0 * max(prev, 1e-12)


def test_every_method_reduces_w2():
    rng = np.random.default_rng(4)
    src = random_measure(rng, 20, 2)
    tgt = random_measure(rng, 20, 2, shift=2.0)
    for method in ("sw", "max_sw", "is_ebsw", "sir_ebsw", "imh_ebsw", "rmh_ebsw"):
        cfg = small_cfg(method=method, steps=60, eval_every=60)
        _, trace = run_flow(src, tgt, cfg)
        assert trace.final_w2() < trace.initial_w2()


def test_gradient_mode_is_respected():
    rng = np.random.default_rng(5)
    src = random_measure(rng, 10, 2)
    tgt = random_measure(rng, 10, 2, shift=1.0)
    base = small_cfg(method="is_ebsw", steps=5, eval_every=5)
    conv = run_flow(src, tgt, base)[0]
    copy = run_flow(
        src, tgt, small_cfg(method="is_ebsw", steps=5, eval_every=5, gradient_mode="parameter_copy")
    )[0]
    assert not np.array_equal(conv.points, copy.points)


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_diverged_flow_raises_with_step():
    rng = np.random.default_rng(6)
    src = random_measure(rng, 6, 2)
    tgt = random_measure(rng, 6, 2, shift=1.0)
    cfg = small_cfg(steps=10, step_size=1e300)
    with pytest.raises(FlowDivergedError) as err:
        run_flow(src, tgt, cfg)
    assert err.value.step >= 1


def test_flow_requires_matching_shapes():
    a = EmpiricalMeasure([[0.0, 0.0]])
    b = EmpiricalMeasure([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        run_flow(a, b, small_cfg())
    c = EmpiricalMeasure([[0.0]])
    with pytest.raises(ValueError):
        run_flow(a, c, small_cfg())


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(steps=0)
    with pytest.raises(ValueError):
        FlowConfig(step_size=0.0)
    with pytest.raises(ValueError):
        FlowConfig(eval_every=100, steps=10)
    with pytest.raises(ValueError):
        FlowConfig(gradient_mode="other")
    with pytest.raises(ValueError):
        FlowConfig(seed_policy="sometimes")


def test_match_palette_size():
    rng = np.random.default_rng(7)
    pal = rng.uniform(size=(10, 3))
    same = match_palette_size(pal, 10, rng)
    assert same is pal
    smaller = match_palette_size(pal, 4, np.random.default_rng(0))
    assert smaller.shape == (4, 3)
    bigger = match_palette_size(pal, 23, np.random.default_rng(0))
    assert bigger.shape == (23, 3)
    # tiling keeps every original color at least twice in 23 = 2*10 + 3
    for row in pal:
        assert (bigger == row).all(axis=1).sum() >= 2


def test_rounding_is_idempotent():
    rng = np.random.default_rng(8)
    pal = rng.uniform(size=(50, 3))
    once = round_palette(pal)
    twice = round_palette(once.astype(np.float64) / 255.0)
    assert np.array_equal(once, twice)


def test_color_transfer_identity():
    rng = np.random.default_rng(9)
    img = rng.integers(0, 256, size=(8, 9, 3), dtype=np.uint8)
    cfg = small_cfg(steps=10, eval_every=10)
    out = color_transfer(img, img, cfg)
    assert out.dtype == np.uint8
    assert np.array_equal(out, img)


def test_color_transfer_moves_palette():
    rng = np.random.default_rng(10)
    src = rng.integers(0, 60, size=(6, 6, 3), dtype=np.uint8)
    tgt = rng.integers(180, 250, size=(6, 6, 3), dtype=np.uint8)
    cfg = FlowConfig(
        steps=200,
        step_size=0.01,
        estimator=EstimatorConfig(method="is_ebsw", num_projections=20, seed=2),
        eval_every=200,
    )
    out = color_transfer(src, tgt, cfg)
    pal = EmpiricalMeasure(out.reshape(-1, 3) / 255.0)
    tgt_pal = EmpiricalMeasure(tgt.reshape(-1, 3) / 255.0)
    src_pal = EmpiricalMeasure(src.reshape(-1, 3) / 255.0)
    assert exact_w2(pal, tgt_pal) < 0.2 * exact_w2(src_pal, tgt_pal)


def test_color_transfer_rejects_bad_images():
    cfg = small_cfg()
    with pytest.raises(ValueError):
        color_transfer(np.zeros((4, 4), dtype=np.uint8), np.zeros((4, 4, 3), dtype=np.uint8), cfg)
    with pytest.raises(ValueError):
        color_transfer(
            np.zeros((0, 4, 3), dtype=np.uint8), np.zeros((4, 4, 3), dtype=np.uint8), cfg
        )
