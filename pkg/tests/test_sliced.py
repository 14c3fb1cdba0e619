import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptlp import (
    DiscreteSignal,
    GroundCostParams,
    SliceSet,
    brute_force_opt,
    lift,
    opt_1d,
    ot_1d,
    sample_slices,
    slice_lambda_schedule,
    solve_opt,
    solve_ot,
    sptlp,
    stlp,
)
from ptlp.sliced import LAMBDA_FLOOR, per_slice_sptlp, per_slice_stlp

from conftest import random_signal


def test_sample_slices_basic():
    s = sample_slices(20, 1, seed=4)
    assert set(np.unique(s.directions)) <= {-1.0, 1.0}
    again = sample_slices(20, 1, seed=4)
    np.testing.assert_array_equal(s.directions, again.directions)
    with pytest.raises(ValueError):
        sample_slices(5, 0, seed=1)


def test_sample_slices_unit_and_centered():
    s = sample_slices(10_000, 3, seed=0)
    np.testing.assert_allclose(np.linalg.norm(s.directions, axis=1), 1.0, atol=1e-12)
    assert np.linalg.norm(s.directions.mean(axis=0)) < 0.05


def test_slice_set_validation():
    with pytest.raises(ValueError):
        SliceSet([[1.0, 1.0]])
    with pytest.raises(ValueError):
        SliceSet([[1.0, 0.0]], lambdas=[0.0])
    with pytest.raises(ValueError):
        SliceSet([[1.0, 0.0]], lambdas=[1.0, 2.0])


def test_ot_1d_examples():
    assert ot_1d([0.0, 1.0], [0.0, 1.0], 2) == 0.0
    assert ot_1d([0.0, 1.0], [1.0, 2.0], 1) == 2.0
    # pairings of [0, 3] with [1, 1]: (0-1)^2 + (3-1)^2 = 5 either way
    assert ot_1d([0.0, 3.0], [1.0, 1.0], 2) == 5.0
    with pytest.raises(ValueError):
        ot_1d([0.0], [0.0, 1.0], 2)


def test_opt_1d_examples():
    assert opt_1d([0.0, 2.0], [0.0, 2.0], 2, 1.0) == 0.0
    assert opt_1d([0.0], [10.0], 1, 1.0) == 2.0
    assert brute_force_opt([[0.1], [0.9]], 0.5) == pytest.approx(0.6)
    assert opt_1d([0.0, 1.0], [0.1], 1, 0.5) == pytest.approx(0.6)


def test_opt_1d_errors():
    with pytest.raises(ValueError):
        opt_1d([1.0, 0.0], [0.0], 1, 1.0)
    with pytest.raises(ValueError):
        opt_1d([0.0], [0.0], 1, 0.0)
    assert opt_1d([1.0, 0.0], [0.0], 1, 1.0, sort=True) == opt_1d([0.0, 1.0], [0.0], 1, 1.0)


def test_opt_1d_empty():
    assert opt_1d([], [0.0, 1.0], 2, 0.5) == 1.0


sorted_pts = st.lists(st.floats(-5, 5, allow_nan=False), min_size=0, max_size=5).map(sorted)


@settings(max_examples=300, deadline=None)
@given(sorted_pts, sorted_pts, st.floats(1, 3), st.floats(0.05, 5))
def test_opt_1d_matches_brute_force(u, v, p, lam):
    c = np.abs(np.subtract.outer(np.array(u, float), np.array(v, float))) ** p
    c = c.reshape(len(u), len(v))
    assert opt_1d(u, v, p, lam) == pytest.approx(brute_force_opt(c, lam), abs=1e-9)


def test_opt_1d_matches_assignment(rng):
    for _ in range(40):
        m, n = rng.integers(1, 60, size=2)
        u, v = np.sort(rng.normal(size=m)), np.sort(rng.normal(size=n))
        p, lam = rng.uniform(1, 3), rng.uniform(0.05, 2)
        ref = solve_opt(np.abs(np.subtract.outer(u, v)) ** p, lam).total_cost
        assert opt_1d(u, v, p, lam) == pytest.approx(ref, abs=1e-9)


def test_ot_1d_matches_assignment(rng):
    for _ in range(40):
        n = int(rng.integers(1, 40))
        u, v = np.sort(rng.normal(size=n)), np.sort(rng.normal(size=n))
        p = rng.uniform(1, 3)
        ref = solve_ot(np.abs(np.subtract.outer(u, v)) ** p).total_cost
        assert ot_1d(u, v, p) == pytest.approx(ref, abs=1e-9)


def test_stlp_identity_and_1d():
    a = DiscreteSignal([0.0, 0.5, 1.0], [1.0, 0.0, -1.0])
    prm = GroundCostParams(p=2, beta=1.0)
    assert stlp(a, a, prm, sample_slices(30, 2, seed=1)) == 0.0
    x = DiscreteSignal(np.zeros((3, 0)), [3.0, 1.0, 2.0])
    y = DiscreteSignal(np.zeros((3, 0)), [0.0, 5.0, 1.0])
    one = SliceSet([[1.0]])
    assert stlp(x, y, prm, one) == ot_1d([1.0, 2.0, 3.0], [0.0, 1.0, 5.0], 2)


def test_stlp_rejects_unequal_sizes():
    with pytest.raises(ValueError):
        stlp(DiscreteSignal([0.0], [0.0]), DiscreteSignal([0.0, 1.0], [0.0, 1.0]),
             GroundCostParams(), sample_slices(3, 2))


def test_sptlp_examples(rng):
    prm = GroundCostParams(p=2, beta=0.5)
    a = random_signal(rng, m=6)
    b = random_signal(rng, m=9)
    slices = sample_slices(25, 2, seed=3).with_lambdas(0.4)
    assert sptlp(a, a, prm, slices) == 0.0
    assert sptlp(a, b, prm, slices) <= 0.4 * (6 + 9)
    theta = sample_slices(1, 2, seed=8).directions[0]
    same = SliceSet(np.tile(theta, (5, 1)), lambdas=[0.3] * 5)
    pa = np.sort(lift(a, prm) @ theta)
    pb = np.sort(lift(b, prm) @ theta)
    assert sptlp(a, b, prm, same) == pytest.approx(opt_1d(pa, pb, 2, 0.3), rel=1e-15)
    with pytest.raises(ValueError):
        sptlp(a, b, prm, sample_slices(5, 2))


def test_sliced_symmetry_and_determinism(rng):
    prm = GroundCostParams(p=1.5, beta=2.0)
    for _ in range(10):
        a, b = random_signal(rng, m=7, d=2, k=2), random_signal(rng, m=7, d=2, k=2)
        s = sample_slices(40, 4, seed=11).with_lambdas(0.5)
        assert stlp(a, b, prm, s) == stlp(b, a, prm, s)
        assert sptlp(a, b, prm, s) == sptlp(b, a, prm, s)
        assert sptlp(a, b, prm, s) == sptlp(a, b, prm, sample_slices(40, 4, seed=11).with_lambdas(0.5))
        np.testing.assert_array_equal(
            per_slice_sptlp(a, b, prm, s, threads=1), per_slice_sptlp(a, b, prm, s, threads=3)
        )


def test_per_slice_stlp_is_averaged():
    rng = np.random.default_rng(0)
    a, b = random_signal(rng, m=5), random_signal(rng, m=5)
    prm = GroundCostParams()
    s = sample_slices(8, 2, seed=0)
    assert stlp(a, b, prm, s) == pytest.approx(per_slice_stlp(a, b, prm, s).mean(), rel=1e-15)


def test_lambda_schedule():
    theta0 = np.array([0.0, 1.0])
    at60 = [math.sqrt(3) / 2, 0.5]
    s = SliceSet([[0.0, 1.0], [1.0, 0.0], at60, [0.0, -1.0]])
    out = slice_lambda_schedule(theta0, 2.0, s)
    np.testing.assert_allclose(out.lambdas, [2.0, 2.0 * LAMBDA_FLOOR, 1.0, 2.0], rtol=1e-12)
    clamp = slice_lambda_schedule(theta0, 2.0, s, absolute=False)
    assert clamp.lambdas[3] == 2.0 * LAMBDA_FLOOR
    # value-block theta0 is padded with zeros on the position block
    np.testing.assert_array_equal(slice_lambda_schedule([1.0], 2.0, s).lambdas, out.lambdas)
    with pytest.raises(ValueError):
        slice_lambda_schedule(theta0, 0.0, s)


def test_sptlp_slice_count_estimator_is_calibrated():
    # mean of per-slice values at two slice counts differs like N(0, 1) in combined SE units
    from test_acceptance import rand_signal

    rng = np.random.default_rng(31)
    prm = GroundCostParams(p=2, beta=0.5)
    zs = []
    for t in range(60):
        d, k = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        a, b = rand_signal(rng, d, k, 20), rand_signal(rng, d, k, 20)
        lam = rng.uniform(0.1, 2)
        s = per_slice_sptlp(a, b, prm, sample_slices(500, d + k, seed=2 * t).with_lambdas(lam))
        l = per_slice_sptlp(a, b, prm, sample_slices(1000, d + k, seed=2 * t + 1).with_lambdas(lam))
        zs.append((s.mean() - l.mean()) / np.sqrt(s.var(ddof=1) / s.size + l.var(ddof=1) / l.size))
    zs = np.array(zs)
    assert abs(zs.mean()) < 0.5
    assert 0.6 < zs.std() < 1.5
