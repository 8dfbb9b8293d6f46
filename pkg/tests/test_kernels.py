"""The compiled reduction core and the pure-python fallback must agree bitwise.

Every reduction in the package funnels through ordered_sum / ordered_dot /
pompeiu_sum, so cross-lane bit equality here is what makes results
reproducible no matter how the package was installed.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclab import _kernels
from qclab._kernels import fallback

try:
    from qclab._kernels import _core
except ImportError:  # pure-python install
    _core = None

needs_compiled = pytest.mark.skipif(
    _core is None, reason="compiled lane not built in this environment"
)

SIZES = [0, 1, 2, 3, 63, 64, 65, 127, 128, 129, 1000, 4096, 4097]


def _rand(n, seed):
    rng = np.random.default_rng(seed)
    # mix of magnitudes so compensation actually matters
    x = rng.normal(size=n) * np.exp(rng.uniform(-12, 12, size=n))
    return np.ascontiguousarray(x)


def test_backend_reports_a_lane():
    assert _kernels.backend_name() in ("compiled", "fallback")


def test_block_size_is_shared():
    assert fallback.BLOCK == _kernels.BLOCK
    if _core is not None:
        assert _core.BLOCK == fallback.BLOCK


@pytest.mark.parametrize("n", SIZES)
@needs_compiled
def test_ordered_sum_cross_lane_bitwise(n):
    x = _rand(n, seed=n + 7)
    a = _core.ordered_sum(x)
    b = fallback.ordered_sum(x)
    assert a == b
    assert math.copysign(1.0, a) == math.copysign(1.0, b)


@pytest.mark.parametrize("n", SIZES)
@needs_compiled
def test_ordered_dot_cross_lane_bitwise(n):
    w = _rand(n, seed=n + 11)
    v = _rand(n, seed=n + 13)
    assert _core.ordered_dot(w, v) == fallback.ordered_dot(w, v)


@pytest.mark.parametrize("n", [1, 64, 65, 1000, 4097])
def test_ordered_sum_matches_fsum(n):
    x = _rand(n, seed=n)
    want = math.fsum(x.tolist())
    got = _kernels.ordered_sum(x)
    assert got == pytest.approx(want, rel=1e-13, abs=1e-300)


def test_ordered_sum_empty_is_zero():
    assert _kernels.ordered_sum(np.array([], dtype=np.float64)) == 0.0
    assert fallback.ordered_sum(np.array([], dtype=np.float64)) == 0.0


def test_ordered_sum_cancellation_is_exact():
    x = np.array([1e16, 1.0, -1e16], dtype=np.float64)
    assert _kernels.ordered_sum(x) == 1.0
    assert fallback.ordered_sum(x) == 1.0


@needs_compiled
def test_signed_zero_agreement():
    x = np.array([-0.0, -0.0, -0.0], dtype=np.float64)
    a = _core.ordered_sum(x)
    b = fallback.ordered_sum(x)
    assert a == b == 0.0
    assert np.signbit(a) == np.signbit(b)


def test_ordered_dot_shape_mismatch():
    with pytest.raises(ValueError):
        fallback.ordered_dot(np.ones(3), np.ones(4))


def test_ordered_sum_is_deterministic():
    x = _rand(4097, seed=99)
    assert _kernels.ordered_sum(x) == _kernels.ordered_sum(x.copy())


@needs_compiled
@pytest.mark.parametrize("n", [0, 1, 63, 64, 65, 513, 4096])
def test_pompeiu_sum_cross_lane_bitwise(n):
    rng = np.random.default_rng(n + 1)
    cr = np.ascontiguousarray(rng.normal(size=n))
    ci = np.ascontiguousarray(rng.normal(size=n))
    wt = np.ascontiguousarray(rng.uniform(0.1, 2.0, size=n))
    vr = np.ascontiguousarray(rng.normal(size=n))
    vi = np.ascontiguousarray(rng.normal(size=n))
    mask = np.ascontiguousarray((rng.uniform(size=n) < 0.1).astype(np.uint8))
    args = (cr, ci, wt, vr, vi, 0.317, -0.858, mask)
    assert _core.pompeiu_sum(*args) == fallback.pompeiu_sum(*args)


def test_pompeiu_sum_all_masked_is_zero():
    n = 17
    one = np.ones(n)
    mask = np.ones(n, dtype=np.uint8)
    re, im = _kernels.pompeiu_sum(one, one, one, one, one, 0.0, 0.0, mask)
    assert (re, im) == (0.0, 0.0)


def test_pompeiu_sum_matches_naive_numpy():
    rng = np.random.default_rng(5)
    n = 257
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    wt = rng.uniform(0.5, 1.5, size=n)
    w = 0.25 - 0.4j
    mask = np.zeros(n, dtype=np.uint8)
    re, im = _kernels.pompeiu_sum(
        np.ascontiguousarray(c.real),
        np.ascontiguousarray(c.imag),
        np.ascontiguousarray(wt),
        np.ascontiguousarray(v.real),
        np.ascontiguousarray(v.imag),
        w.real,
        w.imag,
        mask,
    )
    want = np.sum(v * wt / (c - w))
    assert complex(re, im) == pytest.approx(want, rel=1e-12)


@needs_compiled
@settings(max_examples=100, deadline=None)
@given(
    st.lists(
        st.floats(
            allow_nan=False,
            allow_infinity=False,
            min_value=-1e30,
            max_value=1e30,
        ),
        max_size=300,
    )
)
def test_ordered_sum_property_cross_lane(xs):
    x = np.asarray(xs, dtype=np.float64)
    assert _core.ordered_sum(x) == fallback.ordered_sum(x)
