import math
import random

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scorch.quadrature import (SegmentScheme, baseline_quad, euler_accelerate, euler_table,
                               integrate_oscillatory, segment_bounds)

FRESNEL = math.sqrt(math.pi / 8)


def fractional(value, exact):
    return abs(value - exact) / abs(exact)


# -- baseline ------------------------------------------------------------------

def test_polynomial_exact():
    res = baseline_quad(lambda x: x, 0.0, 1.0)
    assert res.converged and abs(res.value - 0.5) < 1e-10


def test_exponential_semi_infinite():
    res = baseline_quad(lambda x: np.exp(-x), 0.0)
    assert res.converged and abs(res.value - 1.0) < 1e-8


def test_fresnel_baseline_fails():
    assert not baseline_quad(lambda x: np.sin(x * x), 0.0).converged


def test_nonfinite_samples_flagged():
    res = baseline_quad(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)
    assert not res.converged and res.message


def test_baseline_against_closed_form():
    for a in (0.3, 1.0, 2.5):
        exact = 1 / (2 * a) + a / (2 * (a * a + 4))
        res = baseline_quad(lambda x, a=a: np.exp(-a * x) * np.cos(x) ** 2, 0.0)
        assert res.converged and abs(res.value - exact) <= res.error_estimate


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        baseline_quad(lambda x: x, 0.0, 1.0, abs_tol=0.0, rel_tol=0.0)


# -- segments --------------------------------------------------------------------

def test_segment_bound_examples():
    assert segment_bounds(0.0, SegmentScheme(1.0, 1.0, 10), 3) == (3.0, 4.0)
    assert segment_bounds(0.0, SegmentScheme(1.0, 2.0, 10), 2) == (3.0, 7.0)
    for r in (1.0, 1.15, 3.0):
        assert segment_bounds(2.0, SegmentScheme(0.7, r, 5), 0) == (2.0, 2.7)


def test_segment_index_range():
    with pytest.raises(ValueError):
        segment_bounds(0.0, SegmentScheme(1.0, 1.5, 4), 4)


@given(st.floats(-100, 100), st.floats(0.01, 10), st.floats(1.0, 3.0), st.integers(1, 80))
def test_segments_tile_without_gaps(a, L0, r, K):
    scheme = SegmentScheme(L0, r, K)
    bounds = [segment_bounds(a, scheme, k) for k in range(K)]
    assert bounds[0][0] == a
    for (lo, hi), (lo2, _) in zip(bounds, bounds[1:]):
        assert hi == lo2  # exact shared endpoints
    for lo, hi in bounds:
        assert hi > lo
    end = a + (L0 * K if r == 1.0 else L0 * (r**K - 1) / (r - 1))
    assert bounds[-1][1] == pytest.approx(end, rel=1e-12, abs=1e-12)


def test_scheme_parse_and_validation():
    assert SegmentScheme.parse("3.5, 1.2, 40") == SegmentScheme(3.5, 1.2, 40)
    for bad in ("1,2", "0,1.1,5", "1,0.9,5", "1,1.1,0"):
        with pytest.raises(ValueError):
            SegmentScheme.parse(bad)


# -- Euler ------------------------------------------------------------------------

def test_euler_alternating_harmonic():
    mp.mp.dps = 30
    terms = [(-1) ** k / (k + 1) for k in range(12)]
    oracle = mp.log(2)
    # the raw partial sum is nowhere near
    raw = mp.fsum(mp.mpf(t) for t in terms)
    assert abs(raw - oracle) > 3e-2
    est, stability = euler_accelerate(terms)
    assert abs(mp.mpf(est) - oracle) < 1e-6
    assert stability >= 0


def test_euler_zero_terms():
    assert euler_accelerate([0.0] * 7) == (0.0, 0.0)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_euler_two_terms(t0, t1):
    est, _ = euler_accelerate([t0, t1])
    assert est == pytest.approx(t0 + t1 / 2, rel=1e-12, abs=1e-9)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=6), st.integers(3, 20))
def test_euler_eventually_zero_reproduces_sum(head, zeros):
    terms = head + [0.0] * zeros
    est, _ = euler_accelerate(terms, skip=len(head) - 1 if len(head) > 1 else 0)
    assert est == pytest.approx(math.fsum(head), rel=1e-9, abs=1e-9)


def test_euler_table_shape():
    levels = euler_table([1.0, 2.0, 4.0])
    assert levels == [[1.0, 2.0, 4.0], [1.5, 3.0], [2.25]]


def test_euler_needs_two_terms():
    with pytest.raises(ValueError):
        euler_accelerate([1.0])


# -- integrate_oscillatory --------------------------------------------------------

def test_fresnel_sine():
    res = integrate_oscillatory(lambda x: np.sin(x * x), 0.0)
    assert res.method_used == "segmented_euler"
    assert fractional(res.value, FRESNEL) < 0.03


def test_dirichlet():
    res = integrate_oscillatory(lambda x: np.sin(x) / x, 0.0)
    assert fractional(res.value, math.pi / 2) < 0.03


def test_exponential_takes_baseline():
    res = integrate_oscillatory(lambda x: np.exp(-x), 0.0)
    assert res.method_used == "baseline"


def test_nonfinite_segment_not_converged():
    f = lambda x: np.where(x > 10, np.inf, np.sin(x * x))  # noqa: E731
    res = integrate_oscillatory(f, 0.0)
    assert not res.converged


def smooth_integrands(count, seed=2024):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        a, b, c = rng.uniform(0.5, 3), rng.uniform(0, 2), rng.uniform(-5, 5)
        out.append(lambda x, a=a, b=b, c=c: c * np.exp(-a * x) * (1 + b * x * x))
    return out


def test_drop_in_on_smooth_integrands():
    for f in smooth_integrands(20):
        base = baseline_quad(f, 0.0)
        res = integrate_oscillatory(f, 0.0)
        assert res.method_used == "baseline" and res.value == base.value


@settings(max_examples=5, deadline=None)
@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
def test_linearity_on_segmented_path(c):
    scheme = SegmentScheme()
    f = lambda x: np.sin(x * x)  # noqa: E731
    ref = integrate_oscillatory(f, 0.0, scheme)
    scaled = integrate_oscillatory(lambda x: c * f(x), 0.0, scheme)
    assert scaled.method_used == ref.method_used == "segmented_euler"
    assert abs(scaled.value - c * ref.value) <= abs(c) * ref.error_estimate + scaled.error_estimate


def test_tol_must_be_positive():
    with pytest.raises(ValueError):
        integrate_oscillatory(lambda x: np.sin(x), 0.0, tol=0.0)
