"""Adaptive Gauss-Kronrod quadrature with a segmented Euler-accelerated fallback.

``baseline_quad`` is a G7-K15 adaptive bisection integrator in the QUADPACK
mould (QAGS/QAGI style error estimates, no extrapolation).  ``integrate_oscillatory``
tries it first and, when the result looks unreliable, splits a semi-infinite
domain into geometrically growing segments, integrates each one with the
baseline, and accelerates the resulting series of segment integrals.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Kronrod 15-point nodes (positive half, descending) and weights, QUADPACK qk15.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss 7-point weights for nodes _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point abscissae on [-1, 1] and matching weights.
KRONROD_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS_WEIGHTS_ON_KRONROD = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS_ON_KRONROD[_i] = _w
    GAUSS_WEIGHTS_ON_KRONROD[14 - _i] = _w
GAUSS_WEIGHTS_ON_KRONROD[7] = _WG[3]

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

DEFAULT_ABS_TOL = 1.49e-8
DEFAULT_REL_TOL = 1.49e-8
DEFAULT_LIMIT = 50

# Baseline deemed unreliable above this fractional error estimate.
FALLBACK_REL_ERROR = 0.01
# Subdivision cap for one finite segment; chirps need far more than the default.
SEGMENT_LIMIT = 4000


class NonFiniteIntegrand(ArithmeticError):
    """Raised internally when the integrand returns NaN or Inf."""


@dataclass
class QuadResult:
    value: float
    error_estimate: float
    method_used: str = "baseline"
    segments_used: int = 0
    converged: bool = True
    evaluations: int = 0
    message: str = ""


@dataclass(frozen=True)
class SegmentScheme:
    """Geometric partition of ``[a, inf)``.

    Segment ``k`` has length ``first_length * growth_ratio**k``.
    """

    first_length: float = math.pi
    growth_ratio: float = 1.15
    max_segments: int = 60

    def __post_init__(self):
        if not self.first_length > 0:
            raise ValueError("first_length must be positive")
        if not self.growth_ratio >= 1:
            raise ValueError("growth_ratio must be >= 1")
        if self.max_segments < 1:
            raise ValueError("max_segments must be positive")

    @classmethod
    def parse(cls, text: str) -> "SegmentScheme":
        """Build a scheme from ``"L0,r,K"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 'L0,r,K', got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


def _vectorize(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    return np.vectorize(f, otypes=[float])


def _qk15(f, lo: float, hi: float) -> tuple[float, float]:
    """One G7-K15 panel on a finite interval: (integral, error estimate)."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fv = np.asarray(f(center + half * KRONROD_NODES), dtype=float)
    if not np.all(np.isfinite(fv)):
        raise NonFiniteIntegrand(f"non-finite integrand on [{lo!r}, {hi!r}]")
    resk = float(KRONROD_WEIGHTS @ fv)
    resg = float(GAUSS_WEIGHTS_ON_KRONROD @ fv)
    resabs = float(KRONROD_WEIGHTS @ np.abs(fv))
    reskh = 0.5 * resk
    resasc = float(KRONROD_WEIGHTS @ np.abs(fv - reskh))
    result = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPMACH):
        err = max(_EPMACH * 50.0 * resabs, err)
    return result, err


def _semi_infinite(f, a: float):
    """Map ``[a, inf)`` onto ``[0, 1)`` with ``x = a + t/(1-t)``."""

    def g(t):
        t = np.asarray(t, dtype=float)
        one_minus = 1.0 - t
        x = a + t / one_minus
        return np.asarray(f(x), dtype=float) / (one_minus * one_minus)

    return g


def baseline_quad(f: Callable, a: float, b: float = math.inf,
                  abs_tol: float = DEFAULT_ABS_TOL,
                  rel_tol: float = DEFAULT_REL_TOL,
                  limit: int = DEFAULT_LIMIT) -> QuadResult:
    """Adaptive G7-K15 quadrature of ``f`` over ``[a, b]``.

    ``b`` may be ``+inf``; the half line is mapped onto ``[0, 1)`` first.
    The interval with the largest error estimate is bisected until the
    total error meets ``max(abs_tol, rel_tol*|value|)`` or ``limit``
    subintervals exist.

    Args:
        f: integrand; called with numpy arrays when it supports them.
        a: finite lower limit.
        b: upper limit, finite or ``math.inf``.
        abs_tol, rel_tol: requested accuracy (both positive).
        limit: maximum number of subintervals.
    """
    if not (abs_tol > 0 and rel_tol > 0):
        raise ValueError("tolerances must be positive")
    if not math.isfinite(a):
        raise ValueError("lower limit must be finite")
    f = _vectorize(f)
    if math.isinf(b):
        if b < 0:
            raise ValueError("upper limit -inf is not supported")
        g, lo, hi = _semi_infinite(f, a), 0.0, 1.0
    else:
        g, lo, hi = f, float(a), float(b)
    if lo == hi:
        return QuadResult(0.0, 0.0, converged=True)

    evaluations = 0
    with np.errstate(all="ignore"):
        try:
            value, err = _qk15(g, lo, hi)
            evaluations += 15
            heap = [(-err, lo, hi, value)]
            total_err = err
            stalled = False
            while (total_err > max(abs_tol, rel_tol * abs(value))
                   and len(heap) < limit):
                neg_err, l, h, v = heapq.heappop(heap)
                m = 0.5 * (l + h)
                if max(abs(l), abs(h)) <= (1.0 + 100.0 * _EPMACH) * (abs(m) + 1000.0 * _UFLOW):
                    # interval is at floating-point resolution; stop as QUADPACK does
                    heapq.heappush(heap, (neg_err, l, h, v))
                    stalled = True
                    break
                v1, e1 = _qk15(g, l, m)
                v2, e2 = _qk15(g, m, h)
                evaluations += 30
                value += v1 + v2 - v
                total_err += e1 + e2 + neg_err
                heapq.heappush(heap, (-e1, l, m, v1))
                heapq.heappush(heap, (-e2, m, h, v2))
            # Re-sum from scratch to avoid drift in the running totals.
            value = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
        except NonFiniteIntegrand as exc:
            return QuadResult(math.nan, math.inf, converged=False,
                              evaluations=evaluations + 15, message=str(exc))
    converged = math.isfinite(value) and total_err <= max(abs_tol, rel_tol * abs(value))
    if converged:
        message = ""
    elif stalled:
        message = "interval shrank to rounding level; integrand behaves badly there"
    else:
        message = "subdivision limit reached before tolerance"
    return QuadResult(value, total_err, converged=converged,
                      evaluations=evaluations, message=message)


def segment_bounds(a: float, scheme: SegmentScheme, k: int) -> tuple[float, float]:
    """Endpoints of segment ``k`` of ``scheme`` starting at ``a``.

    Adjacent segments share the exact same float endpoint, so the tiling
    has no gaps or overlaps.
    """
    if not 0 <= k < scheme.max_segments:
        raise ValueError(f"segment index {k} outside [0, {scheme.max_segments})")
    return _offset(a, scheme, k), _offset(a, scheme, k + 1)


def _offset(a: float, scheme: SegmentScheme, k: int) -> float:
    L0, r = scheme.first_length, scheme.growth_ratio
    if k == 0:
        return a
    if r == 1.0:
        return a + L0 * k
    return a + L0 * (r ** k - 1.0) / (r - 1.0)


def euler_table(partial_sums) -> list[list[float]]:
    """Repeated pairwise averaging of ``partial_sums``; level 0 is the input."""
    levels = [[float(s) for s in partial_sums]]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([0.5 * (prev[i] + prev[i + 1]) for i in range(len(prev) - 1)])
    return levels


def euler_accelerate(terms, skip: int | None = None) -> tuple[float, float]:
    """Euler (repeated-averaging) acceleration of ``sum(terms)``.

    Partial sums are formed directly; the first ``skip`` of them are left
    out of the averaging triangle (default ``len(terms) // 3``), since the
    leading partial sums carry the largest transient and only dilute the
    binomial average.  Returns the apex of the triangle and the absolute
    difference between the apex and the last entry of the level above it.

    >>> euler_accelerate([1.0, 0.5])
    (1.25, 0.25)
    """
    terms = [float(t) for t in terms]
    if len(terms) < 2:
        raise ValueError("need at least two terms")
    if skip is None:
        skip = len(terms) // 3
    skip = max(0, min(skip, len(terms) - 2))
    partial = np.cumsum(terms).tolist()
    levels = euler_table(partial[skip:])
    estimate = levels[-1][0]
    stability = abs(estimate - levels[-2][-1])
    return estimate, stability


def integrate_oscillatory(f: Callable, a: float = 0.0,
                          scheme: SegmentScheme | None = None,
                          tol: float = 1e-6,
                          min_segments: int = 4) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)``, falling back to segment acceleration.

    The baseline result is returned untouched whenever it is finite, raised
    no error, and its error estimate is within 1% of its magnitude.
    Otherwise segments from ``scheme`` are integrated one at a time and the
    series of segment integrals is Euler-accelerated after each addition,
    stopping once the acceleration is stable to ``tol`` relative to the
    estimate, or the segments run out.  A segment whose own integration
    fails to converge ends the series early: its value is not trusted, and
    the estimate so far is returned.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    scheme = scheme or SegmentScheme()
    f = _vectorize(f)

    try:
        base = baseline_quad(f, a, math.inf)
        if (math.isfinite(base.value) and math.isfinite(base.error_estimate)
                and base.error_estimate <= FALLBACK_REL_ERROR * abs(base.value)):
            return base
    except Exception:  # noqa: BLE001 - any evaluation fault triggers the fallback
        pass

    terms: list[float] = []
    seg_err = 0.0
    estimate, stability = math.nan, math.inf
    evaluations = 0
    converged = False
    message = "segment budget exhausted"
    for k in range(scheme.max_segments):
        lo, hi = segment_bounds(a, scheme, k)
        try:
            seg = baseline_quad(f, lo, hi, abs_tol=0.1 * tol, rel_tol=1e-10, limit=SEGMENT_LIMIT)
        except Exception as exc:  # noqa: BLE001
            message = f"segment {k} raised {type(exc).__name__}: {exc}"
            break
        evaluations += seg.evaluations
        if not math.isfinite(seg.value):
            message = f"segment {k}: {seg.message or 'non-finite value'}"
            estimate = math.nan
            break
        if not seg.converged and terms:
            message = f"segment {k} did not converge; series truncated"
            break
        terms.append(seg.value)
        seg_err += seg.error_estimate
        if len(terms) >= 2:
            estimate, stability = euler_accelerate(terms)
        else:
            estimate = terms[0]
        if len(terms) >= min_segments and stability <= tol * abs(estimate):
            converged = True
            message = ""
            break

    return QuadResult(
        value=estimate,
        error_estimate=stability + seg_err if math.isfinite(estimate) else math.inf,
        method_used="segmented_euler",
        segments_used=len(terms),
        converged=converged and math.isfinite(estimate),
        evaluations=evaluations,
        message=message,
    )
