"""Weights, the primitive/derivative correspondence and weight criteria.

A weight is a positive sequence ``(s_n)_{n>=1}``.  Weights are evaluated
lazily; built-in families also carry closed-form limits that let the
truncated suprema below be extrapolated to ``k -> infinity``.

Two limits are tracked:

``ratio_limit(n)``
    ``lim_k s_k / s_{kn}`` for the weight itself;
``primitive_ratio_limit(m)``
    the same limit for the primitive weight (prefix sums).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import IndexOutOfRange, NonpositiveTerm
from .report import (
    EXTRAPOLATED,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    TRUNCATED,
    CriterionReport,
)

Limit = Optional[Callable[[int], float]]


class Weight:
    """Lazily evaluated positive sequence.

    Parameters
    ----------
    name : str
        Registry tag (``power``, ``harmonic``, ``table``, ...).
    values : callable, optional
        Vectorized evaluator taking an int64 array of indices (>= 1).
    prefix_builder : callable, optional
        ``n -> array of the first n terms``; used when terms depend on all
        earlier ones (prefix sums).  One of ``values``/``prefix_builder`` is
        required.
    length : int, optional
        Last valid index for finite (table-backed) weights.
    """

    def __init__(self, name: str, values=None, prefix_builder=None, *, params=None,
                 ratio_limit: Limit = None, primitive_ratio_limit: Limit = None,
                 length: int | None = None, derivative=None):
        if values is None and prefix_builder is None:
            raise ValueError("need an evaluator or a prefix builder")
        self.name = name
        self.params = dict(params or {})
        self._values = values
        self._prefix_builder = prefix_builder
        self.ratio_limit = ratio_limit
        self.primitive_ratio_limit = primitive_ratio_limit
        self.length = length
        # optional exact (derivative_values, derivative_ratio_limit, derivative_length)
        self.derivative = derivative
        self._cache = np.empty(0)

    def __repr__(self):
        p = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"Weight({self.name}{': ' + p if p else ''})"

    @property
    def label(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{p}" if p else self.name

    @property
    def has_closed_form(self) -> bool:
        return self.ratio_limit is not None

    def clip(self, K: int) -> int:
        """``K`` capped at the last valid index."""
        return K if self.length is None else min(K, self.length)

    def _check_range(self, n_max: int):
        if self.length is not None and n_max > self.length:
            raise IndexOutOfRange(f"{self.label} has only {self.length} terms, asked for {n_max}")

    @staticmethod
    def _check_positive(vals: np.ndarray, idx: np.ndarray):
        bad = ~(vals > 0)
        if bad.any():
            j = int(idx[np.argmax(bad)])
            raise NonpositiveTerm(f"weight term at index {j} is not positive", index=j)

    def prefix(self, n: int) -> np.ndarray:
        """Read-only array ``[s_1, ..., s_n]`` (cached, grows on demand)."""
        n = int(n)
        self._check_range(n)
        cache = self._cache
        if len(cache) < n:
            size = max(n, 2 * len(cache))
            if self.length is not None:
                size = min(size, self.length)
            if self._prefix_builder is not None:
                new = np.asarray(self._prefix_builder(size), dtype=float)
            else:
                new = np.asarray(self._values(np.arange(1, size + 1, dtype=np.int64)), dtype=float)
            self._check_positive(new, np.arange(1, size + 1))
            new.setflags(write=False)
            # whole-array swap: readers see either the old or the new cache
            self._cache = cache = new
        return cache[:n]

    def take(self, indices) -> np.ndarray:
        """Terms at the given (1-based) indices."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            return np.empty(idx.shape)
        if idx.min() < 1:
            raise IndexOutOfRange("weights are indexed from 1")
        top = int(idx.max())
        if self._values is not None and top > len(self._cache):
            self._check_range(top)
            vals = np.asarray(self._values(idx), dtype=float)
            self._check_positive(vals.ravel(), idx.ravel())
            return vals
        return self.prefix(top)[idx - 1]

    def __call__(self, n: int) -> float:
        return float(self.take(np.array([n]))[0])


# -- registry ---------------------------------------------------------------


def _power_primitive_limit(theta: float) -> Callable[[int], float]:
    # prefix sums of j^theta grow like n^(theta+1) when theta > -1, else log/bounded
    if theta > -1:
        return lambda m: float(m) ** (-(theta + 1.0))
    return lambda m: 1.0


def power(theta: float) -> Weight:
    """``s_n = n**theta``."""
    theta = float(theta)
    return Weight(
        "power",
        lambda n: np.asarray(n, dtype=float) ** theta,
        params={"theta": theta},
        ratio_limit=lambda n: float(n) ** (-theta),
        primitive_ratio_limit=_power_primitive_limit(theta),
        derivative=(_power_diff(theta), lambda n: float(n) ** (1.0 - theta), None),
    )


def _power_diff(theta: float):
    def values(n):
        n = np.asarray(n, dtype=float)
        # n^theta - (n-1)^theta without cancellation: n^theta * -expm1(theta*log1p(-1/n))
        out = -(n ** theta) * np.expm1(theta * np.log1p(-1.0 / np.maximum(n, 2.0)))
        return np.where(n == 1, 1.0, out)
    return values


def power_derivative(a: float) -> Weight:
    """``w_j = j**(-a)``."""
    a = float(a)
    w = power(-a)
    w.name = "powerderiv"
    w.params = {"a": a}
    return w


def harmonic() -> Weight:
    """``s_n = H_n = sum_{j<=n} 1/j``."""
    return Weight(
        "harmonic",
        lambda n: special.digamma(np.asarray(n, dtype=float) + 1.0) + np.euler_gamma,
        ratio_limit=lambda n: 1.0,
        # sum_{j<=n} H_j ~ n log n
        primitive_ratio_limit=lambda m: 1.0 / m,
        derivative=(lambda n: 1.0 / np.asarray(n, dtype=float), lambda n: float(n), None),
    )


def geometric() -> Weight:
    """``s_n = 2 - 2**(1-n)`` (bounded, increasing to 2)."""
    return Weight(
        "geometric",
        lambda n: 2.0 - np.exp2(1.0 - np.asarray(n, dtype=float)),
        ratio_limit=lambda n: 1.0,
        primitive_ratio_limit=lambda m: 1.0 / m,
        # 2^(1-j) leaves the double range past j = 1074
        derivative=(lambda n: np.exp2(1.0 - np.asarray(n, dtype=float)), None, 1074),
    )


def table(values, name: str = "table") -> Weight:
    """Finite weight backed by explicit values; never extrapolated."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("table weight needs a non-empty 1-d sequence")
    arr.setflags(write=False)
    return Weight(name, lambda n: arr[np.asarray(n) - 1], length=arr.size,
                  params={"length": int(arr.size)})


def from_function(func: Callable[[np.ndarray], np.ndarray], name: str = "custom",
                  ratio_limit: Limit = None) -> Weight:
    return Weight(name, func, ratio_limit=ratio_limit)


def discrete_derivative(s: Weight) -> Weight:
    """``w_n = s_n - s_{n-1}`` with ``s_0 = 0``.

    Raises :class:`NonpositiveTerm` on evaluation wherever ``s`` fails to be
    strictly increasing (plateaus included).
    """
    if s.derivative is not None:
        values, rl, length = s.derivative
        return Weight("derivative", values, params={"of": s.label}, ratio_limit=rl,
                      primitive_ratio_limit=s.ratio_limit, length=length)

    def values(n):
        n = np.asarray(n, dtype=np.int64)
        prev = np.where(n > 1, s.take(np.maximum(n - 1, 1)), 0.0)
        return s.take(n) - prev

    def prefix_builder(n):
        return np.diff(s.prefix(n), prepend=0.0)

    use_prefix = s._values is None
    return Weight(
        "derivative",
        None if use_prefix else values,
        prefix_builder if use_prefix else None,
        params={"of": s.label},
        primitive_ratio_limit=s.ratio_limit,
        length=s.length,
    )


def primitive(w: Weight) -> Weight:
    """``s_n = sum_{j<=n} w_j``.

    Closed-form limits carry over: the primitive's ``ratio_limit`` is the
    input's ``primitive_ratio_limit``.
    """
    return Weight(
        "primitive",
        prefix_builder=lambda n: np.cumsum(w.prefix(n)),
        params={"of": w.label},
        ratio_limit=w.primitive_ratio_limit,
        length=w.length,
    )


def inverse(w: Weight) -> Weight:
    """``(1 / w_j)``."""
    rl = w.ratio_limit
    return Weight(
        "inverse",
        (lambda n: 1.0 / w.take(n)) if w._values is not None else None,
        (lambda n: 1.0 / w.prefix(n)) if w._values is None else None,
        params={"of": w.label},
        ratio_limit=(lambda n: 1.0 / rl(n)) if rl is not None else None,
        length=w.length,
    )


def averaged(s: Weight) -> Weight:
    """``(s_n / n)``; the weight paired with ``s`` in the LRP/regularity lemma."""
    rl = s.ratio_limit
    if s._values is not None:
        vals = lambda n: s.take(n) / np.asarray(n, dtype=float)
        builder = None
    else:
        vals = None
        builder = lambda n: s.prefix(n) / np.arange(1, n + 1)
    return Weight("averaged", vals, builder, params={"of": s.label},
                  ratio_limit=(lambda n: n * rl(n)) if rl is not None else None,
                  length=s.length)


def registry() -> dict[str, Weight]:
    """Built-in families used by the verification suites."""
    return {
        "power:theta=0.25": power(0.25),
        "power:theta=0.5": power(0.5),
        "power:theta=0.75": power(0.75),
        "power:theta=1": power(1.0),
        "harmonic": harmonic(),
        "geometric": geometric(),
    }


# -- truncated-limit diagnostics ---------------------------------------------


@dataclass
class Trend:
    """Behaviour of a monotone running estimate over two doubling windows."""

    status: str  # stable | geometric | divergent | unclear
    value: float
    limit: float
    ratio: float


def doubling_trend(v_quarter: float, v_half: float, v_full: float, rtol: float = 1e-3,
                   q_conv: float = 0.9, q_div: float = 0.97) -> Trend:
    """Classify a running estimate sampled at ``K/4, K/2, K``.

    Successive increments that shrink geometrically (ratio ``<= q_conv``)
    are summed to an extrapolated limit; increments that do not shrink
    (ratio ``>= q_div``) mark sustained drift.
    """
    inc1 = v_half - v_quarter
    inc2 = v_full - v_half
    scale = max(abs(v_full), 1e-300)
    if abs(inc2) <= rtol * scale:
        return Trend("stable", v_full, v_full, 0.0)
    if inc1 == 0 or (inc1 > 0) != (inc2 > 0):
        return Trend("unclear", v_full, v_full, math.nan)
    q = inc2 / inc1
    if q <= q_conv:
        return Trend("geometric", v_full, v_full + inc2 * q / (1.0 - q), q)
    if q >= q_div:
        return Trend("divergent", v_full, math.copysign(math.inf, inc2), q)
    return Trend("unclear", v_full, v_full, q)


def _trend_details(t: Trend) -> dict:
    return {"status": t.status, "value": t.value, "extrapolated_limit": t.limit,
            "increment_ratio": t.ratio}


# -- criteria ---------------------------------------------------------------


def w_class_check(w: Weight, K: int = 10_000, eps: float = 1e-6,
                  decay_margin: float = 0.01) -> CriterionReport:
    """Truncated test of membership in the class of non-increasing weights
    with ``w_1 = 1`` tending to zero.

    The limit condition passes when ``w_K < eps`` or when ``w`` still drops
    by at least ``decay_margin`` (relatively) across the window ``K/2 -> K``.
    """
    K = w.clip(K)
    if K < 2:
        raise ValueError("K must be >= 2")
    vals = w.prefix(K)
    first_ok = abs(vals[0] - 1.0) <= 1e-12
    diffs = np.diff(vals)
    mono_ok = bool(np.all(diffs <= 1e-15 * vals[1:]))
    w_half = vals[K // 2 - 1]
    still_decaying = vals[-1] <= (1.0 - decay_margin) * w_half
    limit_ok = bool(vals[-1] < eps or still_decaying)
    verdict = HOLDS if (first_ok and mono_ok and limit_ok) else FAILS
    notes = ["limit condition tested heuristically on the truncation"]
    if not first_ok:
        notes.append(f"w_1 = {vals[0]!r} != 1")
    if not mono_ok:
        j = int(np.argmax(diffs > 1e-15 * vals[1:])) + 2
        notes.append(f"increase at index {j}")
    if not limit_ok:
        notes.append("w does not appear to tend to 0")
    return CriterionReport(
        "w_class", verdict, float(vals[-1]), TRUNCATED,
        truncation={"K": K}, tolerance={"eps": eps, "decay_margin": decay_margin},
        notes=notes,
        details={"w_1": float(vals[0]), "non_increasing": mono_ok, "w_K": float(vals[-1]),
                 "w_K_over_w_half": float(vals[-1] / w_half)},
    )


def _running_ratio(s: Weight, direction: str, K: int) -> np.ndarray:
    vals = s.prefix(K)
    if direction == "decreasing":
        return np.minimum.accumulate(np.minimum.accumulate(vals) / vals)
    if direction == "increasing":
        return np.maximum.accumulate(np.maximum.accumulate(vals) / vals)
    raise ValueError(f"direction must be 'decreasing' or 'increasing', got {direction!r}")


def essentially_monotone(s: Weight, direction: str = "decreasing", K: int = 10_000,
                         positivity: float = 1e-6, finiteness: float = 1e6,
                         rtol: float = 1e-3) -> CriterionReport:
    """``inf_{m<=n<=K} s_m/s_n`` (decreasing) or ``sup`` (increasing), in O(K)."""
    K = s.clip(K)
    if K < 2:
        raise ValueError("K must be >= 2")
    run = _running_ratio(s, direction, K)
    est = float(run[-1])
    trend = doubling_trend(float(run[max(K // 4, 1) - 1]), float(run[K // 2 - 1]), est, rtol=rtol)
    if direction == "decreasing":
        clears = lambda x: x > positivity
    else:
        clears = lambda x: x < finiteness
    if trend.status == "stable":
        verdict = HOLDS if clears(est) else FAILS
    elif trend.status in ("geometric", "divergent"):
        verdict = HOLDS if (clears(trend.limit) and clears(est)) else FAILS
    else:
        verdict = FAILS if not clears(est) else INCONCLUSIVE
    return CriterionReport(
        f"essentially_{direction}", verdict, est, TRUNCATED,
        truncation={"K": K}, tolerance={"rtol": rtol, "positivity": positivity,
                                        "finiteness": finiteness},
        details={"trend": _trend_details(trend)},
    )


def is_regular(w: Weight, K: int = 10_000, rtol: float = 1e-3) -> CriterionReport:
    """Running max of ``(1/(n w_n)) sum_{j<=n} w_j`` with a doubling-window trend."""
    K = w.clip(K)
    vals = w.prefix(K)
    n = np.arange(1, K + 1)
    ratios = np.cumsum(vals) / (n * vals)
    run = np.maximum.accumulate(ratios)
    est = float(run[-1])
    trend = doubling_trend(float(run[max(K // 4, 1) - 1]), float(run[K // 2 - 1]), est, rtol=rtol)
    if trend.status in ("stable", "geometric"):
        verdict = HOLDS
    elif trend.status == "divergent":
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    return CriterionReport(
        "regular", verdict, est, TRUNCATED, truncation={"K": K}, tolerance={"rtol": rtol},
        details={"trend": _trend_details(trend)},
    )


def has_lrp(s: Weight, r_max: int = 4, K: int = 10_000, margin: float = 1e-3,
            rtol: float = 1e-3) -> CriterionReport:
    """Lower regularity property ``s_{rn} >= C s_n`` with ``C > 1``.

    For each ``r`` the truncated constant ``c_r = min_{n<=K/r} s_{rn}/s_n`` is
    computed; closed-form families also contribute ``lim_n s_{rn}/s_n``.
    """
    K = s.clip(K)
    if r_max < 2 or K < r_max:
        raise ValueError("need r_max >= 2 and K >= r_max")
    per_r = {}
    witness = None
    for r in range(2, r_max + 1):
        N = K // r
        n = np.arange(1, N + 1)
        run = np.minimum.accumulate(s.take(r * n) / s.take(n))
        c_trunc = float(run[-1])
        if s.has_closed_form:
            c = min(c_trunc, 1.0 / s.ratio_limit(r))
            reliable = True
        else:
            trend = doubling_trend(float(run[max(N // 4, 1) - 1]), float(run[max(N // 2, 1) - 1]),
                                   c_trunc, rtol=rtol)
            c = c_trunc if trend.status == "stable" else min(c_trunc, trend.limit)
            reliable = trend.status != "unclear"
        per_r[r] = {"C": c, "truncated": c_trunc, "reliable": reliable}
        if c > 1.0 + margin and reliable and (witness is None or c > witness[1]):
            witness = (r, c)
    if witness is not None:
        verdict = HOLDS
    elif all(v["reliable"] for v in per_r.values()):
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    est = witness[1] if witness else max(v["C"] for v in per_r.values())
    return CriterionReport(
        "lrp", verdict, float(est), EXTRAPOLATED if s.has_closed_form else TRUNCATED,
        truncation={"K": K, "r_max": r_max}, tolerance={"margin": margin, "rtol": rtol},
        details={"witness": {"r": witness[0], "C": witness[1]} if witness else None,
                 "per_r": per_r},
    )


def s_criterion(s: Weight, n_max: int = 64, k_max: int = 100_000, band: float = 1e-3,
                rtol: float = 1e-3) -> CriterionReport:
    """Estimate ``S = inf_n sup_k s_k / s_{kn}``; verdict ``holds`` means ``S = 0``.

    ``sup_k s_k/s_{k n1 n2} <= sigma_{n1} sigma_{n2}``, so ``S = 0`` as soon
    as a single ``sigma_n`` is below 1, and otherwise every ``sigma_n`` equals
    1.  The verdict therefore compares ``min_n sigma_n`` with ``1 - band``.
    Truncated sups are lower bounds: without a closed-form limit a value
    near 1 is reported inconclusive, and a value below 1 must have
    stabilised in ``k`` before it counts.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    k = np.arange(1, k_max + 1)
    half = max(k_max // 2, 1)
    sk = s.take(k)
    sigmas, sig_trunc, stable = [], [], []
    for n in range(1, n_max + 1):
        ratios = sk / s.take(k * n)
        top = float(ratios.max())
        top_half = float(ratios[:half].max())
        sig_trunc.append(top)
        stable.append(top - top_half <= rtol * top)
        if s.has_closed_form:
            top = max(top, float(s.ratio_limit(n)))
        sigmas.append(top)
    sig = np.array(sigmas)
    n_star = int(np.argmin(sig)) + 1
    est = float(sig[n_star - 1])
    est_half = float(sig[: n_max // 2].min())
    notes = []
    if s.has_closed_form:
        method = EXTRAPOLATED
        verdict = HOLDS if est < 1.0 - band else FAILS
    else:
        method = TRUNCATED
        notes.append("no closed-form tail: truncated sups are lower bounds")
        if est < 1.0 - band and stable[n_star - 1]:
            verdict = HOLDS
        else:
            verdict = INCONCLUSIVE
            if est >= 1.0 - band:
                notes.append("fails downgraded to inconclusive")
    return CriterionReport(
        "s_criterion", verdict, est, method,
        truncation={"n_max": n_max, "k_max": k_max},
        tolerance={"band": band, "rtol": rtol},
        notes=notes,
        details={"sigma": sigmas, "sigma_truncated": sig_trunc, "argmin_n": n_star,
                 "decay_ratio": est / est_half if est_half > 0 else math.nan},
    )
