"""Orlicz functions, modulars, Luxemburg norms and index estimates.

An :class:`OrliczFunction` wraps a vectorized evaluator ``M: [0, inf) -> [0, inf)``
together with a log-evaluator; the latter lets rapidly vanishing members
(``expinv``) be handled near zero without underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from .errors import DegenerateFunction, HypothesisViolated, InvalidOrliczFunction
from .report import FAILS, HOLDS, INCONCLUSIVE, TRUNCATED, CriterionReport, jsonable
from .seqvec import BlockFamily, SeqVec, disjoint_sum

NORMALIZED_TOL = 1e-12
CONVEXITY_TOL = 1e-10
MEMBER_TOL = 1e-9

_PROBE_UNIFORM = np.linspace(0.0, 2.0, 401)
_PROBE_GEOM = np.geomspace(1e-8, 2.0, 200)


def _default_log(func):
    def log_func(t):
        with np.errstate(divide="ignore"):
            return np.log(func(t))
    return log_func


class OrliczFunction:
    """Convex nondecreasing ``M`` with ``M(0) = 0``.

    ``degenerate`` marks functions vanishing on some ``[0, a]``, ``a > 0``;
    ``vanishing_point`` is that ``a``.  ``increasing_from`` is the left end of
    the interval on which ``M`` is strictly increasing.  Construction checks
    monotonicity and midpoint convexity on a probe grid.
    """

    def __init__(self, name: str, func: Callable, *, log_func: Callable | None = None,
                 params: dict | None = None, degenerate: bool = False,
                 vanishing_point: float = 0.0, increasing_from: float | None = 0.0,
                 validate: bool = True):
        self.name = name
        self.params = dict(params or {})
        self._func = func
        self._log = log_func or _default_log(func)
        self.degenerate = degenerate
        self.vanishing_point = vanishing_point
        self.increasing_from = increasing_from
        if validate:
            self._validate()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._func(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    def log(self, t):
        """``log M(t)`` (``-inf`` where ``M`` vanishes)."""
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._log(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"OrliczFunction({self.label})"

    @property
    def label(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{p}" if p else self.name

    @property
    def normalized(self) -> bool:
        return abs(self(1.0) - 1.0) <= NORMALIZED_TOL

    @property
    def strictly_increasing(self) -> bool:
        return self.increasing_from == 0.0

    def _validate(self):
        if abs(self(0.0)) > CONVEXITY_TOL:
            raise InvalidOrliczFunction(f"{self.label}: M(0) = {self(0.0)} != 0")
        for grid in (_PROBE_UNIFORM, _PROBE_GEOM):
            vals = self(grid)
            if np.any(vals < 0):
                raise InvalidOrliczFunction(f"{self.label}: negative values")
            fin = np.isfinite(vals)
            both = fin[1:] & fin[:-1]
            inc = vals[1:][both] - vals[:-1][both]
            if np.any(inc < -CONVEXITY_TOL):
                raise InvalidOrliczFunction(f"{self.label}: not nondecreasing on the probe grid")
            lo, hi = grid[:-2], grid[2:]
            mid = self((lo + hi) / 2)
            ends = (vals[:-2] + vals[2:]) / 2
            ok = np.isfinite(ends)
            if np.any(mid[ok] > ends[ok] + CONVEXITY_TOL * np.maximum(1.0, ends[ok])):
                raise InvalidOrliczFunction(f"{self.label}: not convex on the probe grid")

    def to_json_obj(self) -> dict:
        return {"label": self.label, "normalized": self.normalized,
                "degenerate": self.degenerate}


# -- registry -----------------------------------------------------------------


def power(p: float) -> OrliczFunction:
    """``F_p(t) = t^p``."""
    p = float(p)
    if not p >= 1 or math.isinf(p):
        raise InvalidOrliczFunction(f"power exponent must be finite and >= 1, got {p}")

    def log_func(t):
        with np.errstate(divide="ignore"):
            return p * np.log(t)

    return OrliczFunction("power", lambda t: np.power(t, p), log_func=log_func,
                          params={"p": p})


def finf() -> OrliczFunction:
    """The degenerate function ``0`` on ``[0, 1/2]`` and ``2t - 1`` beyond."""
    return OrliczFunction("finf", lambda t: np.maximum(0.0, 2.0 * t - 1.0),
                          degenerate=True, vanishing_point=0.5, increasing_from=0.5)


def expinv() -> OrliczFunction:
    """Non-Delta_2 member: ``e^(1 - 1/t)`` up to ``1/2``, then its tangent line; rescaled so ``M(1) = 1``."""
    scale = math.e / 3.0

    def func(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            left = scale * np.exp(1.0 - 1.0 / np.where(t > 0, t, 1.0))
        left = np.where(t > 0, left, 0.0)
        return np.where(t <= 0.5, left, (4.0 * t - 1.0) / 3.0)

    def log_func(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            left = math.log(scale) + 1.0 - 1.0 / t
            right = np.log((4.0 * t - 1.0) / 3.0)
        return np.where(t <= 0, -np.inf, np.where(t <= 0.5, left, right))

    return OrliczFunction("expinv", func, log_func=log_func)


def blend(w: float = 0.5) -> OrliczFunction:
    """``(1 - w) t + w t^2``: convex combination of ``F_1`` and ``F_2``."""
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise InvalidOrliczFunction(f"blend weight must lie in [0, 1], got {w}")

    def log_func(t):
        with np.errstate(divide="ignore"):
            return np.log(t) + np.log1p(w * (t - 1.0))

    return OrliczFunction("blend", lambda t: (1.0 - w) * t + w * t * t, log_func=log_func,
                          params={"w": w})


def table(ts: Sequence[float], values: Sequence[float], name: str = "table") -> OrliczFunction:
    """Piecewise-linear interpolation of ``(t, M(t))`` pairs, extended linearly.

    ``(0, 0)`` is prepended when missing.  Slopes must be nondecreasing.
    """
    t = np.asarray(ts, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape or t.size < 1:
        raise InvalidOrliczFunction("table needs matching 1-d arrays of t and M(t)")
    if t[0] != 0.0:
        t, v = np.concatenate(([0.0], t)), np.concatenate(([0.0], v))
    if v[0] != 0.0:
        raise InvalidOrliczFunction("table must have M(0) = 0")
    if np.any(np.diff(t) <= 0):
        raise InvalidOrliczFunction("table abscissae must be strictly increasing")
    slopes = np.diff(v) / np.diff(t)
    if np.any(slopes < 0) or np.any(np.diff(slopes) < -CONVEXITY_TOL):
        raise InvalidOrliczFunction("table is not nondecreasing and convex")
    last = slopes[-1]

    def func(x):
        x = np.asarray(x, dtype=float)
        inside = np.interp(x, t, v)
        return np.where(x > t[-1], v[-1] + last * (x - t[-1]), inside)

    zeros = np.flatnonzero(v == 0.0)
    vanish = float(t[zeros[-1]])
    return OrliczFunction(name, func, params={"points": int(t.size)}, degenerate=vanish > 0,
                          vanishing_point=vanish, increasing_from=vanish)


def registry() -> dict[str, OrliczFunction]:
    """Members used by the verification suites."""
    return {
        "power:p=1": power(1),
        "power:p=1.5": power(1.5),
        "power:p=2": power(2),
        "power:p=4": power(4),
        "finf": finf(),
        "expinv": expinv(),
        "blend:w=0.5": blend(0.5),
    }


# -- Musielak sequences -----------------------------------------------------


class MusielakSequence:
    """``(M_n)_{n>=1}`` from a finite list (cycled) or a rule ``n -> M_n``.

    List members are checked for normalization on construction; rule members
    when first used.
    """

    def __init__(self, functions: Sequence[OrliczFunction] = (), rule: Callable | None = None):
        if not functions and rule is None:
            raise ValueError("need member functions or a rule")
        self.functions = tuple(functions)
        self.rule = rule
        self._cache: dict[int, OrliczFunction] = {}
        for n, M in enumerate(self.functions, 1):
            self._check(M, n)

    @classmethod
    def constant(cls, M: OrliczFunction) -> "MusielakSequence":
        return cls([M])

    @staticmethod
    def _check(M: OrliczFunction, n: int):
        if abs(M(1.0) - 1.0) > MEMBER_TOL:
            raise InvalidOrliczFunction(f"member {n} ({M.label}) is not normalized: M(1) = {M(1.0)}")

    def member(self, n: int) -> OrliczFunction:
        if self.rule is None:
            return self.functions[(n - 1) % len(self.functions)]
        if n not in self._cache:
            M = self.rule(n)
            self._check(M, n)
            self._cache[n] = M
        return self._cache[n]

    def to_json_obj(self) -> dict:
        if self.rule is None:
            return {"functions": [M.label for M in self.functions], "cycled": True}
        return {"rule": getattr(self.rule, "__name__", "rule")}


def _as_sequence(M) -> MusielakSequence:
    return M if isinstance(M, MusielakSequence) else MusielakSequence.constant(M)


def _grouped(seq: MusielakSequence, idx: np.ndarray) -> list[tuple[OrliczFunction, np.ndarray]]:
    """Group coordinate positions by the member function acting on them."""
    if seq.rule is None and len(seq.functions) == 1:
        return [(seq.functions[0], np.arange(idx.size))]
    groups: dict[int, tuple[OrliczFunction, list[int]]] = {}
    for pos, n in enumerate(idx):
        M = seq.member(int(n))
        groups.setdefault(id(M), (M, []))[1].append(pos)
    return [(M, np.asarray(p)) for M, p in groups.values()]


def _modular_arrays(groups, a: np.ndarray) -> float:
    return float(sum(np.sum(M(a[p])) for M, p in groups))


def modular(M, f: SeqVec) -> float:
    """``sum_j M_j(|f_j|)``; ``M`` is a :class:`MusielakSequence` or a single function."""
    if len(f) == 0:
        return 0.0
    seq = _as_sequence(M)
    idx = np.asarray(f.indices)
    return _modular_arrays(_grouped(seq, idx), f.abs_array())


def luxemburg_norm(M, f: SeqVec, rtol: float = 1e-13) -> float:
    """``inf{t > 0 : modular(f / t) <= 1}`` by bisection.

    For normalized convex members the root lies in ``[max|f_j|, sum|f_j|]``;
    the upper end is doubled if rounding pushes the modular above 1 there.
    """
    if len(f) == 0:
        return 0.0
    seq = _as_sequence(M)
    a = f.abs_array()
    groups = _grouped(seq, np.asarray(f.indices))

    def fits(t):
        return _modular_arrays(groups, a / t) <= 1.0

    lo, hi = float(a.max()), float(a.sum())
    for _ in range(64):
        if fits(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        return math.inf
    if fits(lo):
        # modular already <= 1 at the lower end; shrink until it is not
        while lo > 0 and fits(lo):
            hi, lo = lo, lo / 2.0
        if lo == 0:
            return 0.0
    for _ in range(200):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if fits(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- dilations and induced functions -----------------------------------------


def normalized_dilation(M: OrliczFunction, b: float) -> OrliczFunction:
    """``M_b(t) = M(bt) / M(b)`` for ``0 < b <= 1``."""
    b = float(b)
    if not 0.0 < b <= 1.0:
        raise ValueError(f"dilation parameter must lie in (0, 1], got {b}")
    if b == 1.0 or M.name == "power":
        return M
    Mb = M(b)
    if not Mb > 0:
        raise DegenerateFunction(f"{M.label} vanishes at b = {b}", hypothesis="non-degenerate at b")
    logMb = M.log(b)
    return OrliczFunction(
        "dilation", lambda t: M(b * np.asarray(t)) / Mb,
        log_func=lambda t: M.log(b * np.asarray(t)) - logMb,
        params={"of": M.label, "b": b}, degenerate=M.degenerate,
        vanishing_point=M.vanishing_point / b,
        increasing_from=None if M.increasing_from is None else M.increasing_from / b,
        validate=False,
    )


def _require_nondegenerate(M: OrliczFunction):
    if M.degenerate:
        raise DegenerateFunction(f"{M.label} is degenerate (vanishes on [0, {M.vanishing_point}])")


def m_f(M: OrliczFunction, f: SeqVec) -> OrliczFunction:
    """``M_f(s) = sum_j M(|f_j| s)``."""
    _require_nondegenerate(M)
    if len(f) == 0:
        raise ValueError("M_f needs a nonzero vector")
    b = f.abs_array()

    def func(s):
        s = np.asarray(s, dtype=float)
        return np.sum(M(np.multiply.outer(s, b)), axis=-1)

    def log_func(s):
        s = np.asarray(s, dtype=float)
        return special.logsumexp(M.log(np.multiply.outer(s, b)), axis=-1)

    return OrliczFunction("induced", func, log_func=log_func,
                          params={"of": M.label, "support": len(f)})


def m_f_decomposition(M: OrliczFunction, f: SeqVec) -> tuple[np.ndarray, list[OrliczFunction]]:
    """Weights ``lambda_j = M(|f_j|)`` and dilations ``M_{|f_j|}`` with ``M_f = sum lambda_j M_{|f_j|}``.

    Needs ``0 < |f_j| <= 1``, which holds for unit-norm vectors.
    """
    _require_nondegenerate(M)
    b = f.abs_array()
    if np.any(b > 1.0):
        raise ValueError("entries must not exceed 1 (normalize the vector first)")
    lam = np.asarray(M(b), dtype=float)
    return lam, [normalized_dilation(M, float(x)) for x in b]


# -- indices and the Delta_2 condition -----------------------------------------


@dataclass
class IndicesEstimate:
    alpha: float
    beta: float
    beta_infinite: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return jsonable(self.__dict__)


def _require_normalized(M: OrliczFunction):
    if abs(M(1.0) - 1.0) > MEMBER_TOL:
        raise HypothesisViolated(f"{M.label} is not normalized", hypothesis="normalized")


def _q_extremes(M: OrliczFunction, b: np.ndarray, t: np.ndarray) -> tuple[float, float, dict]:
    logMb = M.log(b)
    q = (M.log(np.multiply.outer(t, b)) - logMb[None, :]) / np.log(t)[:, None]
    i_min = np.unravel_index(np.argmin(q), q.shape)
    i_max = np.unravel_index(np.argmax(q), q.shape)
    where = {"alpha_at": {"t": float(t[i_min[0]]), "b": float(b[i_min[1]])},
             "beta_at": {"t": float(t[i_max[0]]), "b": float(b[i_max[1]])}}
    return float(q[i_min]), float(q[i_max]), where


def indices_estimate(M: OrliczFunction, b_grid=None, t_grid=None, t_floor: float = 1e-8,
                     t_cut: float = 1e-2, growth_tol: float = 0.1) -> IndicesEstimate:
    """Estimate the lower/upper indices from ``q(b, t) = log M_b(t) / log t``.

    ``alpha`` is the min and ``beta`` the max of ``q`` over ``b`` in the grid
    and ``t_floor <= t <= t_cut``.  The grid is then extended to
    ``t_floor / 2``; a relative rise of ``beta`` above ``growth_tol`` flags it
    as infinite.
    """
    _require_nondegenerate(M)
    _require_normalized(M)
    b = np.geomspace(1e-6, 1.0, 61) if b_grid is None else np.asarray(b_grid, dtype=float)
    t = np.geomspace(t_floor, t_cut, 81) if t_grid is None else np.asarray(t_grid, dtype=float)
    t = t[(t < 1.0) & (t >= t_floor) & (t <= t_cut)]
    if t.size == 0 or b.size == 0 or np.any((b <= 0) | (b > 1)):
        raise ValueError("need nonempty grids with 0 < b <= 1 and t_floor <= t <= t_cut < 1")
    alpha, beta, where = _q_extremes(M, b, t)
    t_ext = np.concatenate(([t_floor / 2.0], t))
    alpha_h, beta_h, _ = _q_extremes(M, b, t_ext)
    rise = (beta_h - beta) / beta
    flagged = rise > growth_tol
    alpha_c, beta_c = max(1.0, alpha), max(1.0, beta)
    diagnostics = {
        "t_floor": t_floor, "t_cut": t_cut, "grid": {"b": int(b.size), "t": int(t.size)},
        "alpha_raw": alpha, "beta_raw": beta,
        "alpha_half_floor": max(1.0, alpha_h), "beta_half_floor": max(1.0, beta_h),
        "alpha_shift": abs(max(1.0, alpha_h) - alpha_c), "beta_relative_rise": rise,
        **where,
    }
    return IndicesEstimate(alpha_c, math.inf if flagged else max(alpha_c, beta_c), bool(flagged),
                           diagnostics)


def delta2_at_zero(M: OrliczFunction, t_samples=None, factor: float = 10.0,
                   rtol: float = 1e-3) -> CriterionReport:
    """Running max of ``M(2t) / M(t)`` for ``t <= 1/2`` along a decreasing grid.

    The grid is cut into decades.  ``holds`` when the last decade adds no
    more than ``rtol`` to the running max, ``fails`` when the decade maxima
    grow monotonically by more than ``factor`` overall.
    """
    t = np.geomspace(0.5, 1e-8, 8 * 8 + 1) if t_samples is None else np.asarray(t_samples, float)
    t = np.sort(t[(t > 0) & (t <= 0.5)])[::-1]
    if t.size < 2:
        raise ValueError("need at least two samples in (0, 1/2]")
    trunc = {"t_min": float(t[-1]), "samples": int(t.size)}
    if M.degenerate:
        return CriterionReport(
            "delta2_at_zero", FAILS, math.inf, TRUNCATED, truncation=trunc,
            notes=["degenerate function: M(2t)/M(t) is 0/0 below the vanishing point"],
            details={"hypothesis_failed": "non-degenerate"})
    log_ratio = M.log(2.0 * t) - M.log(t)
    run = np.maximum.accumulate(log_ratio)
    decade = np.floor(np.log10(t[0] / t) + 1e-12).astype(int)
    decade_max = [float(log_ratio[decade == d].max()) for d in np.unique(decade)]
    growing = all(b > a for a, b in zip(decade_max, decade_max[1:]))
    total_rise = decade_max[-1] - decade_max[0]
    last = decade == decade.max()
    before = float(run[~last][-1]) if (~last).any() else float(run[0])
    settled = float(run[-1]) - before <= math.log1p(rtol)
    if settled:
        verdict = HOLDS
    elif growing and total_rise > math.log(factor):
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    est = float(np.exp(run[-1])) if run[-1] < 700 else math.inf
    return CriterionReport(
        "delta2_at_zero", verdict, est, TRUNCATED, truncation=trunc,
        tolerance={"factor": factor, "rtol": rtol},
        details={"log_ratio_decade_max": decade_max, "log_running_max": float(run[-1])})


# -- complementary function ---------------------------------------------------


def complementary(M: OrliczFunction, s_grid=None) -> OrliczFunction:
    """``M*(t) = sup_{s >= 0} (s t - M(s))`` by grid search plus bounded refinement.

    ``inf`` is returned where the maximizer runs off the end of ``s_grid``.
    """
    s = np.linspace(0.0, 50.0, 5001) if s_grid is None else np.unique(np.asarray(s_grid, float))
    if s[0] != 0.0:
        s = np.concatenate(([0.0], s[s > 0]))
    Ms = M(s)

    def one(t: float) -> float:
        obj = s * t - Ms
        i = int(np.argmax(obj))
        if i == s.size - 1 and obj[-1] > obj[-2]:
            return math.inf
        lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]
        best = float(obj[i])
        if hi > lo:
            res = optimize.minimize_scalar(lambda x: M(x) - x * t, bounds=(lo, hi),
                                           method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
        return max(best, 0.0)

    def func(t):
        t = np.asarray(t, dtype=float)
        flat = np.array([one(float(x)) for x in t.ravel()])
        return flat.reshape(t.shape)

    probe = func(np.array([1e-3, 1e-2]))
    return OrliczFunction("legendre", func, params={"of": M.label},
                          degenerate=bool(probe[0] == 0.0),
                          increasing_from=None)


# -- verdicts and diagnostics ---------------------------------------------------


def lechner_verdict_orlicz(M: OrliczFunction, margin: float = 1e-3, stab_tol: float = 1e-2,
                           **index_kwargs) -> CriterionReport:
    """Lechner's condition for ``l_M`` holds iff the lower index exceeds 1."""
    _require_nondegenerate(M)
    _require_normalized(M)
    ind = indices_estimate(M, **index_kwargs)
    stable = ind.diagnostics["alpha_shift"] <= stab_tol
    if ind.alpha > 1.0 + margin:
        verdict = HOLDS if stable else INCONCLUSIVE
    else:
        verdict = FAILS if stable else INCONCLUSIVE
    return CriterionReport(
        "lechner_orlicz", verdict, ind.alpha, TRUNCATED,
        truncation={"t_floor": ind.diagnostics["t_floor"], "t_cut": ind.diagnostics["t_cut"]},
        tolerance={"margin": margin, "stab_tol": stab_tol},
        details={"indices": ind.to_dict()})


@dataclass
class FactorizationReport:
    lhs: float
    rhs: float
    gap: float
    verdict: str
    tolerance: float
    member_norms: list

    def to_dict(self) -> dict:
        return jsonable(self.__dict__)


def musielak_factorization_check(M: OrliczFunction, family: BlockFamily, coeffs: SeqVec,
                                 tol: float = 1e-9) -> FactorizationReport:
    """Compare ``||sum a_n f_n||_M`` with the Musielak norm of ``(a_n)`` under ``N_n = M_{f_n}``.

    Members are first scaled to unit norm and the coefficients rescaled to
    compensate, so every ``N_n`` is normalized.
    """
    _require_nondegenerate(M)
    lhs = luxemburg_norm(M, disjoint_sum(family, coeffs))
    norms = [luxemburg_norm(M, f) for f in family.members]
    induced = [m_f(M, f / r) for f, r in zip(family.members, norms)]
    scaled = SeqVec({n: coeffs[n] * norms[n - 1] for n in range(1, len(family) + 1)})
    rhs = luxemburg_norm(MusielakSequence(induced), scaled)
    gap = abs(lhs - rhs)
    return FactorizationReport(lhs, rhs, gap, HOLDS if gap <= tol else FAILS, tol, norms)


@dataclass
class EquivalenceReport:
    best_b: float
    lower: float
    upper: float
    spread: float
    coarse_spread: float
    verdict: str
    per_b: list

    def to_dict(self) -> dict:
        return jsonable(self.__dict__)


def equivalence_near_zero_diagnostic(M: OrliczFunction, N: OrliczFunction, b_grid=None,
                                     t_grid=None, a: float = 0.5,
                                     growth: float = 2.0) -> EquivalenceReport:
    """Scan ``b`` for two-sided bounds ``lower <= M(t) / N(bt) <= upper`` on ``(0, a]``.

    The best ``b`` minimizes ``upper / lower`` (ties broken towards constants
    near 1).  ``inconsistent-on-grid`` when the spread over the whole grid
    exceeds ``growth`` times the spread over its coarser upper half.
    """
    _require_nondegenerate(M)
    _require_nondegenerate(N)
    bs = 2.0 ** np.arange(-8.0, 8.25, 0.25) if b_grid is None else np.asarray(b_grid, float)
    t = np.geomspace(1e-8, a, 81) if t_grid is None else np.asarray(t_grid, float)
    t = np.sort(t[(t > 0) & (t <= a)])
    upper_half = t >= np.sqrt(t[0] * t[-1])
    rows = []
    for b in bs:
        lr = M.log(t) - N.log(b * t)
        rows.append((float(b), float(lr.min()), float(lr.max()),
                     float(lr[upper_half].max() - lr[upper_half].min())))

    def key(row):
        _, lo, hi, _ = row
        return (round(hi - lo, 9), abs(lo) + abs(hi))

    b_best, lo, hi, coarse = min(rows, key=key)
    spread = hi - lo
    consistent = spread <= math.log(growth) + coarse or spread <= 1e-9
    return EquivalenceReport(
        best_b=b_best, lower=math.exp(lo), upper=math.exp(hi), spread=math.exp(spread),
        coarse_spread=math.exp(coarse),
        verdict="consistent-with-equivalence" if consistent else "inconsistent-on-grid",
        per_b=[{"b": r[0], "lower": math.exp(r[1]), "upper": math.exp(r[2])} for r in rows])


def h_m_membership(M: OrliczFunction, f: SeqVec) -> bool:
    """Finite modular at every dilation ``s f``.

    Always true for finitely supported ``f`` and finite-valued ``M``; the
    check probes ``s = 2^k``, ``k <= 20``.
    """
    if len(f) == 0:
        return True
    return all(math.isfinite(modular(M, f * 2.0 ** k)) for k in range(21))
