"""Lower l1-constants of disjointly supported families.

A family behaves like the unit vector basis of l1 when
``||sum eps_n f_n|| >= c m`` uniformly; the profile ``c_m`` below measures
that constant for ``m = 1..m_max`` and classifies its trend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import orlicz as oz
from .errors import OverlappingSupports, UnknownNorm
from .report import FAILS, HOLDS, jsonable
from .seqvec import BlockFamily, SeqVec

NORM_KINDS = ("marcinkiewicz", "lorentz1", "lorentzinf", "orlicz", "musielak", "linf")


@dataclass(frozen=True)
class NamedNorm:
    """A norm on finitely supported vectors.

    ``on_arrays(indices, values)`` is the fast path used by the probes;
    rearrangement-invariant norms ignore ``indices``.
    """

    kind: str
    params: dict
    on_arrays: Callable[[np.ndarray, np.ndarray], float]
    rearrangement_invariant: bool = True

    def __call__(self, f: SeqVec) -> float:
        return self.on_arrays(np.asarray(f.indices, dtype=np.int64), f.values_array())

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, "params": self.params}


def _sorted_abs(vals: np.ndarray) -> np.ndarray:
    return np.sort(np.abs(vals))[::-1]


def named_norm(kind: str, param=None) -> NamedNorm:
    """Build a norm by name.

    ``marcinkiewicz``/``lorentz1``/``lorentzinf`` take a :class:`~seqspace.weights.Weight`,
    ``orlicz`` an :class:`~seqspace.orlicz.OrliczFunction`, ``musielak`` a
    :class:`~seqspace.orlicz.MusielakSequence`; ``linf`` takes nothing.
    """
    if kind == "marcinkiewicz":
        s = param

        def on_arrays(idx, vals):
            r = _sorted_abs(vals)
            return float(np.max(np.cumsum(r) / s.prefix(r.size))) if r.size else 0.0
        return NamedNorm(kind, {"weight": s.label}, on_arrays)
    if kind == "lorentz1":
        w = param
        return NamedNorm(kind, {"weight": w.label}, lambda idx, vals: (
            float(np.dot(_sorted_abs(vals), w.prefix(vals.size))) if vals.size else 0.0))
    if kind == "lorentzinf":
        w = param
        return NamedNorm(kind, {"weight": w.label}, lambda idx, vals: (
            float(np.max(_sorted_abs(vals) * w.prefix(vals.size))) if vals.size else 0.0))
    if kind == "orlicz":
        M = param
        return NamedNorm(kind, {"fn": M.label}, lambda idx, vals: oz.luxemburg_norm(
            M, SeqVec.from_arrays(idx, vals)))
    if kind == "musielak":
        seq = param
        return NamedNorm(kind, {"sequence": seq.to_json_obj()}, lambda idx, vals: oz.luxemburg_norm(
            seq, SeqVec.from_arrays(idx, vals)), rearrangement_invariant=False)
    if kind == "linf":
        return NamedNorm(kind, {}, lambda idx, vals: float(np.max(np.abs(vals))) if vals.size else 0.0)
    raise UnknownNorm(f"unknown norm {kind!r}; expected one of {NORM_KINDS}")


@dataclass
class L1Profile:
    c_m: list
    trend: str
    probe_count: int
    rule: dict = field(default_factory=dict)
    all_ones_minimal: bool = True
    sums: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = jsonable(self.__dict__)
        d["profile"] = [[m, c] for m, c in enumerate(d.pop("c_m"), 1)]
        return d


def profile_trend(c: list, decay_ratio: float = 0.5, floor_ratio: float = 0.9) -> str:
    """Classify a lower-constant profile.

    ``decaying`` when ``c_last / c_1 <= decay_ratio``; ``bounded-below`` when
    not decaying and the last doubling of ``m`` keeps ``c_last / c_{m/2} >=
    floor_ratio``; ``inconclusive`` otherwise.
    """
    if len(c) < 2:
        return "inconclusive"
    last, first, half = c[-1], c[0], c[len(c) // 2 - 1]
    if first > 0 and last / first <= decay_ratio:
        return "decaying"
    if half > 0 and last / half >= floor_ratio:
        return "bounded-below"
    return "inconclusive"


def l1_lower_profile(norm: NamedNorm, family: BlockFamily, m_max: int | None = None,
                     probes: int = 8, seed: int = 0, decay_ratio: float = 0.5,
                     floor_ratio: float = 0.9) -> L1Profile:
    """``c_m = min_eps ||sum_{n<=m} eps_n f_n|| / m`` over unit-normalized members.

    The minimum runs over ``probes`` random sign patterns and the all-ones
    pattern.
    """
    if m_max is None:
        m_max = len(family)
    if not 1 <= m_max <= len(family):
        raise ValueError(f"m_max must lie in [1, {len(family)}]")
    rng = np.random.default_rng(seed)
    idx = [np.asarray(f.indices, dtype=np.int64) for f in family.members[:m_max]]
    vals = []
    for i, f in zip(idx, family.members[:m_max]):
        v = f.values_array()
        vals.append(v / norm.on_arrays(i, v))
    patterns = [np.ones(m_max)] + [rng.choice([-1.0, 1.0], size=m_max) for _ in range(probes)]
    c, sums, ones_min = [], [], True
    for m in range(1, m_max + 1):
        cat_idx = np.concatenate(idx[:m])
        best = math.inf
        ones_val = None
        for eps in patterns:
            cat_val = np.concatenate([e * v for e, v in zip(eps[:m], vals[:m])])
            val = norm.on_arrays(cat_idx, cat_val)
            if ones_val is None:
                ones_val = val
            best = min(best, val)
        ones_min &= ones_val <= best * (1 + 1e-12)
        sums.append(ones_val)
        c.append(best / m)
    return L1Profile(c, profile_trend(c, decay_ratio, floor_ratio), probes + 1,
                     rule={"decay_ratio": decay_ratio, "floor_ratio": floor_ratio},
                     all_ones_minimal=bool(ones_min), sums=sums)


@dataclass
class LinfReport:
    lower: float
    upper: float
    samples: int
    max_exactness_error: float
    bounds_hold: bool
    verdict: str

    def to_dict(self) -> dict:
        return jsonable(self.__dict__)


def linf_disjoint_equivalence(family: BlockFamily, coeffs=None, samples: int = 100,
                              seed: int = 0) -> LinfReport:
    """Check ``c ||a||_inf <= ||sum a_n f_n||_inf <= C ||a||_inf`` and the exact max formula.

    ``c``/``C`` are the smallest/largest member sup-norms.  ``coeffs`` (a
    sequence of arrays) replaces the random samples when given.
    """
    sup = np.array([f.sup_norm() for f in family.members])
    c, C = float(sup.min()), float(sup.max())
    seen: set[int] = set()
    for f in family.members:
        if seen & set(f.indices):
            raise OverlappingSupports("family members overlap")
        seen |= set(f.indices)
    if coeffs is None:
        rng = np.random.default_rng(seed)
        coeffs = [rng.uniform(-10, 10, size=len(family)) for _ in range(samples)]
    worst, ok = 0.0, True
    for a in coeffs:
        a = np.asarray(a, dtype=float)
        total = 0.0
        for n, f in enumerate(family.members[:a.size]):
            if a[n] != 0:
                total = max(total, float(np.max(np.abs(a[n] * f.values_array()))))
        exact = float(np.max(np.abs(a) * sup[:a.size])) if a.size else 0.0
        amax = float(np.max(np.abs(a))) if a.size else 0.0
        worst = max(worst, abs(total - exact))
        ok &= c * amax <= total * (1 + 1e-12) + 1e-300 and total <= C * amax * (1 + 1e-12)
    verdict = HOLDS if ok and worst <= 1e-12 * max(1.0, C * 10) else FAILS
    return LinfReport(c, C, len(coeffs), worst, bool(ok), verdict)


@dataclass
class PStarReport:
    n: int
    k_average: float
    k_combined: float
    bound_ratio: float
    inequality_holds: bool
    linear_growth: str
    growth_ratio: float
    prefix_norms: list

    def to_dict(self) -> dict:
        return jsonable(self.__dict__)


def p_star_inequality_check(norm: NamedNorm, n: int, basis_prefix_norms=None,
                            samples: int = 200, seed: int = 0, eps: float = 1e-9,
                            growth_floor: float = 0.99) -> PStarReport:
    """Averaging bound for vectors supported on ``1..n``.

    Checks ``|sum f_j| <= (1 + eps) (n / ||1_n||) ||f||``, which follows from
    ``|mean f| ||1_n|| <= ||f||`` for rearrangement-invariant norms.  Reports
    ``k_average = max |mean f| ||1_n|| / ||f||`` (at most 1),
    ``k_combined = max |sum f| / ||f||`` and whether ``||1_n|| / n`` holds
    up over the last doubling of ``n`` (the linear-growth hypothesis).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if basis_prefix_norms is None:
        basis_prefix_norms = [norm(SeqVec({j: 1.0 for j in range(1, k + 1)})) for k in range(1, n + 1)]
    pn = np.asarray(basis_prefix_norms, dtype=float)
    if pn.size < n:
        raise ValueError(f"need {n} prefix norms, got {pn.size}")
    ones_n = float(pn[n - 1])
    rng = np.random.default_rng(seed)
    idx = np.arange(1, n + 1)
    k_avg = k_comb = bound = 0.0
    for i in range(samples):
        v = rng.uniform(-1.0, 1.0, size=n)
        if i % 2:
            v = np.abs(v)
        nf = norm.on_arrays(idx, v)
        total = abs(float(v.sum()))
        k_avg = max(k_avg, total / n * ones_n / nf)
        k_comb = max(k_comb, total / nf)
        bound = max(bound, total / (n / ones_n * nf))
    growth = (pn[n - 1] / n) / (pn[n // 2 - 1] / (n // 2))
    return PStarReport(
        n=n, k_average=k_avg, k_combined=k_comb, bound_ratio=bound,
        inequality_holds=bool(bound <= 1 + eps),
        linear_growth=HOLDS if growth >= growth_floor else FAILS,
        growth_ratio=float(growth), prefix_norms=pn[:n].tolist())
