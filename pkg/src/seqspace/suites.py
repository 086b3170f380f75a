"""Randomized property batteries behind ``seqspace verify``.

Each suite draws its instances from a seeded generator, checks them against
an independent computation and returns a :class:`SuiteResult` holding the
pass/fail counts, the worst gap per check and up to ``MAX_FAILURES`` failing
instances serialized for replay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import l1probe as L
from . import marcinkiewicz as mz
from . import orlicz as oz
from . import weights as W
from .report import FAILS, HOLDS, jsonable
from .seqvec import BlockFamily, IndexSetSpec, SeqVec, interleave_map

MAX_FAILURES = 20


@dataclass
class SuiteResult:
    suite: str
    checks: int = 0
    failed: int = 0
    worst: dict = field(default_factory=dict)
    limits: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    scale: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, check: str, gap: float, limit: float, instance=None):
        """Count one assertion ``gap <= limit``."""
        self.checks += 1
        self.limits[check] = limit
        if not gap <= self.worst.get(check, -math.inf):
            self.worst[check] = gap
        if not gap <= limit:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append({"check": check, "gap": gap, "limit": limit,
                                      "instance": jsonable(instance)})

    def to_dict(self) -> dict:
        d = jsonable(self.__dict__)
        d["passed"] = self.passed
        return d


def _random_vector(rng, max_support: int, max_index: int = 50, scale: float = 10.0) -> SeqVec:
    size = int(rng.integers(1, max_support + 1))
    idx = rng.choice(np.arange(1, max_index + 1), size=size, replace=False)
    vals = rng.uniform(-scale, scale, size=size)
    vals[vals == 0] = 1.0
    return SeqVec.from_arrays(idx, vals)


def _random_family(rng, max_blocks: int, max_size: int) -> BlockFamily:
    members, start = [], 1
    for _ in range(int(rng.integers(1, max_blocks + 1))):
        size = int(rng.integers(1, max_size + 1))
        vals = rng.uniform(-3.0, 3.0, size=size)
        vals[vals == 0] = 1.0
        members.append(SeqVec.from_arrays(range(start, start + size), vals))
        start += size + int(rng.integers(0, 3))
    return BlockFamily(members)


# -- Marcinkiewicz side -------------------------------------------------------


def marnorm_oracle(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    n = scale.get("n", 500)
    res = SuiteResult("marnorm-oracle", scale={"n": n})
    ws = [W.power(0.25), W.power(0.5), W.power(0.75), W.harmonic(), W.geometric()]
    for i in range(n):
        f = _random_vector(rng, 8)
        s = ws[i % len(ws)]
        gap = abs(mz.m_norm(f, s) - mz.m_norm_bruteforce(f, s))
        res.record("rearrangement_vs_subsets", gap, tol or 1e-12, {"f": f, "s": s.label})
    return res


def block_identity(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    J, k_max, m_max = scale.get("J", 200), scale.get("kmax", 10_000), scale.get("m", 6)
    rtol = tol or 0.02
    res = SuiteResult("block-identity", scale={"J": J, "kmax": k_max, "m": m_max})
    for w in (W.power_derivative(1.0), W.power_derivative(0.5)):
        for m in range(1, m_max + 1):
            rep = mz.block_norm_identity_check(w, m, J, k_max, rtol=rtol)
            other = mz.block_norm_identity_check(w, m, J, k_max, rtol=rtol, scheme="diagonal")
            inst = {"w": w.label, "m": m, "lhs": rep.lhs, "rhs": rep.rhs}
            res.record("relative_gap", rep.relative_gap, 0.0 if m == 1 else rtol, inst)
            res.record("finite_identity", rep.finite_gap, 1e-12, inst)
            res.record("prefix_ratio_bound", rep.grid_bound_violation, 1e-12, inst)
            res.record("scheme_independence", abs(rep.lhs - other.lhs), 1e-12, inst)
    return res


def duality(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    n = scale.get("n", 10_000)
    res = SuiteResult("duality", scale={"n": n})
    for w in (W.power_derivative(1.0), W.power_derivative(0.5)):
        t = W.primitive(w)
        for _ in range(n // 2):
            f, g = _random_vector(rng, 10, 30), _random_vector(rng, 10, 30)
            lhs = abs(mz.duality_pairing(f, g))
            rhs = mz.lorentz_d1_norm(f, w) * mz.m_norm(g, t)
            res.record("holder", lhs / rhs - 1.0, 1e-12, {"f": f, "g": g, "w": w.label})
        for k in range(1, 51):
            g = SeqVec.from_values(w.prefix(k))
            f = SeqVec.from_values(np.ones(k))
            ratio = mz.duality_pairing(f, g) / (mz.lorentz_d1_norm(f, w) * mz.m_norm(g, t))
            res.record("near_attainment", 0.9 - ratio, 0.0, {"k": k, "w": w.label})
    # m_norm(f, t) <= dinf(f, 1/w) <= R m_norm(f, t) for regular w
    w = W.power_derivative(0.5)
    t, inv = W.primitive(w), W.inverse(w)
    R = W.is_regular(w).estimate
    ratios = []
    for _ in range(2000):
        f = _random_vector(rng, 40, 200)
        ratios.append(mz.lorentz_dinf_norm(f, inv) / mz.m_norm(f, t))
    ratios = np.array(ratios)
    res.record("quasi_norm_lower", 1.0 - ratios.min(), 1e-12, None)
    res.record("quasi_norm_upper", ratios.max() - R, 1e-12, {"R": R})
    c_half, c_full = ratios[:1000].max(), ratios.max()
    res.record("quasi_norm_stable", (c_full - c_half) / c_half, 0.05,
               {"C_half": c_half, "C_full": c_full})
    return res


# -- Orlicz side ------------------------------------------------------------


def luxemburg_root(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    n = scale.get("n", 500)
    res = SuiteResult("luxemburg-root", scale={"n": n})
    fns = {"power:p=1": (oz.power(1), 1.0), "power:p=1.5": (oz.power(1.5), 1.5),
           "power:p=2": (oz.power(2), 2.0), "power:p=4": (oz.power(4), 4.0),
           "blend:w=0.5": (oz.blend(0.5), None)}
    for i in range(n):
        f = _random_vector(rng, 10)
        for label, (M, p) in fns.items():
            r = oz.luxemburg_norm(M, f)
            res.record("root", abs(oz.modular(M, f / r) - 1.0), tol or 1e-9, {"f": f, "M": label})
            if p is not None:
                pn = float(np.sum(f.abs_array() ** p) ** (1.0 / p))
                res.record("p_norm", abs(r - pn), 1e-10, {"f": f, "M": label})
    Finf = oz.finf()
    for k in range(1, 11):
        r = oz.luxemburg_norm(Finf, SeqVec.from_values(np.ones(k)))
        res.record("finf_closed_form", abs(r - 2 * k / (k + 1)), 1e-10, {"k": k})
    return res


def musielak_identity(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    n = scale.get("n", 200)
    res = SuiteResult("musielak-identity", scale={"n": n})
    fns = [oz.power(2), oz.power(3), oz.blend(0.5)]
    for i in range(n):
        M = fns[i % len(fns)]
        fam = _random_family(rng, 6, 5)
        coeffs = SeqVec.from_values(rng.uniform(-5.0, 5.0, size=len(fam)))
        rep = oz.musielak_factorization_check(M, fam, coeffs)
        res.record("factorization", rep.gap, tol or 1e-9,
                   {"M": M.label, "family": fam, "coeffs": coeffs})
    return res


def indices(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    res = SuiteResult("indices")
    for p in (1.0, 1.5, 2.0, 4.0):
        ind = oz.indices_estimate(oz.power(p), t_floor=1e-8)
        res.record("alpha_power", abs(ind.alpha - p), tol or 0.05, {"p": p})
        res.record("beta_power", abs(ind.beta - p), tol or 0.05, {"p": p})
    ind = oz.indices_estimate(oz.expinv(), t_floor=1e-8)
    res.record("expinv_beta_infinite", 0.0 if ind.beta_infinite else 1.0, 0.0, ind.diagnostics)
    d2 = oz.delta2_at_zero(oz.expinv())
    res.record("expinv_delta2_fails", 0.0 if d2.fails else 1.0, 0.0, d2.to_dict())
    for label, M in oz.registry().items():
        if M.degenerate:
            continue
        ind = oz.indices_estimate(M)
        res.record("sandwich", max(1.0 - ind.alpha, ind.alpha - ind.beta, 0.0), 0.0, {"M": label})
    return res


def delta2_beta(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    res = SuiteResult("delta2-beta")
    for label, M in oz.registry().items():
        if M.degenerate:
            continue
        d2 = oz.delta2_at_zero(M)
        ind = oz.indices_estimate(M)
        agree = d2.holds == (not ind.beta_infinite) and d2.verdict != "inconclusive"
        res.record("delta2_iff_finite_beta", 0.0 if agree else 1.0, 0.0,
                   {"M": label, "delta2": d2.verdict, "beta": ind.beta})
    return res


# -- index maps and l1 profiles ----------------------------------------------


def greedy_oracle(blocks: list[list[int]], targets: list[IndexSetSpec]) -> list[int]:
    """Smallest increasing map with ``phi(B_n) ⊆ A_n`` by scanning integers one at a time."""
    owner = {k: n for n, b in enumerate(blocks) for k in b}
    phi, j = [], 0
    for k in range(1, len(owner) + 1):
        j += 1
        while j not in targets[owner[k]]:
            j += 1
        phi.append(j)
    return phi


def interleave(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    n = scale.get("n", 200)
    res = SuiteResult("interleave", scale={"n": n})
    for _ in range(n):
        nb = int(rng.integers(1, 5))
        K = int(rng.integers(nb, 31))
        labels = np.concatenate([np.arange(nb), rng.integers(0, nb, size=K - nb)])
        rng.shuffle(labels)
        blocks = [[k + 1 for k in range(K) if labels[k] == b] for b in range(nb)]
        q = nb + int(rng.integers(0, 4))
        residues = rng.choice(q, size=nb, replace=False)
        targets = [IndexSetSpec.progression(int(r) if r else q, q) for r in residues]
        phi = interleave_map([IndexSetSpec.explicit(b) for b in blocks], targets).values
        inst = {"blocks": blocks, "targets": [[t.start, t.step] for t in targets]}
        res.record("increasing", 0.0 if all(b > a for a, b in zip(phi, phi[1:])) else 1.0, 0.0, inst)
        inside = all(phi[k - 1] in targets[i] for i, b in enumerate(blocks) for k in b)
        res.record("targets", 0.0 if inside else 1.0, 0.0, inst)
        res.record("minimal", 0.0 if list(phi) == greedy_oracle(blocks, targets) else 1.0, 0.0, inst)
    return res


def l1_profiles(rng, scale: dict, tol: float | None = None) -> SuiteResult:
    J, m_max, probes = scale.get("J", 20_000), scale.get("m", 32), scale.get("probes", 2)
    rtol = tol or 0.10
    res = SuiteResult("l1-profiles", scale={"J": J, "m": m_max, "probes": probes})
    cases = [(None, W.power_derivative(1.0))] + [(th, W.power_derivative(th)) for th in (0.25, 0.5, 0.75)]
    for theta, w in cases:
        fam = mz.block_family(w, m_max, J)
        prof = L.l1_lower_profile(L.named_norm("marcinkiewicz", W.primitive(w)), fam, m_max,
                                  probes=probes, seed=int(rng.integers(2**31)))
        verdict = mz.lechner_verdict_marcinkiewicz(W.primitive(w)).verdict
        expected = {HOLDS: "decaying", FAILS: "bounded-below"}.get(verdict)
        inst = {"w": w.label, "trend": prof.trend, "lechner": verdict}
        res.record("trend_matches_verdict", 0.0 if prof.trend == expected else 1.0, 0.0, inst)
        res.record("ones_pattern_minimal", 0.0 if prof.all_ones_minimal else 1.0, 0.0, inst)
        if theta is not None:
            ref = [max(mz.b_km(w, 1, m), m ** (theta - 1.0)) for m in range(1, m_max + 1)]
            gap = max(abs(c / r - 1.0) for c, r in zip(prof.c_m, ref))
            res.record("power_reference", gap, rtol, inst)
    return res


SUITES: dict[str, Callable] = {
    "marnorm-oracle": marnorm_oracle,
    "block-identity": block_identity,
    "duality": duality,
    "luxemburg-root": luxemburg_root,
    "musielak-identity": musielak_identity,
    "indices": indices,
    "delta2-beta": delta2_beta,
    "interleave": interleave,
    "l1-profiles": l1_profiles,
}


def run(name: str, seed: int = 0, scale: dict | None = None, tol: float | None = None) -> list[SuiteResult]:
    """Run one suite (or ``all``); each suite gets its own child seed."""
    names = list(SUITES) if name == "all" else [name]
    seeds = np.random.SeedSequence(seed).spawn(len(SUITES))
    by_name = dict(zip(SUITES, seeds))
    return [SUITES[n](np.random.default_rng(by_name[n]), dict(scale or {}), tol) for n in names]
