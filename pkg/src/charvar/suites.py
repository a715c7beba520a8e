"""Property suites run by ``charvar verify``."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import mat2
from .errors import UnknownSuite
from .explorer import (
    CHART_VARIABLES,
    GlueSpec,
    case1_glue,
    case2_glue,
    character_eval,
    chart_dimension,
    chart_from_rep,
    chain_corank,
    glue_theorem_pipeline,
    sample_chart,
    sample_t,
    standard_words,
)
from .knots import LONGITUDE, build_rep, builtin_diagram, lemma41_residual, longitude_eval, validate_rep
from .tangles import eq34_check, rep_at, rep_propagate, twist
from .trace_lab import (
    ChainSpec,
    canonical_pair,
    chain_sample,
    complete_triple,
    f_t_eval,
    in_B,
    sample_Ctr,
    sample_generic_t,
    solve_f_t,
)

TOLERANCES = {
    "lemma21": 1e-10,
    "lemma22": 1e-9,
    "lemma23": 1e-8,
    "lemma31": 1e-9,
    "lemma41": 1e-9,
    "eqs12": 1e-9,
    "fricke": 1e-8,
    "longitude": 1e-8,
    "charts": 1e-9,
    "glue": 1e-7,
}

SUITES = tuple(TOLERANCES)


@dataclass
class ReportRecord:
    suite: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool
    wall_time: float

    def as_dict(self) -> dict:
        return asdict(self)


def _random_c(rng) -> complex:
    return complex(rng.uniform(-2, 2), rng.uniform(-2, 2))


def _generic_pair_trace(rng, t) -> complex:
    while True:
        r = _random_c(rng)
        if in_B(t, r, 1e-2):
            return r


def suite_lemma21(rng, scale: float = 1.0) -> tuple[int, float]:
    """Centralizer elements commute with a and miss b for non-commuting (a, b)."""
    n = max(1, int(500 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_generic_t(rng)
        a, b = mat2.random_in_G(t, rng), mat2.random_in_G(t, rng)
        mu = _random_c(rng)
        c = mat2.centralizer_element(a, t, mu, 1 if rng.random() < 0.5 else -1)
        worst = max(worst, mat2.norm_inf(c @ a - a @ c), abs(mat2.det(c) - 1))
        if not mat2.is_commuting(a, b, 1e-6) and mat2.is_commuting(c, b, 1e-10):
            worst = np.inf
    return n, worst


def suite_lemma22(rng, scale: float = 1.0) -> tuple[int, float]:
    """Points of C_t^r(a) have trace t and tr(ax) = r."""
    n = max(1, int(500 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_generic_t(rng)
        a = mat2.random_in_G(t, rng)
        r = _generic_pair_trace(rng, t)
        x = sample_Ctr(a, t, r, np.exp(_random_c(rng) / 2))
        scale_ = max(1.0, mat2.norm_inf(x))
        worst = max(worst, abs(mat2.tr(x) - t) / scale_, abs(mat2.tr(a @ x) - r) / scale_, abs(mat2.det(x) - 1) / scale_**2)
    return n, worst


def suite_lemma23(rng, scale: float = 1.0) -> tuple[int, float]:
    """complete_triple recovers a3 from the traces of a random triple."""
    n = max(1, int(500 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_generic_t(rng)
        a1, a2, a3 = (mat2.random_in_G(t, rng) for _ in range(3))
        tr = mat2.tr
        x = complete_triple(a1, a2, t, tr(a1 @ a3), tr(a2 @ a3), tr(a1 @ a2 @ a3))
        worst = max(worst, mat2.dist(x, a3))
    return n, worst


def random_chain_spec(rng, n: int) -> ChainSpec:
    t = sample_generic_t(rng)
    a, b = mat2.random_in_G(t, rng), mat2.random_in_G(t, rng)
    return ChainSpec(t, a, b, [_generic_pair_trace(rng, t) for _ in range(n)])


def suite_lemma31(rng, scale: float = 1.0) -> tuple[int, float]:
    """Chain samples satisfy every trace constraint and have corank n - 2."""
    per = max(1, int(100 * scale))
    worst, count = 0.0, 0
    for n in (3, 4, 5):
        done = 0
        while done < per:
            spec = random_chain_spec(rng, n)
            chain = chain_sample(spec, seed=int(rng.integers(2**31)), root=int(rng.integers(2)))
            if chain is None:
                continue
            done += 1
            worst = max(worst, chain.residual)
            if chain_corank(spec, chain.matrices, rank_tol=1e-6) != n - 2:
                worst = np.inf
        count += done
    return count, worst


def lemma41_pair(rng, t):
    a, b = canonical_pair(t, 1)
    g = mat2.random_sl2(rng)
    return mat2.conj_by(g, a), mat2.conj_by(g, b)


def suite_lemma41(rng, scale: float = 1.0) -> tuple[int, float]:
    n = max(1, int(100 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_generic_t(rng)
        a, b = lemma41_pair(rng, t)
        for k in range(-3, 6):
            worst = max(worst, lemma41_residual(a, b, k))
    return n, worst


def suite_eqs12(rng, scale: float = 1.0) -> tuple[int, float]:
    """Twist trace formulas; t from the chart region since the residual grows like |s|^3."""
    n = max(1, int(500 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_t(rng)
        a0, a1 = mat2.random_in_G(t, rng), mat2.random_in_G(t, rng)
        worst = max(worst, *eq34_check(a0, a1))
    return n, worst


def suite_fricke(rng, scale: float = 1.0) -> tuple[int, float]:
    n = max(1, int(1000 * scale))
    worst = 0.0
    tr = mat2.tr
    for _ in range(n):
        t = sample_generic_t(rng)
        a1, a2, a3 = (mat2.random_in_G(t, rng) for _ in range(3))
        r12, r13, r23, r = tr(a1 @ a2), tr(a1 @ a3), tr(a2 @ a3), tr(a1 @ a2 @ a3)
        res = abs(f_t_eval(t, r12, r13, r23, r))
        near = min(abs(r - x) for x in solve_f_t(t, r12, r13, r23))
        worst = max(worst, res / 10, near)
    return n, worst


def longitude_residual(name: str, params) -> tuple[float, float]:
    """(Wirtinger residual, ||rho(l) - sign m^N||) at one chart point."""
    rep = build_rep(name, params)
    d = rep.diagram
    N, sign = LONGITUDE[name]
    m = rep.generators[d.preferred]
    lon = longitude_eval(d, rep)
    return validate_rep(d, rep), mat2.dist(lon, sign * mat2.power_naive(m, N))


def suite_longitude(rng, scale: float = 1.0) -> tuple[int, float]:
    n = max(1, int(200 * scale))
    worst, count = 0.0, 0
    for name in CHART_VARIABLES:
        for p in sample_chart(name, n, seed=int(rng.integers(2**31))):
            w, lres = longitude_residual(name, p.values)
            worst = max(worst, w * 10, lres)
            count += 1
    return count, worst


def suite_charts(rng, scale: float = 1.0) -> tuple[int, float]:
    """Chart residuals, with a wrong dimension counted as an infinite residual."""
    n = max(1, int(100 * scale))
    worst, count = 0.0, 0
    for name in CHART_VARIABLES:
        for p in sample_chart(name, n, seed=int(rng.integers(2**31))):
            worst = max(worst, float(p.residuals.max()))
            if chart_dimension(p).dimension != 2:
                worst = np.inf
            count += 1
    return count, worst


def _char_gap(name, rep) -> float:
    ref = build_rep(name, chart_from_rep(name, rep))
    w = standard_words(name)
    return max(abs(a - b) for a, b in zip(character_eval(rep, w), character_eval(ref, w)))


def glue_p334(rng, t) -> object:
    reps = [rep_at(twist(k), t, s) for k, s in ((3, 1), (3, 1), (3, 1), (4, 0))]
    return glue_theorem_pipeline(GlueSpec(t, reps), seed=int(rng.integers(2**31)), root=int(rng.integers(2)), diagram=builtin_diagram("P334"))


def glue_q1(rng, t) -> object:
    reps = [rep_at(twist(3), t, 1), rep_at(twist(3), t, 1)]
    reps += [rep_at(twist(-3, vertical=True), t, 1) for _ in range(2)]
    c = _generic_pair_trace(rng, t)
    r = solve_f_t(t, 1, 1, c)[int(rng.integers(2))]
    return case1_glue(t, reps, c, r, diagram=builtin_diagram("Q1"))


def glue_q2(rng, t=None) -> object:
    p = sample_chart("Q2", 1, seed=int(rng.integers(2**31)))[0].params
    t = p["t"]
    reps = [rep_at(twist(3), t, 1), rep_at(twist(3), t, 1)]
    reps.append(rep_propagate(twist(-3, vertical=True), canonical_pair(t, p["s"]), t))
    return case2_glue(t, reps, p["t13"], p["t123"], diagram=builtin_diagram("Q2"))


def suite_glue(rng, scale: float = 1.0) -> tuple[int, float]:
    """Glued reps agree with the chart builders on the standard character words."""
    n = max(1, int(20 * scale))
    worst = 0.0
    for _ in range(n):
        t = sample_t(rng)
        for name, build in (("P334", glue_p334), ("Q1", glue_q1), ("Q2", glue_q2)):
            rep = build(rng, t)
            worst = max(worst, _char_gap(name, rep), validate_rep(rep.diagram, rep) * 10)
    return 3 * n, worst


RUNNERS: dict[str, Callable] = {
    "lemma21": suite_lemma21,
    "lemma22": suite_lemma22,
    "lemma23": suite_lemma23,
    "lemma31": suite_lemma31,
    "lemma41": suite_lemma41,
    "eqs12": suite_eqs12,
    "fricke": suite_fricke,
    "longitude": suite_longitude,
    "charts": suite_charts,
    "glue": suite_glue,
}


def resolve_suites(names) -> list[str]:
    out = []
    for name in names:
        if name == "all":
            out.extend(s for s in SUITES if s not in out)
        elif name in RUNNERS:
            if name not in out:
                out.append(name)
        else:
            raise UnknownSuite(name)
    return out


def run_suite(name: str, seed: int, tolerances: dict | None = None, scale: float = 1.0) -> ReportRecord:
    if name not in RUNNERS:
        raise UnknownSuite(name)
    tol = (tolerances or {}).get(name, TOLERANCES[name])
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    count, worst = RUNNERS[name](rng, scale)
    return ReportRecord(name, count, float(worst), tol, bool(worst <= tol), time.perf_counter() - start)
