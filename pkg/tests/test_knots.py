import numpy as np
import pytest

from charvar import mat2
from charvar.errors import EmptySolutionSet, ExcludedLocus, InconsistentFricke, InfiniteSolutionSet
from charvar.explorer import chart_point_at, character_eval, is_irreducible, sample_chart, standard_words
from charvar.knots import (
    KNOTS,
    LONGITUDE,
    Slope,
    abelian_rep,
    build_pretzel_rep,
    build_q1_rep,
    build_rep,
    builtin_diagram,
    dehn_filling_solutions,
    filling_residual,
    longitude_eval,
    rep_from_seeds,
    validate_rep,
)


@pytest.mark.parametrize("name,writhe", [("P334", 13), ("Q1", 12), ("Q2", 6)])
def test_writhe(name, writhe):
    assert builtin_diagram(name).writhe == writhe


@pytest.mark.parametrize("name", KNOTS)
def test_chart_reps_are_wirtinger(name):
    for p in sample_chart(name, 20, seed=3):
        rep = build_rep(name, p.values)
        assert validate_rep(rep.diagram, rep) < 1e-9


@pytest.mark.parametrize("name", KNOTS)
def test_longitude_is_meridian_power(name):
    N, sign = LONGITUDE[name]
    for p in sample_chart(name, 20, seed=5):
        rep = build_rep(name, p.values)
        lon = longitude_eval(rep.diagram, rep)
        assert mat2.dist(lon, sign * mat2.power_naive(rep.meridian, N)) < 1e-8
        # the longitude commutes with the meridian
        assert mat2.dist(lon @ rep.meridian, rep.meridian @ lon) < 1e-8


def test_generators_read_back_from_slots():
    p = sample_chart("P334", 1, seed=11)[0]
    rep = build_rep("P334", p.values)
    again = rep_from_seeds(rep.diagram, rep.generators, rep.t)
    assert np.max(np.abs(again.arcs - rep.arcs)) < 1e-12


def test_p334_dehn_table_has_thirteen_values():
    ts = dehn_filling_solutions("P334", slope=Slope(0, 1))
    assert len(ts) == 13
    assert all(abs(t - 2) > 1e-6 and abs(t + 2) > 1e-6 for t in ts)


@pytest.mark.parametrize("slope", [Slope(1, 0), Slope(-1, 0)])
def test_unit_slope_fillings_are_empty(slope):
    with pytest.raises(EmptySolutionSet):
        dehn_filling_solutions("P334", slope=slope)


def test_zero_exponent_filling():
    # a + N b = 0 with N = 26, sigma = -1: b = 1 gives sigma^b = -1
    with pytest.raises(EmptySolutionSet):
        dehn_filling_solutions("P334", slope=Slope(-26, 1))
    # Q1 has sigma = +1 so every t solves
    with pytest.raises(InfiniteSolutionSet):
        dehn_filling_solutions("Q1", slope=Slope(-24, 1))


@pytest.mark.parametrize("name,slope", [("P334", Slope(0, 1)), ("Q1", Slope(1, 1)), ("Q2", Slope(-7, 1))])
def test_filling_reps_satisfy_relation(name, slope):
    for i, t in enumerate(dehn_filling_solutions(name, slope=slope)):
        p = chart_point_at(name, t, seed=i)
        rep = build_rep(name, p.values)
        assert filling_residual(rep, slope) < 1e-8


def test_excluded_locus():
    t = 1.3 + 0.7j
    with pytest.raises(ExcludedLocus):
        build_pretzel_rep(t, t * t - 2, 0, 0)
    with pytest.raises(ExcludedLocus):
        build_pretzel_rep(t, 2, 0, 0)
    with pytest.raises(ExcludedLocus):
        build_q1_rep(np.sqrt(3), 0.5, 0.5)


def test_inconsistent_fricke():
    p = sample_chart("P334", 1, seed=2)[0]
    t, t13, t123, t134 = p.values
    with pytest.raises(InconsistentFricke):
        build_pretzel_rep(t, t13, t123 + 1e-3, t134)


def test_characters_separate_chart_points():
    a, b = sample_chart("P334", 2, seed=8)
    words = standard_words("P334")
    ca = character_eval(build_rep("P334", a.values), words)
    cb = character_eval(build_rep("P334", b.values), words)
    assert max(abs(x - y) for x, y in zip(ca, cb)) > 1e-3


def test_abelian_rep():
    d = builtin_diagram("Q1")
    rep = abelian_rep(d, 2.5)
    assert validate_rep(d, rep) < 1e-12
    assert not is_irreducible(rep)


@pytest.mark.parametrize("name", KNOTS)
def test_chart_reps_irreducible(name):
    p = sample_chart(name, 1, seed=4)[0]
    assert is_irreducible(build_rep(name, p.values))


def test_slope_parse():
    assert Slope.parse("3/2") == Slope(3, 2)
    assert Slope.parse("-5") == Slope(-5, 1)
    assert str(Slope(1, 0)) == "1/0"
    with pytest.raises(ValueError):
        Slope.parse("4/2")
    with pytest.raises(ValueError):
        Slope.parse("x/1")
