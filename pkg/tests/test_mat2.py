import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charvar import mat2
from charvar.errors import BranchCollision, DetDrift

from strategies import complexes, generic_t, in_G, sl2


def test_products_of_normal_forms():
    k = 1.3 + 0.4j
    e = mat2.eye()
    assert mat2.dist(mat2.mul(e, e), e) == 0
    assert mat2.dist(mat2.d(k) @ mat2.d(1 / k), e) < 1e-15
    assert mat2.dist(mat2.p(0.5) @ mat2.p(1 - 2j), mat2.p(1.5 - 2j)) < 1e-15
    assert mat2.dist(mat2.inv(mat2.d(k)), mat2.d(1 / k)) < 1e-15


@given(sl2())
def test_inverse_round_trip(x):
    assert mat2.dist(x @ mat2.inv(x), mat2.eye()) < 1e-12


def test_inverse_rejects_det_drift():
    with pytest.raises(DetDrift):
        mat2.inv(mat2.mat(2, 0, 0, 1))


@given(sl2(), sl2())
def test_conjugation_preserves_trace(c, x):
    assert abs(mat2.tr(mat2.conj_by(c, x)) - mat2.tr(x)) < 1e-12
    assert mat2.dist(mat2.conj_by(c, mat2.eye()), mat2.eye()) < 1e-12
    assert mat2.dist(mat2.conj_by(x, x), x) < 1e-12


@given(complexes)
def test_omega_base_cases(r):
    assert mat2.omega(0, r) == 0
    assert abs(mat2.omega(1, r) - 1) < 1e-12
    assert abs(mat2.omega(2, r) - r) < 1e-9 * max(1, abs(r))


@pytest.mark.parametrize("k", range(-6, 7))
def test_omega_at_two_is_k(k):
    assert abs(mat2.omega(k, 2) - k) < 1e-12
    assert abs(mat2.omega(k, 2 + 1e-7) - k) < 1e-6 * max(1, k * k)


def test_omega_recurrence(rng):
    worst = 0.0
    for _ in range(1000):
        r = complex(*rng.uniform(-2.5, 2.5, 2))
        for k in range(-64, 64):
            lhs = mat2.omega(k + 1, r)
            rhs = r * mat2.omega(k, r) - mat2.omega(k - 1, r)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    assert worst < 1e-12


@pytest.mark.parametrize("r0", (2, -2))
@pytest.mark.parametrize("k", (3, 7, 12, -5))
def test_omega_continuous_across_branch_switch(r0, k):
    def recurrence(k, r):
        if k < 0:
            return -recurrence(-k, r)
        prev, cur = 0, 1
        for _ in range(k - 1):
            prev, cur = cur, r * cur - prev
        return cur if k else 0

    for r in (r0 + 1.001 * mat2.OMEGA_SWITCH, r0 + 0.999 * mat2.OMEGA_SWITCH, r0 + 1e-3j):
        assert abs(mat2.omega(k, r) - recurrence(k, r)) < 1e-8


@given(in_G(), st.integers(-64, 64))
def test_power_cayley_matches_repeated_product(tx, k):
    _, x = tx
    naive = mat2.power_naive(x, k)
    assert mat2.dist(mat2.power_cayley(x, k), naive) < 1e-9 * max(1.0, mat2.norm_inf(naive))


def test_torsion_powers():
    rng = np.random.default_rng(3)
    x0 = mat2.random_in_G(0, rng)
    x1 = mat2.random_in_G(1, rng)
    assert mat2.dist(mat2.power_cayley(x0, 2), -mat2.eye()) < 1e-9
    assert mat2.dist(mat2.power_cayley(x1, 3), -mat2.eye()) < 1e-9
    k = 0.8 + 0.6j
    assert mat2.dist(mat2.power_cayley(mat2.d(k), 5), mat2.d(k**5)) < 1e-12


def test_kappa_branch():
    for t in (2.5, 1 + 1j, -0.3 + 2j, 0.1):
        k = mat2.kappa_of(t)
        assert abs(k + 1 / k - t) < 1e-12


@given(in_G(), complexes, st.sampled_from((1, -1)))
def test_centralizer_element(tx, mu, branch):
    t, a = tx
    c = mat2.centralizer_element(a, t, mu, branch)
    assert abs(mat2.det(c) - 1) < 1e-10 * max(1, mat2.norm_inf(c)) ** 2
    assert mat2.is_commuting(c, a, 1e-10 * max(1, mat2.norm_inf(c)))


def test_centralizer_special_values(rng):
    a = mat2.random_in_G(1.5, rng)
    c0 = mat2.centralizer_element(a, 1.5, 0)
    assert min(mat2.dist(c0, mat2.eye()), mat2.dist(c0, -mat2.eye())) < 1e-12
    # mu = 1 on the branch with nu = 0 gives a back
    c1 = mat2.centralizer_element(a, 1.5, 1, branch=1)
    c1b = mat2.centralizer_element(a, 1.5, 1, branch=-1)
    assert min(mat2.dist(c1, a), mat2.dist(c1b, a)) < 1e-12


def test_centralizer_branch_collision_warns():
    # disc = t^2 mu^2 - 4(mu^2 - 1) vanishes at t = 0, mu = 1
    a = mat2.mat(0, 1, -1, 0)
    with pytest.warns(BranchCollision):
        mat2.centralizer_element(a, 0, 1)


def test_centralizers_of_noncommuting_pair_meet_in_pm_e(rng):
    for _ in range(500):
        t = complex(*rng.uniform(-2, 2, 2))
        a, b = mat2.random_in_G(t, rng), mat2.random_in_G(t, rng)
        if mat2.is_commuting(a, b, 1e-6):
            continue
        mu = complex(*rng.uniform(-2, 2, 2))
        if abs(mu) < 1e-3:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BranchCollision)
            c = mat2.centralizer_element(a, t, mu, 1)
        assert not mat2.is_commuting(c, b)


def test_is_commuting_examples(rng):
    assert mat2.is_commuting(mat2.d(2), mat2.d(3 + 1j))
    assert not mat2.is_commuting(mat2.d(2), mat2.p(1))
    x = mat2.random_in_G(1.2, rng)
    assert not mat2.is_commuting(x, mat2.conj_by(mat2.random_sl2(rng), x))


def test_trace_identity(rng):
    for _ in range(1000):
        x, y = mat2.random_sl2(rng), mat2.random_sl2(rng)
        lhs = mat2.tr(mat2.inv(x) @ y)
        rhs = mat2.tr(x) * mat2.tr(y) - mat2.tr(x @ y)
        assert abs(lhs - rhs) < 1e-11 * max(1, abs(rhs))


@given(generic_t())
def test_random_in_G_has_trace(t):
    x = mat2.random_in_G(t, np.random.default_rng(0))
    assert abs(mat2.tr(x) - t) < 1e-12
    assert abs(mat2.det(x) - 1) < 1e-12
