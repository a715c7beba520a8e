import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charvar import mat2
from charvar.errors import DegenerateTarget, InconsistentFricke, ReduciblePair, TraceMismatch
from charvar.explorer import chain_fd_jacobian, chain_jacobian
from charvar.suites import random_chain_spec
from charvar.trace_lab import (
    ChainSpec,
    align_pair,
    canonical_pair,
    chain_residual,
    chain_sample,
    complete_triple,
    f_t_eval,
    in_B,
    is_double_root,
    is_reducible_pair,
    sample_Ctr,
    solve_bridge,
    solve_f_t,
)

from strategies import complexes, generic_t


def _shares_eigenvector(a, b, tol=1e-8):
    _, vecs = np.linalg.eig(a)
    for v in vecs.T:
        w = b @ v
        if abs(v[0] * w[1] - v[1] * w[0]) < tol:
            return True
    return False


@given(generic_t(), complexes)
def test_canonical_pair_traces(t, t12):
    a1, a2 = canonical_pair(t, t12)
    assert abs(mat2.tr(a1) - t) < 1e-12
    assert abs(mat2.tr(a2) - t) < 1e-9 * max(1, abs(t12))
    assert abs(mat2.tr(a1 @ a2) - t12) < 1e-9 * max(1, abs(t12))
    assert abs(mat2.det(a2) - 1) < 1e-9 * max(1, mat2.norm_inf(a2)) ** 2


@pytest.mark.parametrize("t", (2, -2))
def test_canonical_pair_parabolic_branch(t):
    a1, a2 = canonical_pair(t, 0.7)
    eps = 1 if t > 0 else -1
    assert mat2.dist(a1, eps * mat2.p(1)) == 0
    assert abs(a2[1, 0] - eps * (0.7 - 2)) < 1e-12
    assert abs(mat2.tr(a1 @ a2) - 0.7) < 1e-12


def test_canonical_pair_reducible_exactly_off_B():
    t = 1.4 + 0.3j
    for t12, reducible in ((2, True), (t * t - 2, True), (0.5, False), (1 + 1j, False)):
        a1, a2 = canonical_pair(t, t12)
        assert _shares_eigenvector(a1, a2) == reducible
        assert is_reducible_pair(a1, a2) == reducible
        assert in_B(t, t12) != reducible


def test_fricke_on_random_triples(rng):
    for _ in range(300):
        t = complex(*rng.uniform(-2, 2, 2))
        a1, a2, a3 = (mat2.random_in_G(t, rng) for _ in range(3))
        tr = mat2.tr
        r = tr(a1 @ a2 @ a3)
        args = (tr(a1 @ a2), tr(a1 @ a3), tr(a2 @ a3))
        assert abs(f_t_eval(t, *args, r)) < 1e-9
        assert min(abs(r - x) for x in solve_f_t(t, *args)) < 1e-8


def test_fricke_symmetric_in_pair_traces():
    t, r = 1.2 + 0.4j, 0.3 - 1j
    vals = (0.5, 1 + 1j, -0.7)
    ref = f_t_eval(t, *vals, r)
    for perm in ((1, 0, 2), (2, 1, 0), (0, 2, 1)):
        assert abs(f_t_eval(t, *(vals[i] for i in perm), r) - ref) < 1e-12


def test_double_root_detection():
    from charvar.trace_lab import f_t_discriminant

    t = 1.5
    r1, r2 = 0.4, 0.9
    # the discriminant is quadratic in r3: interpolate it exactly and take a root
    xs = np.array([-1.0, 0.0, 1.0])
    coeffs = np.polyfit(xs, [f_t_discriminant(t, r1, r2, x) for x in xs], 2)
    r3 = complex(np.roots(coeffs)[0])
    assert is_double_root(t, r1, r2, r3, tol=1e-9)
    assert not is_double_root(t, r1, r2, r3 + 0.1)
    a, b = solve_f_t(t, r1, r2, r3)
    assert abs(a - b) < 1e-4


def test_complete_triple_round_trip(rng):
    for _ in range(200):
        t = complex(*rng.uniform(-2, 2, 2))
        a1, a2, a3 = (mat2.random_in_G(t, rng) for _ in range(3))
        tr = mat2.tr
        x = complete_triple(a1, a2, t, tr(a1 @ a3), tr(a2 @ a3), tr(a1 @ a2 @ a3))
        assert mat2.dist(x, a3) < 1e-8
        y = complete_triple(a1, a2, t, tr(a1 @ a3), tr(a2 @ a3), tr(a1 @ a2 @ a3))
        assert np.array_equal(x, y)


def test_complete_triple_rejects_bad_input():
    t = 1.3
    a1, a2 = canonical_pair(t, 0.5)
    r = solve_f_t(t, 0.5, 0.2, 0.4)[0]
    with pytest.raises(InconsistentFricke):
        complete_triple(a1, a2, t, 0.2, 0.4, r + 1e-3)
    b1, b2 = canonical_pair(t, 2)
    r = solve_f_t(t, 2, 0.2, 0.4)[0]
    with pytest.raises(ReduciblePair):
        complete_triple(b1, b2, t, 0.2, 0.4, r)


def test_sample_Ctr_fibers(rng):
    for _ in range(200):
        t = complex(*rng.uniform(-2, 2, 2))
        a = mat2.random_in_G(t, rng)
        r = complex(*rng.uniform(-2, 2, 2))
        if not in_B(t, r, 1e-2):
            continue
        x = sample_Ctr(a, t, r, complex(*rng.uniform(0.3, 2, 2)))
        assert abs(mat2.tr(x) - t) < 1e-9
        assert abs(mat2.tr(a @ x) - r) < 1e-9
        assert abs(mat2.det(x) - 1) < 1e-9


def test_sample_Ctr_off_diagonal_product():
    t, r = 1.1 + 0.5j, 0.4 - 0.2j
    k = mat2.kappa_of(t)
    a = mat2.d(k)
    x = sample_Ctr(a, t, r, 0.8)
    assert abs(x[0, 1] * x[1, 0] - (r - 2) * (r - t * t + 2) / (4 - t * t)) < 1e-12


@pytest.mark.parametrize("eps", (1, -1))
def test_sample_Ctr_parabolic(eps):
    t, r = 2 * eps, 0.6 + 0.1j
    a = eps * mat2.p(1)
    for u in (0, 0.5, 1 + 2j):
        x = sample_Ctr(a, t, r, u)
        assert abs(x[1, 0] - eps * (r - 2)) < 1e-12
        assert abs(mat2.tr(a @ x) - r) < 1e-12


def test_sample_Ctr_injective(rng):
    t, r = 1.2 + 0.3j, 0.5
    a = mat2.random_in_G(t, rng)
    for _ in range(500):
        u, v = complex(*rng.uniform(0.2, 2, 2)), complex(*rng.uniform(0.2, 2, 2))
        if abs(u - v) < 1e-6:
            continue
        assert mat2.dist(sample_Ctr(a, t, r, u), sample_Ctr(a, t, r, v)) > 1e-9


def test_sample_Ctr_degenerate_target():
    t = 1.3
    with pytest.raises(DegenerateTarget):
        sample_Ctr(mat2.d(mat2.kappa_of(t)), t, 2, 1)
    with pytest.raises(DegenerateTarget):
        sample_Ctr(mat2.d(mat2.kappa_of(t)), t, t * t - 2, 1)


def test_align_pair(rng):
    t = 1.1 - 0.4j
    p1, p2 = canonical_pair(t, 0.3 + 0.2j)
    c = align_pair((p1, p2), (p1, p2))
    assert min(mat2.dist(c, mat2.eye()), mat2.dist(c, -mat2.eye())) < 1e-9
    g = mat2.random_sl2(rng)
    q1, q2 = mat2.conj_by(g, p1), mat2.conj_by(g, p2)
    c = align_pair((p1, p2), (q1, q2))
    assert mat2.dist(mat2.conj_by(c, p1), q1) < 1e-9
    assert mat2.dist(mat2.conj_by(c, p2), q2) < 1e-9
    assert np.array_equal(c, align_pair((p1, p2), (q1, q2)))
    r1, r2 = canonical_pair(t, 0.3 + 0.2j + 1e-2)
    with pytest.raises(TraceMismatch):
        align_pair((p1, p2), (r1, r2))
    s1, s2 = canonical_pair(t, 2)
    with pytest.raises(ReduciblePair):
        align_pair((s1, s2), (s1, s2))


def test_bridge_cases(rng):
    t = 1.3 + 0.2j
    x1, b = mat2.random_in_G(t, rng), mat2.random_in_G(t, rng)
    sol = solve_bridge(t, x1, b, 0.4, -0.3)
    assert sol.case == "irreducible" and 1 <= len(sol) <= 2
    for x2 in sol.solutions:
        assert abs(mat2.tr(x1 @ x2) - 0.4) < 1e-9
        assert abs(mat2.tr(x2 @ b) + 0.3) < 1e-9
    # commuting endpoints: a family when a2 = a3, nothing otherwise
    fam = solve_bridge(t, x1, x1, 0.4, 0.4)
    assert fam.case == "commuting" and fam.family is not None
    x2 = fam.family(0.7)
    assert abs(mat2.tr(x1 @ x2) - 0.4) < 1e-9
    assert solve_bridge(t, x1, x1, 0.4, 0.5).empty
    inv = solve_bridge(t, x1, mat2.adj(x1), 0.4, t * t - 0.4)
    assert inv.case == "commuting" and inv.family is not None


def _grid_bridge_oracle(t, x1, b, a2, a3):
    """Least-squares search over G(t) from many starts; returns the minimum residual."""
    from scipy.optimize import least_squares

    def F(v):
        z = v[:4] + 1j * v[4:]
        x = z.reshape(2, 2)
        res = [mat2.tr(x) - t, mat2.det(x) - 1, mat2.tr(x1 @ x) - a2, mat2.tr(x @ b) - a3]
        return np.concatenate([np.real(res), np.imag(res)])

    rng = np.random.default_rng(0)
    best = np.inf
    for _ in range(30):
        out = least_squares(F, rng.normal(size=8), xtol=1e-14, ftol=1e-14, gtol=1e-14)
        best = min(best, np.max(np.abs(out.fun)))
    return best


def test_bridge_reducible_case_against_search():
    t = 1.3 + 0.2j
    k = mat2.kappa_of(t)
    x1 = mat2.d(k)
    b = mat2.u(k)  # shares the first basis vector with x1
    sol = solve_bridge(t, x1, b, 0.4, -0.3)
    assert sol.case == "reducible" and len(sol) == 1
    x2 = sol.solutions[0]
    assert abs(mat2.tr(x1 @ x2) - 0.4) < 1e-9 and abs(mat2.tr(x2 @ b) + 0.3) < 1e-9
    # the empty sub-case: a3 = eps a2 + (1 - eps) t^2 / 2 with eps = 1
    empty = solve_bridge(t, x1, b, 0.4, 0.4)
    assert empty.empty
    assert _grid_bridge_oracle(t, x1, b, 0.4, 0.4) > 1e-6


@pytest.mark.parametrize("n", (3, 4, 5))
def test_chain_sample_residual_and_corank(rng, n):
    done = 0
    while done < 20:
        spec = random_chain_spec(rng, n)
        chain = chain_sample(spec, seed=int(rng.integers(1000)))
        if chain is None:
            continue
        done += 1
        assert len(chain.matrices) == n - 1
        assert chain_residual(spec, chain.matrices) < 1e-9
        J = chain_jacobian(spec, chain.matrices)
        assert np.max(np.abs(J - chain_fd_jacobian(spec, chain.matrices))) < 1e-5 * max(1, np.max(np.abs(J)))


def test_chain_sample_deterministic(rng):
    spec = random_chain_spec(rng, 4)
    a = chain_sample(spec, seed=5)
    b = chain_sample(spec, seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(a.matrices, b.matrices))


def test_chain_sample_rejects_locus():
    t = 1.2
    a, b = canonical_pair(t, 0.5)
    with pytest.raises(DegenerateTarget):
        chain_sample(ChainSpec(t, a, b, [0.5, 2, 0.3]))
    with pytest.raises(ValueError):
        chain_sample(ChainSpec(t, a, b, [0.5, 0.3]))


@given(st.integers(0, 10_000))
def test_chain_n3_fibre_dimension_one(seed):
    rng = np.random.default_rng(seed)
    spec = random_chain_spec(rng, 3)
    chain = chain_sample(spec, seed=seed)
    if chain is not None:
        from charvar.explorer import chain_corank

        assert chain_corank(spec, chain.matrices, rank_tol=1e-6) == 1


@pytest.mark.parametrize("eps", [1, -1])
def test_parabolic_reducible_pairs_commute(eps):
    # at t = +-2 a reducible pair is unipotent up to sign, so the bridge lands in the commuting case
    t = 2 * eps
    x1, b = eps * mat2.p(1), eps * mat2.p(3)
    sol = solve_bridge(t, x1, b, 2.0, 2.0)
    assert sol.case == "commuting"
