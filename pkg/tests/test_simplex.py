import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import lp_min
from pipeclimb.simplex import LPError, LPInfeasible, LPUnbounded, lp_solve


def random_lp(rng, n=None):
    """A feasible LP over a box, with at most 4 free dimensions so the
    vertex oracle stays cheap."""
    n = int(rng.integers(1, 13)) if n is None else n
    k = int(rng.integers(1, min(n, 4) + 1))
    m = n - k
    x_feas = np.empty(n)
    bounds = []
    for j in range(n):
        u = float(rng.uniform(1, 5))
        if rng.random() < 0.5:
            bounds.append((0.0, u))
            x_feas[j] = rng.uniform(0, u)
        else:
            bounds.append((-u, u))
            x_feas[j] = rng.uniform(-u, u)
    A = rng.normal(size=(m, n))
    if rng.random() < 0.3:
        A = np.round(A)     # integer data gives degenerate vertices
    b = A @ x_feas
    p = int(rng.integers(0, 4))
    G = rng.normal(size=(p, n))
    h = G @ x_feas + rng.uniform(0, 1, p)
    c = rng.normal(size=n)
    return c, A, b, bounds, G, h


def test_random_lps_match_vertex_oracle():
    rng = np.random.default_rng(20240611)
    checked = 0
    while checked < 200:
        c, A, b, bounds, G, h = random_lp(rng)
        if A.shape[0] and np.linalg.matrix_rank(A) < A.shape[0]:
            continue
        ref = lp_min(c, A, b, bounds, G, h)
        assert ref is not None
        res = lp_solve(A, b, c, bounds, G, h)
        assert res.objective == pytest.approx(ref[0], rel=1e-9, abs=1e-9)
        assert np.abs(A @ res.x - b).max(initial=0) <= 1e-9
        assert (G @ res.x - h).max(initial=-1) <= 1e-9
        checked += 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_lp_property(seed):
    c, A, b, bounds, G, h = random_lp(np.random.default_rng(seed))
    if A.shape[0] and np.linalg.matrix_rank(A) < A.shape[0]:
        return
    ref = lp_min(c, A, b, bounds, G, h)
    res = lp_solve(A, b, c, bounds, G, h)
    assert res.objective == pytest.approx(ref[0], rel=1e-9, abs=1e-9)


def test_lower_bound():
    res = lp_solve(None, None, [1.0], [(3.0, None)])
    assert res.x == pytest.approx([3.0])


def test_degenerate_optimum_picks_smallest_basis():
    res = lp_solve([[1.0, 1.0]], [1.0], [1.0, 1.0])
    assert res.objective == pytest.approx(1.0)
    assert res.x == pytest.approx([1.0, 0.0])
    assert res.basis == (0,)


def test_beale_cycling_instance_terminates():
    # cycles under the textbook largest-coefficient rule
    c = [-0.75, 150.0, -0.02, 6.0]
    G = [[0.25, -60.0, -0.04, 9.0],
         [0.5, -90.0, -0.02, 3.0],
         [0.0, 0.0, 1.0, 0.0]]
    h = [0.0, 0.0, 1.0]
    res = lp_solve(None, None, c, None, G, h)
    assert res.objective == pytest.approx(-0.05, abs=1e-12)
    assert res.x == pytest.approx([0.04, 0.0, 1.0, 0.0], abs=1e-12)


def test_kuhn_cycling_instance_terminates():
    c = [-2.0, -3.0, 1.0, 12.0]
    G = [[-2.0, -9.0, 1.0, 9.0],
         [1 / 3, 1.0, -1 / 3, -2.0],
         [2.0, 3.0, -1.0, -12.0]]
    h = [0.0, 0.0, 2.0]
    ref = lp_min(c, None, None, [(0.0, 50.0)] * 4, G, h)
    res = lp_solve(None, None, c, [(0.0, 50.0)] * 4, G, h)
    assert res.objective == pytest.approx(ref[0], abs=1e-9)


def test_highly_degenerate_vertex():
    # many constraints through the same optimal vertex
    n = 3
    G = np.vstack([-np.eye(n), np.ones((6, n)) * [1, 1, 1], np.eye(n)])
    h = np.concatenate([np.zeros(n), np.ones(6), np.ones(n)])
    res = lp_solve(None, None, [-1.0, -1.0, -1.0], [(None, None)] * n, G, h)
    assert res.objective == pytest.approx(-1.0)


def test_infeasible_has_farkas_certificate():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([-1.0, 0.5])
    with pytest.raises(LPInfeasible) as exc:
        lp_solve(A, b, [0.0, 0.0])
    y = exc.value.certificate
    assert np.all(y @ A <= 1e-12)
    assert y @ b > 0
    assert exc.value.phase1_objective > 0


def test_empty_bounds_infeasible():
    with pytest.raises(LPInfeasible):
        lp_solve(None, None, [1.0], [(2.0, 1.0)])


def test_unbounded():
    with pytest.raises(LPUnbounded):
        lp_solve(None, None, [-1.0])
    with pytest.raises(LPUnbounded):
        lp_solve([[1.0, -1.0]], [0.0], [-1.0, 0.0])


def test_bad_dimensions():
    with pytest.raises(ValueError):
        lp_solve([[1.0, 2.0]], [1.0, 2.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        lp_solve(None, None, [1.0, 1.0], [(0, 1)])


def test_redundant_equalities():
    A = [[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]]
    res = lp_solve(A, [1.0, 2.0, 1.0], [1.0, 2.0, 3.0])
    assert res.objective == pytest.approx(ref := lp_min([1.0, 2.0, 3.0], [[1.0, 1.0, 0.0],
                                                                       [0.0, 1.0, 1.0]],
                                                       [1.0, 1.0])[0])
    assert ref == pytest.approx(2.0)
    assert res.x == pytest.approx([0.0, 1.0, 0.0])


def test_deterministic_bitwise():
    rng = np.random.default_rng(7)
    c, A, b, bounds, G, h = random_lp(rng, n=10)
    r1 = lp_solve(A, b, c, bounds, G, h)
    r2 = lp_solve(A.copy(), b.copy(), c.copy(), list(bounds), G.copy(), h.copy())
    assert r1.x.tobytes() == r2.x.tobytes()
    assert r1.basis == r2.basis


def test_iteration_cap():
    c, A, b, bounds, G, h = random_lp(np.random.default_rng(3), n=8)
    with pytest.raises(LPError):
        lp_solve(A, b, c, bounds, G, h, max_iter=0)
