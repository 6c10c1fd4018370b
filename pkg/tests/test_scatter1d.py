import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylres.potential import ModeProfile, smooth_bump, step_profile, to_steps
from cylres.scatter1d import (cutoff_resolvent_hs_norm, find_resonances_1d,
                              jost_data, jost_wronskian, resolvent_kernel,
                              resonance_state, transfer_matrix)
from cylres.zeros import Rect

_trapz = getattr(np, "trapezoid", None) or getattr(np, "trapz")

WELL_DEPTH = 4.0
WELL_HALF = 1.0


def _well():
    return step_profile([-WELL_HALF, WELL_HALF], [-WELL_DEPTH])


def _free():
    return step_profile([-1.0, 1.0], [0.0])


def _bump_profile(scale=-3.0, n=513):
    xs = np.linspace(-1, 1, n)
    return ModeProfile(-1.0, 1.0, (scale * smooth_bump(xs)).astype(complex))


def _bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    assert flo * fn(hi) < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if flo * fn(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _even_bound_beta():
    # even bound state of the square well: kappa tan(kappa a) = beta,
    # kappa^2 + beta^2 = depth; solved by bisection in kappa
    a, v0 = WELL_HALF, WELL_DEPTH
    g = lambda k: k * math.tan(k * a) - math.sqrt(v0 - k * k)
    k = _bisect(g, 1.0, 1.2)
    return math.sqrt(v0 - k * k), k


def _odd_bound_beta():
    a, v0 = WELL_HALF, WELL_DEPTH
    g = lambda k: k / math.tan(k * a) + math.sqrt(v0 - k * k)
    k = _bisect(g, 1.7, 1.99)
    return math.sqrt(v0 - k * k), k


def _well_jost_even(lam):
    kap = cmath.sqrt(lam * lam + WELL_DEPTH)
    a = WELL_HALF
    return kap * cmath.sin(kap * a) + 1j * lam * cmath.cos(kap * a)


def _well_jost_odd(lam):
    kap = cmath.sqrt(lam * lam + WELL_DEPTH)
    a = WELL_HALF
    return kap * cmath.cos(kap * a) - 1j * lam * cmath.sin(kap * a)


def _newton_complex(fn, z0, iters=100):
    z = z0
    for _ in range(iters):
        h = 1e-7 * max(1.0, abs(z))
        d = (fn(z + h) - fn(z - h)) / (2 * h)
        if d == 0:
            return None
        step = fn(z) / d
        z = z - step
        if abs(step) < 1e-13:
            return z
    return None


def test_transfer_matrix_free_width_two():
    lam = 1.3
    T = transfer_matrix(lam, _free())
    assert T[0, 0] == pytest.approx(math.cos(2 * lam))
    assert T[0, 1] == pytest.approx(math.sin(2 * lam) / lam)
    assert T[1, 0] == pytest.approx(-lam * math.sin(2 * lam))
    assert np.linalg.det(T) == pytest.approx(1.0)


def test_transfer_matrix_free_at_zero_momentum():
    T = transfer_matrix(0.0, _free())
    assert np.allclose(T, [[1.0, 2.0], [0.0, 1.0]], atol=1e-14)


def test_transfer_matrix_turning_point_slab():
    # v = lam^2 makes the slab equation u'' = 0: shear matrix
    lam = 1.5 + 0.5j
    p = step_profile([0.0, 0.8], [lam * lam])
    T = transfer_matrix(lam, p)
    assert abs(T[0, 0] - 1) < 1e-14
    assert abs(T[0, 1] - 0.8) < 1e-14
    assert abs(T[1, 0]) < 1e-14


def test_transfer_matrix_series_continuity():
    lam = 2.0
    for eps in (0.99e-2, 1.01e-2):
        v = lam * lam - eps * eps
        T = transfer_matrix(lam, step_profile([0.0, 1.0], [v]))
        mu = math.sqrt(lam * lam - v)
        assert abs(T[0, 0] - math.cos(mu)) < 1e-12
        assert abs(T[0, 1] - math.sin(mu) / mu) < 1e-12


def test_transfer_matrix_rejects_smooth_profile():
    with pytest.raises(ValueError, match="step"):
        transfer_matrix(1.0, _bump_profile())


def test_transfer_matrix_slab_refinement_second_order():
    p = _bump_profile()
    lam = 1.1 + 0.3j
    ref = transfer_matrix(lam, to_steps(p, 3200))
    e100 = np.abs(transfer_matrix(lam, to_steps(p, 100)) - ref).max()
    e200 = np.abs(transfer_matrix(lam, to_steps(p, 200)) - ref).max()
    assert e200 < e100 / 3.0


@given(st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
       st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=50, deadline=None)
def test_transfer_matrix_det_one(lam, v1, v2):
    p = step_profile([-1.0, 0.2, 1.0], [v1, v2])
    T = transfer_matrix(lam, p)
    assert abs(np.linalg.det(T) - 1.0) < 1e-10 * max(1.0, np.abs(T).max() ** 2)


def test_free_wronskian_is_2_i_lam():
    p = _free()
    for lam in (0.7, 2.0 - 0.3j, -1.1 + 0.8j, 3.5j):
        W = jost_wronskian(lam, p)
        assert abs(W - 2j * lam) < 1e-12 * max(1.0, abs(lam))


def test_jost_data_boundary_values():
    p = _well()
    lam = 1.0 - 0.4j
    data = jost_data(p, lam)
    # right side of f_plus is the exact plane wave
    assert data.f_plus_right[0] == pytest.approx(cmath.exp(1j * lam * 1.0))
    assert data.f_plus_right[1] == pytest.approx(1j * lam * cmath.exp(1j * lam))
    # W from the boundary data is reproduced
    W = (data.f_plus_left[0] * data.f_minus_left[1]
         - data.f_plus_left[1] * data.f_minus_left[0])
    assert W == pytest.approx(data.W)


def test_wronskian_cauchy_riemann_analyticity():
    p = _well()
    rng = np.random.default_rng(7)
    h = 1e-5
    for _ in range(12):
        lam = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        dre = (jost_wronskian(lam + h, p) - jost_wronskian(lam - h, p)) / (2 * h)
        dim = (jost_wronskian(lam + 1j * h, p) - jost_wronskian(lam - 1j * h, p)) / (2j * h)
        assert abs(dre - dim) < 1e-6 * max(1.0, abs(dre))


def test_wronskian_reality_symmetry():
    # real potential: |W(lam)| = |W(-conj(lam))|
    p = _well()
    for lam in (1.2 - 0.7j, 0.3 + 0.9j, 2.5 - 0.1j):
        assert abs(jost_wronskian(-lam.conjugate(), p)
                   - jost_wronskian(lam, p).conjugate()) < 1e-10


def test_even_bound_state_via_engine():
    p = _well()
    beta, _ = _even_bound_beta()
    hits = find_resonances_1d(p, Rect.from_center(1j * beta, 0.3), tol=1e-12)
    (lam, m), = hits
    assert m == 1
    assert abs(lam - 1j * beta) < 1e-9


def test_resonances_match_transcendental_oracle():
    p = _well()
    box = Rect(0.25, 4.8, -2.0, -0.05)
    hits = find_resonances_1d(p, box, tol=1e-10)

    oracle = set()
    for part in (_well_jost_even, _well_jost_odd):
        for re0 in np.linspace(0.2, 5.0, 20):
            for im0 in np.linspace(-2.1, -0.05, 8):
                z = _newton_complex(part, complex(re0, im0))
                if z is None or not box.contains(z):
                    continue
                if all(abs(z - o) > 1e-6 for o in oracle):
                    oracle.add(z)
    assert len(oracle) == 2
    assert len(hits) == len(oracle)
    for o in oracle:
        assert min(abs(lam - o) for lam, _ in hits) < 1e-8


def test_barrier_has_no_upper_half_plane_zeros():
    from cylres.zeros import winding_count
    p = step_profile([-1.0, 1.0], [4.0])
    w = winding_count(lambda lam: jost_wronskian(lam, p), Rect(-6.0, 6.0, 0.03, 5.0))
    assert w == 0


def test_zero_set_stable_under_slab_refinement():
    p = _bump_profile(scale=-5.0)
    beta_coarse = _imag_axis_zero(p, n_steps=128)
    beta_mid = _imag_axis_zero(p, n_steps=256)
    beta_fine = _imag_axis_zero(p, n_steps=512)
    # O(h^2): quartering the step shrinks movement ~16x; allow 3x slack
    assert abs(beta_fine - beta_mid) < abs(beta_mid - beta_coarse) / 3


def _imag_axis_zero(p, n_steps):
    # W is real-valued on i(0, inf) for a real potential
    f = lambda b: jost_wronskian(1j * b, p, n_steps=n_steps).real
    return _bisect(f, 0.5, 2.0, iters=80)


def test_smooth_profile_wronskian_convergence():
    p = _bump_profile()
    lam = 1.0 - 0.5j
    ref = jost_wronskian(lam, p, n_steps=4096)
    err_coarse = abs(jost_wronskian(lam, p, n_steps=64) - ref)
    err_fine = abs(jost_wronskian(lam, p, n_steps=512) - ref)
    assert err_fine < err_coarse / 16


def test_resonance_state_free_at_origin():
    # zero potential: W = 2 i lam vanishes at 0; the normalized state is 1/sqrt(2)
    p = _free()
    state = resonance_state(p, 0.0)
    u = state.evaluate(np.array([-0.5, 0.0, 0.7]))
    assert np.allclose(np.abs(u), 1 / math.sqrt(2), atol=1e-8)
    assert np.allclose(u, u[0], atol=1e-10)


def test_resonance_state_square_integral_is_half_inverse_beta():
    # residue normalization: int u^2 over the line equals i / (2 lam0),
    # which is 1 / (2 beta) at a bound state lam0 = i beta
    p = _well()
    beta, _ = _even_bound_beta()
    state = resonance_state(p, 1j * beta, n_grid=4000)
    inside = _trapz(state.u * state.u, state.grid)
    tail_r = state.u[-1] ** 2 / (2 * beta)
    tail_l = state.u[0] ** 2 / (2 * beta)
    total = inside + tail_r + tail_l
    assert abs(total - 1 / (2 * beta)) < 1e-6


def test_resonance_state_exterior_coefficients():
    p = _well()
    beta, _ = _even_bound_beta()
    state = resonance_state(p, 1j * beta)
    # continuity at the support edges between grid values and exterior forms
    right = state.c_plus * cmath.exp(1j * state.lam0 * p.x_max)
    left = state.c_minus * cmath.exp(-1j * state.lam0 * p.x_min)
    assert abs(right - state.u[-1]) < 1e-9 * max(1.0, abs(right))
    assert abs(left - state.u[0]) < 1e-9 * max(1.0, abs(left))


def test_resonance_state_shape_is_cosine_inside_well():
    p = _well()
    beta, kappa = _even_bound_beta()
    xs = np.linspace(-0.9, 0.9, 11)
    u = resonance_state(p, 1j * beta).evaluate(xs)
    ref = np.cos(kappa * xs)
    ratio = u / ref
    # evaluate() interpolates linearly between grid nodes: O(h^2) wobble
    assert np.allclose(ratio, ratio[0], rtol=1e-5)


def test_resonance_state_rejects_non_zero_point():
    # free potential: W = 2 i lam never vanishes away from 0
    with pytest.raises(ValueError, match="not a zero"):
        resonance_state(_free(), 1.0)


def test_residue_quadrature_limit():
    # (lam - lam0) <chi g, R(lam) chi g> -> i (int u g)^2 as lam -> lam0
    p = _well()
    beta, _ = _even_bound_beta()
    lam0 = 1j * beta
    xs = np.linspace(-WELL_HALF, WELL_HALF, 1201)
    g = np.exp(-3.0 * xs**2)
    state = resonance_state(p, lam0, n_grid=1200)
    ug = _trapz(state.u * g, xs)
    expect = 1j * ug * ug
    for direction in (1.0, -1.0, 1j, 0.5 + 0.5j):
        eps = 1e-5 * direction / abs(direction)
        lam = lam0 + eps
        K = resolvent_kernel(p, lam, xs, xs)
        quad = _trapz(_trapz(K * np.outer(g, g), xs, axis=1), xs)
        val = eps * quad
        assert abs(val - expect) < 5e-4 * abs(expect)


def test_free_resolvent_kernel_closed_form():
    p = _free()
    lam = 1.7 + 0.9j
    xs = np.linspace(-2.0, 2.0, 9)
    K = resolvent_kernel(p, lam, xs, xs)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    ref = (1j / (2 * lam)) * np.exp(1j * lam * np.abs(X - Y))
    assert np.allclose(K, ref, atol=1e-12)


def test_free_resolvent_at_single_point_anchor():
    # lam=1, x=0, x'=1 gives (i/2) e^{i}; lam=i gives e^{-|x-x'|}/2
    p = _free()
    K = resolvent_kernel(p, 1.0, np.array([0.0]), np.array([1.0]))
    assert K[0, 0] == pytest.approx(0.5j * cmath.exp(1j))
    K2 = resolvent_kernel(p, 1j, np.array([0.3]), np.array([-0.4]))
    assert K2[0, 0] == pytest.approx(0.5 * math.exp(-0.7))


def test_resolvent_kernel_symmetry():
    p = _well()
    lam = 0.9 + 1.1j
    xs = np.linspace(-1.7, 1.4, 7)
    ys = np.linspace(-1.2, 1.9, 6)
    K = resolvent_kernel(p, lam, xs, ys)
    K2 = resolvent_kernel(p, lam, ys, xs)
    assert np.allclose(K, K2.T, atol=1e-11)


def test_resolvent_near_pole_guard():
    p = _well()
    beta, _ = _even_bound_beta()
    with pytest.raises(ValueError, match="resonance"):
        resolvent_kernel(p, 1j * beta, np.array([0.0]), np.array([0.1]))


def test_resolvent_matches_sparse_bvp_solve():
    # independent route: solve (P - lam^2) u = g by a banded direct solve
    # with outgoing boundary conditions, compare with the kernel quadrature
    from scipy.linalg import solve_banded

    p = _well()
    lam = 2.0j
    n = 1601
    L = 4.0
    xs = np.linspace(-L, L, n)
    h = xs[1] - xs[0]
    g = np.exp(-4.0 * xs**2)
    v = p.evaluate(xs)

    ab = np.zeros((3, n), dtype=complex)
    rhs = g.astype(complex).copy()
    ab[0, 2:] = -1.0 / h**2
    ab[1, 1:-1] = 2.0 / h**2 + (v[1:-1] - lam**2)
    ab[2, :-2] = -1.0 / h**2
    # outgoing waves: u' = -i lam u on the left, u' = i lam u on the right,
    # second order via the centered ghost-point elimination
    ab[1, 0] = 2.0 / h**2 + (v[0] - lam**2) + (2.0 / h) * (-1j * lam)
    ab[0, 1] = -2.0 / h**2
    ab[1, -1] = 2.0 / h**2 + (v[-1] - lam**2) - (2.0 / h) * (1j * lam)
    ab[2, -2] = -2.0 / h**2
    u_fd = solve_banded((1, 1), ab, rhs)

    K = resolvent_kernel(p, lam, xs, xs)
    u_kernel = _trapz(K * g[None, :], xs, axis=1)
    # second-order FD truncation at the well jump dominates the residual
    assert np.max(np.abs(u_fd - u_kernel)) < 5e-3 * np.max(np.abs(u_kernel))


def test_hs_norm_free_real_momentum():
    # free kernel modulus is constant 1/(2 lam), so the HS norm is cutoff/lam
    p = _free()
    for lam, cut in ((5.0, 1.0), (12.0, 0.7)):
        got = cutoff_resolvent_hs_norm(p, lam, cut, n_grid=400)
        assert got == pytest.approx(cut / lam, rel=2e-3)


def test_hs_norm_free_complex_momentum():
    p = _free()
    lam = 3.0 + 1.0j
    cut = 1.0
    s = lam.imag
    # closed form of the double integral of e^{-2 s |x-y|} over the square
    hs2 = (1 / (2 * s)) * (2 * cut - (1 - math.exp(-4 * s * cut)) / (2 * s)) * 2
    ref = math.sqrt(hs2 / (4 * abs(lam) ** 2))
    got = cutoff_resolvent_hs_norm(p, lam, cut, n_grid=600)
    assert got == pytest.approx(ref, rel=2e-3)


def test_hs_norm_decays_on_imaginary_axis():
    p = _well()
    mus = [3.0, 6.0, 12.0, 24.0]
    vals = [cutoff_resolvent_hs_norm(p, 1j * mu, 1.0) for mu in mus]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_hs_norm_interval_cutoff_and_guards():
    p = _free()
    v1 = cutoff_resolvent_hs_norm(p, 4.0, 0.8)
    v2 = cutoff_resolvent_hs_norm(p, 4.0, (-0.8, 0.8))
    assert v1 == pytest.approx(v2, rel=1e-12)
    with pytest.raises(ValueError):
        cutoff_resolvent_hs_norm(p, 1.0, 0.0)
    with pytest.raises(ValueError):
        cutoff_resolvent_hs_norm(p, 1.0, (0.5, 0.5))
