"""One-dimensional scattering on the line for compactly supported potentials.

Everything is built on piecewise-constant (slab) approximations of the
potential: the transfer matrix across one slab has entries even in the
local momentum, so the propagation is branch-free and entire in the
spectral parameter.  Resonances are zeros of a Wronskian of outgoing
Jost solutions, continued to the lower half-plane by the same formulas.

Conventions: f_plus(x) = e^{i lam x} for x >= x_max and
f_minus(x) = -e^{-i lam x} for x <= x_min.  The free Wronskian
W(f_plus, f_minus) = f_plus f_minus' - f_plus' f_minus equals 2 i lam,
and the resolvent kernel in the free case is (i / 2 lam) e^{i lam |x - y|}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .potential import ModeProfile, to_steps
from .zeros import Rect, locate_zeros_with_retries

_trapz = getattr(np, "trapezoid", None) or getattr(np, "trapz")

# below this |mu w|^2 the cos and sin(t)/t series are exact to double precision
_SERIES_CUT = 1e-4
_NEAR_POLE_TOL = 1e-12


def _cos_sinc(t2: complex):
    """cos(sqrt(t2)) and sin(sqrt(t2))/sqrt(t2) as entire functions of t2."""
    if abs(t2) < _SERIES_CUT:
        c = 1 - t2 / 2 * (1 - t2 / 12 * (1 - t2 / 30))
        s = 1 - t2 / 6 * (1 - t2 / 20 * (1 - t2 / 42))
        return c, s
    mu = cmath.sqrt(t2)
    return cmath.cos(mu), cmath.sin(mu) / mu


def _slab_matrix(lam: complex, v: complex, width: float) -> np.ndarray:
    """Propagator of (u, u') across one constant slab of u'' = (v - lam^2) u."""
    if width < 0:
        raise ValueError("slab width must be nonnegative")
    mu2 = lam * lam - v
    t2 = mu2 * width * width
    c, s = _cos_sinc(t2)
    sw = s * width
    return np.array([[c, sw], [-mu2 * sw, c]], dtype=complex)


def _inv_unimodular(T: np.ndarray) -> np.ndarray:
    return np.array([[T[1, 1], -T[0, 1]], [-T[1, 0], T[0, 0]]], dtype=complex)


def transfer_matrix(lam: complex, pot: ModeProfile) -> np.ndarray:
    """Exact propagator of (u, u') from x_min to x_max of a step profile.

    Product of closed-form per-slab matrices; entries are even in the
    slab momenta, hence entire in lam.  det = 1 (Wronskian preservation).
    """
    if pot.kind != "step":
        raise ValueError("transfer_matrix expects a step profile; use to_steps first")
    T = np.eye(2, dtype=complex)
    widths = np.diff(pot.breakpoints)
    for v, w in zip(pot.values, widths):
        T = _slab_matrix(lam, v, w) @ T
    return T


@dataclass(frozen=True)
class JostData:
    """Wronskian and boundary data of the outgoing Jost pair at one momentum."""

    lam: complex
    W: complex
    f_plus_left: tuple[complex, complex]
    f_plus_right: tuple[complex, complex]
    f_minus_left: tuple[complex, complex]
    f_minus_right: tuple[complex, complex]


def jost_data(pot: ModeProfile, lam: complex, n_steps: int = 256) -> JostData:
    """Boundary values/derivatives of f_plus and f_minus and their Wronskian."""
    stepped = to_steps(pot, n_steps)
    T = transfer_matrix(lam, stepped)
    a, b = pot.x_min, pot.x_max
    up_r = cmath.exp(1j * lam * b)
    plus_right = np.array([up_r, 1j * lam * up_r], dtype=complex)
    plus_left = _inv_unimodular(T) @ plus_right
    um_l = -cmath.exp(-1j * lam * a)
    minus_left = np.array([um_l, -1j * lam * um_l], dtype=complex)
    minus_right = T @ minus_left
    W = plus_left[0] * minus_left[1] - plus_left[1] * minus_left[0]
    return JostData(lam, W,
                    (plus_left[0], plus_left[1]), (plus_right[0], plus_right[1]),
                    (minus_left[0], minus_left[1]), (minus_right[0], minus_right[1]))


def jost_wronskian(lam: complex, pot: ModeProfile, n_steps: int = 256) -> complex:
    """Wronskian of the outgoing Jost solutions; entire, zeros = resonances.

    Normalized so the free case gives W(lam) = 2 i lam.
    """
    return jost_data(pot, lam, n_steps).W


def find_resonances_1d(pot: ModeProfile, rect: Rect, tol: float = 1e-10,
                       n_steps: int = 256, max_evals: int = 400_000):
    """All zeros of the Jost Wronskian in rect as (lam, multiplicity) pairs."""
    f = lambda lam: jost_wronskian(lam, pot, n_steps)
    rep = locate_zeros_with_retries(f, rect, tol, max_evals=max_evals)
    return [(z, m) for z, m, _ in rep.zeros]


@dataclass(frozen=True)
class ResonanceState:
    """Resonance state u at a simple Wronskian zero, residue-normalized.

    Inside the support u is sampled on `grid`; outside it continues as
    u = c_plus e^{i lam0 x} (x >= x_max) and c_minus e^{-i lam0 x}
    (x <= x_min).  The normalization pins the continued resolvent's
    residue: R(lam) - i u(x) u(y) / (lam - lam0) is analytic at lam0;
    only u^2 is convention-free (the sign of u is not).
    """

    lam0: complex
    grid: np.ndarray
    u: np.ndarray
    c_plus: complex
    c_minus: complex

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo = self.grid[0]
        hi = self.grid[-1]
        re = np.interp(x, self.grid, self.u.real)
        im = np.interp(x, self.grid, self.u.imag)
        out = re + 1j * im
        left = x < lo
        right = x > hi
        if left.any():
            out = np.where(left, self.c_minus * np.exp(-1j * self.lam0 * x), out)
        if right.any():
            out = np.where(right, self.c_plus * np.exp(1j * self.lam0 * x), out)
        return out


def resonance_state(pot: ModeProfile, lam0: complex, n_steps: int = 256,
                    n_grid: int = 1024, dh: float = 1e-4) -> ResonanceState:
    """Residue-normalized state u = s f_plus at a simple Wronskian zero lam0.

    s^2 = 1 / (i c W'(lam0)) with c the proportionality f_plus = c f_minus
    holding at the zero; W' by a five-point central stencil.
    """
    data = jost_data(pot, lam0, n_steps)
    if abs(data.W) > 1e-6 * max(1.0, abs(lam0)):
        raise ValueError("lam0 is not a zero of the Wronskian within tolerance")
    c = data.f_plus_left[0] / data.f_minus_left[0]
    W = lambda l: jost_wronskian(l, pot, n_steps)
    h = dh
    wp = (-W(lam0 + 2 * h) + 8 * W(lam0 + h) - 8 * W(lam0 - h) + W(lam0 - 2 * h)) / (12 * h)
    if abs(wp) < 1e-8 * max(1.0, abs(lam0)):
        raise ValueError("Wronskian zero is not simple within tolerance")
    s = cmath.sqrt(1.0 / (1j * c * wp))
    xs = np.linspace(pot.x_min, pot.x_max, n_grid + 1)
    vals = s * _propagate_on_grid(pot, lam0, xs, seed="plus", n_steps=n_steps)
    c_plus = s
    c_minus = -s * c
    return ResonanceState(lam0, xs, vals, c_plus, c_minus)


def _propagate_on_grid(pot: ModeProfile, lam: complex, xs: np.ndarray,
                       seed: str, n_steps: int = 256) -> np.ndarray:
    """Values of f_plus or f_minus on xs (plane waves outside the support)."""
    stepped = to_steps(pot, n_steps)
    vals = np.asarray(stepped.values, dtype=complex)
    widths = np.diff(stepped.breakpoints)
    edges = np.asarray(stepped.breakpoints, dtype=float)
    a, b = pot.x_min, pot.x_max

    exterior_cache: dict[str, tuple] = {}

    def exterior(x: float, side: str) -> complex:
        # continue the solution past the support as free waves
        if side not in exterior_cache:
            if seed == "plus":
                data = jost_data(pot, lam, n_steps)
                vec, edge = np.array(data.f_plus_left, dtype=complex), a
            else:
                um = -cmath.exp(-1j * lam * a)
                s0 = np.array([um, -1j * lam * um], dtype=complex)
                vec, edge = transfer_matrix(lam, stepped) @ s0, b
            exterior_cache[side] = (complex(vec[0]), complex(vec[1]), edge)
        u, up, edge = exterior_cache[side]
        if lam == 0:
            return u + up * (x - edge)
        e = cmath.exp(1j * lam * edge)
        A = (u + up / (1j * lam)) / (2 * e)
        B = (u - up / (1j * lam)) * e / 2
        return A * cmath.exp(1j * lam * x) + B * cmath.exp(-1j * lam * x)

    out = np.empty(xs.shape, dtype=complex)
    order = np.argsort(xs)

    # sweep each solution in its dominant direction so the recessive
    # component never contaminates: f_minus left-to-right, f_plus
    # right-to-left (inverse slab transfers)
    if seed == "minus":
        um = -cmath.exp(-1j * lam * a)
        cur = np.array([um, -1j * lam * um], dtype=complex)
        xi = 0
        cur_left = edges[0]
        for idx in order:
            x = xs[idx]
            if x <= a:
                out[idx] = -cmath.exp(-1j * lam * x)
                continue
            if x >= b:
                out[idx] = exterior(x, "right")
                continue
            while xi < len(vals) and x > edges[xi + 1] + 1e-15:
                cur = _slab_matrix(lam, vals[xi], widths[xi]) @ cur
                cur_left = edges[xi + 1]
                xi += 1
            T = _slab_matrix(lam, vals[min(xi, len(vals) - 1)],
                             max(0.0, x - cur_left))
            out[idx] = (T @ cur)[0]
        return out

    ub = cmath.exp(1j * lam * b)
    cur = np.array([ub, 1j * lam * ub], dtype=complex)
    xi = len(vals) - 1
    cur_right = edges[-1]
    for idx in order[::-1]:
        x = xs[idx]
        if x >= b:
            out[idx] = cmath.exp(1j * lam * x)
            continue
        if x <= a:
            out[idx] = exterior(x, "left")
            continue
        while xi >= 0 and x < edges[xi] - 1e-15:
            cur = _inv_unimodular(_slab_matrix(lam, vals[xi], widths[xi])) @ cur
            cur_right = edges[xi]
            xi -= 1
        T = _inv_unimodular(_slab_matrix(lam, vals[max(xi, 0)],
                                         max(0.0, cur_right - x)))
        out[idx] = (T @ cur)[0]
    return out


def resolvent_kernel(pot: ModeProfile, lam: complex, xs: np.ndarray,
                     ys: np.ndarray, n_steps: int = 256) -> np.ndarray:
    """Integral kernel of the continued resolvent of -d^2/dx^2 + V.

    K(x, y) = f_minus(x_<) f_plus(x_>) / W, fixed so the free case is
    (i / 2 lam) e^{i lam |x - y|}.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    W = jost_wronskian(lam, pot, n_steps)
    if abs(W) < _NEAR_POLE_TOL * max(1.0, abs(lam)):
        raise ValueError("resolvent evaluated too close to a resonance")
    fx_plus = _propagate_on_grid(pot, lam, xs, "plus", n_steps)
    fx_minus = _propagate_on_grid(pot, lam, xs, "minus", n_steps)
    fy_plus = _propagate_on_grid(pot, lam, ys, "plus", n_steps)
    fy_minus = _propagate_on_grid(pot, lam, ys, "minus", n_steps)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    K = np.where(X <= Y,
                 np.outer(fx_minus, fy_plus),
                 np.outer(fx_plus, fy_minus))
    return K / W


def cutoff_resolvent_hs_norm(pot: ModeProfile, lam: complex, chi,
                             n_grid: int = 200, n_steps: int = 256) -> float:
    """Hilbert-Schmidt norm of the kernel restricted to chi x chi.

    chi is either a half-width (interval [-chi, chi]) or an (lo, hi) pair;
    2-D composite trapezoid on an n_grid+1 point grid.
    """
    if np.isscalar(chi):
        if chi <= 0:
            raise ValueError("cutoff half-width must be positive")
        lo, hi = -float(chi), float(chi)
    else:
        lo, hi = map(float, chi)
        if not lo < hi:
            raise ValueError("cutoff interval is empty")
    xs = np.linspace(lo, hi, n_grid + 1)
    K = resolvent_kernel(pot, lam, xs, xs, n_steps)
    row = _trapz(np.abs(K) ** 2, xs, axis=1)
    return math.sqrt(float(_trapz(row, xs)))
