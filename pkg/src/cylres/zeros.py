"""Zero location for analytic functions by the argument principle.

Derivative-free winding numbers via phase continuation along contours,
quadtree subdivision of rectangles, and Newton (fallback Muller)
refinement of isolated zeros.  Zeros closer together than the requested
tolerance are reported as one location carrying the cell's winding as
its multiplicity.

All routines are deterministic: subdivision order is fixed, contour
perturbations draw from a fixed-seed generator, and reports are sorted.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# phase continuation accepts a step only when the increment is provably
# unambiguous; pi/2 leaves a factor-of-two safety margin
_PHASE_LIMIT = math.pi / 2
# a full 2 pi wrap between samples aliases to a small phase step; for the
# determinants walked here such wraps ride on large magnitude swings, so a
# magnitude-ratio cap forces refinement where aliasing could hide
_MAG_LIMIT = 1.2
_SPLIT_DEPTH = 48
_DEFAULT_SEED = 20210914


class ContourError(RuntimeError):
    """The contour walk could not certify a nonvanishing f on the path."""


class _BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Rect:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate rectangle")

    @classmethod
    def from_center(cls, center: complex, half_width: float, half_height: float | None = None):
        hh = half_width if half_height is None else half_height
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width, c.imag - hh, c.imag + hh)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> list[complex]:
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.re_min - margin < z.real < self.re_max + margin
                and self.im_min - margin < z.imag < self.im_max + margin)

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list["Rect"]:
        xm = self.re_min + fx * self.width
        ym = self.im_min + fy * self.height
        return [Rect(self.re_min, xm, self.im_min, ym),
                Rect(xm, self.re_max, self.im_min, ym),
                Rect(self.re_min, xm, ym, self.im_max),
                Rect(xm, self.re_max, ym, self.im_max)]

    def scaled(self, factor: float, offset: complex = 0.0) -> "Rect":
        c, o = self.center + complex(offset), complex(offset)
        hw, hh = 0.5 * self.width * factor, 0.5 * self.height * factor
        return Rect(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)


@dataclass
class ZeroReport:
    zeros: list[tuple[complex, int, float]]
    total_winding: int
    depth: int
    evaluations: int
    incomplete: bool = False


class _Evaluator:
    """Caching, counting wrapper so contour edges shared between cells reuse values."""

    def __init__(self, f, budget: int):
        self.f = f
        self.budget = budget
        self.cache: dict[complex, complex] = {}
        self.count = 0

    def __call__(self, z: complex) -> complex:
        w = self.cache.get(z)
        if w is None:
            if self.count >= self.budget:
                raise _BudgetExceeded
            self.count += 1
            w = complex(self.f(z))
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ContourError(f"non-finite value at {z}")
            self.cache[z] = w
        if w == 0:
            raise ContourError(f"exact zero on contour at {z}")
        return w

    def probe(self, z: complex) -> complex:
        """Evaluate without the zero-on-contour trap (for refinement)."""
        w = self.cache.get(z)
        if w is None:
            if self.count >= self.budget:
                raise _BudgetExceeded
            self.count += 1
            w = complex(self.f(z))
            self.cache[z] = w
        return w


def _walk(ev, path_fn, n0: int, want_moment: bool):
    """Phase continuation along a closed path gamma(t), t in [0, 1].

    Returns (total phase, first log-derivative moment).  A step is taken
    only when arg f moves by less than pi/2 AND log|f| by less than
    _MAG_LIMIT, and every candidate step is verified against a midpoint
    probe: in cancellation valleys the phase can wrap a full turn between
    endpoints that look quiet, and only the half-step comparison exposes
    the missing 2 pi.  Inconsistent or fast segments are bisected in t,
    which also keeps shared-edge midpoints exact.
    """
    ts = [k / n0 for k in range(n0 + 1)]
    total = 0.0
    moment = 0.0 + 0.0j

    def accept(za, zb, wa, wb, d, dmag):
        nonlocal total, moment
        total += d
        if want_moment:
            moment += 0.5 * (za + zb) * (dmag + 1j * d)

    def segment(ta, tb, za, zb, wa, wb, depth):
        ratio = wb / wa
        d = cmath.phase(ratio)
        dmag = math.log(abs(ratio))
        needs_split = not (abs(d) < _PHASE_LIMIT and abs(dmag) < _MAG_LIMIT)
        tm = 0.5 * (ta + tb)
        zm = path_fn(tm)
        wm = None
        if not needs_split:
            wm = ev(zm)
            d1 = cmath.phase(wm / wa)
            d2 = cmath.phase(wb / wm)
            if abs(d1) < _PHASE_LIMIT and abs(d2) < _PHASE_LIMIT \
                    and abs(d1 + d2 - d) < math.pi:
                accept(za, zm, wa, wm, d1, math.log(abs(wm / wa)))
                accept(zm, zb, wm, wb, d2, math.log(abs(wb / wm)))
                return
        if depth <= 0:
            raise ContourError(f"phase step stuck near {0.5 * (za + zb)}")
        if wm is None:
            wm = ev(zm)
        segment(ta, tm, za, zm, wa, wm, depth - 1)
        segment(tm, tb, zm, zb, wm, wb, depth - 1)

    zs = [path_fn(t) for t in ts]
    ws = [ev(z) for z in zs]
    for i in range(n0):
        segment(ts[i], ts[i + 1], zs[i], zs[i + 1], ws[i], ws[i + 1], _SPLIT_DEPTH)
    return total, moment


def _rect_path(rect: Rect):
    c = rect.corners()

    def gamma(t: float) -> complex:
        s = 4.0 * (t % 1.0)
        i = min(int(s), 3)
        frac = s - i
        a, b = c[i], c[(i + 1) % 4]
        return a + (b - a) * frac

    return gamma


def _winding_from_total(total: float) -> int:
    w = total / (2 * math.pi)
    iw = round(w)
    if abs(w - iw) > 0.25:
        raise ContourError(f"phase sum {w:.3f} not near an integer")
    return iw


def _rect_winding(ev, rect: Rect, n0: int = 8, want_moment: bool = False):
    total, moment = _walk(ev, _rect_path(rect), 4 * n0, want_moment)
    return _winding_from_total(total), moment / (2j * math.pi)


def winding_count(f, rect: Rect, max_step: float | None = None) -> int:
    """Winding number of f along the rectangle boundary (counterclockwise)."""
    ev = f if isinstance(f, _Evaluator) else _Evaluator(f, 10**9)
    per_edge = 8
    if max_step is not None:
        per_edge = max(2, math.ceil(max(rect.width, rect.height) / max_step))
    w, _ = _rect_winding(ev, rect, n0=per_edge)
    return w


def winding_count_circle(f, center: complex, radius: float,
                         max_step: float | None = None) -> int:
    """Winding number of f along a circle; points stay on the circle."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    ev = f if isinstance(f, _Evaluator) else _Evaluator(f, 10**9)
    n0 = 16
    if max_step is not None:
        n0 = max(8, math.ceil(2 * math.pi * radius / max_step))
    c = complex(center)

    def gamma(t: float) -> complex:
        return c + radius * cmath.exp(2j * math.pi * t)

    total, _ = _walk(ev, gamma, n0, want_moment=False)
    return _winding_from_total(total)


def winding_count_with_retries(f, center: complex, radius: float,
                               retries: int = 5, seed: int = _DEFAULT_SEED) -> int:
    """Circle winding with the standard perturbation policy on contour hits."""
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(retries + 1):
        r = radius if attempt == 0 else radius * (1 + 1e-3 * (rng.random() - 0.5))
        try:
            return winding_count_circle(f, center, r)
        except ContourError as exc:
            last = exc
    raise ContourError(f"circle contour kept hitting zeros after {retries} retries") from last


# -- refinement ------------------------------------------------------


def _newton(ev, z0: complex, mult: int, cell: Rect, tol: float):
    z = complex(z0)
    scale = max(cell.diameter, abs(z0), 1.0)
    best_z, best_f = z, abs(ev.probe(z))
    stall = 0
    for _ in range(60):
        h = max(1e-7 * cell.diameter, 1e-9 * abs(z), 1e-13)
        fz = ev.probe(z)
        fp = (ev.probe(z + h) - ev.probe(z - h)) / (2 * h)
        if fp == 0:
            break
        step = mult * fz / fp
        z = z - step
        az = abs(ev.probe(z))
        if az < best_f:
            best_z, best_f = z, az
            stall = 0
        else:
            stall += 1
            if stall >= 5:
                break
        if abs(step) < 1e-3 * tol:
            return z, abs(ev.probe(z))
    return best_z, best_f


def _muller(ev, z0: complex, cell: Rect, tol: float):
    d = max(0.01 * cell.diameter, 1e-10)
    xs = [z0 - d, z0 + d, z0]
    fs = [ev.probe(x) for x in xs]
    best_z, best_f = min(zip(xs, fs), key=lambda p: abs(p[1]))
    best_f = abs(best_f)
    for _ in range(80):
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        h0, h1 = x1 - x0, x2 - x1
        if h0 == 0 or h1 == 0 or h0 + h1 == 0:
            break
        d0 = (f1 - f0) / h0
        d1 = (f2 - f1) / h1
        a = (d1 - d0) / (h1 + h0)
        b = a * h1 + d1
        disc = cmath.sqrt(b * b - 4 * f2 * a)
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0:
            break
        step = -2 * f2 / den
        x3 = x2 + step
        f3 = ev.probe(x3)
        xs = [x1, x2, x3]
        fs = [f1, f2, f3]
        if abs(f3) < best_f:
            best_z, best_f = x3, abs(f3)
        if abs(step) < 1e-3 * tol and abs(f3) <= best_f:
            break
    return best_z, best_f


def _refine(ev, seed_z: complex, mult: int, cell: Rect, tol: float):
    z, fz = _newton(ev, seed_z, mult, cell, tol)
    if not cell.contains(z, margin=2 * cell.diameter):
        z, fz = seed_z, abs(ev.probe(seed_z))
    zm, fm = _muller(ev, z, cell, tol)
    if fm < fz and cell.contains(zm, margin=2 * cell.diameter):
        return zm, fm
    return z, fz


def _dedupe(hits: list[tuple[complex, int, float]], tol: float):
    """Merge reported zeros closer than tol; multiplicities add."""
    merged: list[tuple[complex, int, float]] = []
    for z, m, r in hits:
        for i, (zi, mi, ri) in enumerate(merged):
            if abs(z - zi) < tol:
                best = (z, r) if r < ri else (zi, ri)
                merged[i] = (best[0], mi + m, best[1])
                break
        else:
            merged.append((z, m, r))
    return merged


# -- the subdivision engine ------------------------------------------


def locate_zeros(f, rect: Rect, tol: float, max_evals: int = 400_000,
                 seed: int = _DEFAULT_SEED) -> ZeroReport:
    """All zeros of f in rect, with multiplicities, by adaptive subdivision.

    Cells are split until their winding is at most 1 or their diameter
    falls below 10 tol; winding-1 cells are polished by Newton with a
    Muller fallback.  Raises ContourError when the outer boundary cannot
    be certified zero-free (the caller should perturb the rectangle).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ev = _Evaluator(f, max_evals)
    rng = np.random.default_rng(seed)
    found: list[tuple[complex, int, float]] = []
    state = {"depth": 0, "incomplete": False}

    try:
        outer_w, outer_m = _rect_winding(ev, rect, want_moment=True)
    except _BudgetExceeded:
        return ZeroReport(zeros=[], total_winding=0, depth=0,
                          evaluations=ev.count, incomplete=True)

    def handle(cell: Rect, w: int, moment: complex, depth: int):
        state["depth"] = max(state["depth"], depth)
        if w == 0:
            return
        seed_z = moment / w if w != 0 else cell.center
        if not cell.contains(seed_z, margin=0.1 * cell.diameter):
            seed_z = cell.center
        if w == 1 or cell.diameter < 10 * tol:
            z, res = _refine(ev, seed_z, w, cell, tol)
            # a polish step that escapes its cell has latched onto a
            # neighbouring zero; shrink the cell until the seed is trustworthy
            if not cell.contains(z, margin=5 * tol) and cell.diameter >= 10 * tol:
                descend(cell, depth + 1)
                return
            found.append((z, w, res))
            return
        descend(cell, depth + 1)

    def descend(cell: Rect, depth: int):
        for attempt in range(9):
            if attempt == 0:
                fx = fy = 0.5
            else:
                fx = 0.45 + 0.1 * rng.random()
                fy = 0.45 + 0.1 * rng.random()
            children = cell.split(fx, fy)
            try:
                results = []
                for child in children:
                    w, m = _rect_winding(ev, child, want_moment=True)
                    results.append((child, w, m))
            except ContourError:
                continue
            for child, w, m in results:
                handle(child, w, m, depth)
            return
        raise ContourError(f"could not split {cell} without hitting a zero")

    try:
        handle(rect, outer_w, outer_m, 0)
    except _BudgetExceeded:
        state["incomplete"] = True

    found = _dedupe(found, tol)
    found.sort(key=lambda t: (t[0].real, t[0].imag))
    total_mult = sum(m for _, m, _ in found)
    incomplete = state["incomplete"] or (total_mult != outer_w)
    return ZeroReport(zeros=found, total_winding=outer_w, depth=state["depth"],
                      evaluations=ev.count, incomplete=incomplete)


def locate_zeros_with_retries(f, rect: Rect, tol: float, retries: int = 5,
                              seed: int = _DEFAULT_SEED, **kwargs) -> ZeroReport:
    """locate_zeros with the standard fixed-seed contour perturbation policy."""
    rng = np.random.default_rng(seed)
    last: Exception | None = None
    for attempt in range(retries + 1):
        if attempt == 0:
            attempt_rect = rect
        else:
            dx = 1e-3 * rect.width * (rng.random() - 0.5)
            dy = 1e-3 * rect.height * (rng.random() - 0.5)
            attempt_rect = rect.scaled(1.0 + 1e-3 * rng.random(), complex(dx, dy))
        try:
            return locate_zeros(f, attempt_rect, tol, seed=seed, **kwargs)
        except ContourError as exc:
            last = exc
    raise ContourError(f"contour kept hitting zeros after {retries} perturbations") from last
