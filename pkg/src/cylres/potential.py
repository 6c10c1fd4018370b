"""Angular-mode representation of cylinder potentials.

A potential V(x, theta) on R x S^1 with compact support in x is stored
through its angular Fourier coefficients V_m(x).  Each coefficient is a
ModeProfile: complex samples on a uniform x-grid over the support,
optionally backed by an exact piecewise-constant (step) description that
the propagation code consumes.  A CylinderPotential is a finite family
of such modes sharing one support interval.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

_ENDPOINT_TOL = 1e-9


def _as_complex_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise ValueError("profile samples must be one-dimensional")
    return arr


@dataclass(frozen=True)
class ModeProfile:
    """One angular Fourier coefficient V_m(x) on a uniform grid.

    kind "smooth": samples on n+1 grid points spanning [x_min, x_max],
    vanishing at both endpoints so the profile extends by zero.
    kind "step": additionally carries strictly increasing breakpoints and
    one constant value per interval; the sample view is derived.
    """

    x_min: float
    x_max: float
    samples: np.ndarray
    kind: str = "smooth"
    breakpoints: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("empty support interval")
        samples = _as_complex_array(self.samples)
        if samples.size < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("profile samples must be finite")
        object.__setattr__(self, "samples", samples)
        if self.kind == "smooth":
            scale = 1.0 + float(np.max(np.abs(samples)))
            if abs(samples[0]) > _ENDPOINT_TOL * scale or abs(samples[-1]) > _ENDPOINT_TOL * scale:
                raise ValueError("smooth profiles must vanish at the support endpoints")
        elif self.kind == "step":
            if self.breakpoints is None or self.values is None:
                raise ValueError("step profiles need breakpoints and values")
            bp = np.asarray(self.breakpoints, dtype=float)
            vals = _as_complex_array(self.values)
            if bp.ndim != 1 or bp.size != vals.size + 1:
                raise ValueError("breakpoints must bracket the values")
            if np.any(np.diff(bp) <= 0):
                raise ValueError("breakpoints must be strictly increasing")
            if abs(bp[0] - self.x_min) > 1e-12 or abs(bp[-1] - self.x_max) > 1e-12:
                raise ValueError("breakpoints must span the support")
            object.__setattr__(self, "breakpoints", bp)
            object.__setattr__(self, "values", vals)
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")

    # -- grid helpers -------------------------------------------------

    @property
    def n(self) -> int:
        return self.samples.size - 1

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.samples.size)

    def evaluate(self, x) -> np.ndarray:
        """Pointwise values; zero outside the support.

        Smooth profiles interpolate linearly between grid points, step
        profiles look up the containing interval exactly.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            idx = np.searchsorted(self.breakpoints, x, side="right") - 1
            idx = np.clip(idx, 0, self.values.size - 1)
            out = self.values[idx]
            inside = (x >= self.x_min) & (x <= self.x_max)
            return np.where(inside, out, 0.0 + 0.0j)
        re = np.interp(x, self.grid, self.samples.real, left=0.0, right=0.0)
        im = np.interp(x, self.grid, self.samples.imag, left=0.0, right=0.0)
        return re + 1j * im

    def inf_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def l2_norm_sq(self) -> float:
        return float(_trapz(np.abs(self.samples) ** 2, dx=self.h))

    def derivative(self) -> "ModeProfile":
        """d/dx by centered differences, second-order one-sided at the edges."""
        if self.kind == "step":
            raise ValueError("step profiles have no grid derivative")
        f, h = self.samples, self.h
        d = np.empty_like(f)
        d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
        d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
        return ModeProfile(self.x_min, self.x_max, d, kind="smooth") if _vanishes(d) else \
            ModeProfile(self.x_min, self.x_max, _pin_ends(d), kind="smooth")

    def conjugate(self) -> "ModeProfile":
        if self.kind == "step":
            return ModeProfile(self.x_min, self.x_max, np.conj(self.samples),
                               kind="step", breakpoints=self.breakpoints,
                               values=np.conj(self.values))
        return ModeProfile(self.x_min, self.x_max, np.conj(self.samples))

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.samples)) <= tol)


def _vanishes(arr) -> bool:
    scale = 1.0 + float(np.max(np.abs(arr)))
    return abs(arr[0]) <= _ENDPOINT_TOL * scale and abs(arr[-1]) <= _ENDPOINT_TOL * scale


def _pin_ends(arr):
    # one-sided difference stencils need not vanish exactly at a support
    # edge where the profile itself does; clamp the representation there
    out = arr.copy()
    out[0] = 0.0
    out[-1] = 0.0
    return out


# numpy 2 renamed trapz
_trapz = getattr(np, "trapezoid", None) or getattr(np, "trapz")


def zero_profile(x_min: float, x_max: float, n: int = 64) -> ModeProfile:
    return ModeProfile(x_min, x_max, np.zeros(n + 1, dtype=complex))


def step_profile(breakpoints, values) -> ModeProfile:
    """Piecewise-constant profile from interval edges and per-interval values."""
    bp = np.asarray(breakpoints, dtype=float)
    vals = _as_complex_array(values)
    grid_n = max(vals.size, 2)
    xs = np.linspace(bp[0], bp[-1], grid_n + 1)
    idx = np.clip(np.searchsorted(bp, xs, side="right") - 1, 0, vals.size - 1)
    samples = vals[idx]
    return ModeProfile(float(bp[0]), float(bp[-1]), samples, kind="step",
                       breakpoints=bp, values=vals)


@dataclass(frozen=True)
class CylinderPotential:
    """Finite mode family {V_m : |m| <= max_mode} on one support interval."""

    modes: Mapping[int, ModeProfile]
    max_mode: int
    real: bool = False

    def __post_init__(self):
        if self.max_mode < 0:
            raise ValueError("max_mode must be >= 0")
        modes = dict(self.modes)
        if not modes:
            raise ValueError("potential needs at least one mode")
        sup = None
        for m, prof in modes.items():
            if abs(m) > self.max_mode:
                raise ValueError(f"mode {m} exceeds max_mode {self.max_mode}")
            if sup is None:
                sup = (prof.x_min, prof.x_max)
            elif abs(prof.x_min - sup[0]) > 1e-12 or abs(prof.x_max - sup[1]) > 1e-12:
                raise ValueError("all modes must share one support interval")
        if self.real:
            for m, prof in modes.items():
                other = modes.get(-m)
                tol = 1e-12 * (1.0 + prof.inf_norm())
                if other is None:
                    if prof.inf_norm() > tol:
                        raise ValueError(f"real potential needs mode {-m} conjugate to mode {m}")
                    continue
                if prof.samples.size == other.samples.size and \
                        np.max(np.abs(other.samples - np.conj(prof.samples))) > tol:
                    raise ValueError("realness flag violated: V_{-m} != conj(V_m)")
        object.__setattr__(self, "modes", modes)

    @property
    def support(self) -> tuple[float, float]:
        prof = next(iter(self.modes.values()))
        return (prof.x_min, prof.x_max)

    def mode(self, m: int) -> ModeProfile:
        """V_m, or the zero profile when the mode is absent."""
        prof = self.modes.get(m)
        if prof is not None:
            return prof
        x_min, x_max = self.support
        n = next(iter(self.modes.values())).n
        return zero_profile(x_min, x_max, n)

    def oscillatory_modes(self) -> dict[int, ModeProfile]:
        """The nonzero-m part (the theta-average removed)."""
        return {m: p for m, p in self.modes.items() if m != 0}


# -- operations ------------------------------------------------------


def fourier_mode(theta_samples, m: int, x_min: float, x_max: float,
                 kind: str = "smooth") -> ModeProfile:
    """Extract V_m(x) = (1/2pi) integral of V(x,.) e^{-im theta} d theta.

    theta_samples has one row per x node (grid points for kind "smooth",
    slab values for kind "step") over a uniform theta grid on [0, 2pi).
    The periodic trapezoid rule used here is exact for trigonometric
    polynomials of degree below (grid size - |m|).
    """
    arr = np.asarray(theta_samples, dtype=complex)
    if arr.ndim != 2:
        raise ValueError("theta_samples must be a 2-d array (x rows, theta columns)")
    n_theta = arr.shape[1]
    if n_theta < 4 * abs(m) + 4:
        raise ValueError(
            f"theta grid too coarse for mode {m}: need >= {4 * abs(m) + 4} points, got {n_theta}")
    theta = np.arange(n_theta) * (2 * np.pi / n_theta)
    weights = np.exp(-1j * m * theta) / n_theta
    coeffs = arr @ weights
    if kind == "step":
        breakpoints = np.linspace(x_min, x_max, coeffs.size + 1)
        return step_profile(breakpoints, coeffs)
    return ModeProfile(x_min, x_max, coeffs)


def average_v0(P: CylinderPotential) -> ModeProfile:
    """The theta-average: exactly the m=0 mode."""
    return P.mode(0)


def mode_decay_exponent(P: CylinderPotential) -> tuple[float, float]:
    """Least-squares fit of log sup|V_m| against -delta log m.

    Diagnostic only.  Returns (delta_hat, C); delta_hat is +inf when
    fewer than two distinct nonzero |m| norms exist.
    """
    if P.max_mode < 2:
        raise ValueError("need max_mode >= 2 to fit a decay exponent")
    by_abs_m: dict[int, float] = {}
    for m, prof in P.modes.items():
        if m == 0:
            continue
        nrm = prof.inf_norm()
        if nrm > 0:
            by_abs_m[abs(m)] = max(by_abs_m.get(abs(m), 0.0), nrm)
    if len(by_abs_m) < 2:
        return (math.inf, math.nan)
    ms = np.array(sorted(by_abs_m), dtype=float)
    norms = np.array([by_abs_m[int(m)] for m in ms])
    slope, intercept = np.polyfit(np.log(ms), np.log(norms), 1)
    return (-float(slope), float(np.exp(intercept)))


def to_steps(p: ModeProfile, n_steps: int) -> ModeProfile:
    """Midpoint-sampled piecewise-constant view on n_steps equal slabs.

    Step inputs pass through exactly whenever no new slab straddles an
    old breakpoint (in particular when the old slab count divides n_steps).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if p.kind == "step" and p.values.size == n_steps:
        uniform = np.linspace(p.x_min, p.x_max, n_steps + 1)
        if np.allclose(p.breakpoints, uniform, rtol=0.0, atol=1e-12):
            return p
    edges = np.linspace(p.x_min, p.x_max, n_steps + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return step_profile(edges, p.evaluate(mids))


# -- loading and builtins --------------------------------------------


def load_potential(source) -> CylinderPotential:
    """Build a CylinderPotential from a JSON document.

    Accepts a dict, a JSON string, or a path to a JSON file with schema
    {"support": [a0, a1], "grid_n": N,
     "modes": [{"m": k, "re": [...], "im": [...]}, ...], "real": bool}.
    """
    if isinstance(source, Path):
        doc = json.loads(source.read_text())
    elif isinstance(source, str):
        stripped = source.lstrip()
        if stripped.startswith("{"):
            doc = json.loads(source)
        else:
            doc = json.loads(Path(source).read_text())
    else:
        doc = source
    a0, a1 = (float(v) for v in doc["support"])
    grid_n = int(doc["grid_n"])
    modes = {}
    for entry in doc["modes"]:
        m = int(entry["m"])
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        if re.size != grid_n + 1 or im.size != grid_n + 1:
            raise ValueError(f"mode {m}: expected {grid_n + 1} samples")
        modes[m] = ModeProfile(a0, a1, re + 1j * im)
    max_mode = max(abs(m) for m in modes)
    return CylinderPotential(modes, max_mode, real=bool(doc.get("real", False)))


def smooth_bump(x) -> np.ndarray:
    """C-infinity bump on (-1, 1), equal to 1 at x = 0 and 0 outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        t = x[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t * t))
    return out


def example10() -> CylinderPotential:
    """V(x, theta) = 2 chi_[-1,1](x) cos theta: one step slab per mode."""
    chi = step_profile([-1.0, 1.0], [1.0])
    return CylinderPotential({1: chi, -1: chi}, max_mode=1, real=True)


def well_bump(depth: float = 4.0, bumpscale: float = 1.0,
              grid_n: int = 512) -> CylinderPotential:
    """Smooth attractive well V_0 plus a smooth bump on the m = +-1 modes."""
    xs = np.linspace(-1.0, 1.0, grid_n + 1)
    b = smooth_bump(xs)
    v0 = ModeProfile(-1.0, 1.0, -depth * b + 0j)
    v1 = ModeProfile(-1.0, 1.0, bumpscale * b + 0j)
    return CylinderPotential({0: v0, 1: v1, -1: v1}, max_mode=1, real=True)


def zero_potential(grid_n: int = 64) -> CylinderPotential:
    return CylinderPotential({0: zero_profile(-1.0, 1.0, grid_n)}, max_mode=0, real=True)


BUILTIN_POTENTIALS = ("example10", "well_bump", "zero")


def builtin_potential(name: str, **params) -> CylinderPotential:
    if name == "example10":
        return example10()
    if name == "well_bump":
        return well_bump(**params)
    if name == "zero":
        return zero_potential(**params)
    raise ValueError(f"unknown builtin potential {name!r}; have {BUILTIN_POTENTIALS}")
