"""Prediction formulas for high-threshold resonances.

Resonances near threshold l cluster around images of the 1-D resonances
of the averaged potential.  This module provides the predicted chart
locations: the zeroth-order guess (the 1-D resonance itself), the
l^{-2} correction driven by the oscillatory modes, and the closed forms
for the single-pair step potential (one family near the threshold, one
on the log-l scale through complex Lambert-W branches).  A resonance
hit from the direct solver can be classified against these centers.
All functions are pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .potential import CylinderPotential
from .scatter1d import ResonanceState

_trapz = getattr(np, "trapezoid", None) or getattr(np, "trapz")

ORDER_TAGS = ("0th", "corrected", "example-threshold", "example-logl")

_STEP_WARNING = ("potential has step-kind oscillatory modes; the smooth "
                 "correction formula is not valid for them")


@dataclass(frozen=True)
class Prediction:
    """A predicted resonance location with its accuracy class.

    error_exponent e means the prediction is accurate to O(l^{-e});
    the admissible e is pinned by the order tag (0th order allows
    2/m for an integer multiplicity m).
    """

    l: int
    z_pred: complex
    order: str
    error_exponent: float
    threshold_regime: bool = False
    warning: str = ""

    def __post_init__(self):
        if self.order not in ORDER_TAGS:
            raise ValueError(f"unknown order tag {self.order!r}")
        e = self.error_exponent
        if self.order == "corrected" and e != 3.0:
            raise ValueError("corrected predictions carry exponent 3")
        if self.order == "example-threshold" and e != 2.0:
            raise ValueError("the threshold example carries exponent 2")
        if self.order == "example-logl" and e != 0.5:
            raise ValueError("the log-scale example carries exponent 1/2")
        if self.order == "0th":
            if not 0.0 < e <= 2.0 or abs(round(2.0 / e) - 2.0 / e) > 1e-9:
                raise ValueError("0th order exponent must be 2/multiplicity")


def threshold_prediction(lam0: complex, l: int, multiplicity: int = 1) -> Prediction:
    """Zeroth order: the chart location equals the 1-D resonance itself."""
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    lam0 = complex(lam0)
    return Prediction(l, lam0, "0th", 2.0 / multiplicity,
                      threshold_regime=(lam0 == 0))


def leading_correction(lam0: complex, u: ResonanceState,
                       P: CylinderPotential, l: int) -> Prediction:
    """First correction to a simple 1-D resonance from the oscillatory modes.

    z = lam0 - (i / 4 l^2) sum_{k != 0} (1/k^2) int (k^2 V_{-k} V_k u^2
    + V_{-k}' V_k' u^2) dx.  Integrals by composite trapezoid on each
    mode's grid, derivatives by centered differences.  Simplicity of
    lam0 is enforced where u is built (the state constructor rejects
    multiple zeros); here we only check that u belongs to lam0.
    """
    lam0 = complex(lam0)
    if abs(u.lam0 - lam0) > 1e-8 * max(1.0, abs(lam0)):
        raise ValueError("resonance state was built at a different lam0")
    warning = ""
    total = 0.0 + 0.0j
    for k in sorted(m for m in P.modes if m != 0):
        vk = P.mode(k)
        vmk = P.mode(-k)
        if vk.kind == "step" or vmk.kind == "step":
            warning = _STEP_WARNING
            xs = np.linspace(vk.x_min, vk.x_max, 1025)
            a = vmk.evaluate(xs)
            b = vk.evaluate(xs)
            da = np.gradient(a, xs)
            db = np.gradient(b, xs)
        else:
            xs = vk.grid if vk.n >= vmk.n else vmk.grid
            a = vmk.evaluate(xs)
            b = vk.evaluate(xs)
            da = vmk.derivative().evaluate(xs)
            db = vk.derivative().evaluate(xs)
        u2 = u.evaluate(xs) ** 2
        total += _trapz((k * k * a * b + da * db) * u2, xs) / (k * k)
    z = lam0 - 1j * total / (4.0 * l * l)
    return Prediction(l, z, "corrected", 3.0, warning=warning)


def lambert_w(nu: int, w: complex) -> complex:
    """Branch nu of the Lambert function: W e^W = w.

    Started from the asymptotic log w + 2 pi i nu - log(log w + 2 pi i nu)
    (a series start near the origin on the principal branch) and polished
    by Halley steps until |W e^W - w| < 1e-13 max(1, |w|).
    """
    w = complex(w)
    if w == 0:
        if nu == 0:
            return 0.0 + 0.0j
        raise ValueError("w = 0 lies on no branch but the principal one")
    if nu in (0, -1) and abs(w + 1.0 / math.e) < 1e-15:
        return complex(-1.0)
    if nu == 0 and abs(w) < 3.0:
        W = cmath.log(1.0 + w)
    else:
        L = cmath.log(w) + 2j * math.pi * nu
        W = L - cmath.log(L)
    res = 0.0
    for _ in range(50):
        e = cmath.exp(W)
        f = W * e - w
        res = abs(f)
        if res < 1e-13 * max(1.0, abs(w)):
            return W
        if W == -1.0:
            W += 1e-8
            continue
        W = W - f / (e * (W + 1.0) - (W + 2.0) * f / (2.0 * (W + 1.0)))
    raise RuntimeError(
        f"lambert_w did not converge on branch {nu} at w={w!r}: "
        f"last W={W!r}, residual={res:.3e}")


def example_near_threshold(l: int) -> Prediction:
    """Closed form for the small zero of the single-pair step potential."""
    if l < 2:
        raise ValueError("the closed form needs l >= 2")
    rt = math.sqrt(2.0 * l)
    z = (-1.0 - 1.0j + cmath.exp(2j * rt)) / (4.0 * l * rt)
    return Prediction(l, z, "example-threshold", 2.0)


def example_logl(l: int, nu: int, sign: int) -> Prediction:
    """Log-scale pole family of the single-pair step potential.

    z = (i/2) W_nu((1/(4 l sqrt(2l)))(-i e^{2 i sqrt(2l)} -+ i +- 1)),
    upper signs for sign=+1.  The (nu=1, +) member drifts downward like
    -(3/4) log l; see asymptote_ratio for the diagnostic.
    """
    if l < 8:
        raise ValueError("the log-scale family needs l >= 8")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rt = math.sqrt(2.0 * l)
    arg = (-1j * cmath.exp(2j * rt) - sign * 1j + sign) / (4.0 * l * rt)
    z = 0.5j * lambert_w(nu, arg)
    return Prediction(l, z, "example-logl", 0.5)


def asymptote_ratio(pred: Prediction) -> float:
    """Im z / log l for a log-scale prediction; tends to -3/4 very slowly.

    The Lambert log-of-log term decays like log(log l)/log l, so at
    desk-scale l the ratio sits well below the limit.
    """
    if pred.order != "example-logl":
        raise ValueError("asymptote diagnostic applies to the log-scale family")
    return pred.z_pred.imag / math.log(pred.l)


def g_function(l: int, z: complex) -> complex:
    """Transcendental function whose zeros are the log-scale pole family."""
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 is outside the domain")
    rt = math.sqrt(2.0 * l)
    c = 1.0 / (8.0 * l * rt)
    t1 = 1.0 - (c / z) * cmath.exp(2j * (rt + z))
    t2 = (c / z) * (1j * cmath.exp(2j * z) + cmath.exp(2j * z))
    return t1 * t1 - t2 * t2


def sumis0_residual(P: CylinderPotential, x_samples) -> float:
    """sup_x |sum_{m,j != 0, m != -j} V_m V_j V_{-m-j} / (j (j+m))|.

    The sum cancels identically for every potential (each coefficient
    triple appears with weights summing to zero), so anything beyond
    rounding is an indexing bug in the caller's mode table.
    """
    xs = np.atleast_1d(np.asarray(x_samples, dtype=float))
    M = P.max_mode
    vals = {m: P.mode(m).evaluate(xs) for m in range(-M, M + 1)}
    acc = np.zeros(xs.shape, dtype=complex)
    for m in range(-M, M + 1):
        if m == 0:
            continue
        for j in range(-M, M + 1):
            if j == 0 or j == -m or abs(m + j) > M:
                continue
            acc += vals[m] * vals[j] * vals[-m - j] / (j * (j + m))
    return float(np.max(np.abs(acc)))


@dataclass(frozen=True)
class BandClassification:
    """Where a direct hit sits relative to the predicted centers.

    Reporting only; the resonance-free constants are fitted by the
    experiments, never asserted.
    """

    l: int
    z: complex
    nearest_center: complex | None
    distance: float | None
    scaled_distances: tuple
    annulus_margin: float
    re_scaled: float
    note: str = ""


def _center_of(entry) -> complex:
    return complex(entry.z_pred) if isinstance(entry, Prediction) else complex(entry)


def classify_hit(hit, resonances_1d, exponents=(2.0, 3.0)) -> BandClassification:
    """Distances from a hit to the nearest predicted center, l-scaled.

    resonances_1d entries may be plain complex centers or Predictions.
    The annulus margin |z| is reported unscaled: the decay-rate exponent
    in the threshold-clearing bound is potential-specific, so no single
    power of l applies.
    """
    l = hit.point.l
    z = complex(hit.point.z)
    centers = [_center_of(c) for c in resonances_1d]
    nearest = None
    dist = None
    scaled = ()
    if centers:
        nearest = min(centers, key=lambda c: abs(z - c))
        dist = abs(z - nearest)
        scaled = tuple((float(e), dist * l ** float(e)) for e in exponents)
    return BandClassification(
        l=l, z=z, nearest_center=nearest, distance=dist,
        scaled_distances=scaled, annulus_margin=abs(z),
        re_scaled=z.real * l ** 3,
        note="annulus margin left unscaled: clearing exponent depends on "
             "the mode decay of the potential")
