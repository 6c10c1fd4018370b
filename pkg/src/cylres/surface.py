"""Branch bookkeeping near one channel threshold.

Energies on the cylinder live on the Riemann surface where every
channel momentum t_k = (energy - k^2)^{1/2} is single valued.  Near the
l-th threshold we use the chart coordinate z = t_l, valid on the disk
|z| < sqrt(2l - 1) that contains no other threshold.  On that chart

    t_k(z) = z                                   for k = l,
    t_k(z) = sqrt(z^2 + l^2 - k^2)   (Re > 0)    for k < l,
    t_k(z) = i sqrt(-(z^2 + l^2 - k^2)) (Im > 0) for k > l.

The branch constraints are automatic for principal square roots: on the
chart the argument of the k < l root has strictly positive real part,
and likewise for k > l after the sign flip.  The algebraic relation
t_k^2 - t_j^2 = j^2 - k^2 then holds exactly by construction.

The first open quadrant of z is the physical region: there every t_k
has positive imaginary part, which is the outgoing/decaying sheet.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

CHART_MARGIN = 1e-9


def chart_radius(l: int) -> float:
    return math.sqrt(2 * l - 1)


@dataclass(frozen=True)
class SurfacePoint:
    """A surface point in the chart at threshold l: z is the local coordinate."""

    l: int
    z: complex

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("threshold index must be >= 1")
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if abs(z) >= chart_radius(self.l) - CHART_MARGIN:
            raise ValueError(
                f"|z|={abs(z):.6g} outside the chart at threshold {self.l} "
                f"(radius {chart_radius(self.l):.6g})")


def channel_momentum(p: SurfacePoint, k: int) -> complex:
    """The momentum t_k of channel k at the point p, on the chart branch."""
    if k < 0:
        raise ValueError("channel index must be >= 0")
    z = p.z
    if k == p.l:
        return z
    arg = z * z + (p.l * p.l - k * k)
    if k < p.l:
        return cmath.sqrt(arg)
    return 1j * cmath.sqrt(-arg)


def channel_momenta(l: int, z: complex, ks) -> np.ndarray:
    """Vectorized momenta for the channel list ks at coordinate z (chart l).

    Accepts signed channel labels: the momentum depends on |k| only.
    """
    ks = np.abs(np.asarray(ks, dtype=int))
    arg = (z * z + (l * l - ks * ks)).astype(complex)
    out = np.empty(ks.shape, dtype=complex)
    below = ks < l
    above = ks > l
    out[below] = np.sqrt(arg[below])
    out[above] = 1j * np.sqrt(-arg[above])
    out[ks == l] = z
    return out


@dataclass(frozen=True)
class RegionSpec:
    """Scan regions in the chart coordinate.

    variant "B": the disk |z| < rho.
    variant "D": the disk |z - center| < r around a 1-d resonance image.
    variant "U+": M_plus < Re z < gamma sqrt(2l), Im z > -c_plus log Re z.
    variant "U-": M_minus < Im z < gamma sqrt(2l), Re z > -alpha.

    The U constants are scan-filter parameters, not certified bounds.
    """

    variant: str
    rho: float = 1.0
    center: complex = 0.0
    r: float = 0.1
    M_plus: float = 10.0
    c_plus: float = 0.5
    gamma: float = 0.9
    M_minus: float = 10.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.variant not in ("B", "D", "U+", "U-"):
            raise ValueError(f"unknown region variant {self.variant!r}")
        for name in ("rho", "r", "M_plus", "c_plus", "M_minus", "alpha"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")


def contains(region: RegionSpec, p: SurfacePoint) -> bool:
    z = p.z
    if region.variant == "B":
        return abs(z) < region.rho
    if region.variant == "D":
        return abs(z - complex(region.center)) < region.r
    if region.variant == "U+":
        return (region.M_plus < z.real < region.gamma * math.sqrt(2 * p.l)
                and z.imag > -region.c_plus * math.log(z.real))
    return (region.M_minus < z.imag < region.gamma * math.sqrt(2 * p.l)
            and z.real > -region.alpha)


def surface_distance(p: SurfacePoint, q: SurfacePoint) -> float:
    """sup over channels k of |t_k(p) - t_k(q)|, same chart only.

    Uses t_k(p) - t_k(q) = (z_p^2 - z_q^2)/(t_k(p) + t_k(q)): once the
    denominator exceeds |z_p + z_q| the remaining terms fall below the
    k = l term, and for k > l the denominators grow monotonically, so a
    short certified scan suffices.
    """
    if p.l != q.l:
        raise ValueError("surface distance implemented within one chart only")
    l = p.l
    num = abs(p.z * p.z - q.z * q.z)
    best = abs(p.z - q.z)
    if best == 0.0:
        return 0.0
    zsum = abs(p.z + q.z)
    for k in range(l):
        denom = abs(channel_momentum(p, k) + channel_momentum(q, k))
        if denom == 0.0:
            raise ValueError("coinciding branch point between adjacent thresholds")
        best = max(best, num / denom)
    k = l + 1
    while True:
        tp, tq = channel_momentum(p, k), channel_momentum(q, k)
        best = max(best, num / abs(tp + tq))
        # for k > l both momenta have positive imaginary parts that grow
        # monotonically with k and bound the denominator from below, so
        # once their sum passes |z_p + z_q| every remaining term is below
        # the k = l term already counted
        if tp.imag + tq.imag > zsum:
            return best
        k += 1


def distance_to_physical(p: SurfacePoint) -> float:
    """Infimum of surface_distance(p, .) over the closed physical quadrant.

    The physical region of the chart is the (closed) first quadrant of z.
    When the chart term dominates the sup, the answer is the Euclidean
    distance to the quadrant; otherwise the boundary is scanned.
    """
    z = p.z
    if z.real >= 0 and z.imag >= 0:
        return 0.0
    proj = complex(max(z.real, 0.0), max(z.imag, 0.0))
    q0 = SurfacePoint(p.l, proj)
    d0 = surface_distance(p, q0)
    if d0 <= abs(z - proj) * (1 + 1e-12):
        return d0
    return _boundary_scan(p)


def _boundary_scan(p: SurfacePoint, n: int = 257, refinements: int = 40) -> float:
    limit = chart_radius(p.l) - 2 * CHART_MARGIN
    best = math.inf
    best_q = None
    for axis in (1.0, 1j):
        ts = np.linspace(0.0, limit, n)
        ds = [surface_distance(p, SurfacePoint(p.l, axis * t)) for t in ts]
        i = int(np.argmin(ds))
        if ds[i] < best:
            best = ds[i]
            best_q = (axis, ts[max(i - 1, 0)], ts[min(i + 1, n - 1)])
    axis, lo, hi = best_q
    # golden-section polish along the winning boundary ray
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = surface_distance(p, SurfacePoint(p.l, axis * c))
    fd = surface_distance(p, SurfacePoint(p.l, axis * d))
    for _ in range(refinements):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = surface_distance(p, SurfacePoint(p.l, axis * c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = surface_distance(p, SurfacePoint(p.l, axis * d))
    return min(best, fc, fd)
