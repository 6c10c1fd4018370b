"""Coupled-channel direct solver on the threshold chart.

The cylinder problem restricted to the channel window k = l-K .. l+K
reduces, slab by slab, to a linear system w' = [[0, I], [G - z^2 I, 0]] w
with a z-independent generator G = C + diag(k^2 - l^2).  The matching
determinant D(z) couples the slab propagator product to outgoing bases
on both ends of the support; its zeros in the chart coordinate are the
resonances.  D is analytic because every ingredient (even power series
in the per-mode momenta, linear algebra with constant matrices) is.
"""

from __future__ import annotations

import cmath
import math
import os
import threading
from dataclasses import dataclass

import numpy as np

from .potential import CylinderPotential, ModeProfile, to_steps
from .surface import SurfacePoint, channel_momenta, chart_radius
from .zeros import ContourError, Rect, locate_zeros_with_retries

_SERIES_CUT = 1e-4
_OVERFLOW_LIMIT = 1e250
_DEFECT_COND = 1e12
_CLIP_LOG = 700.0

HIT_METHODS = ("direct", "predicted-0th", "predicted-corrected",
               "example-closed-form")


@dataclass(frozen=True)
class ChannelWindow:
    """Channel truncation: indices l-K .. l+K, each profile cut into slabs."""

    l: int
    K: int
    n_slabs: int = 256

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("channel half-width K must be >= 1")
        if self.l - self.K < 0:
            raise ValueError("window reaches below channel 0 (need l - K >= 0)")
        if self.n_slabs < 1:
            raise ValueError("need at least one slab")

    def channels(self, tower: int = 1) -> np.ndarray:
        return tower * np.arange(self.l - self.K, self.l + self.K + 1)


@dataclass(frozen=True)
class ResonanceHit:
    point: SurfacePoint
    multiplicity: int
    tower_factor: int
    method: str
    residual: float
    K: int
    n_slabs: int
    threshold_regime: bool = False

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if self.tower_factor not in (1, 2):
            raise ValueError("tower factor must be 1 or 2")
        if self.method not in HIT_METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def _stepped_modes(P, n_slabs: int):
    """Step views of all modes on one shared slab grid."""
    stepped = {}
    bp = None
    for m in sorted(P.modes):
        sp = to_steps(P.modes[m], n_slabs)
        if bp is None:
            bp = np.asarray(sp.breakpoints, dtype=float)
        elif sp.breakpoints.size != bp.size or \
                not np.allclose(sp.breakpoints, bp, rtol=0.0, atol=1e-12):
            raise ValueError("mode profiles use mismatched slab grids")
        stepped[m] = sp
    return stepped, bp


def coupling_matrix(P: CylinderPotential, window: ChannelWindow,
                    slab: int, tower: int = 1) -> np.ndarray:
    """C[i, j] = V_{k_i - k_j} on the given slab (zero beyond the mode table)."""
    stepped, bp = _stepped_modes(P, window.n_slabs)
    if not 0 <= slab < bp.size - 1:
        raise ValueError(f"slab index {slab} out of range 0..{bp.size - 2}")
    ks = window.channels(tower)
    n = ks.size
    C = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            prof = stepped.get(int(ks[i] - ks[j]))
            if prof is not None:
                C[i, j] = prof.values[slab]
    return C


def _decompose_generator(G: np.ndarray):
    """Eigendecomposition of a slab generator, or an expm marker if defective."""
    if np.allclose(G, G.conj().T, rtol=0.0, atol=1e-13 * (1 + np.abs(G).max())):
        g, Q = np.linalg.eigh(G)
        return ("eig", g.astype(complex), Q.astype(complex), Q.conj().T)
    g, Q = np.linalg.eig(G)
    try:
        Qinv = np.linalg.inv(Q)
    except np.linalg.LinAlgError:
        return ("expm", G)
    if np.linalg.norm(Q, 2) * np.linalg.norm(Qinv, 2) > _DEFECT_COND:
        return ("expm", G)
    return ("eig", g, Q, Qinv)


def _cos_sinc_vec(t2: np.ndarray):
    """cos(sqrt(t2)) and sin(sqrt(t2))/sqrt(t2), even series near 0."""
    t2 = np.asarray(t2, dtype=complex)
    small = np.abs(t2) < _SERIES_CUT
    safe = np.where(small, 1.0, t2)
    rt = np.sqrt(safe)
    c = np.cos(rt)
    s = np.sin(rt) / rt
    cs = 1 - t2 / 2 + t2**2 / 24 - t2**3 / 720
    ss = 1 - t2 / 6 + t2**2 / 120 - t2**3 / 5040
    return np.where(small, cs, c), np.where(small, ss, s)


class _OverflowGuard(RuntimeError):
    pass


class _TowerCache:
    """z-independent slab data for one (potential, window, tower).

    Consecutive slabs with byte-identical generators are fused into one
    wider slab; the per-slab propagator is exact either way.
    """

    def __init__(self, P: CylinderPotential, window: ChannelWindow, tower: int):
        stepped, bp = _stepped_modes(P, window.n_slabs)
        self.P = P
        self.window = window
        self.l = window.l
        self.ks = window.channels(tower)
        self.n = self.ks.size
        self.x_min = float(bp[0])
        self.x_max = float(bp[-1])
        widths = np.diff(bp)
        shift = self.ks.astype(float) ** 2 - float(window.l) ** 2

        mode_vals = {m: sp.values for m, sp in stepped.items()}
        slabs: list[list] = []
        prev_key = None
        for s in range(widths.size):
            C = np.zeros((self.n, self.n), dtype=complex)
            for i in range(self.n):
                for j in range(self.n):
                    vals = mode_vals.get(int(self.ks[i] - self.ks[j]))
                    if vals is not None:
                        C[i, j] = vals[s]
            G = C + np.diag(shift)
            key = G.tobytes()
            if key == prev_key:
                slabs[-1][0] += widths[s]
            else:
                slabs.append([widths[s], _decompose_generator(G)])
                prev_key = key
        self.slabs = [(float(w), data) for w, data in slabs]

    def propagator(self, z: complex) -> np.ndarray:
        from scipy.linalg import expm

        n = self.n
        z2 = z * z
        M = np.eye(2 * n, dtype=complex)
        for width, data in self.slabs:
            if data[0] == "eig":
                _, g, Q, Qinv = data
                mu2 = z2 - g
                c, s = _cos_sinc_vec(mu2 * width * width)
                sl = width * s
                U11 = (Q * c) @ Qinv
                U12 = (Q * sl) @ Qinv
                U21 = (Q * (-mu2 * sl)) @ Qinv
            else:
                G = data[1]
                A = np.zeros((2 * n, 2 * n), dtype=complex)
                A[:n, n:] = np.eye(n)
                A[n:, :n] = G - z2 * np.eye(n)
                T = expm(A * width)
                U11, U12, U21 = T[:n, :n], T[:n, n:], T[n:, :n]
                M2 = np.empty((2 * n, 2 * n), dtype=complex)
                M2[:n, :n] = U11
                M2[:n, n:] = U12
                M2[n:, :n] = U21
                M2[n:, n:] = T[n:, n:]
                M = M2 @ M
                self._check(M)
                continue
            T = np.empty((2 * n, 2 * n), dtype=complex)
            T[:n, :n] = U11
            T[:n, n:] = U12
            T[n:, :n] = U21
            T[n:, n:] = U11
            M = T @ M
            self._check(M)
        return M

    @staticmethod
    def _check(M: np.ndarray):
        if not np.all(np.isfinite(M)) or np.abs(M).max() > _OVERFLOW_LIMIT:
            raise _OverflowGuard(
                "slab propagator overflow: reduce the channel half-width K "
                "or set CYLRES_PRECISION=extended")

    def logdet(self, z: complex) -> tuple[complex, float]:
        """Matching determinant as (phase, log magnitude)."""
        M = self.propagator(z)
        taus = channel_momenta(self.l, z, self.ks)
        n = self.n
        A = np.empty((2 * n, 2 * n), dtype=complex)
        A[:n, :n] = M[:n, :n] + M[:n, n:] * (-1j * taus)
        A[n:, :n] = M[n:, :n] + M[n:, n:] * (-1j * taus)
        A[:n, n:] = np.eye(n)
        A[n:, n:] = np.diag(1j * taus)
        sign, logabs = np.linalg.slogdet(A)
        if sign == 0:
            return 0.0, -math.inf
        return complex(sign), float(logabs)


_cache_lock = threading.Lock()
_tower_caches: dict[tuple, _TowerCache] = {}


def _get_cache(P: CylinderPotential, window: ChannelWindow,
               tower: int) -> _TowerCache:
    key = (id(P), window.l, window.K, window.n_slabs, tower)
    with _cache_lock:
        hit = _tower_caches.get(key)
        if hit is not None and hit.P is P:
            return hit
        cache = _TowerCache(P, window, tower)
        _tower_caches[key] = cache
        return cache


def _extended_mode() -> bool:
    return os.environ.get("CYLRES_PRECISION", "").lower() == "extended"


def _matching_determinant_mp(cache: _TowerCache, z: complex, dps: int = 40):
    """Extended-precision evaluation via mpmath (slow; guard fallback)."""
    from mpmath import mp

    with mp.workdps(dps):
        n = cache.n
        zm = mp.mpc(z)
        z2 = zm * zm
        M = mp.eye(2 * n)
        for width, data in cache.slabs:
            G = None
            if data[0] == "eig":
                _, g, Q, Qinv = data
                G = (Q * g) @ Qinv
            else:
                G = data[1]
            A = mp.zeros(2 * n)
            for i in range(n):
                A[i, n + i] = mp.mpf(width)
                for j in range(n):
                    A[n + i, j] = (mp.mpc(G[i, j]) - (z2 if i == j else 0)) * width
            M = mp.expm(A) * M
        taus = channel_momenta(cache.l, z, cache.ks)
        B = mp.zeros(2 * n)
        for i in range(n):
            t = mp.mpc(taus[i])
            for r in range(2 * n):
                B[r, i] = M[r, i] + M[r, n + i] * (-1j * t)
            B[i, n + i] = 1
            B[n + i, n + i] = 1j * t
        return mp.det(B)


def matching_determinant(P: CylinderPotential, p: SurfacePoint,
                         window: ChannelWindow) -> complex:
    """The matching determinant D at the chart point p (+tower channels).

    Analytic in the chart coordinate; D = 0 exactly when a solution
    outgoing in every retained channel exists.
    """
    if p.l != window.l:
        raise ValueError(f"point at threshold {p.l} but window at {window.l}")
    cache = _get_cache(P, window, tower=1)
    if _extended_mode():
        return _matching_determinant_mp(cache, p.z)
    try:
        sign, logabs = cache.logdet(p.z)
    except _OverflowGuard as exc:
        raise ValueError(str(exc)) from exc
    if logabs > _CLIP_LOG:
        raise ValueError(
            "matching determinant overflows double precision: reduce the "
            "channel half-width K or set CYLRES_PRECISION=extended")
    return sign * math.exp(logabs) if logabs > -math.inf else 0.0


def determinant_evaluator(P: CylinderPotential, window: ChannelWindow,
                          tower: int = 1, offset_at: complex | None = None):
    """Callable z -> D(z) rescaled by a constant e^{-offset}.

    The offset (log magnitude at offset_at, default the chart origin
    region) keeps values inside double range during contour work; a
    constant rescaling changes neither zeros nor winding numbers.
    """
    cache = _get_cache(P, window, tower=1) if tower == 1 else \
        _get_cache(conjugate_potential(P), window, tower=1)
    offset = 0.0
    if offset_at is not None:
        _, offset = cache.logdet(complex(offset_at))
        if not math.isfinite(offset):
            offset = 0.0

    def evaluate(z: complex) -> complex:
        sign, logabs = cache.logdet(z)
        if logabs == -math.inf:
            return 0.0
        mag = min(max(logabs - offset, -_CLIP_LOG), _CLIP_LOG)
        return sign * math.exp(mag)

    return evaluate


def _conj_profile(prof: ModeProfile) -> ModeProfile:
    if prof.kind == "step":
        return ModeProfile(prof.x_min, prof.x_max, np.conj(prof.samples),
                           kind="step", breakpoints=prof.breakpoints,
                           values=np.conj(prof.values))
    return ModeProfile(prof.x_min, prof.x_max, np.conj(prof.samples))


def conjugate_potential(P: CylinderPotential) -> CylinderPotential:
    """Modes of the complex conjugate potential: m -> conj(V_{-m})."""
    modes = {-m: _conj_profile(prof) for m, prof in P.modes.items()}
    return CylinderPotential(modes, P.max_mode, real=P.real)


def _check_search(search: Rect, l: int):
    corners = [complex(search.re_min, search.im_min),
               complex(search.re_min, search.im_max),
               complex(search.re_max, search.im_min),
               complex(search.re_max, search.im_max)]
    limit = chart_radius(l) - 1e-9
    if any(abs(c) >= limit for c in corners):
        raise ValueError("search region leaves the chart at threshold "
                         f"{l} (radius {chart_radius(l):.6g})")


def _mirror_rect(r: Rect) -> Rect:
    return Rect(-r.re_max, -r.re_min, r.im_min, r.im_max)


def _hit_residual(f, z0: complex, tol: float) -> float:
    rad = max(1e3 * tol, 1e-10)
    ring = max(abs(f(z0 + rad * cmath.exp(0.5j * math.pi * j)))
               for j in range(4))
    if ring == 0.0:
        return 0.0
    return abs(f(z0)) / ring


def find_cylinder_resonances(P: CylinderPotential, l: int, search: Rect,
                             window: ChannelWindow, tol: float = 1e-9,
                             tower: int | None = None,
                             max_evals: int = 400_000) -> list[ResonanceHit]:
    """Zeros of the matching determinant inside the search rectangle.

    With tower=None a real potential is solved once on the +tower and
    each hit carries tower factor 2 (its mirror partner at -conj(z)
    belongs to the -tower); otherwise both towers are solved, the minus
    tower through the conjugate potential with points mapped z -> -conj(z).
    """
    if window.l != l:
        raise ValueError(f"window built for threshold {window.l}, not {l}")
    _check_search(search, l)
    if tower is None:
        plan = [(1, 2)] if P.real else [(1, 1), (-1, 1)]
    elif tower in (1, -1):
        plan = [(tower, 1)]
    else:
        raise ValueError("tower must be +1, -1, or None")

    hits: list[ResonanceHit] = []
    for sgn, factor in plan:
        region = search if sgn == 1 else _mirror_rect(search)
        center = complex(0.5 * (region.re_min + region.re_max),
                         0.5 * (region.im_min + region.im_max))
        f = determinant_evaluator(P, window, tower=sgn, offset_at=center)
        report = locate_zeros_with_retries(f, region, tol=tol,
                                           max_evals=max_evals)
        if report.incomplete:
            raise ContourError(
                "zero search exhausted its budget before isolating all "
                "zeros; enlarge max_evals or shrink the region")
        for z0, mult, _ in report.zeros:
            zz = z0 if sgn == 1 else -z0.conjugate()
            hits.append(ResonanceHit(
                point=SurfacePoint(l, zz),
                multiplicity=int(mult),
                tower_factor=factor,
                method="direct",
                residual=_hit_residual(f, z0, tol),
                K=window.K,
                n_slabs=window.n_slabs,
                threshold_regime=abs(zz) < 1e-6 * chart_radius(l)))
    hits.sort(key=lambda h: (h.point.z.real, h.point.z.imag))
    return hits


@dataclass(frozen=True)
class TruncationStudy:
    locations: dict
    k_differences: tuple
    slab_differences: tuple
    k_monotone: bool
    slab_monotone: bool
    converged_digits: int | None


def _set_distance(A, B) -> float:
    if len(A) != len(B):
        return math.inf
    if not A:
        return 0.0
    d1 = max(min(abs(a - b) for b in B) for a in A)
    d2 = max(min(abs(a - b) for a in A) for b in B)
    return max(d1, d2)


def truncation_study(P: CylinderPotential, l: int, search: Rect,
                     K_list, slab_list, tol: float = 1e-10) -> TruncationStudy:
    """Zero locations across (K, slab count) with Cauchy-difference report."""
    K_list = sorted(set(int(k) for k in K_list))
    slab_list = sorted(set(int(s) for s in slab_list))
    if len(K_list) < 2 or len(slab_list) < 2:
        raise ValueError("need at least two K values and two slab counts")
    locations = {}
    for K in K_list:
        for ns in slab_list:
            window = ChannelWindow(l, K, ns)
            found = find_cylinder_resonances(P, l, search, window, tol=tol,
                                             tower=1)
            locations[(K, ns)] = tuple(h.point.z for h in found)

    ns_top = slab_list[-1]
    K_top = K_list[-1]
    k_diffs = tuple(_set_distance(locations[(K_list[i], ns_top)],
                                  locations[(K_list[i + 1], ns_top)])
                    for i in range(len(K_list) - 1))
    s_diffs = tuple(_set_distance(locations[(K_top, slab_list[i])],
                                  locations[(K_top, slab_list[i + 1])])
                    for i in range(len(slab_list) - 1))

    def monotone(diffs):
        return all(b <= a for a, b in zip(diffs, diffs[1:]))

    k_mono = monotone(k_diffs)
    s_mono = monotone(s_diffs)
    digits = None
    if k_mono and s_mono:
        last = max(k_diffs[-1], s_diffs[-1])
        if last == 0.0:
            digits = 15
        elif math.isfinite(last):
            digits = max(0, int(-math.log10(last)))
    return TruncationStudy(locations, k_diffs, s_diffs, k_mono, s_mono, digits)
