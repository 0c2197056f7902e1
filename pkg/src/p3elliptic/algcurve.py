"""The spectral curve w^2 = lam^4 - A lam^2 + 1 and its cycle integrals.

The two-sheeted curve is handled without global branch cuts: every contour
carries a table of branch checkpoints obtained by continuous tracking of
sqrt(P) along the contour, anchored at lam = 0 where w = +1 on the upper
sheet.  Cycle classes:

* the b-cycle is a closed loop enclosing the turning points {lam1, lam2},
* the a-cycle is a closed loop enclosing {-lam1, lam1} (it winds once
  around lam = 0, passing above and below it, matching the standard
  picture of a cycle threading both cuts).

Orientations are calibrated against three anchor facts: the a-integral of
w/lam^2 tends to -8 as A -> 2, the Legendre-type identity
Om_a*Jc_b - Om_b*Jc_a = 8*pi*i, and Im(Om_b/Om_a) > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ._kernels import match_sqrt, track_sqrt

__all__ = [
    "SpectralCurve", "SheetPoint", "Contour", "CycleIntegrals",
    "turning_points", "w_eval", "cycle_a", "cycle_b", "contour_integral",
    "periods", "d_dA_integrals", "degenerate_a_cycle_value",
    "DegenerateCurveError", "QuadratureError", "OnCutError",
]

_TWO_PI = 2.0 * np.pi


class DegenerateCurveError(ValueError):
    """The curve has collided turning points (A = 2 or A = -2)."""


class OnCutError(ValueError):
    """Evaluation point lies on a cut and no shore was declared."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, best, err_bound):
        super().__init__(message)
        self.best = best
        self.err_bound = err_bound


def turning_points(A: complex) -> tuple[complex, complex]:
    """Roots (lam1, lam2) of lam^4 - A lam^2 + 1 with lam1*lam2 = 1.

    lam1 is the root of modulus < 1 (for A off the real segment [-2, 2]),
    which continues the standard numbering Re(lam1) <= Re(lam2) from A ~ 2
    along the whole Boutroux trajectory.  Degenerate moduli return the
    double root: (1, 1) at A = 2 and (i, i) at A = -2.
    """
    A = complex(A)
    if A == 2.0:
        return (1.0 + 0.0j, 1.0 + 0.0j)
    if A == -2.0:
        return (1.0j, 1.0j)
    r = complex(np.sqrt(complex(A * A - 4.0)))
    s_big = (A + r) / 2.0 if abs(A + r) >= abs(A - r) else (A - r) / 2.0
    s_small = 1.0 / s_big
    if s_small.imag == 0.0:
        s_small = complex(s_small.real, 0.0)  # drop -0.0: principal side
    if abs(s_small) == 1.0 and s_small.imag < 0.0:
        s_small = np.conj(s_small)  # A in (-2, 2): put lam1 in the upper half
    lam1 = complex(np.sqrt(s_small))
    return lam1, 1.0 / lam1


@dataclass(frozen=True)
class SpectralCurve:
    """Quartic curve data with fixed branch normalization.

    w is normalized by w(0) = +1 and w/lam^2 -> -1 at infinity on the upper
    sheet.  cut_descriptor records the nominal straight cuts [lam1, lam2]
    and [-lam2, -lam1] (orientation first -> second point); they are used
    for shore-point bookkeeping only, branch consistency along contours is
    maintained by continuous tracking.
    """

    A: complex
    lambda1: complex
    lambda2: complex
    cut_descriptor: tuple[tuple[complex, complex], tuple[complex, complex]]

    @classmethod
    def from_modulus(cls, A: complex) -> "SpectralCurve":
        A = complex(A)
        l1, l2 = turning_points(A)
        return cls(A=A, lambda1=l1, lambda2=l2,
                   cut_descriptor=((l1, l2), (-l2, -l1)))

    @property
    def degenerate(self) -> bool:
        return self.A == 2.0 or self.A == -2.0

    def require_nondegenerate(self):
        if self.degenerate:
            raise DegenerateCurveError(f"curve degenerates at A = {self.A}")

    def P(self, lam):
        """The quartic lam^4 - A lam^2 + 1."""
        lam2 = np.multiply(lam, lam)
        return (lam2 - self.A) * lam2 + 1.0

    @property
    def roots(self) -> tuple[complex, complex, complex, complex]:
        return (self.lambda1, self.lambda2, -self.lambda1, -self.lambda2)

    @property
    def scale(self) -> float:
        return max(abs(self.lambda2), 1.0)


@dataclass(frozen=True)
class SheetPoint:
    """A point of the two-sheeted curve: base lam plus sheet choice.

    sheet is +1 (upper) or -1 (lower).  Points on a nominal cut must carry
    a shore: +1/-1 selects the side reached by nudging along +i/-i times
    the cut direction.
    """

    lam: complex
    sheet: int = +1
    shore: int = 0

    def conj_sheet(self) -> "SheetPoint":
        return SheetPoint(self.lam, -self.sheet, self.shore)


def _dist_point_segment(z, a, b):
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(z - a)
    s = np.clip(np.real((z - a) * np.conj(d)) / L2, 0.0, 1.0)
    return abs(z - (a + s * d))


def _track_along(curve: SpectralCurve, pts: np.ndarray, w0: complex) -> complex:
    """Track w from (pts[0], w0) to the end of the polyline samples."""
    n = 64
    while n <= 1 << 16:
        sub = []
        for a, b in zip(pts[:-1], pts[1:]):
            sub.append(a + (b - a) * np.linspace(0.0, 1.0, n)[:-1])
        sub.append(np.array([pts[-1]]))
        samples = np.concatenate(sub)
        w, ok = track_sqrt(curve.P(samples), complex(w0))
        if ok:
            return complex(w[-1])
        n *= 4
    raise RuntimeError("branch tracking failed: path too close to a turning point")


def w_eval(curve: SpectralCurve, p: SheetPoint) -> complex:
    """Branch-consistent w at a sheet point.

    The upper-sheet value is the continuation of w(0) = +1 along the
    straight segment from 0 to lam, with automatic detours around turning
    points.  Points on a nominal cut need a declared shore.
    """
    lam = complex(p.lam)
    if lam == 0.0:
        return 1.0 + 0.0j if p.sheet > 0 else -1.0 - 0.0j
    if min(abs(lam - r) for r in curve.roots) < 1e-13 * curve.scale:
        return 0.0 + 0.0j
    clearance = 0.03 * abs(curve.lambda2 - curve.lambda1)
    for (a, b) in curve.cut_descriptor:
        if _dist_point_segment(lam, a, b) < 1e-12 * curve.scale:
            if p.shore == 0:
                raise OnCutError(f"{lam} lies on a cut; declare a shore")
            direction = (b - a) / abs(b - a)
            lam = lam + p.shore * 1j * direction * max(1e-9 * curve.scale,
                                                       1e-7 * clearance)
    detours = []
    for root in curve.roots:
        if (_dist_point_segment(lam, 0.0, root) < clearance
                and abs(lam) > abs(root) / 2):
            # sidestep the turning point sitting near the anchor segment
            direction = lam / abs(lam)
            detours.append(root + 2j * clearance * direction)
    detours.sort(key=abs)
    waypoints = np.array([0.0 + 0.0j] + detours + [lam], dtype=complex)
    wv = _track_along(curve, waypoints, 1.0 + 0.0j)
    return wv if p.sheet > 0 else -wv


# ---------------------------------------------------------------------------
# contour segments with tracked branch checkpoints
# ---------------------------------------------------------------------------

class _Segment:
    """Parametrized arc t in [0,1] with branch checkpoints for w."""

    def __init__(self, curve: SpectralCurve, w_start: complex, closed=False):
        self.curve = curve
        self.w_start = complex(w_start)
        self.closed = closed
        self.ts = None
        self.ws = None

    def point(self, t):
        raise NotImplementedError

    def dpoint(self, t):
        raise NotImplementedError

    def build_checkpoints(self, n0=256, nmax=1 << 16):
        n = n0
        while True:
            ts = np.linspace(0.0, 1.0, n + 1)
            w, ok = track_sqrt(self.curve.P(self.point(ts)), self.w_start)
            if ok:
                if self.closed and abs(w[-1] - w[0]) > 1e-6 * abs(w[0]):
                    raise RuntimeError("closed contour encloses an odd number "
                                       "of turning points")
                self.ts = ts
                self.ws = w
                return self
            n *= 2
            if n > nmax:
                raise RuntimeError("branch tracking failed on contour segment")

    def w_at(self, t, lam):
        idx = np.clip(np.searchsorted(self.ts, t), 0, len(self.ws) - 1)
        return match_sqrt(self.curve.P(lam), self.ws[idx])

    def flip_branch(self):
        self.w_start = -self.w_start
        self.ws = -self.ws

    def reversed(self):
        seg = _Reversed(self)
        return seg


class _Reversed(_Segment):
    def __init__(self, base):
        super().__init__(base.curve, base.ws[-1], closed=base.closed)
        self.base = base
        self.ts = 1.0 - base.ts[::-1]
        self.ws = base.ws[::-1].copy()

    def point(self, t):
        return self.base.point(1.0 - np.asarray(t))

    def dpoint(self, t):
        return -self.base.dpoint(1.0 - np.asarray(t))


class _Ellipse(_Segment):
    """Closed ellipse around a pair of turning points, in the pair frame."""

    def __init__(self, curve, center, halfvec, ax_a, ax_b, w_start,
                 orientation=+1, theta0=0.5 * np.pi):
        super().__init__(curve, w_start, closed=True)
        self.m = complex(center)
        self.d = complex(halfvec)
        self.ax_a = float(ax_a)
        self.ax_b = float(ax_b)
        self.orientation = int(orientation)
        self.theta0 = float(theta0)

    def _angle(self, t):
        return self.theta0 + self.orientation * _TWO_PI * np.asarray(t)

    def point(self, t):
        th = self._angle(t)
        u = self.ax_a * np.cos(th) + 1j * self.ax_b * np.sin(th)
        return self.m + self.d * u

    def dpoint(self, t):
        th = self._angle(t)
        du = -self.ax_a * np.sin(th) + 1j * self.ax_b * np.cos(th)
        return self.d * du * self.orientation * _TWO_PI


class _Polyline(_Segment):
    """Straight polyline; optional square-root slow-down at either end.

    The slow-down reparametrization t -> t^2 (resp. 1-(1-t)^2) removes the
    inverse-square-root endpoint singularity of integrands like 1/w when a
    path terminates at a turning point.
    """

    def __init__(self, curve, points, w_start, sqrt_start=False, sqrt_end=False):
        super().__init__(curve, w_start, closed=False)
        self.pts = np.asarray(points, dtype=complex)
        self.nseg = len(self.pts) - 1
        self.sqrt_start = bool(sqrt_start)
        self.sqrt_end = bool(sqrt_end)

    def _warp(self, t):
        t = np.asarray(t, dtype=float)
        if self.sqrt_start and self.sqrt_end:
            return 3 * t * t - 2 * t * t * t  # vanishing speed at both ends
        if self.sqrt_start:
            return t * t
        if self.sqrt_end:
            return 1.0 - (1.0 - t) ** 2
        return t

    def _dwarp(self, t):
        t = np.asarray(t, dtype=float)
        if self.sqrt_start and self.sqrt_end:
            return 6 * t - 6 * t * t
        if self.sqrt_start:
            return 2 * t
        if self.sqrt_end:
            return 2 * (1.0 - t)
        return np.ones_like(t)

    def point(self, t):
        u = self._warp(t) * self.nseg
        k = np.minimum(u.astype(int), self.nseg - 1)
        frac = u - k
        return self.pts[k] + frac * (self.pts[k + 1] - self.pts[k])

    def dpoint(self, t):
        u = self._warp(t) * self.nseg
        k = np.minimum(u.astype(int), self.nseg - 1)
        return (self.pts[k + 1] - self.pts[k]) * self.nseg * self._dwarp(t)

    def build_checkpoints(self, n0=256, nmax=1 << 18):
        # geometric refinement near sqrt endpoints keeps tracking stable; a
        # neighbourhood of the singular endpoints is excluded (there the
        # parametrized lam is within rounding error of the turning point)
        eps = 3e-6
        n = n0
        while True:
            ts = np.linspace(0.0, 1.0, n + 1)
            if self.sqrt_start:
                ts = np.concatenate([np.geomspace(eps, 1.0, 300), ts[1:]])
            if self.sqrt_end:
                ts = np.concatenate([ts[:-1] if not self.sqrt_start else ts,
                                     1.0 - np.geomspace(eps, 1.0, 300)])
            ts = np.unique(np.clip(ts, eps if self.sqrt_start else 0.0,
                                   1.0 - eps if self.sqrt_end else 1.0))
            w, ok = track_sqrt(self.curve.P(self.point(ts)), self.w_start)
            if ok:
                self.ts = ts
                self.ws = w
                return self
            n *= 2
            if n > nmax:
                raise RuntimeError("branch tracking failed on path")


@dataclass
class Contour:
    """Ordered chain of branch-tracked segments on the curve.

    crossings lists parameter locations where the nominal sheet label
    flips; contours realized by continuous branch tracking have none.
    """

    curve: SpectralCurve
    segments: list
    crossings: tuple = ()
    label: str = ""

    def winding(self, z0: complex, n: int = 4096) -> float:
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        pts = np.concatenate([seg.point(t) for seg in self.segments]) - z0
        return float(np.angle(np.roll(pts, -1) / pts).sum()) / _TWO_PI

    def reversed(self) -> "Contour":
        segs = [seg.reversed() for seg in reversed(self.segments)]
        return Contour(self.curve, segs, self.crossings, self.label + "~rev")

    def start_point(self):
        return complex(self.segments[0].point(np.array([0.0]))[0])

    def min_distance(self, z0: complex, n: int = 2048) -> float:
        t = np.linspace(0.0, 1.0, n)
        return min(float(np.abs(seg.point(t) - z0).min()) for seg in self.segments)


# ---------------------------------------------------------------------------
# quadrature: adaptive Gauss-Kronrod G7K15 panels over tracked segments
# ---------------------------------------------------------------------------

_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870])

INTEGRAND_KINDS: dict[str, Callable] = {
    "1/w": lambda lam, w: 1.0 / w,
    "w/lam^2": lambda lam, w: w / (lam * lam),
    "w": lambda lam, w: w,
    "lam^2/w^3": lambda lam, w: lam * lam / (w * w * w),
    "1/(lam*w)": lambda lam, w: 1.0 / (lam * w),
    "1/(lam^2*w)": lambda lam, w: 1.0 / (lam * lam * w),
}


def _resolve_integrand(f, lam0=None):
    if callable(f):
        return f
    if f == "1/((lam-lam0)*w)":
        if lam0 is None:
            raise ValueError("integrand kind 1/((lam-lam0)*w) needs lam0")
        return lambda lam, w: 1.0 / ((lam - lam0) * w)
    try:
        return INTEGRAND_KINDS[f]
    except KeyError:
        raise ValueError(f"unknown integrand kind {f!r}") from None


def contour_integral(curve: SpectralCurve, contour: Contour, f,
                     lam0: complex | None = None, abs_tol: float = 1e-10,
                     rel_tol: float = 1e-10, max_panels: int = 4000) -> complex:
    """Adaptive contour integral of f(lam, w) along a tracked contour.

    f is a callable or one of the named kinds.  Raises QuadratureError
    (carrying the best estimate and an error bound) on non-convergence.
    """
    func = _resolve_integrand(f, lam0)
    total = 0.0 + 0.0j
    err_total = 0.0
    npanels = 0
    for seg in contour.segments:
        stack = [(i / 8.0, (i + 1) / 8.0) for i in range(8)]
        while stack:
            a, b = stack.pop()
            h = 0.5 * (b - a)
            t = 0.5 * (a + b) + h * _XK
            lam = seg.point(t)
            w = seg.w_at(t, lam)
            vals = func(lam, w) * seg.dpoint(t)
            k15 = h * np.sum(_WK * vals)
            g7 = h * np.sum(_WG * vals[1::2])
            e = abs(k15 - g7)
            npanels += 1
            if e <= max(abs_tol, rel_tol * abs(k15)) or h < 1e-13:
                total += k15
                err_total += e
            elif npanels >= max_panels:
                raise QuadratureError(
                    f"quadrature did not converge after {npanels} panels",
                    best=total + k15, err_bound=err_total + e)
            else:
                mid = 0.5 * (a + b)
                stack.append((a, mid))
                stack.append((mid, b))
    return total


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------

def _pair_ellipse(curve, pair, others, w_start, orientation, fatness=0.45,
                  label=""):
    """Validated ellipse loop around a root pair excluding the other roots."""
    p, q = pair
    m = (p + q) / 2.0
    d = (q - p) / 2.0
    th = np.linspace(0.0, 1.0, 256, endpoint=False)
    for k in range(14):
        ca = fatness * 0.8 ** k
        for cb in (min(0.5, max(0.25, 2.0 * ca)), ca):
            seg = _Ellipse(curve, m, d, 1.0 + ca, cb, w_start, orientation)
            pts = seg.point(th)
            ok = True
            for r0, expect in [(p, 1), (q, 1)] + [(o, 0) for o in others]:
                wind = np.angle((np.roll(pts, -1) - r0) / (pts - r0)).sum() / _TWO_PI
                target = orientation * expect
                if abs(wind - target) > 1e-6:
                    ok = False
                    break
            if ok and others:
                dmin = min(float(np.abs(pts - o).min()) for o in others)
                ok = dmin > 0.015 * abs(d)
            if ok:
                droots = min(float(np.abs(pts - r).min()) for r in curve.roots)
                contour = Contour(curve, [seg], label=label)
                contour.clearance = droots
                return contour
    raise DegenerateCurveError(
        f"cannot place a {label or 'cycle'} loop for A = {curve.A}: "
        "turning points too close")


def cycle_a(curve: SpectralCurve) -> Contour:
    """The a-cycle: tracked loop around {-lam1, lam1}, anchored at lam = 0.

    Runs clockwise in the pair frame; with the branch anchored by
    w(0) = +1 this gives Jc_a -> -8 as A -> 2 along the Boutroux
    trajectory (the paper's normalization of the a-period contour).
    """
    curve.require_nondegenerate()
    l1 = curve.lambda1
    # anchor path from 0 to the ellipse vertex stays inside the loop
    contour = _pair_ellipse(curve, (-l1, l1), (curve.lambda2, -curve.lambda2),
                            w_start=1.0 + 0.0j, orientation=-1, label="a")
    seg = contour.segments[0]
    vtop = complex(seg.point(np.array([0.0]))[0])
    seg.w_start = _track_along(curve, np.array([0.0 + 0.0j, vtop]), 1.0 + 0.0j)
    seg.build_checkpoints()
    return contour


def cycle_b(curve: SpectralCurve) -> Contour:
    """The b-cycle: counterclockwise tracked loop around {lam1, lam2}.

    The branch lift of a standalone b-loop is the principal sqrt at the
    start vertex (a deterministic choice); CurveWorkspace/periods() flips
    it when needed so that the Legendre identity comes out at +8*pi*i.
    """
    curve.require_nondegenerate()
    contour = _pair_ellipse(curve, (curve.lambda1, curve.lambda2),
                            (-curve.lambda1, -curve.lambda2),
                            w_start=1.0 + 0.0j, orientation=+1, label="b")
    seg = contour.segments[0]
    vtop = complex(seg.point(np.array([0.0]))[0])
    seg.w_start = complex(np.sqrt(curve.P(vtop)))
    seg.build_checkpoints()
    return contour


@dataclass(frozen=True)
class CycleIntegrals:
    """All cycle integrals the asymptotics needs, plus tau = Om_b/Om_a."""

    Omega_a: complex
    Omega_b: complex
    Jc_a: complex
    Jc_b: complex
    J_a: complex
    J_b: complex
    j_a: complex
    j_b: complex
    tau: complex
    legendre_residual: float
    j_identity_residual: float

    def check(self, tol: float = 1e-8):
        if self.tau.imag <= 0:
            raise ValueError(f"Im tau = {self.tau.imag} not positive")
        if self.legendre_residual > tol or self.j_identity_residual > tol:
            raise ValueError("cycle-integral identities above tolerance")


class CurveWorkspace:
    """Curve plus calibrated cycles; caches the quadrature products."""

    def __init__(self, curve: SpectralCurve, abs_tol=1e-12, rel_tol=1e-12):
        curve.require_nondegenerate()
        self.curve = curve
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.a = cycle_a(curve)
        self.b = cycle_b(curve)
        om_a = self.integral_a("1/w")
        om_b = self.integral_b("1/w")
        jc_a = self.integral_a("w/lam^2")
        jc_b = self.integral_b("w/lam^2")
        # fix the b-lift so that Om_a*Jc_b - Om_b*Jc_a = +8*pi*i
        leg = om_a * jc_b - om_b * jc_a
        if abs(leg - 8j * np.pi) > abs(leg + 8j * np.pi):
            self.b.segments[0].flip_branch()
            om_b, jc_b = -om_b, -jc_b
        self.Omega_a, self.Omega_b = om_a, om_b
        self.Jc_a, self.Jc_b = jc_a, jc_b

    def integral_a(self, f, lam0=None):
        return contour_integral(self.curve, self.a, f, lam0,
                                self.abs_tol, self.rel_tol)

    def integral_b(self, f, lam0=None):
        return contour_integral(self.curve, self.b, f, lam0,
                                self.abs_tol, self.rel_tol)

    @cached_property
    def tau(self):
        return self.Omega_b / self.Omega_a

    def cycle_integrals(self) -> CycleIntegrals:
        J_a = self.integral_a("w")
        J_b = self.integral_b("w")
        j_a = self.integral_a("lam^2/w^3")
        j_b = self.integral_b("lam^2/w^3")
        leg = abs(self.Omega_a * self.Jc_b - self.Omega_b * self.Jc_a
                  - 8j * np.pi)
        jid = abs(self.Omega_b * J_a - self.Omega_a * J_b
                  - (4.0 * self.curve.A / 3.0) * 1j * np.pi)
        return CycleIntegrals(
            Omega_a=self.Omega_a, Omega_b=self.Omega_b,
            Jc_a=self.Jc_a, Jc_b=self.Jc_b, J_a=J_a, J_b=J_b,
            j_a=j_a, j_b=j_b, tau=self.tau,
            legendre_residual=leg, j_identity_residual=jid)


def periods(curve: SpectralCurve, abs_tol=1e-12, rel_tol=1e-12) -> CycleIntegrals:
    """All six cycle integrals plus tau, with identity residuals attached."""
    return CurveWorkspace(curve, abs_tol, rel_tol).cycle_integrals()


def d_dA_integrals(curve: SpectralCurve, abs_tol=1e-12,
                   rel_tol=1e-12) -> tuple[complex, complex]:
    """(d Jc_a / dA, d Jc_b / dA) = (-Om_a/2, -Om_b/2)."""
    ws = CurveWorkspace(curve, abs_tol, rel_tol)
    return -0.5 * ws.Omega_a, -0.5 * ws.Omega_b


def degenerate_a_cycle_value(nodes: int = 120) -> complex:
    """The A -> 2 limit of the a-integral of w/lam^2.

    In the limit the cycle collapses onto two passes of [-1, 1] with the
    integrand (1 - lam^2)/lam^2, whose double pole at 0 has zero residue;
    a semicircular detour makes the value finite and equal to -8.
    """
    x, wq = np.polynomial.legendre.leggauss(nodes)

    def f(z):
        return (1.0 - z * z) / (z * z)

    def leg(a, b):
        z = 0.5 * (a + b) + 0.5 * (b - a) * x
        return 0.5 * (b - a) * np.sum(wq * f(z))

    r = 0.5
    val = leg(-1.0, -r) + leg(r, 1.0)
    th = 0.5 * (np.pi + 0.0) + 0.5 * (0.0 - np.pi) * x
    z = r * np.exp(1j * th)
    val += 0.5 * (0.0 - np.pi) * np.sum(wq * f(z) * 1j * z)
    # the lower-sheet return pass doubles the value
    return complex(2.0 * val)
