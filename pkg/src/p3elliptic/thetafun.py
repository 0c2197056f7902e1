"""Theta function, Jacobi sn for complex modulus, and the Abel map.

theta(z, tau) = sum_n exp(pi i tau n^2 + 2 pi i z n); its quotients give
sn.  Quarter periods come either from an AGM iteration (standalone
modulus) or from the curve periods via K = lam2 Om_a / 4 and
i K' = lam2 Om_b / 2.  All large arguments are reduced by the exact
quasi-periodicity factors before summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algcurve import (Contour, CurveWorkspace, SheetPoint, SpectralCurve,
                       _Polyline, _dist_point_segment, contour_integral,
                       w_eval)

__all__ = [
    "ThetaParams", "theta", "theta_logderiv", "SnParams", "jacobi_sn",
    "sn_star", "AbelCoordinate", "abel_F", "g0", "W_cycle_integrals",
    "SnPoleError", "agm",
]


class SnPoleError(ArithmeticError):
    """sn was evaluated too close to one of its poles."""

    def __init__(self, u, value_direction):
        super().__init__(f"sn pole at u = {u}")
        self.u = u
        self.value_direction = value_direction  # phase of the blow-up


def _truncation(tau: complex, eps: float = 1e-18) -> int:
    im = np.imag(tau)
    if im <= 0:
        raise ValueError(f"Im tau = {im} must be positive")
    return int(np.ceil(np.sqrt(-np.log(eps) / (np.pi * im)))) + 2


@dataclass(frozen=True)
class ThetaParams:
    """tau with Im tau > 0, series truncation, and nu = (1 + tau)/2."""

    tau: complex
    truncation: int
    nu: complex

    @classmethod
    def from_tau(cls, tau: complex, eps: float = 1e-18) -> "ThetaParams":
        tau = complex(tau)
        return cls(tau=tau, truncation=_truncation(tau, eps),
                   nu=(1.0 + tau) / 2.0)


def _reduce_z(z, tau):
    """z = zr + m*tau + k with zr in the fundamental band around 0."""
    m = int(np.round(np.imag(z) / np.imag(tau)))
    zr = z - m * tau
    k = int(np.round(np.real(zr)))
    return zr - k, m, k


def theta(z: complex, p: ThetaParams) -> complex:
    """theta(z, tau), stable for large |Im z| via quasi-periodic reduction.

    Because of the exp(-pi i m^2 tau - 2 pi i m z) prefactor the result can
    overflow for very distant z; quotients should use theta_logderiv or
    reduce arguments first.
    """
    tau = p.tau
    zr, m, _k = _reduce_z(z, tau)
    n = np.arange(-p.truncation, p.truncation + 1)
    val = np.exp(1j * np.pi * tau * n * n + 2j * np.pi * zr * n).sum()
    if m == 0:
        return complex(val)
    return complex(np.exp(-1j * np.pi * m * m * tau - 2j * np.pi * m * zr) * val)


def theta_logderiv(z: complex, p: ThetaParams) -> complex:
    """d/dz log theta(z, tau); lattice shifts contribute exactly -2 pi i m."""
    tau = p.tau
    zr, m, _k = _reduce_z(z, tau)
    n = np.arange(-p.truncation, p.truncation + 1)
    terms = np.exp(1j * np.pi * tau * n * n + 2j * np.pi * zr * n)
    den = terms.sum()
    if abs(den) < 1e-280:
        raise ZeroDivisionError(f"theta vanishes at z = {z}")
    return complex(2j * np.pi * ((n * terms).sum() / den - m))


# ---------------------------------------------------------------------------
# AGM and Jacobi sn
# ---------------------------------------------------------------------------

def agm(a: complex, b: complex, tol: float = 1e-16) -> complex:
    """Arithmetic-geometric mean with the standard branch rule.

    Each square root is chosen so that |a - b| <= |a + b| (ties broken
    toward Im(b/a) >= 0), which keeps the iteration on the principal
    branch for complex arguments.
    """
    a = complex(a)
    b = complex(b)
    gap_prev = np.inf
    for _ in range(64):
        am = 0.5 * (a + b)
        gm = complex(np.sqrt(a * b))
        if abs(am - gm) > abs(am + gm):
            gm = -gm
        elif abs(am - gm) == abs(am + gm) and np.imag(gm / am) < 0:
            gm = -gm
        a, b = am, gm
        gap = abs(a - b)
        if gap < tol * abs(a) or gap >= gap_prev:
            return 0.5 * (a + b)
        gap_prev = gap
    raise ArithmeticError("AGM did not converge")


@dataclass(frozen=True)
class SnParams:
    """Elliptic modulus and quarter periods for sn.

    Built from a curve, k = lam1/lam2, K = lam2*Om_a/4 and
    iK' = lam2*Om_b/2; built from k alone, the quarter periods come from
    AGM with the branch keeping Im(iK'/K) > 0.
    """

    k: complex
    K: complex
    Kprime: complex

    @classmethod
    def from_modulus(cls, k: complex) -> "SnParams":
        k = complex(k)
        if k * k == 0.0 or k * k == 1.0:
            raise ValueError("modulus k^2 must avoid 0 and 1")
        kp = complex(np.sqrt(1.0 - k * k))
        K = np.pi / (2.0 * agm(1.0, kp))
        Kp = np.pi / (2.0 * agm(1.0, k))
        if np.imag(1j * Kp / K) <= 0:
            Kp = -Kp
        return cls(k=k, K=complex(K), Kprime=complex(Kp))

    @classmethod
    def from_curve(cls, ws: "CurveWorkspace") -> "SnParams":
        curve = ws.curve
        K = curve.lambda2 * ws.Omega_a / 4.0
        Kp = curve.lambda2 * ws.Omega_b / (2.0 * 1j)
        return cls(k=curve.lambda1 / curve.lambda2, K=complex(K),
                   Kprime=complex(Kp))

    @property
    def tau_sn(self) -> complex:
        return 1j * self.Kprime / self.K

    @property
    def nome(self) -> complex:
        return complex(np.exp(1j * np.pi * self.tau_sn))


def _jacobi_theta_ratio(v: complex, q: complex, tau_sn: complex, nmax: int):
    """(theta1/theta4)(v | q) with quasi-periodic reduction, plus theta1(v)."""
    m = int(np.round(np.imag(v) / (np.pi * np.imag(tau_sn))))
    v0 = v - m * np.pi * tau_sn
    k = int(np.round(np.real(v0) / np.pi))
    v0 = v0 - k * np.pi
    n = np.arange(0, nmax + 1)
    qp = q ** ((n + 0.5) ** 2)
    t1 = 2.0 * np.sum((-1.0) ** n * qp * np.sin((2 * n + 1) * v0))
    nn = np.arange(1, nmax + 1)
    qn = q ** (nn * nn)
    t4 = 1.0 + 2.0 * np.sum((-1.0) ** nn * qn * np.cos(2 * nn * v0))
    # theta1 and theta4 share the pi*tau quasi-period factor; the ratio only
    # keeps (-1)^k from the pi-shift of theta1
    return ((-1.0) ** k) * t1 / t4, t1, t4


def jacobi_sn(u: complex, s: SnParams, pole_tol: float = 1e8) -> complex:
    """Jacobi sn(u; k) as a theta quotient.

    sn solves (dz/du)^2 = (1 - z^2)(1 - k^2 z^2) with sn(0) = 0,
    sn'(0) = 1.  Values beyond pole_tol raise SnPoleError carrying the
    blow-up direction.
    """
    tau_sn = s.tau_sn
    if np.imag(tau_sn) <= 0:
        raise ValueError("quarter periods give Im(iK'/K) <= 0")
    q = s.nome
    nmax = _truncation(tau_sn) + 2
    v = np.pi * u / (2.0 * s.K)
    n = np.arange(0, nmax + 1)
    qp = q ** ((n + 0.5) ** 2)
    t2_0 = 2.0 * np.sum(qp)
    nn = np.arange(1, nmax + 1)
    qn = q ** (nn * nn)
    t3_0 = 1.0 + 2.0 * np.sum(qn)
    ratio, _t1, t4 = _jacobi_theta_ratio(v, q, tau_sn, nmax)
    if abs(t4) < 1.0 / pole_tol:
        raise SnPoleError(u, np.sign(ratio.real) + 0j)
    val = (t3_0 / t2_0) * ratio
    if abs(val) > pole_tol:
        raise SnPoleError(u, val / abs(val))
    return complex(val)


def sn_star(u: complex, ws: CurveWorkspace) -> complex:
    """lam = lam1 * sn(lam2 u; lam1/lam2), the curve's uniformizer.

    Satisfies (d lam/du)^2 = w(A, lam)^2 and has periods Om_a and Om_b.
    """
    s = SnParams.from_curve(ws)
    return ws.curve.lambda1 * jacobi_sn(ws.curve.lambda2 * u, s)


# ---------------------------------------------------------------------------
# Abel map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelCoordinate:
    """Point of C/(Z + tau Z); value is the canonical representative."""

    value: complex
    tau: complex

    @classmethod
    def reduce(cls, z: complex, tau: complex) -> "AbelCoordinate":
        y = np.imag(z) / np.imag(tau)
        x = np.real(z) - y * np.real(tau)
        x -= math.floor(x)
        y -= math.floor(y)
        return cls(complex(x + y * tau), tau)

    def distance(self, other: complex) -> float:
        """Distance to another lattice coordinate, minimized over the cell."""
        best = np.inf
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                cand = abs(self.value - (AbelCoordinate.reduce(other, self.tau)
                                         .value + dm + dn * self.tau))
                best = min(best, cand)
        return float(best)


def _detoured_points(curve: SpectralCurve, a: complex, b: complex,
                     skip=()) -> list[complex]:
    """Waypoints from a to b sidestepping turning points near the segment."""
    clearance = 0.05 * abs(curve.lambda2 - curve.lambda1)
    detours = []
    seg_dir = (b - a) / abs(b - a) if b != a else 1.0
    for root in curve.roots:
        if any(abs(root - s) < 1e-12 for s in skip):
            continue
        if _dist_point_segment(root, a, b) < clearance:
            side = root + 1j * seg_dir * 2.0 * clearance
            detours.append((abs(root - a), side))
    detours.sort(key=lambda pair: pair[0])
    return [a] + [p for _, p in detours] + [b]


def abel_u(ws: CurveWorkspace, p: SheetPoint) -> complex:
    """u(p) = (1/Om_a) * integral from lam1 to p of dlam/w.

    The canonical route runs straight from the turning point lam1 (with
    detours around other turning points); the branch is anchored at the
    endpoint by the declared sheet of p.
    """
    curve = ws.curve
    wp = w_eval(curve, p)
    pts = _detoured_points(curve, curve.lambda1, complex(p.lam),
                           skip=(curve.lambda1,))
    # integrate from p back to lam1 with the branch anchored at p
    seg = _Polyline(curve, pts[::-1], w_start=wp, sqrt_end=True)
    seg.build_checkpoints()
    contour = Contour(curve, [seg], label="abel")
    val = contour_integral(curve, contour, "1/w",
                           abs_tol=ws.abs_tol, rel_tol=ws.rel_tol)
    return -val / ws.Omega_a


def abel_F(ws: CurveWorkspace, frm: SheetPoint, to: SheetPoint) -> AbelCoordinate:
    """F(frm, to) = (1/om_a) * integral of dlam/w between curve points.

    Path independence holds modulo Z + tau Z; the returned coordinate is
    the canonical-cell representative of u(to) - u(frm).
    """
    if frm.lam == to.lam and frm.sheet == to.sheet:
        return AbelCoordinate.reduce(0.0, ws.tau)
    return AbelCoordinate.reduce(abel_u(ws, to) - abel_u(ws, frm), ws.tau)


def F_between_sheets(ws: CurveWorkspace, lam0: complex) -> complex:
    """F(lam0^-, lam0^+) along the route through lam1: 2 u(lam0^+).

    Unreduced value; the theta identities use this representative.
    """
    return 2.0 * abel_u(ws, SheetPoint(lam0, +1))


# ---------------------------------------------------------------------------
# the theta-side coefficients of Section-6 type identities
# ---------------------------------------------------------------------------

def g0(ws: CurveWorkspace, lambda0: SheetPoint,
       p: ThetaParams | None = None) -> complex:
    """Coefficient g0 with
    -g0(lam0) * om_a = a-cycle integral of dlam/((lam - lam0) w).

    g0(lam0) = w'(lam0+)/(2 w(lam0+))
               - (pi i + (theta'/theta)(F(lam0-,lam0+) + nu, tau))
                 / (om_a w(lam0+)).
    """
    curve = ws.curve
    lam0 = complex(lambda0.lam)
    if min(abs(lam0 - r) for r in curve.roots) < 1e-10 * curve.scale:
        raise ValueError("g0 is singular at a turning point")
    if p is None:
        p = ThetaParams.from_tau(ws.tau)
    w0 = w_eval(curve, SheetPoint(lam0, +1))
    wprime = (2.0 * lam0 ** 3 - curve.A * lam0) / w0
    F = F_between_sheets(ws, lam0)
    return wprime / (2.0 * w0) - (1j * np.pi + theta_logderiv(F + p.nu, p)) / (
        ws.Omega_a * w0)


def _w_declared(ws, p: SheetPoint) -> complex:
    return w_eval(ws.curve, p)


def W_cycle_integrals(ws: CurveWorkspace, lambda_plus: SheetPoint,
                      lambda_minus: SheetPoint,
                      p: ThetaParams | None = None,
                      lattice_shifts: tuple[int, int] = (1, 1),
                      ) -> tuple[complex, complex]:
    """Cycle integrals of
    W(lam) = (w(lam+)/(lam-lam+) - w(lam-)/(lam-lam-) - lam+ + lam-) / w(lam)
    assembled from the theta-function identities; returns (a, b) values.

    Uses, per pole lam0 with declared value w(lam0):
      a-cycle of dlam/((lam-lam0) w) = -g0(lam0) om_a,
      b-cycle of the same = 2 pi i (F(lam0-,lam0+) + k)/w(lam0+) + tau * (a),
    with the integer k the lattice shift between the canonical F route
    (through lam1) and the b-compatible representative; k = 1 for both
    poles when they lie in the central region enclosed by the a-cycle.
    Valid for poles inside the a-loop and outside the b-loop (the class
    drawn in the paper's cycle figure); the constant part of W contributes
    (lam_- - lam_+) times the plain periods.
    """
    if p is None:
        p = ThetaParams.from_tau(ws.tau)
    lp, lm = complex(lambda_plus.lam), complex(lambda_minus.lam)
    if lp == lm and lambda_plus.sheet == lambda_minus.sheet:
        return 0.0 + 0.0j, 0.0 + 0.0j
    wp = _w_declared(ws, lambda_plus)
    wm = _w_declared(ws, lambda_minus)
    kp, km = lattice_shifts

    def pole_pieces(lam0, k):
        ga = -g0(ws, SheetPoint(lam0, +1), p) * ws.Omega_a
        w0 = w_eval(ws.curve, SheetPoint(lam0, +1))
        F = F_between_sheets(ws, lam0)
        gb = 2j * np.pi * (F + k) / w0 + ws.tau * ga
        return ga, gb

    ga_p, gb_p = pole_pieces(lp, kp)
    ga_m, gb_m = pole_pieces(lm, km)
    Wa = wp * ga_p - wm * ga_m + (lm - lp) * ws.Omega_a
    Wb = wp * gb_p - wm * gb_m + (lm - lp) * ws.Omega_b
    return complex(Wa), complex(Wb)


def W_direct(ws: CurveWorkspace, lambda_plus: SheetPoint,
             lambda_minus: SheetPoint) -> tuple[complex, complex]:
    """The same cycle integrals by direct quadrature of W."""
    lp, lm = complex(lambda_plus.lam), complex(lambda_minus.lam)
    wp = _w_declared(ws, lambda_plus)
    wm = _w_declared(ws, lambda_minus)

    def W(lam, w):
        return (wp / (lam - lp) - wm / (lam - lm) - lp + lm) / w

    return ws.integral_a(W), ws.integral_b(W)
