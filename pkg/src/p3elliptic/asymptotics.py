"""Monodromy data, the phase shift x0, and the sn-asymptote machinery.

For 0 < phi < pi/2 the solution labelled by connection matrices (G, Ghat)
behaves like 1/y = i lam1 sn(2 i lam2 (x - x0); lam1/lam2) along the ray
2x = t e^{i phi}, with the phase shift assembled from logarithms of
monodromy entries and the periods.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .algcurve import CurveWorkspace, SpectralCurve, SheetPoint, w_eval
from .thetafun import SnParams, ThetaParams, jacobi_sn, theta_logderiv

__all__ = [
    "MonodromyData", "PhaseShift", "EllipticAsymptote", "ModulusCorrection",
    "validate_monodromy", "phase_shift", "shift_monodromy_m",
    "eval_asymptote", "pole_lattice", "in_strip", "modulus_correction",
    "y_star_as", "connection_formula_residual", "GenericityError",
    "PoleRegionError",
]

SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class GenericityError(ValueError):
    """A monodromy product required by the asymptote formula vanishes."""


class PoleRegionError(ValueError):
    """Evaluation point inside a deleted disk around the pole lattice."""


def _mat(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    return m


def _upper(s) -> np.ndarray:
    return np.array([[1.0, s], [0.0, 1.0]], dtype=complex)


def _lower(s) -> np.ndarray:
    return np.array([[1.0, 0.0], [s, 1.0]], dtype=complex)


@dataclass(frozen=True)
class MonodromyData:
    """Connection matrices, Stokes entries and the linear-system parameters.

    G relates the infinity-normalized solution of sector 0 to the
    origin-normalized one, Ghat the same for sector 1; the four Stokes
    matrices are unipotent with entries s_inf0, s_inf1, s0_0, s0_1.
    """

    G: np.ndarray
    Ghat: np.ndarray
    s_inf0: complex
    s_inf1: complex
    s0_0: complex
    s0_1: complex
    theta0: complex
    thetaInf: complex
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "G", _mat(self.G))
        object.__setattr__(self, "Ghat", _mat(self.Ghat))

    @property
    def S_inf0(self) -> np.ndarray:
        return _upper(self.s_inf0)

    @property
    def S_inf1(self) -> np.ndarray:
        return _lower(self.s_inf1)

    @property
    def S_0_0(self) -> np.ndarray:
        return _upper(self.s0_0)

    @property
    def S_0_1(self) -> np.ndarray:
        return _lower(self.s0_1)

    def genericity_ok(self, phi: float) -> bool:
        g, gh = self.G, self.Ghat
        if phi > 0:
            prod = g[0, 0] * g[0, 1] * g[1, 1] * gh[0, 0] * gh[1, 0]
        else:
            prod = g[0, 0] * g[1, 0] * g[1, 1] * gh[0, 1] * gh[1, 1]
        return bool(abs(prod) > 1e-12)


def validate_monodromy(m: MonodromyData) -> dict[str, float]:
    """Residuals of the monodromy-manifold relations; max under 'max'."""
    G, Gh = m.G, m.Ghat
    th0, thi = m.theta0, m.thetaInf
    e0 = np.diag([np.exp(-1j * np.pi * th0), np.exp(1j * np.pi * th0)])
    ei = np.diag([np.exp(1j * np.pi * thi), np.exp(-1j * np.pi * thi)])
    res: dict[str, float] = {}
    res["det_G"] = float(abs(np.linalg.det(G) - 1.0))
    res["det_Ghat"] = float(abs(np.linalg.det(Gh) - 1.0))
    # S0_0 Ghat = G S_inf0
    r = m.S_0_0 @ Gh - G @ m.S_inf0
    res["gluing"] = float(np.abs(r).max())
    # G^{-1} S0_0 S0_1 e^{-pi i th0 s3} G = S_inf0 S_inf1 e^{pi i thI s3}
    lhs = np.linalg.solve(G, m.S_0_0 @ m.S_0_1 @ e0 @ G)
    rhs = m.S_inf0 @ m.S_inf1 @ ei
    res["cyclic"] = float(np.abs(lhs - rhs).max())
    # trace identity
    res["trace"] = float(abs(
        m.s0_0 * m.s0_1 * np.exp(-1j * np.pi * th0) + 2 * np.cos(np.pi * th0)
        - m.s_inf0 * m.s_inf1 * np.exp(1j * np.pi * thi)
        - 2 * np.cos(np.pi * thi)))
    # entrywise consequences of the gluing relation
    res["g11_hat"] = float(abs(G[0, 0] - m.s0_0 * G[1, 0] - Gh[0, 0]))
    res["g21_hat"] = float(abs(G[1, 0] - Gh[1, 0]))
    res["g22_hat"] = float(abs(G[1, 1] + m.s_inf0 * Gh[1, 0] - Gh[1, 1]))
    # ratio relation of the hat entries
    if abs(G[1, 0]) > 1e-14 and abs(Gh[1, 1]) > 1e-14:
        lhs1 = Gh[0, 0] / Gh[1, 0]
        rhs1 = G[0, 0] / G[1, 0] - m.s0_0
        res["hat_ratio_1"] = float(abs(lhs1 - rhs1))
        den = np.exp(1j * np.pi * (th0 - thi)) + G[0, 1] * G[1, 0]
        rhs2 = G[0, 1] * G[1, 0] / den * rhs1
        res["hat_ratio_2"] = float(abs(Gh[0, 1] / Gh[1, 1] - rhs2))
    # product form used by the phase shift: g22 gh11/(g12 gh21) =
    # (g11 g22/(g12 g21)) (1 - (g21/g11) s0_0), with g12 g21 = g11 g22 - 1
    g11g22 = G[0, 0] * G[1, 1]
    if abs(1.0 - g11g22) > 1e-14 and abs(G[0, 1] * Gh[1, 0]) > 1e-14:
        lhs2 = G[1, 1] * Gh[0, 0] / (G[0, 1] * Gh[1, 0])
        rhs3 = g11g22 / (g11g22 - 1.0) * (1.0 - G[1, 0] / G[0, 0] * m.s0_0)
        res["x0_product"] = float(abs(lhs2 - rhs3))
    res["max"] = max(v for k, v in res.items() if k != "max")
    return res


def monodromy_from_g(G, s0_0: complex, theta0: complex,
                     thetaInf: complex) -> MonodromyData:
    """Complete a monodromy-manifold point from (G, s0_0, theta0, thetaInf).

    The remaining Stokes entries follow from the sector-product relations,
    and Ghat = S0_0^{-1} G S_inf0; the result satisfies the manifold
    equations identically.
    """
    G = _mat(G)
    d = np.linalg.det(G)
    if abs(d - 1.0) > 1e-12:
        G = G / np.sqrt(d)
    g11, g21 = G[0, 0], G[1, 0]
    g12, g22 = G[0, 1], G[1, 1]
    if min(abs(g12), abs(g21)) < 1e-14:
        raise GenericityError("g12 and g21 must be nonzero")
    if abs(s0_0 - g11 / g21) < 1e-14:
        raise GenericityError("s0_0 = g11/g21 is non-generic")
    # product relation fixes s0_1, then the cyclic relation factors as the
    # unipotent pair S_inf0 S_inf1
    e0i = np.exp(1j * np.pi * (theta0 - thetaInf))
    s0_1 = ((-1.0 - e0i / (g12 * g21)) / (s0_0 - g11 / g21)
            - (g22 / g12) * np.exp(2j * np.pi * theta0))
    e0 = np.diag([np.exp(-1j * np.pi * theta0), np.exp(1j * np.pi * theta0)])
    ei_inv = np.diag([np.exp(-1j * np.pi * thetaInf),
                      np.exp(1j * np.pi * thetaInf)])
    P = np.linalg.solve(G, _upper(s0_0) @ _lower(s0_1) @ e0 @ G) @ ei_inv
    if abs(P[1, 1] - 1.0) > 1e-9:
        raise GenericityError("Stokes completion is inconsistent: "
                              f"P22 = {P[1, 1]}")
    s_inf0 = complex(P[0, 1])
    s_inf1 = complex(P[1, 0])
    Ghat = np.linalg.solve(_upper(s0_0), G @ _upper(s_inf0))
    return MonodromyData(G=G, Ghat=Ghat, s_inf0=s_inf0,
                         s_inf1=s_inf1, s0_0=complex(s0_0),
                         s0_1=complex(s0_1), theta0=theta0,
                         thetaInf=thetaInf)


def shift_monodromy_m(m: MonodromyData, mshift: int) -> MonodromyData:
    """Connection data seen from the rotated ray phi + m*pi.

    G_m = e^{pi i m th0 s3/2} G (S_inf0 S_inf1 e^{pi i thI s3})^m
          e^{-pi i m thI s3/2},
    Ghat_m = e^{pi i m th0 s3/2} Ghat S_inf0^{-1} (...)^m S_inf0
             e^{-pi i m thI s3/2}.
    """
    mshift = int(mshift)
    th0, thi = m.theta0, m.thetaInf
    ei = np.diag([np.exp(1j * np.pi * thi), np.exp(-1j * np.pi * thi)])
    core = m.S_inf0 @ m.S_inf1 @ ei
    power = np.linalg.matrix_power(core, mshift) if mshift >= 0 else \
        np.linalg.matrix_power(np.linalg.inv(core), -mshift)
    el = np.diag([np.exp(0.5j * np.pi * mshift * th0),
                  np.exp(-0.5j * np.pi * mshift * th0)])
    er = np.diag([np.exp(-0.5j * np.pi * mshift * thi),
                  np.exp(0.5j * np.pi * mshift * thi)])
    G_m = el @ m.G @ power @ er
    Gh_m = el @ m.Ghat @ np.linalg.inv(m.S_inf0) @ power @ m.S_inf0 @ er
    # Stokes entries of the rotated system: S_k -> S_{k+2m} conjugated by
    # the half-angle exponentials, net factor e^{+-pi i m theta}
    rot0 = np.exp(-1j * np.pi * mshift * th0)
    roti = np.exp(1j * np.pi * mshift * thi)
    return MonodromyData(G=G_m, Ghat=Gh_m,
                         s_inf0=m.s_inf0 * roti, s_inf1=m.s_inf1 / roti,
                         s0_0=m.s0_0 * rot0, s0_1=m.s0_1 / rot0,
                         theta0=th0, thetaInf=thi,
                         extras={"mshift": mshift})


# ---------------------------------------------------------------------------
# phase shift and the asymptote
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseShift:
    """x0 modulo the half-lattice (Om_a Z + Om_b Z)/(2i).

    branch_choice records the principal-log values used before lattice
    reduction, for reproducibility.
    """

    x0: complex
    alpha: float  # 2i x0 = alpha Om_a + beta Om_b after reduction
    beta: float
    branch_choice: tuple[complex, complex]


def _decompose(z, om_a, om_b):
    """Real (alpha, beta) with z = alpha om_a + beta om_b."""
    M = np.array([[om_a.real, om_b.real], [om_a.imag, om_b.imag]])
    ab = np.linalg.solve(M, np.array([z.real, z.imag]))
    return float(ab[0]), float(ab[1])


def phase_shift(m: MonodromyData, phi: float, cyc) -> PhaseShift:
    """The phase shift x0 of the sn-asymptote for direction phi.

    For phi > 0:
      2i x0 = (1/2пi)(Om_a log(g11 g22) + Om_b log(g12 gh21/(g22 gh11)))
              - (Om_a/4)(th0 - thI + 1) - Om_b/2  mod Om_a Z + Om_b Z;
    for phi < 0 the second log uses g11 gh22/(g21 gh12).  Principal logs,
    then reduction of the lattice coordinates to [0, 1).
    """
    G, Gh = m.G, m.Ghat
    om_a, om_b = cyc.Omega_a, cyc.Omega_b
    if not m.genericity_ok(phi):
        raise GenericityError("monodromy entries violate the genericity "
                              f"condition for phi = {phi}")
    p1 = G[0, 0] * G[1, 1]
    if phi > 0:
        p2 = G[0, 1] * Gh[1, 0] / (G[1, 1] * Gh[0, 0])
    else:
        p2 = G[0, 0] * Gh[1, 1] / (G[1, 0] * Gh[0, 1])
    l1, l2 = cmath.log(p1), cmath.log(p2)
    two_i_x0 = (om_a * l1 + om_b * l2) / (2j * np.pi) \
        - 0.25 * om_a * (m.theta0 - m.thetaInf + 1.0) - 0.5 * om_b
    alpha, beta = _decompose(two_i_x0, om_a, om_b)
    alpha -= math.floor(alpha)
    beta -= math.floor(beta)
    red = alpha * om_a + beta * om_b
    return PhaseShift(x0=red / 2j, alpha=alpha, beta=beta,
                      branch_choice=(l1, l2))


@dataclass(frozen=True)
class EllipticAsymptote:
    """Everything needed to evaluate y_as along the ray 2x = t e^{i phi}."""

    phi: float
    A_phi: complex
    lambda1: complex
    lambda2: complex
    x0: PhaseShift
    Omega_a: complex
    Omega_b: complex
    t_inf: float = 15.0
    kappa0: float = 5.0
    delta0: float = 0.0  # 0: derive from the pole spacing

    @classmethod
    def build(cls, m: MonodromyData, phi: float, ws: CurveWorkspace,
              **strip) -> "EllipticAsymptote":
        x0 = phase_shift(m, phi, ws)
        curve = ws.curve
        asym = cls(phi=phi, A_phi=curve.A, lambda1=curve.lambda1,
                   lambda2=curve.lambda2, x0=x0, Omega_a=ws.Omega_a,
                   Omega_b=ws.Omega_b, **strip)
        return asym

    @property
    def sn_params(self) -> SnParams:
        return SnParams(k=self.lambda1 / self.lambda2,
                        K=complex(self.lambda2 * self.Omega_a / 4.0),
                        Kprime=complex(self.lambda2 * self.Omega_b / 2j))

    @property
    def delta0_effective(self) -> float:
        if self.delta0 > 0:
            return self.delta0
        spacing = min(abs(self.Omega_a) / 2.0, abs(self.Omega_b))
        return 0.1 * spacing


def eval_asymptote(a: EllipticAsymptote, x: complex,
                   strict: bool = False) -> complex:
    """Leading-order y_as(x) = 1/(i lam1 sn(2 i lam2 (x - x0); lam1/lam2)).

    Zeros of sn are poles of y_as; with strict=True, evaluation inside a
    deleted delta0-disk of the pole lattice of 1/y raises PoleRegionError.
    """
    if strict and not in_strip(2.0 * x * np.exp(-1j * a.phi), a):
        raise PoleRegionError(f"2x = {2 * x} outside the admissible strip")
    u = 2j * a.lambda2 * (x - a.x0.x0)
    s = a.sn_params
    sn = jacobi_sn(u, s, pole_tol=1e14)
    val = 1j * a.lambda1 * sn
    if abs(val) < 1e-14:
        return complex(np.inf)
    return 1.0 / val


def pole_lattice(a: EllipticAsymptote, window_center: complex,
                 window_radius: float) -> list[complex]:
    """Points of P(x0) = 2 x0 - i(Om_b/2 + Om_a Z/2 + Om_b Z) in a disk.

    These are the sigma-values (in the 2x-plane) where sn(i lam2
    (sigma - 2 x0)) blows up.
    """
    base = 2.0 * a.x0.x0 - 0.5j * a.Omega_b
    out = []
    # bound the index ranges from the window radius
    M = np.array([[a.Omega_a.real / 2, a.Omega_b.real],
                  [a.Omega_a.imag / 2, a.Omega_b.imag]])
    Minv = np.linalg.inv(M)
    corners = [window_center - base + window_radius * (dx + 1j * dy)
               for dx in (-1, 1) for dy in (-1, 1)]
    mn = []
    for c in corners:
        mn.append(Minv @ np.array([(1j * c).real, (1j * c).imag]))
    mn = np.array(mn)
    m_lo, n_lo = np.floor(mn.min(axis=0)) - 1
    m_hi, n_hi = np.ceil(mn.max(axis=0)) + 1
    for mm in range(int(m_lo), int(m_hi) + 1):
        for nn in range(int(n_lo), int(n_hi) + 1):
            sig = base - 1j * (0.5 * a.Omega_a * mm + a.Omega_b * nn)
            if abs(sig - window_center) <= window_radius:
                out.append(complex(sig))
    return sorted(out, key=lambda z: (z.real, z.imag))


def in_strip(t: complex, a: EllipticAsymptote) -> bool:
    """Membership in the cheese-like strip S(phi, t_inf, kappa0, delta0).

    t parametrizes the ray by 2x = t e^{i phi}; the strip demands
    Re t > t_inf, |Im t| < kappa0, and distance >= delta0 from every
    pole-lattice point in the 2x-plane.
    """
    t = complex(t)
    if t.real <= a.t_inf or abs(t.imag) >= a.kappa0:
        return False
    xi = t * np.exp(1j * a.phi)
    d0 = a.delta0_effective
    for sig in pole_lattice(a, xi, 4.0 * d0 + 1e-12):
        if abs(xi - sig) < d0:
            return False
    return True


@dataclass(frozen=True)
class ModulusCorrection:
    """B_phi(t) solved from the theta-side relation; a_phi = A_phi + B/t."""

    B_phi: complex
    a_phi: complex
    t: complex
    log_g: complex


def modulus_correction(a: EllipticAsymptote, m: MonodromyData, t: complex,
                       cyc, p: ThetaParams | None = None) -> ModulusCorrection:
    """Solve the linear relation for the modulus correction B_phi(t).

    In the orientation conventions of this package the relation reads
      i e^{i phi}(t Jc_a - (Om_a/2) B)
          = 4 (theta'/theta)(z, tau) - 4 pi i - 4 log(g-frak),
    z = i(e^{i phi} t - 2 x0)/Om_a.  Since log branches and the lattice
    representative of x0 shift B by multiples of 16 pi e^{-i phi}/Om_a,
    the representative of smallest modulus is returned (B is bounded on
    the strip, well below one quantum).
    """
    if p is None:
        p = ThetaParams.from_tau(a.Omega_b / a.Omega_a)
    G, Gh = m.G, m.Ghat
    if a.phi > 0:
        gfrak = G[0, 1] * Gh[1, 0] / (G[1, 1] * Gh[0, 0])
    else:
        gfrak = G[0, 0] * Gh[1, 1] / (G[1, 0] * Gh[0, 1])
    if gfrak == 0:
        raise GenericityError("g-frak vanishes")
    eiphi = np.exp(1j * a.phi)
    z = 1j * (eiphi * t - 2.0 * a.x0.x0) / a.Omega_a
    rhs = (4.0 * theta_logderiv(z, p) - 4j * np.pi - 4.0 * cmath.log(gfrak))
    B = (2.0 / a.Omega_a) * (t * cyc.Jc_a + 1j * np.exp(-1j * a.phi) * rhs)
    quantum = 16.0 * np.pi * np.exp(-1j * a.phi) / a.Omega_a
    k = int(np.round((B / quantum).real))
    B = B - k * quantum
    return ModulusCorrection(B_phi=complex(B), a_phi=complex(a.A_phi + B / t),
                             t=complex(t), log_g=cmath.log(gfrak))


def y_star_as(a: EllipticAsymptote, mc: ModulusCorrection, t: complex,
              theta0: complex, thetaInf: complex,
              dt: float = 1e-4) -> complex:
    """Companion value y*_as compatible with (d/dt) y_as.

    y*_as = -y_as/t + e^{i phi} sqrt(y^4 + A y^2 + 1
            + (4 e^{-i phi}(th0 y^3 + thI y) + B y^2)/t),
    with the square-root branch selected against a finite difference of
    y_as.
    """
    x = 0.5 * t * np.exp(1j * a.phi)
    y = eval_asymptote(a, x)
    rad = (y ** 4 + a.A_phi * y * y + 1.0
           + (4.0 * np.exp(-1j * a.phi) * (theta0 * y ** 3 + thetaInf * y)
              + mc.B_phi * y * y) / t)
    root = np.exp(1j * a.phi) * np.sqrt(rad)
    dx = 0.5 * dt * np.exp(1j * a.phi)
    dydt = (eval_asymptote(a, x + dx) - eval_asymptote(a, x - dx)) / (2 * dt)
    base = -y / t
    if abs(base + root - dydt) <= abs(base - root - dydt):
        return complex(base + root)
    return complex(base - root)


def connection_formula_residual(m: MonodromyData, a: EllipticAsymptote,
                                mc: ModulusCorrection, t: complex,
                                y_as: complex, ystar_as: complex,
                                ) -> tuple[complex, complex]:
    """Residuals (b-form, a-form) of the leading connection formulas.

    b-form: log(g11 g22) - [ (i e^{i phi} t/4) * b-cycle of w(a_phi)/lam^2
            + (1/4) * b-cycle of W + (pi i/2)(th0 - thI) + pi i ],
    reduced mod 2 pi i; a-form: log(g-frak) + [same with a-cycle, sign
    flipped] reduced mod 2 pi i.  The integrals run over the curve with
    the corrected modulus a_phi; lam_pm = +-i/y_as with the sheet fixed by
    w(lam_pm) = e^{-i phi} y*_as / y_as^2.
    """
    ws2 = CurveWorkspace(SpectralCurve.from_modulus(mc.a_phi))
    lam_p = 1j / y_as
    wval = np.exp(-1j * a.phi) * ystar_as / (y_as * y_as)
    w_up = w_eval(ws2.curve, SheetPoint(lam_p, +1))
    sheet = +1 if abs(w_up - wval) <= abs(w_up + wval) else -1
    wp = w_up if sheet > 0 else -w_up
    wm = wp  # w is even; both points carry the same declared value

    def W(lam, w):
        return (wp / (lam - lam_p) - wm / (lam + lam_p)
                - lam_p + (-lam_p)) / w

    eiphi = np.exp(1j * a.phi)
    Jb = ws2.integral_b("w/lam^2")
    Ja = ws2.integral_a("w/lam^2")
    Wb = ws2.integral_b(W)
    Wa = ws2.integral_a(W)
    G, Gh = m.G, m.Ghat
    lhs_b = cmath.log(G[0, 0] * G[1, 1])
    rhs_b = (0.25j * eiphi * t * Jb + 0.25 * Wb
             + 0.5j * np.pi * (m.theta0 - m.thetaInf) + 1j * np.pi)
    if a.phi > 0:
        gfrak = G[0, 1] * Gh[1, 0] / (G[1, 1] * Gh[0, 0])
    else:
        gfrak = G[0, 0] * Gh[1, 1] / (G[1, 0] * Gh[0, 1])
    lhs_a = cmath.log(gfrak)
    rhs_a = -0.25j * eiphi * t * Ja - 0.25 * Wa + 1j * np.pi

    def mod_2pii(z):
        k = np.round(np.imag(z) / (2 * np.pi))
        return z - 2j * np.pi * k

    return (complex(mod_2pii(lhs_b - rhs_b)), complex(mod_2pii(lhs_a - rhs_a)))
