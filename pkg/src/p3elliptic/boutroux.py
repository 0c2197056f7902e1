"""Solver for the Boutroux conditions Im(e^{i phi} * cycle integrals) = 0.

The modulus A_phi is the unique complex parameter for which both cycle
integrals of w/lam^2 become real after rotation by e^{i phi}.  Newton's
method uses the exact Jacobian assembled from dJc/dA = -Omega/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algcurve import CurveWorkspace, DegenerateCurveError, SpectralCurve

__all__ = [
    "BoutrouxResidual", "BoutrouxSolution", "TrajectorySample",
    "residual", "solve_boutroux", "continue_trajectory",
    "modulus_for_any_phi", "h_ratio", "NoConvergenceError",
]

HALF_PI = 0.5 * math.pi


class NoConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoutrouxResidual:
    """The two real conditions; both vanish exactly at A_phi."""

    r_a: float
    r_b: float

    @property
    def norm(self) -> float:
        return math.hypot(self.r_a, self.r_b)


@dataclass(frozen=True)
class BoutrouxSolution:
    phi: float
    A_phi: complex
    residual_norm: float
    newton_iters: int


@dataclass(frozen=True)
class TrajectorySample:
    """Moduli along a phi-grid, plus the turning-point opening near phi = 0.

    eps_phi and theta_phi describe lam1 = 1 - eps_phi * exp(i theta_phi) at
    the first grid point; theta_phi -> -pi/4 as phi -> 0+.
    """

    solutions: tuple[BoutrouxSolution, ...]
    eps_phi: float
    theta_phi: float

    @property
    def phis(self) -> np.ndarray:
        return np.array([s.phi for s in self.solutions])

    @property
    def moduli(self) -> np.ndarray:
        return np.array([s.A_phi for s in self.solutions])


def _workspace(A, tol=1e-12):
    return CurveWorkspace(SpectralCurve.from_modulus(A), tol, tol)


def residual(phi: float, A: complex,
             workspace: CurveWorkspace | None = None) -> BoutrouxResidual:
    """Imaginary parts of e^{i phi} times the two cycle integrals of w/lam^2."""
    ws = workspace if workspace is not None else _workspace(A)
    e = np.exp(1j * phi)
    return BoutrouxResidual(float(np.imag(e * ws.Jc_a)),
                            float(np.imag(e * ws.Jc_b)))


def solve_boutroux(phi: float, A_init: complex | None = None,
                   tol: float = 1e-10, max_iters: int = 50) -> BoutrouxSolution:
    """Newton solve of the two real conditions in (Re A, Im A).

    Directions phi in (pi/2) Z return the exact constants +2 / -2 (the
    curve degenerates there and quadrature is invalid).  For other phi an
    initial guess inside the Newton basin is required; without one the
    precomputed trajectory table supplies it.
    """
    k = phi / HALF_PI
    if abs(k - round(k)) < 1e-14:
        A = 2.0 if round(k) % 2 == 0 else -2.0
        return BoutrouxSolution(phi, complex(A), 0.0, 0)
    if A_init is None:
        return BoutrouxSolution(phi, modulus_for_any_phi(phi), 0.0, -1)
    A = complex(A_init)
    e = np.exp(1j * phi)
    for it in range(max_iters):
        ws = _workspace(A)
        r = np.array([np.imag(e * ws.Jc_a), np.imag(e * ws.Jc_b)])
        rn = float(np.hypot(r[0], r[1]))
        if rn < tol:
            return BoutrouxSolution(phi, A, rn, it)
        # d Im(e Jc)/d(x, y) with dJc/dA = -Omega/2, A = x + i y
        J = -0.5 * np.array([
            [np.imag(e * ws.Omega_a), np.real(e * ws.Omega_a)],
            [np.imag(e * ws.Omega_b), np.real(e * ws.Omega_b)]])
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-13 * (abs(J).max() ** 2 + 1e-300):
            raise NoConvergenceError(
                f"near-singular Boutroux Jacobian at A = {A} (phi = {phi})")
        dx = np.linalg.solve(J, -r)
        step = 1.0
        for _ in range(10):
            A_new = A + step * (dx[0] + 1j * dx[1])
            try:
                r_new = residual(phi, A_new)
            except (DegenerateCurveError, RuntimeError):
                step *= 0.5
                continue
            if r_new.norm < rn:
                A = A_new
                break
            step *= 0.5
        else:
            raise NoConvergenceError(f"no descent from A = {A} (phi = {phi})")
    raise NoConvergenceError(
        f"Newton did not reach tol = {tol} in {max_iters} iterations")


def continue_trajectory(phi_max: float, n_steps: int = 50,
                        tol: float = 1e-10) -> TrajectorySample:
    """Continuation of A_phi over (0, phi_max], seeded near A = 2.

    The first step starts from A = 2 - 0.05i (the trajectory opens
    downward for phi > 0); each subsequent step reuses the previous
    modulus.
    """
    if not 0.0 < phi_max <= HALF_PI:
        raise ValueError("phi_max must lie in (0, pi/2]")
    end = min(phi_max, HALF_PI - 1e-3)
    phis = np.linspace(end / n_steps, end, n_steps)
    A = 2.0 - 0.0005 - 0.05j
    sols = []
    for phi in phis:
        sol = solve_boutroux(float(phi), A, tol=tol)
        A = sol.A_phi
        sols.append(sol)
    l1 = SpectralCurve.from_modulus(sols[0].A_phi).lambda1
    opening = 1.0 - l1
    return TrajectorySample(tuple(sols), float(abs(opening)),
                            float(np.angle(opening)))


@lru_cache(maxsize=4)
def _trajectory_table(n: int = 64) -> TrajectorySample:
    return continue_trajectory(HALF_PI, n_steps=n)


def _solve_on_quadrant(phi: float, tol: float) -> complex:
    if phi < 1e-14:
        return 2.0 + 0.0j
    if abs(phi - HALF_PI) < 1e-14:
        return -2.0 + 0.0j
    table = _trajectory_table()
    phis = table.phis
    idx = int(np.argmin(np.abs(phis - phi)))
    A = complex(table.moduli[idx])
    # walk from the nearest table entry when the target is off the table
    phi_near = float(phis[idx])
    nwalk = max(1, int(abs(phi - phi_near) / 0.05))
    for p in np.linspace(phi_near, phi, nwalk + 1)[1:]:
        A = solve_boutroux(float(p), A, tol=tol).A_phi
    return A


def modulus_for_any_phi(phi: float, tol: float = 1e-10) -> complex:
    """A_phi for arbitrary real phi via the symmetry relations.

    Reduces with A_{phi+pi} = A_phi, A_{phi+pi/2} = -A_phi and solves on
    [0, pi/2].  A pure function of phi.
    """
    phi_r = math.fmod(phi, math.pi)
    if phi_r < 0:
        phi_r += math.pi
    if phi_r <= HALF_PI:
        return _solve_on_quadrant(phi_r, tol)
    return -_solve_on_quadrant(phi_r - HALF_PI, tol)


def h_ratio(A: complex, tol: float = 1e-12) -> complex:
    """Ratio Jc_b / Jc_a of the two basic cycle integrals of w/lam^2.

    Real on the Boutroux trajectory; its derivative in A is
    4*pi*i / Jc_a^2.
    """
    ws = _workspace(A, tol)
    if abs(ws.Jc_a) < 1e-12:
        raise ZeroDivisionError(f"Jc_a vanishes at A = {A}")
    return ws.Jc_b / ws.Jc_a
