"""Deterministic solve of the low-order second-moment system for one step.

Unknowns are cell-averaged scalar flux phi_i and cell-edge currents J_e on
a staggered mesh.  For each timestep the discrete system is

    balance (cell i):
        J_{i+1} - J_i + rem_i dx_i phi_i = Q0_i dx_i
    first moment (interior edge e between cells e-1 and e):
        (1/3)(phi_e - phi_{e-1}) + sh_e dxe_e J_e = R_e

with dxe_e = (dx_{e-1} + dx_e)/2 the dual-cell width, sh_e the
width-weighted average of the effective cross section
shat_i = sigma_t_i + a/(v dt) (a = 1 for backward Euler, 2 for
Crank-Nicolson), and rem_i = shat_i - sigma_s_i - nu_f sigma_f_i.

Scheme-dependent right-hand sides (sm = second-moment closure functional;
sm* is the current-step estimate when available, else the lagged one):

    BE:  Q0_i = q_i + phi_prev_i/(v dt)
         R_e  = (sm*_e - sm*_{e-1}) + dxe_e J_prev_e/(v dt)
    CN:  Q0_i = q_i + q_prev_i + (J_prev_e(i) - J_prev_e(i+1))/dx_i
               + (sigma_s + nu_f sigma_f + 2/(v dt) - sigma_t)_prev,i phi_prev_i
         R_e  = (sm*_e - sm*_{e-1}) + (sm_prev_e - sm_prev_{e-1})
               - (1/3)(phi_prev_e - phi_prev_{e-1})
               + (2/(v dt) - st_prev_e) dxe_e J_prev_e

where st_prev_e is the width-weighted plain sigma_t of the previous step.
Eliminating J from the first-moment rows yields a symmetric positive
definite tridiagonal system in phi, solved directly; J is back-substituted.

Boundary rows: a reflective side pins J = 0 at that edge; otherwise the
Marshak-type incident row J(0) = -phi(0)/2 + (2 J_in + P) (mirrored on the
right) replaces it.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .errors import MeshError, SolverError

RESIDUAL_TOL = 1e-8


@dataclass
class ClosureData:
    """Monte-Carlo-derived inputs to one low-order solve.

    sm_curr is the mid-step estimate of the current-step closure
    functional; when absent the solve is semi-implicit (lagged closure).
    """

    phi_prev: np.ndarray
    j_prev_edges: np.ndarray | None = None
    sm_prev: np.ndarray | None = None
    sm_curr: np.ndarray | None = None
    q_prev: np.ndarray | None = None
    q_curr: np.ndarray | None = None


@dataclass
class MomentSolution:
    phi: np.ndarray
    j_edges: np.ndarray
    scheme: str
    max_residual: float


def incident_bc_coefficients(j_in, p, side):
    """(alpha, g) of the boundary row J_edge = alpha * phi_adjacent + g."""
    if side == "left":
        return -0.5, 2.0 * j_in + p
    if side == "right":
        return 0.5, 2.0 * j_in - p
    raise ValueError("side must be 'left' or 'right'")


def reflective_bc_coefficients():
    """Reflective override: the boundary row is J = 0."""
    return 0.0, 0.0


def _bc_row(bc, side):
    if bc.kind == "reflective":
        return reflective_bc_coefficients()
    return incident_bc_coefficients(bc.j_in, bc.p, side)


def _dual_average(values, widths):
    """Width-weighted average of a per-cell array onto interior edges."""
    wl = widths[:-1]
    wr = widths[1:]
    return (values[:-1] * wl + values[1:] * wr) / (wl + wr)


def solve_step(closure, mesh, xs_curr, xs_prev, v, dt, scheme, bc_left, bc_right):
    """Solve one timestep of the low-order system.  scheme: 'be' | 'cn'."""
    n = mesh.n_cells
    if n < 2:
        raise MeshError("moment solve needs at least 2 cells")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if scheme not in ("be", "cn"):
        raise ValueError(f"unknown scheme {scheme!r}")

    dx = mesh.widths
    dxe = 0.5 * (dx[:-1] + dx[1:])  # dual widths, interior edges 1..n-1

    sig_t, sig_s, sig_f, nu_f = xs_curr
    phi_prev = np.asarray(closure.phi_prev, dtype=np.float64)
    if phi_prev.shape != (n,):
        raise ValueError("phi_prev must have one value per cell")
    q_curr = np.zeros(n) if closure.q_curr is None else np.asarray(closure.q_curr, dtype=np.float64)

    sm_star = closure.sm_curr if closure.sm_curr is not None else closure.sm_prev
    sm_star = np.zeros(n) if sm_star is None else np.asarray(sm_star, dtype=np.float64)

    if scheme == "be":
        shat = sig_t + 1.0 / (v * dt)
        q0 = q_curr + phi_prev / (v * dt)
        j_prev = closure.j_prev_edges
        j_prev = np.zeros(n + 1) if j_prev is None else np.asarray(j_prev, dtype=np.float64)
        r = (sm_star[1:] - sm_star[:-1]) + dxe * j_prev[1:-1] / (v * dt)
    else:
        if closure.j_prev_edges is None or closure.sm_prev is None:
            raise ValueError("Crank-Nicolson needs the full previous state (edge currents and closure functional)")
        st_p, ss_p, sf_p, nu_p = xs_prev
        shat = sig_t + 2.0 / (v * dt)
        j_prev = np.asarray(closure.j_prev_edges, dtype=np.float64)
        sm_prev = np.asarray(closure.sm_prev, dtype=np.float64)
        q_prev = np.zeros(n) if closure.q_prev is None else np.asarray(closure.q_prev, dtype=np.float64)
        q0 = (
            q_curr
            + q_prev
            + (j_prev[:-1] - j_prev[1:]) / dx
            + (ss_p + nu_p * sf_p + 2.0 / (v * dt) - st_p) * phi_prev
        )
        st_prev_e = _dual_average(st_p, dx)
        r = (
            (sm_star[1:] - sm_star[:-1])
            + (sm_prev[1:] - sm_prev[:-1])
            - (phi_prev[1:] - phi_prev[:-1]) / 3.0
            + (2.0 / (v * dt) - st_prev_e) * dxe * j_prev[1:-1]
        )

    rem = shat - sig_s - nu_f * sig_f
    shat_e = _dual_average(shat, dx)
    beta = 1.0 / (shat_e * dxe)  # interior edges

    alpha_l, g_l = _bc_row(bc_left, "left")
    alpha_r, g_r = _bc_row(bc_right, "right")

    diag = rem * dx
    diag[:-1] += beta / 3.0  # right edge of cells 0..n-2
    diag[1:] += beta / 3.0  # left edge of cells 1..n-1
    diag[0] += -alpha_l  # left boundary row folded in (alpha_l <= 0)
    diag[-1] += alpha_r
    upper = -beta / 3.0

    rhs = q0 * dx
    rhs[:-1] -= beta * r
    rhs[1:] += beta * r
    rhs[0] += g_l
    rhs[-1] -= g_r

    ab = np.zeros((2, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    try:
        phi = solveh_banded(ab, rhs)
    except np.linalg.LinAlgError as exc:
        worst = int(np.argmin(rem))
        raise SolverError(
            f"tridiagonal solve failed ({exc}); smallest removal coefficient "
            f"{rem[worst]:.3e} in cell {worst}"
        ) from exc
    if not np.all(np.isfinite(phi)):
        raise SolverError("moment solve produced non-finite flux")

    j = np.empty(n + 1)
    j[1:-1] = beta * r - (beta / 3.0) * (phi[1:] - phi[:-1])
    j[0] = alpha_l * phi[0] + g_l
    j[-1] = alpha_r * phi[-1] + g_r

    residual = _max_relative_residual(phi, j, dx, dxe, rem, shat_e, q0, r)
    if residual > RESIDUAL_TOL:
        raise SolverError(f"moment solve residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return MomentSolution(phi=phi, j_edges=j, scheme=scheme, max_residual=residual)


def _max_relative_residual(phi, j, dx, dxe, rem, shat_e, q0, r):
    bal_terms = (j[1:], j[:-1], rem * dx * phi, q0 * dx)
    bal_res = j[1:] - j[:-1] + rem * dx * phi - q0 * dx
    bal_scale = sum(np.abs(t) for t in bal_terms) + 1e-300
    worst = np.max(np.abs(bal_res) / bal_scale)
    if dxe.size:
        fm_res = (phi[1:] - phi[:-1]) / 3.0 + shat_e * dxe * j[1:-1] - r
        fm_scale = (
            np.abs(phi[1:] - phi[:-1]) / 3.0
            + np.abs(shat_e * dxe * j[1:-1])
            + np.abs(r)
            + 1e-300
        )
        worst = max(worst, np.max(np.abs(fm_res) / fm_scale))
    return float(worst)


def solve_be(closure, mesh, xs_curr, v, dt, bc_left, bc_right):
    """Backward-Euler step (first order in time)."""
    return solve_step(closure, mesh, xs_curr, xs_curr, v, dt, "be", bc_left, bc_right)


def solve_cn(closure, mesh, xs_curr, xs_prev, v, dt, bc_left, bc_right):
    """Crank-Nicolson step (second order in time)."""
    return solve_step(closure, mesh, xs_curr, xs_prev, v, dt, "cn", bc_left, bc_right)
