"""Ellipsoidal outer approximation of the sign-perturbed membership region.

For each perturbation i the tightest level r_i with
{theta : ||S_0(theta)||^2 <= ||S_i(theta)||^2} inside
{theta : (theta - theta_hat)' rbar (theta - theta_hat) <= r_i}
is the optimum of a two-variable semidefinite program. The program is small
enough to solve analytically: Schur complementing the top-left block leaves a
one-dimensional convex objective on the ray where that block is negative
semidefinite-free, minimized by golden-section search.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IndexOutOfRange, InfiniteRegion
from .indicator import sign_matrix
from .linalg import golden_section, spd_solve, sym_eig, sym_inv_sqrt
from .problem import ridge_estimate

PD_TOL = 1e-9          # smallest eigenvalue of A treated as positive definite
RANGE_TOL = 1e-12      # |xi*a_k - 1| below this is a null-space component
RANGE_B_TOL = 1e-10    # b-component above this in the null space -> infeasible
RAY_MARGIN = 1e-9      # search starts at (1/lambda_min(A)) * (1 + margin)


@dataclass(frozen=True)
class SdpData:
    """Per-perturbation program data (quadratic comparison in theta)."""

    a_mat: np.ndarray
    b_vec: np.ndarray
    c_scalar: float
    q_mat: np.ndarray
    psi_vec: np.ndarray


def perturbed_grams(ep, state, i):
    """Sign-flipped Gram pair (Q_i, psi_i) = (phi' D_i phi, phi' D_i y)."""
    sgn = sign_matrix(state, i, ep.pad)
    flipped = ep.phi * sgn[:, None]
    q_mat = flipped.T @ ep.phi
    q_mat = (q_mat + q_mat.T) / 2.0
    psi = flipped.T @ ep.y
    return q_mat, psi


def sdp_coefficients(ep, theta_hat, q_mat, psi_vec):
    """Assemble the quadratic-form coefficients for one perturbation.

    a_mat = I - r^{-1/2} Q r^{-1} Q r^{-1/2}
    b_vec = (1/sqrt(n)) r^{-1/2} Q r^{-1} (psi - Q theta_hat)
    c     = -(1/n) (psi - Q theta_hat)' r^{-1} (psi - Q theta_hat)
    """
    d = ep.d
    risq = sym_inv_sqrt(ep.r)
    m_half = risq @ q_mat
    a_mat = np.eye(d) - m_half @ spd_solve(ep.r, m_half.T)
    a_mat = (a_mat + a_mat.T) / 2.0
    v = psi_vec - q_mat @ theta_hat
    rinv_v = spd_solve(ep.r, v)
    b_vec = (m_half @ rinv_v) / math.sqrt(ep.n)
    c_scalar = -float(v @ rinv_v) / ep.n
    return SdpData(a_mat, b_vec, c_scalar, q_mat, psi_vec)


def _eigen_objective(sdp):
    """Eigen-split of the one-dimensional objective on the feasible ray."""
    w, vecs = sym_eig(sdp.a_mat)
    bt = vecs.T @ sdp.b_vec
    c = sdp.c_scalar

    def gamma(xi):
        den = xi * w - 1.0
        null = np.abs(den) <= RANGE_TOL
        if np.any(null & (np.abs(bt) > RANGE_B_TOL)):
            return math.inf
        live = ~null
        quad = float(np.sum(bt[live] ** 2 / den[live])) if np.any(live) else 0.0
        return -xi * c + xi * xi * quad

    return float(w[0]), gamma


def sdp_objective(sdp, xi):
    """Schur-reduced objective gamma(xi); +inf off the feasible ray."""
    a_min, gamma = _eigen_objective(sdp)
    if xi * a_min < 1.0:
        return math.inf
    return gamma(xi)


def solve_sdp_detail(sdp):
    """Least gamma admitting xi >= 0 with the comparison certificate PSD.

    Feasibility of the top-left block pins xi to the ray
    xi >= 1/lambda_min(a_mat); on that ray the Schur complement gives
    gamma(xi) = -xi c + xi^2 sum_k bt_k^2 / (xi a_k - 1) in the eigenbasis
    of a_mat, a convex function minimized by golden-section search. Returns
    (gamma, xi); gamma is +inf when a_mat is not positive definite
    (unbounded region), with xi reported as +inf too.
    """
    a_min, gamma = _eigen_objective(sdp)
    if a_min <= PD_TOL:
        return math.inf, math.inf
    lo = (1.0 / a_min) * (1.0 + RAY_MARGIN)
    hi = 2.0 * lo
    g_hi = gamma(hi)
    for _ in range(300):
        g_next = gamma(2.0 * hi)
        if g_next > g_hi:
            break
        hi *= 2.0
        g_hi = g_next
    hi *= 2.0
    x_best, g_best = golden_section(gamma, lo, hi, rel_tol=1e-10)
    g_lo = gamma(lo)
    if g_lo < g_best:
        return float(g_lo), float(lo)
    return float(g_best), float(x_best)


def solve_sdp(sdp):
    """Optimal value of the per-perturbation program (see solve_sdp_detail)."""
    return solve_sdp_detail(sdp)[0]


def eoa_radius(gammas, q):
    """q-th largest program value, +inf ordered greatest."""
    arr = np.asarray(gammas, dtype=float)
    if not 1 <= q <= arr.size:
        raise IndexOutOfRange(f"need 1 <= q <= {arr.size}, got {q}")
    return float(np.sort(arr)[::-1][q - 1])


@dataclass(frozen=True)
class Ellipsoid:
    """Region {theta : (theta - center)' shape (theta - center) <= radius_sq}."""

    center: np.ndarray
    shape: np.ndarray
    radius_sq: float

    def to_dict(self):
        """JSON form; radius_sq uses the string sentinel "inf" when unbounded."""
        rec = {
            "center": [float(v) for v in self.center],
            "shape": [[float(v) for v in row] for row in self.shape],
            "radius_sq": "inf" if math.isinf(self.radius_sq)
                         else float(self.radius_sq),
        }
        if math.isfinite(self.radius_sq):
            geo = ellipsoid_geometry(self)
            rec["geometry"] = {
                "semi_axes": [float(v) for v in geo["semi_axes"]],
                "orientation": [[float(v) for v in row]
                                for row in geo["orientation"]],
                "volume": float(geo["volume"]),
            }
        else:
            rec["geometry"] = None
        return rec

    @classmethod
    def from_dict(cls, rec):
        radius = rec["radius_sq"]
        radius = math.inf if radius == "inf" else float(radius)
        return cls(np.asarray(rec["center"], dtype=float),
                   np.asarray(rec["shape"], dtype=float), radius)


def build_eoa(ep, state):
    """Outer ellipsoid: ridge center, shape rbar, q-th largest program value."""
    theta_hat = ridge_estimate(ep)
    gammas = []
    for i in range(1, state.m):
        q_mat, psi = perturbed_grams(ep, state, i)
        gammas.append(solve_sdp(sdp_coefficients(ep, theta_hat, q_mat, psi)))
    return Ellipsoid(center=theta_hat, shape=ep.r_bar.copy(),
                     radius_sq=eoa_radius(gammas, state.q))


def ellipsoid_contains(ell, theta):
    """Quadratic-form membership; an infinite radius contains everything."""
    if math.isinf(ell.radius_sq):
        return True
    delta = np.asarray(theta, dtype=float) - ell.center
    return float(delta @ ell.shape @ delta) <= ell.radius_sq


def ellipsoid_geometry(ell):
    """Semi-axes, their directions (columns), and the enclosed volume."""
    if math.isinf(ell.radius_sq):
        raise InfiniteRegion("geometry undefined for an unbounded region")
    w, vecs = sym_eig(ell.shape)
    if w[0] <= 0:
        raise DomainError(f"shape matrix not positive definite (eigenvalues {w})")
    semi_axes = np.sqrt(ell.radius_sq / w)
    d = w.size
    unit_ball = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    volume = unit_ball * float(np.prod(semi_axes))
    return {"semi_axes": semi_axes, "orientation": vecs, "volume": volume}


def boundary_polyline(ell, num_points=360):
    """Closed boundary sampling for d=2, shape (num_points, 2)."""
    if ell.center.size != 2:
        raise DomainError("boundary polyline is defined for d=2 only")
    if math.isinf(ell.radius_sq):
        raise InfiniteRegion("no boundary for an unbounded region")
    t = np.linspace(0.0, 2.0 * math.pi, num_points, endpoint=False)
    circle = np.stack([np.cos(t), np.sin(t)])
    half = sym_inv_sqrt(ell.shape) * math.sqrt(ell.radius_sq)
    return (ell.center[:, None] + half @ circle).T
