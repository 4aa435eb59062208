"""
Closed-form homogeneous harmonic functions and maps on a single sector.
"""

import math

import numpy as np

from cone_graph import ConeGraph
from errors import PreconditionError, SingularDegreeError

ANGLE_TOL = 1e-12
SINGULAR_TOL = 1e-9
SECTOR_TOL = 1e-12


def _check_polar(theta_e: float, r, theta) -> None:
    if np.any(np.asarray(r) < 0):
        raise PreconditionError("r must be nonnegative")
    theta = np.asarray(theta)
    if np.any(theta < -ANGLE_TOL) or np.any(theta > theta_e + ANGLE_TOL):
        raise PreconditionError(f"theta must lie in [0, {theta_e!r}]")


def _on_pi_multiple(x: float) -> bool:
    k = round(x / math.pi)
    return abs(x - k * math.pi) <= SINGULAR_TOL


def evaluate_face(alpha: float, theta_e: float, r, theta, rho0: float, rho1=None, c2=None):
    """
    u(r, θ) = r^α [ρ(0) cos αθ + c2 sin αθ] on a sector of angle theta_e.

    With boundary values (rho0, rho1) the coefficient is
    c2 = (ρ(θ_e) − ρ(0) cos αθ_e) / sin αθ_e, which needs αθ_e ∉ πZ; at
    singular sectors pass c2 directly instead.
    """
    _check_polar(theta_e, r, theta)
    if c2 is None:
        if rho1 is None:
            raise PreconditionError("give the second boundary value or c2")
        if _on_pi_multiple(alpha * theta_e):
            raise SingularDegreeError("alpha * theta_e is a multiple of π; pass c2 instead")
        c2 = (rho1 - rho0 * math.cos(alpha * theta_e)) / math.sin(alpha * theta_e)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return r ** alpha * (rho0 * np.cos(alpha * theta) + c2 * np.sin(alpha * theta))


def evaluate_face_map(rho_i: float, rho_j: float, theta_e: float, phi_e: float, alpha: float, r, theta):
    """
    Homogeneous harmonic map of the sector S_θe into S_φe sending the side
    θ = 0 to the x-axis with weight ρ_i and the side θ = θ_e to the ray at
    angle φ_e with weight ρ_j.

    Returns:
        tuple: (x, y) arrays
    """
    if not 0 < alpha * theta_e < math.pi:
        raise PreconditionError("need 0 < alpha * theta_e < π")
    if not 0 < phi_e < math.pi:
        raise PreconditionError("phi_e must lie in (0, π)")
    if rho_i < 0 or rho_j < 0 or (rho_i == 0 and rho_j == 0):
        raise PreconditionError("rho_i and rho_j must be nonnegative and not both zero")
    _check_polar(theta_e, r, theta)

    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s_e, c_e = math.sin(alpha * theta_e), math.cos(alpha * theta_e)
    s, c = np.sin(alpha * theta), np.cos(alpha * theta)
    chi = rho_i * c + (rho_j * math.cos(phi_e) - rho_i * c_e) / s_e * s
    eta = rho_j * math.sin(phi_e) / s_e * s
    scale = r ** alpha
    return scale * chi, scale * eta


def face_map_in_sector(x, y, phi_e: float, tol: float = SECTOR_TOL) -> bool:
    """y ≥ 0 and x ≥ y cot φ_e, up to tol."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cot = math.cos(phi_e) / math.sin(phi_e)
    return bool(np.all(y >= -tol) and np.all(x >= y * cot - tol))


def reconstruct_face(g: ConeGraph, alpha: float, rho, edge_id: str, r, theta):
    """Harmonic function on one face from vertex values ρ (vertex order of g)."""
    if edge_id not in g.edge_by_id:
        raise PreconditionError(f"unknown edge {edge_id!r}")
    e = g.edge_by_id[edge_id]
    rho = np.asarray(rho, dtype=float)
    return evaluate_face(alpha, e.theta, r, theta, rho[g.index[e.u]], rho[g.index[e.v]])
