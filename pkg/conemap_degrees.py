"""
Degrees of balanced homogeneous harmonic maps C(Γ, θ) -> C(Γ, φ) that preserve
the simplicial structure.

On (0, π/θ_max) the matrix Δ^φ_{αθ} (off-diagonal weighted by cos φ) has
strictly increasing eigenvalues, so the Euclidean locator applies unchanged.
The endpoint π/θ_max is handled by the W / Q count and the ν system.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from cone_graph import ConeGraph, require_valid
from config import ScanConfig
from dense_spectral import count_signs, nonnegative_in_span, nullspace, sphere_grid
from errors import NumericalAccuracyError, PreconditionError
from euclid_degrees import (
    SINGULAR_TOL,
    DegreeLocator,
    DegreeSpectrum,
    EigenCurve,
    delta_matrix,
    edge_quadratic,
    sample_curves,
)

logger = logging.getLogger(__name__)

THETA_MAX_TOL = 1e-12
CONSTANT_TOL = 1e-12
FEASIBILITY_SLACK = 1e-10
NONZERO_TOL = 1e-8

TRIVIAL_ONLY = "trivial-only"
FEASIBLE_WITNESS = "feasible-witness"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class DegreeMatrixConeMap:
    alpha: float
    matrix: np.ndarray


@dataclass(frozen=True)
class ConeMapSingularReport:
    """
    Balancing at the endpoint degree α = π/θ_max.

    Args:
        alpha: π/θ_max
        sigma_edges: faces with θ = θ_max
        w_vertices: vertices touching no θ_max face (support of W)
        W: coordinate basis of W over the vertex order
        Q: limit form on W (faces off Σ only)
        q_inertia: (negative, zero, positive) eigenvalue counts of Q
        nu_constraints: (edge id, v, w, cos φ) per Σ face
        nullspace_dim: dimension of the equality system in (ρ on W, ν)
        verdict: trivial-only, feasible-witness or undetermined
        witness_rho: ρ over the vertex order for a feasible witness
        witness_nu: ν(v, e) keyed "edge:vertex" for a feasible witness
    """

    alpha: float
    sigma_edges: Tuple[str, ...]
    w_vertices: Tuple[str, ...]
    W: np.ndarray
    Q: np.ndarray
    q_inertia: Tuple[int, int, int]
    nu_constraints: Tuple[Tuple[str, str, str, float], ...]
    nullspace_dim: int
    verdict: str
    witness_rho: Optional[np.ndarray] = None
    witness_nu: Optional[Dict[str, float]] = None

    def to_dict(self) -> dict:
        neg, zero, pos = self.q_inertia
        data = {
            "alpha": self.alpha,
            "sigma_edges": list(self.sigma_edges),
            "w_vertices": list(self.w_vertices),
            "q_inertia": {"negative": neg, "zero": zero, "positive": pos},
            "nu_constraints": [
                {"edge": e, "v": v, "w": w, "cos_phi": c} for e, v, w, c in self.nu_constraints
            ],
            "nullspace_dim": self.nullspace_dim,
            "verdict": self.verdict,
        }
        if self.witness_rho is not None:
            data["witness_rho"] = self.witness_rho.tolist()
            data["witness_nu"] = dict(self.witness_nu or {})
        return data


def _require_phi(g: ConeGraph) -> None:
    if not g.has_phi:
        raise PreconditionError("target angles phi are required on every edge")


def endpoint_degree(g: ConeGraph) -> float:
    return math.pi / g.theta_max


def assemble_conemap(g: ConeGraph, alpha: float) -> DegreeMatrixConeMap:
    _require_phi(g)
    top = endpoint_degree(g)
    if not 0 < alpha < top - SINGULAR_TOL:
        raise PreconditionError(f"alpha={alpha!r} outside (0, {top!r})")
    return DegreeMatrixConeMap(alpha, delta_matrix(g, alpha, weights=np.cos(g.phi)))


def quadratic_form_conemap(g: ConeGraph, alpha: float, rho) -> float:
    """Σ_e [2 cos φ_e ρ_i ρ_j − cos(αθ_e)(ρ_i² + ρ_j²)] / sin(αθ_e)."""
    assemble_conemap(g, alpha)
    return edge_quadratic(g, alpha, rho, weights=np.cos(g.phi))


def lower_bound_conemap(g: ConeGraph) -> float:
    """
    No admissible degree lies below this value. When every φ ≤ π/2 the matrix
    is negative definite below it.
    """
    _require_phi(g)
    return float(min(math.pi / (2.0 * g.theta_max), np.min(g.phi / g.theta)))


def _endpoint_forms(g: ConeGraph):
    """α* = π/θ_max, the Σ mask, the W vertex indices and Q on W."""
    alpha_star = endpoint_degree(g)
    mask = g.theta >= g.theta_max - THETA_MAX_TOL
    tails, heads = g.endpoints
    touched = set(tails[mask]) | set(heads[mask])
    w_idx = np.array([i for i in range(g.n_vertices) if i not in touched], dtype=int)
    full = delta_matrix(g, alpha_star, weights=np.cos(g.phi), edge_mask=~mask)
    Q = full[np.ix_(w_idx, w_idx)]
    return alpha_star, mask, w_idx, full, Q


def conemap_count(g: ConeGraph, cfg: Optional[ScanConfig] = None) -> int:
    """Total degree count on (0, π/θ_max): dim W⊥ + positive eigenvalues of Q on W."""
    cfg = cfg or ScanConfig()
    _require_phi(g)
    _, _, w_idx, _, Q = _endpoint_forms(g)
    positive = count_signs(Q, cfg.kernel_tol)[2] if w_idx.size else 0
    return int(g.n_vertices - w_idx.size + positive)


def _search_nu(
    g: ConeGraph, mask: np.ndarray, w_idx: np.ndarray, basis: np.ndarray, cfg: ScanConfig
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Grid search over the nullspace for ρ ≥ 0 (not all zero) meeting the ν inequalities."""
    nw = w_idx.size
    cos_phi = np.cos(g.phi[mask])
    k = cos_phi.size
    for coeffs in sphere_grid(basis.shape[1], cfg.nu_resolution):
        X = coeffs @ basis.T
        rho, nu = X[:, :nw], X[:, nw:]
        nu_v, nu_w = nu[:, 0:2 * k:2], nu[:, 1:2 * k:2]
        ok = np.all(rho >= -FEASIBILITY_SLACK, axis=1)
        ok &= np.max(rho, axis=1, initial=0.0) > NONZERO_TOL
        ok &= np.all(nu_v >= cos_phi * nu_w - FEASIBILITY_SLACK, axis=1)
        ok &= np.all(nu_w >= cos_phi * nu_v - FEASIBILITY_SLACK, axis=1)
        hits = np.flatnonzero(ok)
        if hits.size:
            return rho[hits[0]], nu[hits[0]]
    return None


def singular_conemap(g: ConeGraph, cfg: Optional[ScanConfig] = None) -> ConeMapSingularReport:
    """
    Balanced maps at α = π/θ_max.

    ρ vanishes on V(Σ); the unknowns are ρ on W and ν(v, e) at both ends of
    each Σ face. A nullspace whose ρ part vanishes forces ν ≡ 0 through the
    inequalities ν(v,e) ≥ cos φ ν(w,e), so it only carries the trivial map.
    """
    cfg = cfg or ScanConfig()
    _require_phi(g)
    require_valid(g, allow_wide=False)
    alpha_star, mask, w_idx, full, Q = _endpoint_forms(g)
    tails, heads = g.endpoints
    sig_idx = np.flatnonzero(mask)
    nu_constraints = tuple(
        (g.edges[e].id, g.edges[e].u, g.edges[e].v, float(math.cos(g.edges[e].phi))) for e in sig_idx
    )
    W = np.eye(g.n_vertices)[:, w_idx]
    inertia = count_signs(Q, cfg.kernel_tol) if w_idx.size else (0, 0, 0)
    common = dict(
        alpha=alpha_star,
        sigma_edges=tuple(g.edges[e].id for e in sig_idx),
        w_vertices=tuple(g.vertex_order[i] for i in w_idx),
        W=W,
        Q=Q,
        q_inertia=inertia,
        nu_constraints=nu_constraints,
    )

    if mask.all():
        return ConeMapSingularReport(nullspace_dim=0, verdict=TRIVIAL_ONLY, **common)

    nw, k = w_idx.size, sig_idx.size
    sigma_vertices = np.array(sorted(set(tails[mask]) | set(heads[mask])), dtype=int)
    rows = []
    # vertices of W: Δ^φ row restricted to W, no ν terms
    for i in w_idx:
        rows.append(np.concatenate([full[i, w_idx], np.zeros(2 * k)]))
    # vertices of Σ: ν sum plus cos φ / sin terms from ρ on W
    for i in sigma_vertices:
        nu_part = np.zeros(2 * k)
        for r, e in enumerate(sig_idx):
            if tails[e] == i:
                nu_part[2 * r] += 1.0
            if heads[e] == i:
                nu_part[2 * r + 1] += 1.0
        rows.append(np.concatenate([full[i, w_idx], nu_part]))
    system = np.vstack(rows)
    basis = nullspace(system, cfg.kernel_tol)
    dim = int(basis.shape[1])

    if dim == 0 or np.all(np.abs(basis[:nw, :]) <= NONZERO_TOL):
        return ConeMapSingularReport(nullspace_dim=dim, verdict=TRIVIAL_ONLY, **common)
    if dim > cfg.nu_max_dim:
        logger.warning("endpoint nullspace of dimension %d exceeds the search cap %d", dim, cfg.nu_max_dim)
        return ConeMapSingularReport(nullspace_dim=dim, verdict=UNDETERMINED, **common)

    found = _search_nu(g, mask, w_idx, basis, cfg)
    if found is None:
        logger.warning("no feasible endpoint witness found on the grid")
        return ConeMapSingularReport(nullspace_dim=dim, verdict=UNDETERMINED, **common)

    rho_w, nu = found
    rho = np.zeros(g.n_vertices)
    rho[w_idx] = rho_w
    nu_map = {}
    for r, e in enumerate(sig_idx):
        edge = g.edges[e]
        nu_map[f"{edge.id}:{edge.u}"] = float(nu[2 * r])
        nu_map[f"{edge.id}:{edge.v}"] = float(nu[2 * r + 1])
    return ConeMapSingularReport(
        nullspace_dim=dim, verdict=FEASIBLE_WITNESS, witness_rho=rho, witness_nu=nu_map, **common
    )


def scan_degrees_conemap(g: ConeGraph, cfg: Optional[ScanConfig] = None) -> DegreeSpectrum:
    """
    Degrees on (0, π/θ_max) where Δ^φ_{αθ} has a kernel, each tagged with
    whether a nonnegative kernel vector (an actual map) was found.

    Args:
        g: valid cone graph with target angles
        cfg: scan tolerances

    Returns:
        DegreeSpectrum: entries plus the endpoint report
    """
    cfg = cfg or ScanConfig()
    _require_phi(g)
    require_valid(g, allow_wide=False)

    top = endpoint_degree(g)
    weights = np.cos(g.phi)
    locator = DegreeLocator(lambda a: delta_matrix(g, a, weights=weights), cfg)
    raw = locator.locate([(cfg.guard_band, top - cfg.guard_band)], cfg.grid_size(g.n_vertices))

    bound = lower_bound_conemap(g)
    entries = []
    for entry in raw:
        witness = nonnegative_in_span(entry.kernel, cfg.nonnegative_resolution)
        # sign-changing kernels may sit below the bound when some φ > π/2
        if witness is not None and entry.alpha < bound - SINGULAR_TOL:
            raise NumericalAccuracyError(
                f"admissible degree {entry.alpha!r} lies below the lower bound {bound!r}"
            )
        entries.append(replace(entry, admissible=witness is not None, witness=witness))

    return DegreeSpectrum(
        tuple(entries), (0.0, top), cfg.tolerances(), endpoint=singular_conemap(g, cfg)
    )


def constant_conemap_degree(g: ConeGraph) -> Tuple[float, np.ndarray]:
    """
    The admissible degree φ₀/θ₀ of a cone with constant θ and φ, with its kernel:
    the constants, or every vector when φ₀ = π/2.
    """
    _require_phi(g)
    theta0, phi0 = float(g.theta[0]), float(g.phi[0])
    if np.any(np.abs(g.theta - theta0) > CONSTANT_TOL) or np.any(np.abs(g.phi - phi0) > CONSTANT_TOL):
        raise PreconditionError("theta and phi must be constant on the edges")
    n = g.n_vertices
    if abs(phi0 - math.pi / 2) <= CONSTANT_TOL:
        return phi0 / theta0, np.eye(n)
    return phi0 / theta0, np.full((n, 1), 1.0 / math.sqrt(n))


def conemap_curves(g: ConeGraph, a: float, b: float, samples: int) -> EigenCurve:
    """Sorted eigenvalues of Δ^φ_{αθ} on [a, b] ⊂ (0, π/θ_max)."""
    _require_phi(g)
    top = endpoint_degree(g)
    if not 0 < a <= b < top - SINGULAR_TOL:
        raise PreconditionError(f"need 0 < a <= b < {top!r}")
    weights = np.cos(g.phi)
    return sample_curves(lambda x: delta_matrix(g, x, weights=weights), a, b, samples)


def admissible_degrees(spectrum: DegreeSpectrum) -> List[float]:
    return [e.alpha for e in spectrum.entries if e.admissible]
