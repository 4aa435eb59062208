"""
Metric-graph eigenvalue oracle.

Each face contributes the interval [0, θ(e)] of the link; balanced harmonic
functions of degree α are the solutions of ρ″ = −α²ρ on every edge with the
Kirchhoff (outgoing derivative) condition at the vertices. The problem is
discretized with linear elements and a lumped mass, and solved independently
of the vertex-matrix scanners so the two can be compared.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from cone_graph import ConeGraph, require_valid
from config import OracleConfig, ScanConfig
from dense_spectral import eig_sym
from errors import MeshResolutionError, PreconditionError
from euclid_degrees import scan_all_euclid

logger = logging.getLogger(__name__)

MIN_SEGMENTS = 4
MIN_DEGREE_SEGMENTS = 16
ZERO_MODE_TOL = 1e-8
EIGSH_SHIFT = -1.0


@dataclass(frozen=True)
class MetricGraphMesh:
    """
    Uniform grids on every edge sharing the vertex samples.

    Args:
        graph: the cone graph
        m: segments per edge
        n_dof: V + Σ(m − 1)
        nodes: edge id -> global indices of its m + 1 samples (tail first)
        h: edge id -> segment length θ(e)/m
    """

    graph: ConeGraph
    m: int
    n_dof: int
    nodes: Dict[str, np.ndarray]
    h: Dict[str, float]

    @property
    def h_max(self) -> float:
        return max(self.h.values())

    def samples(self, edge_id: str) -> np.ndarray:
        return np.linspace(0.0, self.graph.edge_by_id[edge_id].theta, self.m + 1)


@dataclass(frozen=True)
class Pencil:
    """Stiffness K (sparse) and lumped mass diagonal M with Kv = λMv."""

    mesh: MetricGraphMesh
    stiffness: sparse.csr_matrix
    mass: np.ndarray


@dataclass(frozen=True)
class OracleResult:
    """
    Lowest eigenpairs of the pencil.

    Eigenvectors are M-orthonormal columns; `errors` holds the Richardson
    estimate λ − λ_m ≈ (λ_m − λ_{m/2})/3 per eigenvalue when computed, so
    λ_m + errors is the extrapolated eigenvalue.
    """

    pencil: Pencil
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    errors: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.pencil.mesh.m

    @property
    def degrees(self) -> np.ndarray:
        return np.sqrt(np.clip(self.eigenvalues, 0.0, None))

    def to_dict(self) -> dict:
        data = {
            "m": self.m,
            "n_dof": self.pencil.mesh.n_dof,
            "eigenvalues": self.eigenvalues.tolist(),
            "degrees": self.degrees.tolist(),
        }
        if self.errors is not None:
            data["richardson"] = self.errors.tolist()
        return data


@dataclass(frozen=True)
class VerificationRow:
    alpha_scan: Optional[float]
    alpha_oracle: Optional[float]
    delta: Optional[float]
    mult_scan: int
    mult_oracle: int
    matched: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class VerificationReport:
    rows: Tuple[VerificationRow, ...]
    alpha_max: float
    m: int
    match_tol: float

    @property
    def all_matched(self) -> bool:
        return all(r.matched for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "alpha_max": self.alpha_max,
            "m": self.m,
            "match_tol": self.match_tol,
            "all_matched": self.all_matched,
            "rows": [r.to_dict() for r in self.rows],
        }


def build_mesh(g: ConeGraph, m: int) -> MetricGraphMesh:
    if m < MIN_SEGMENTS:
        raise MeshResolutionError(f"m={m} is below the minimum of {MIN_SEGMENTS} segments per edge")
    require_valid(g, allow_wide=False)
    V = g.n_vertices
    nodes, h = {}, {}
    offset = V
    for e in g.edges:
        interior = np.arange(offset, offset + m - 1)
        nodes[e.id] = np.concatenate([[g.index[e.u]], interior, [g.index[e.v]]]).astype(int)
        h[e.id] = e.theta / m
        offset += m - 1
    return MetricGraphMesh(g, m, offset, nodes, h)


def discretize(g: ConeGraph, m: int) -> Pencil:
    """
    Stiffness and lumped mass of the Kirchhoff eigenproblem on the metric graph.

    Each segment adds (1/h)[[1, −1], [−1, 1]] to K and h/2 to both ends of M,
    so vertex rows sum one-sided differences over incident edges.
    """
    mesh = build_mesh(g, m)
    rows, cols, vals = [], [], []
    mass = np.zeros(mesh.n_dof)
    for edge_id, idx in mesh.nodes.items():
        h = mesh.h[edge_id]
        a, b = idx[:-1], idx[1:]
        w = np.full(a.size, 1.0 / h)
        rows.extend([a, b, a, b])
        cols.extend([a, b, b, a])
        vals.extend([w, w, -w, -w])
        np.add.at(mass, a, 0.5 * h)
        np.add.at(mass, b, 0.5 * h)
    K = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.n_dof, mesh.n_dof),
    ).tocsr()
    logger.debug("mesh m=%d: %d unknowns, %d nonzeros", m, mesh.n_dof, K.nnz)
    return Pencil(mesh, K, mass)


def vertex_balance(mesh: MetricGraphMesh, rho: np.ndarray, vertex: str) -> float:
    """Σ over incident edges of (−1)^{ψ_e(v)/θ(e)} ρ′_e at v, by one-sided differences."""
    total = 0.0
    g = mesh.graph
    for e in g.edges:
        idx = mesh.nodes[e.id]
        h = mesh.h[e.id]
        if e.u == vertex:
            total += (rho[idx[1]] - rho[idx[0]]) / h
        if e.v == vertex:
            total -= (rho[idx[-1]] - rho[idx[-2]]) / h
    return total


def _lowest(pencil: Pencil, k: int, cfg: OracleConfig) -> Tuple[np.ndarray, np.ndarray]:
    """k smallest eigenpairs of M^{-1/2} K M^{-1/2}, mapped back to M-orthonormal vectors."""
    N = pencil.mesh.n_dof
    k = max(1, min(k, N))
    scale = sparse.diags(1.0 / np.sqrt(pencil.mass))
    S = (scale @ pencil.stiffness @ scale).tocsr()
    if N <= cfg.dense_max_dim or k >= N - 1:
        dec = eig_sym(S.toarray())
        w, Y = dec.eigenvalues[:k], dec.eigenvectors[:, :k]
    else:
        w, Y = sparse_linalg.eigsh(S, k=k, sigma=EIGSH_SHIFT, which="LM")
        order = np.argsort(w)
        w, Y = w[order], Y[:, order]
    return w, Y / np.sqrt(pencil.mass)[:, None]


def _eig_count_estimate(g: ConeGraph, alpha_max: float) -> int:
    return int(math.ceil(g.total_angle * alpha_max / math.pi)) + g.n_edges + g.n_vertices + 4


def solve_oracle(
    g: ConeGraph,
    m: int,
    alpha_max: Optional[float] = None,
    n_eigs: Optional[int] = None,
    cfg: Optional[OracleConfig] = None,
) -> OracleResult:
    """
    Lowest eigenpairs of the discretized metric graph.

    Args:
        g: valid cone graph
        m: segments per edge
        alpha_max: solve until every eigenvalue ≤ alpha_max² is included
        n_eigs: number of eigenpairs when alpha_max is not given
        cfg: oracle settings

    Returns:
        OracleResult
    """
    cfg = cfg or OracleConfig()
    pencil = discretize(g, m)
    N = pencil.mesh.n_dof
    if alpha_max is None and n_eigs is None:
        raise PreconditionError("give alpha_max or n_eigs")
    k = n_eigs if alpha_max is None else _eig_count_estimate(g, alpha_max)

    w, vecs = _lowest(pencil, k, cfg)
    while alpha_max is not None and w[-1] <= alpha_max ** 2 and w.size < N:
        k = min(N, 2 * k)
        logger.debug("widening oracle solve to %d eigenpairs", k)
        w, vecs = _lowest(pencil, k, cfg)

    errors = None
    if cfg.richardson and m // 2 >= MIN_SEGMENTS:
        coarse, _ = _lowest(discretize(g, m // 2), w.size, cfg)
        n = min(coarse.size, w.size)
        errors = np.full(w.size, np.nan)
        errors[:n] = (w[:n] - coarse[:n]) / 3.0
    return OracleResult(pencil, w, vecs, errors)


def cluster_tolerance(alpha: float, h: float) -> float:
    """Ten times the leading discretization error α³h²/24, plus a floor."""
    return 10.0 * alpha ** 3 * h * h / 24.0 + 1e-9


def degrees_from_result(result: OracleResult, alpha_max: float) -> List[Tuple[float, int]]:
    """Cluster the nonzero oracle degrees ≤ alpha_max into (alpha, multiplicity)."""
    h = result.pencil.mesh.h_max
    alphas = [
        float(a)
        for lam, a in zip(result.eigenvalues, result.degrees)
        if lam > ZERO_MODE_TOL and a <= alpha_max
    ]
    clusters: List[List[float]] = []
    for a in alphas:
        if clusters and a - clusters[-1][-1] <= cluster_tolerance(clusters[-1][-1], h):
            clusters[-1].append(a)
        else:
            clusters.append([a])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def oracle_degrees(
    g: ConeGraph, m: int, alpha_max: float, cfg: Optional[OracleConfig] = None
) -> List[Tuple[float, int]]:
    """Degrees √λ_k ≤ alpha_max with multiplicities; the constant mode is excluded."""
    if m < MIN_DEGREE_SEGMENTS:
        raise MeshResolutionError(f"m={m} is below the minimum of {MIN_DEGREE_SEGMENTS} for degree extraction")
    cfg = cfg or OracleConfig()
    return degrees_from_result(solve_oracle(g, m, alpha_max=alpha_max, cfg=cfg), alpha_max)


def rayleigh(pencil: Pencil, rho) -> float:
    """Σ∫|ρ′|² / Σ∫ρ² with exact gradient and trapezoid mass."""
    rho = np.asarray(rho, dtype=float)
    denom = float(rho @ (pencil.mass * rho))
    if denom <= 0.0:
        raise PreconditionError("rayleigh quotient of the zero function")
    return float(rho @ (pencil.stiffness @ rho)) / denom


def ball_average(pencil: Pencil, eigfn, alpha: float) -> float:
    """
    Σ_e ∫ ρ_e over the link (trapezoid); the integral of r^α ρ over a ball
    centred at the cone point is this times a positive factor of r.
    """
    if not alpha > 0:
        raise PreconditionError("ball averages apply to degrees alpha > 0")
    return float(np.sum(pencil.mass * np.asarray(eigfn, dtype=float)))


def ball_integral(pencil: Pencil, eigfn, alpha: float, r: float) -> float:
    """∫ over the ball of radius r of the homogeneous function r^α ρ."""
    return r ** (alpha + 2.0) / (alpha + 2.0) * ball_average(pencil, eigfn, alpha)


def edge_profile(mesh: MetricGraphMesh, rho, edge_id: str) -> Tuple[np.ndarray, np.ndarray]:
    """(s, ρ_e(s)) samples along one edge."""
    if edge_id not in mesh.nodes:
        raise PreconditionError(f"unknown edge {edge_id!r}")
    rho = np.asarray(rho, dtype=float)
    return mesh.samples(edge_id), rho[mesh.nodes[edge_id]]


def cross_validate(
    g: ConeGraph,
    alpha_max: float,
    m: Optional[int] = None,
    scan_cfg: Optional[ScanConfig] = None,
    oracle_cfg: Optional[OracleConfig] = None,
) -> VerificationReport:
    """
    Compare scanned degrees (nonsingular and singular) against the oracle.

    Unpaired degrees within match_tol of alpha_max are ignored since the
    discretization shifts them across the boundary.
    """
    oracle_cfg = oracle_cfg or OracleConfig()
    m = oracle_cfg.m if m is None else m
    tol = oracle_cfg.match_tol

    scanned = [(e.alpha, e.multiplicity) for e in scan_all_euclid(g, alpha_max, scan_cfg).entries]
    oracle = oracle_degrees(g, m, alpha_max, oracle_cfg)

    rows = []
    used = set()
    for alpha, mult in scanned:
        best = None
        for k, (beta, _) in enumerate(oracle):
            if k in used or abs(beta - alpha) > tol:
                continue
            if best is None or abs(beta - alpha) < abs(oracle[best][0] - alpha):
                best = k
        if best is None:
            if alpha > alpha_max - tol:
                continue
            rows.append(VerificationRow(alpha, None, None, mult, 0, False))
            continue
        used.add(best)
        beta, omult = oracle[best]
        rows.append(VerificationRow(alpha, beta, abs(beta - alpha), mult, omult, mult == omult))

    for k, (beta, omult) in enumerate(oracle):
        if k not in used and beta <= alpha_max - tol:
            rows.append(VerificationRow(None, beta, None, 0, omult, False))

    rows.sort(key=lambda r: r.alpha_scan if r.alpha_scan is not None else r.alpha_oracle)
    report = VerificationReport(tuple(rows), float(alpha_max), int(m), tol)
    if not report.all_matched:
        logger.warning("scanner and oracle disagree on %d degree(s)", sum(not r.matched for r in rows))
    return report
