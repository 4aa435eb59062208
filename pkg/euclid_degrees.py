"""
Degrees of balanced homogeneous harmonic functions f: C(Γ, θ) -> R.

Assembles the vertex matrix Δ_{αθ}, locates the degrees where it has a kernel
(its eigenvalues increase with α between singular degrees), and analyses the
singular degrees α with αθ(e) ∈ πZ through the joint (ρ, c2) balancing system.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from cone_graph import (
    ConeGraph,
    Subdivision,
    normalized_laplacian,
    edge_weighted_laplacian,
    require_valid,
    singular_degrees,
    structure,
    subdivide_evenly,
)
from config import ScanConfig
from dense_spectral import count_signs, eig_sym, nullspace
from errors import NumericalAccuracyError, PreconditionError, SingularDegreeError

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-9
MAX_TRIG_ARGUMENT = 1e6
CONSTANT_THETA_TOL = 1e-12

Assembler = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class DegreeMatrixEuclid:
    alpha: float
    matrix: np.ndarray


@dataclass(frozen=True)
class DegreeEntry:
    """
    One admissible degree.

    Args:
        alpha: the degree
        multiplicity: kernel dimension (balanced dimension for singular entries)
        kernel: orthonormal kernel vectors as columns over the vertex order; empty
            for singular entries, whose generators live in the matching
            SingularReport over the subdivided vertex order
        kind: "nonsingular" or "singular"
        admissible: cone maps only, whether a nonnegative kernel vector was found
        witness: the nonnegative kernel vector, when found
    """

    alpha: float
    multiplicity: int
    kernel: np.ndarray
    kind: str = "nonsingular"
    admissible: Optional[bool] = None
    witness: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        data = {
            "alpha": self.alpha,
            "multiplicity": self.multiplicity,
            "kind": self.kind,
            "kernel": self.kernel.T.tolist(),
        }
        if self.admissible is not None:
            data["admissible"] = self.admissible
        if self.witness is not None:
            data["witness"] = self.witness.tolist()
        return data


@dataclass(frozen=True)
class SingularReport:
    """
    Balancing analysis at a singular degree.

    Vectors live on the subdivided graph, where every singular face has
    αθ = π; `vertices` gives their order.
    """

    alpha: float
    subdivided: ConeGraph
    subdivision: Subdivision
    sigma_edges: Tuple[str, ...]
    sigma_vertices: Tuple[str, ...]
    B: np.ndarray
    Q: np.ndarray
    q_inertia: Tuple[int, int, int]
    balanced_dim: int
    generators_rho: np.ndarray
    generators_c: np.ndarray
    offset_counts: Dict[str, int]
    abundant: bool

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.subdivided.vertex_order

    @property
    def b_dim(self) -> int:
        return int(self.B.shape[1])

    @property
    def b_perp_dim(self) -> int:
        return self.subdivided.n_vertices - self.b_dim

    def to_dict(self) -> dict:
        neg, zero, pos = self.q_inertia
        return {
            "alpha": self.alpha,
            "balanced_dim": self.balanced_dim,
            "sigma_edges": list(self.sigma_edges),
            "sigma_vertices": list(self.sigma_vertices),
            "b_dim": self.b_dim,
            "b_perp_dim": self.b_perp_dim,
            "q_inertia": {"negative": neg, "zero": zero, "positive": pos},
            "offset_counts": dict(self.offset_counts),
            "abundant": self.abundant,
            "generators": {
                "vertices": list(self.vertices),
                "rho": self.generators_rho.T.tolist(),
                "c2": self.generators_c.T.tolist(),
            },
        }


@dataclass(frozen=True)
class DegreeSpectrum:
    entries: Tuple[DegreeEntry, ...]
    interval: Tuple[float, float]
    tolerances: Dict[str, float] = field(default_factory=dict)
    singular: Tuple[SingularReport, ...] = ()
    endpoint: Optional[object] = None

    @property
    def degrees(self) -> List[float]:
        return [e.alpha for e in self.entries]

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def report_for(self, entry: DegreeEntry) -> Optional[SingularReport]:
        """The singular analysis holding the generators of a singular entry."""
        if entry.kind != "singular":
            return None
        return next((r for r in self.singular if r.alpha == entry.alpha), None)

    def to_dict(self) -> dict:
        data = {
            "degrees": [e.to_dict() for e in self.entries],
            "interval": list(self.interval),
            "tolerances": dict(self.tolerances),
        }
        if self.singular:
            data["singular"] = [r.to_dict() for r in self.singular]
        if self.endpoint is not None:
            data["endpoint"] = self.endpoint.to_dict()
        return data


@dataclass(frozen=True)
class EigenCurve:
    """Sorted eigenvalues (rows) at each sampled degree."""

    alphas: np.ndarray
    eigenvalues: np.ndarray


def edge_trig(g: ConeGraph, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """cos(αθ(e)) and sin(αθ(e)) per edge, with arguments reduced mod 2π."""
    if g.n_edges and alpha * float(g.theta.min()) > MAX_TRIG_ARGUMENT:
        raise NumericalAccuracyError(f"alpha={alpha!r} is beyond reliable trigonometric reduction")
    args = np.mod(alpha * g.theta, 2.0 * np.pi)
    return np.cos(args), np.sin(args)


def nearest_singular(g: ConeGraph, alpha: float, tol: float = SINGULAR_TOL) -> Optional[float]:
    """The singular degree kπ/θ(e) within `tol` of alpha, if any."""
    if not g.n_edges:
        return None
    k = np.rint(alpha * g.theta / np.pi)
    candidates = k * np.pi / g.theta
    hits = np.flatnonzero((k >= 1) & (np.abs(candidates - alpha) <= tol))
    if not hits.size:
        return None
    best = hits[np.argmin(np.abs(candidates[hits] - alpha))]
    return float(candidates[best])


def is_singular(g: ConeGraph, alpha: float, tol: float = SINGULAR_TOL) -> bool:
    return nearest_singular(g, alpha, tol) is not None


def _check_nonsingular(g: ConeGraph, alpha: float) -> None:
    if not alpha > 0:
        raise PreconditionError("alpha must be positive")
    near = nearest_singular(g, alpha)
    if near is not None:
        raise SingularDegreeError(f"alpha={alpha!r} is at the singular degree {near!r}")


def delta_matrix(
    g: ConeGraph,
    alpha: float,
    weights: Optional[np.ndarray] = None,
    edge_mask: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Δ_{αθ} without precondition checks.

    Diagonal −Σ cot(αθ_ik), off-diagonal Σ w_e csc(αθ_ij) over parallel edges.
    `weights` scales the off-diagonal terms per edge (cos φ for cone maps) and
    `edge_mask` restricts the sums to a subset of edges.
    """
    c, s = edge_trig(g, alpha)
    tails, heads = g.endpoints
    keep = np.ones(g.n_edges, dtype=bool) if edge_mask is None else np.asarray(edge_mask, dtype=bool)
    t, h = tails[keep], heads[keep]
    cot = c[keep] / s[keep]
    off = 1.0 / s[keep]
    if weights is not None:
        off = off * np.asarray(weights, dtype=float)[keep]

    A = np.zeros((g.n_vertices, g.n_vertices))
    np.add.at(A, (t, t), -cot)
    np.add.at(A, (h, h), -cot)
    np.add.at(A, (t, h), off)
    np.add.at(A, (h, t), off)
    return A


def edge_quadratic(g: ConeGraph, alpha: float, rho, weights: Optional[np.ndarray] = None) -> float:
    """Σ_e [2 w_e ρ_i ρ_j − cos(αθ_e)(ρ_i² + ρ_j²)] / sin(αθ_e)."""
    rho = np.asarray(rho, dtype=float)
    c, s = edge_trig(g, alpha)
    tails, heads = g.endpoints
    ri, rj = rho[tails], rho[heads]
    w = 1.0 if weights is None else np.asarray(weights, dtype=float)
    return math.fsum((2.0 * w * ri * rj - c * (ri * ri + rj * rj)) / s)


def assemble_euclid(g: ConeGraph, alpha: float) -> DegreeMatrixEuclid:
    _check_nonsingular(g, alpha)
    return DegreeMatrixEuclid(alpha, delta_matrix(g, alpha))


def quadratic_form_euclid(g: ConeGraph, alpha: float, rho) -> float:
    _check_nonsingular(g, alpha)
    return edge_quadratic(g, alpha, rho)


def _canonical(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            out[:, k] = -col
    return out


class DegreeLocator:
    """
    Bracket-and-bisect search for the kernel degrees of a matrix family whose
    eigenvalues increase strictly with α.

    Zeros are bracketed by drops in the count of negative eigenvalues on a
    grid, bisected to `cfg.alpha_tol`, and the drop is the multiplicity.
    """

    def __init__(self, assemble: Assembler, cfg: ScanConfig):
        self.assemble = assemble
        self.cfg = cfg

    def negatives(self, alpha: float) -> int:
        return int(np.sum(eig_sym(self.assemble(alpha)).eigenvalues < 0.0))

    def _bisect(self, lo: float, hi: float, nlo: int, nhi: int) -> List[Tuple[float, int]]:
        found = []
        stack = [(lo, hi, nlo, nhi)]
        steps = 0
        while stack:
            lo, hi, nlo, nhi = stack.pop()
            if nlo <= nhi:
                continue
            if hi - lo <= self.cfg.alpha_tol:
                found.append((0.5 * (lo + hi), nlo - nhi))
                continue
            mid = 0.5 * (lo + hi)
            nmid = self.negatives(mid)
            steps += 1
            stack.append((mid, hi, nmid, nhi))
            stack.append((lo, mid, nlo, nmid))
        logger.debug("bisection resolved %d zero(s) in %d evaluations", len(found), steps)
        return found

    def zeros_in(self, lo: float, hi: float, samples: int) -> List[Tuple[float, int]]:
        """(alpha, multiplicity) of every kernel degree in [lo, hi]."""
        grid = np.linspace(lo, hi, max(2, samples))
        counts = [self.negatives(a) for a in grid]
        zeros = []
        for k in range(len(grid) - 1):
            if counts[k + 1] > counts[k]:
                logger.warning(
                    "negative count rose from %d to %d on [%.12g, %.12g]",
                    counts[k], counts[k + 1], grid[k], grid[k + 1],
                )
            elif counts[k] > counts[k + 1]:
                zeros.extend(self._bisect(grid[k], grid[k + 1], counts[k], counts[k + 1]))
        logger.debug("interval [%.12g, %.12g]: counts %d -> %d", lo, hi, counts[0], counts[-1])
        return zeros

    def entry(self, alpha: float, multiplicity: int) -> DegreeEntry:
        A = self.assemble(alpha)
        dec = eig_sym(A)
        pick = np.sort(np.argsort(np.abs(dec.eigenvalues), kind="stable")[:multiplicity])
        kernel = _canonical(dec.eigenvectors[:, pick])
        residual = float(np.max(np.linalg.norm(A @ kernel, axis=0))) if multiplicity else 0.0
        if residual > self.cfg.residual_tol * dec.scale:
            logger.warning("kernel residual %.3g at alpha=%.12g exceeds tolerance", residual, alpha)
        return DegreeEntry(float(alpha), int(multiplicity), kernel)

    def locate(self, intervals: Sequence[Tuple[float, float]], samples: int) -> List[DegreeEntry]:
        if not intervals:
            return []
        workers = max(1, min(self.cfg.threads, len(intervals)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda iv: self.zeros_in(iv[0], iv[1], samples), intervals))
        zeros = sorted(z for chunk in chunks for z in chunk)

        clusters: List[List[Tuple[float, int]]] = []
        for z in zeros:
            if clusters and z[0] - clusters[-1][-1][0] <= self.cfg.cluster_tol:
                clusters[-1].append(z)
            else:
                clusters.append([z])

        entries = []
        for cluster in clusters:
            mult = sum(m for _, m in cluster)
            alpha = sum(a * m for a, m in cluster) / mult
            entries.append(self.entry(alpha, mult))
        return entries


def nonsingular_intervals(g: ConeGraph, alpha_max: float, guard: float) -> List[Tuple[float, float]]:
    """Maximal singular-free pieces of (0, alpha_max], shrunk by `guard` at singular ends."""
    breaks = [0.0] + [s.alpha for s in singular_degrees(g, alpha_max)]
    intervals = []
    for a, b in zip(breaks, breaks[1:]):
        if a + guard < b - guard:
            intervals.append((a + guard, b - guard))
    if breaks[-1] + guard < alpha_max and alpha_max - breaks[-1] > SINGULAR_TOL:
        intervals.append((breaks[-1] + guard, alpha_max))
    return intervals


def scan_degrees_euclid(g: ConeGraph, alpha_max: float, cfg: Optional[ScanConfig] = None) -> DegreeSpectrum:
    """
    Nonsingular degrees in (0, alpha_max] where Δ_{αθ} has a kernel.

    Args:
        g: valid cone graph
        alpha_max: right end of the scanned range
        cfg: scan tolerances

    Returns:
        DegreeSpectrum: nonsingular entries sorted by alpha
    """
    cfg = cfg or ScanConfig()
    if not alpha_max > 0:
        raise PreconditionError("alpha_max must be positive")
    require_valid(g, allow_wide=False)

    locator = DegreeLocator(lambda a: delta_matrix(g, a), cfg)
    intervals = nonsingular_intervals(g, alpha_max, cfg.guard_band)
    entries = locator.locate(intervals, cfg.grid_size(g.n_vertices))
    logger.info("scanned %d interval(s) up to %.6g: %d degree(s)", len(intervals), alpha_max, len(entries))
    return DegreeSpectrum(tuple(entries), (0.0, float(alpha_max)), cfg.tolerances())


def _cluster(values: Sequence[float], tol: float) -> List[Tuple[float, int]]:
    out: List[List[float]] = []
    for v in sorted(values):
        if out and v - out[-1][-1] <= tol:
            out[-1].append(v)
        else:
            out.append([v])
    return [(float(np.mean(c)), len(c)) for c in out]


def constant_theta_degrees(
    g: ConeGraph, theta0: Optional[float] = None, alpha_max: float = 3.0
) -> List[Tuple[float, int]]:
    """
    Degrees of a constant-angle cone from the normalized Laplacian: 1 − cos(αθ₀) ∈ spec(ℒ) ∩ (0, 2).

    Returns:
        list: (alpha, multiplicity) sorted by alpha
    """
    theta0 = float(g.theta[0]) if theta0 is None else float(theta0)
    if np.any(np.abs(g.theta - theta0) > CONSTANT_THETA_TOL):
        raise PreconditionError("theta is not constant on the edges")

    lam = eig_sym(normalized_laplacian(g)).eigenvalues
    limit = alpha_max * theta0
    values = []
    for value in lam:
        if not 1e-9 < value < 2.0 - 1e-9:
            continue
        base = math.acos(1.0 - value)
        k = 0
        while base + 2 * k * math.pi <= limit:
            for x in (base + 2 * k * math.pi, 2 * math.pi - base + 2 * k * math.pi):
                if 0 < x <= limit:
                    values.append(x / theta0)
            k += 1
    return _cluster(values, 1e-8)


def lower_bound_euclid(g: ConeGraph) -> float:
    """No nonsingular degree lies below this value."""
    require_valid(g, allow_wide=False)
    info = structure(g)
    n = g.n_vertices
    if info.is_complete:
        return (2.0 / info.max_theta) * math.atan(n / (n - 1))
    lam = eig_sym(normalized_laplacian(g)).eigenvalues
    lam1 = float(np.clip(lam[1], 0.0, 2.0))
    return math.acos(1.0 - lam1) / info.max_theta


def limit_operator_alpha0(g: ConeGraph) -> np.ndarray:
    """Positive semidefinite Laplacian with weights 1/θ(e); αΔ_{αθ} → −this as α → 0."""
    return edge_weighted_laplacian(g, weight="inv_theta")


def _singular_multiples(g: ConeGraph, alpha0: float) -> Dict[str, int]:
    k = np.rint(alpha0 * g.theta / np.pi).astype(int)
    close = np.abs(k * np.pi / g.theta - alpha0) <= SINGULAR_TOL
    return {e.id: int(k[i]) for i, e in enumerate(g.edges) if k[i] >= 1 and close[i]}


def _singular_setup(g: ConeGraph, alpha: float):
    """Snap alpha, subdivide so every singular face has αθ = π, and mark Σ."""
    alpha0 = nearest_singular(g, alpha)
    if alpha0 is None:
        raise SingularDegreeError(f"alpha={alpha!r} is not a singular degree")
    multiples = _singular_multiples(g, alpha0)
    child, record = subdivide_evenly(g, {eid: k for eid, k in multiples.items() if k >= 2})
    mask = np.array([record.edge_map[e.id][0] in multiples for e in child.edges], dtype=bool)
    return alpha0, child, record, mask


def _sigma_graph(child: ConeGraph, mask: np.ndarray) -> ConeGraph:
    edges = tuple(e for e, m in zip(child.edges, mask) if m)
    vertices = tuple(sorted({x for e in edges for x in (e.u, e.v)}))
    return ConeGraph(vertices, edges, child.allow_wide_angles)


def boundary_operators(sigma: ConeGraph) -> Tuple[np.ndarray, np.ndarray]:
    """
    Oriented and unoriented incidence matrices of Σ (rows V(Σ), columns E(Σ)).

    ∂ has −1 at the tail and +1 at the head of each edge; d has +1 at both.
    """
    G = nx.MultiDiGraph()
    G.add_nodes_from(sigma.vertex_order)
    edgelist = [(e.u, e.v, e.id) for e in sigma.edges]
    G.add_edges_from(edgelist)
    nodes = list(sigma.vertex_order)
    partial = nx.incidence_matrix(G, nodelist=nodes, edgelist=edgelist, oriented=True).toarray()
    d = nx.incidence_matrix(G, nodelist=nodes, edgelist=edgelist, oriented=False).toarray()
    return partial.astype(float), d.astype(float)


def _abundant(sigma: ConeGraph) -> bool:
    G = nx.MultiGraph()
    G.add_edges_from((e.u, e.v, e.id) for e in sigma.edges)
    for nodes in nx.connected_components(G):
        part = G.subgraph(nodes)
        rank = part.number_of_edges() - part.number_of_nodes() + 1
        if rank >= 1 and nx.is_bipartite(part):
            return True
    return False


def abundance_check(g: ConeGraph, alpha: float) -> bool:
    """True when a component of Σ (after subdivision) is bipartite and not a tree."""
    _, child, _, mask = _singular_setup(g, alpha)
    return _abundant(_sigma_graph(child, mask))


def singular_analysis(g: ConeGraph, alpha: float, cfg: Optional[ScanConfig] = None) -> SingularReport:
    """
    Dimension of balanced homogeneous harmonic functions at a singular degree.

    Unknowns are ρ on every vertex of the subdivided graph and c2 on every
    face of Σ. Each Σ face forces ρ_i + ρ_j = 0; each vertex balances the
    nonsingular faces' (ρ_j − cos ρ_i)/sin terms against d c2.

    Args:
        g: valid cone graph
        alpha: a singular degree (within 1e-9)
        cfg: tolerances

    Returns:
        SingularReport
    """
    cfg = cfg or ScanConfig()
    require_valid(g, allow_wide=False)
    alpha0, child, record, mask = _singular_setup(g, alpha)
    sigma = _sigma_graph(child, mask)

    n = child.n_vertices
    tails, heads = child.endpoints
    sig_idx = np.flatnonzero(mask)
    p = sig_idx.size

    constraints = np.zeros((p, n))
    coupling = np.zeros((n, p))
    for r, e in enumerate(sig_idx):
        constraints[r, tails[e]] += 1.0
        constraints[r, heads[e]] += 1.0
        coupling[tails[e], r] += 1.0
        coupling[heads[e], r] += 1.0
    balance = delta_matrix(child, alpha0, edge_mask=~mask)

    system = np.block([[constraints, np.zeros((p, p))], [balance, coupling]])
    null = nullspace(system, cfg.kernel_tol)

    B = nullspace(constraints, cfg.kernel_tol) if p else np.eye(n)
    Q = B.T @ balance @ B
    inertia = count_signs(Q, cfg.kernel_tol) if B.shape[1] else (0, 0, 0)

    eps = cfg.guard_band
    above = eig_sym(delta_matrix(g, alpha0 + eps)).eigenvalues
    below = eig_sym(delta_matrix(g, alpha0 - eps)).eigenvalues
    offsets = {
        "nonpositive_above": int(np.sum(above <= 0.0)),
        "positive_below": int(np.sum(below > 0.0)),
    }

    report = SingularReport(
        alpha=alpha0,
        subdivided=child,
        subdivision=record,
        sigma_edges=tuple(e.id for e in sigma.edges),
        sigma_vertices=sigma.vertex_order,
        B=B,
        Q=Q,
        q_inertia=inertia,
        balanced_dim=int(null.shape[1]),
        generators_rho=null[:n, :],
        generators_c=null[n:, :],
        offset_counts=offsets,
        abundant=_abundant(sigma),
    )
    logger.debug("singular alpha=%.12g: |Σ|=%d, balanced_dim=%d", alpha0, p, report.balanced_dim)
    return report


def scan_all_euclid(g: ConeGraph, alpha_max: float, cfg: Optional[ScanConfig] = None) -> DegreeSpectrum:
    """Nonsingular scan plus a singular entry for every singular degree with balanced_dim >= 1."""
    cfg = cfg or ScanConfig()
    spectrum = scan_degrees_euclid(g, alpha_max, cfg)
    reports = tuple(singular_analysis(g, s.alpha, cfg) for s in singular_degrees(g, alpha_max))
    singular_entries = [
        DegreeEntry(r.alpha, r.balanced_dim, np.zeros((g.n_vertices, 0)), kind="singular")
        for r in reports
        if r.balanced_dim >= 1
    ]
    entries = sorted(spectrum.entries + tuple(singular_entries), key=lambda e: e.alpha)
    return DegreeSpectrum(tuple(entries), spectrum.interval, spectrum.tolerances, reports)


def sample_curves(assemble: Assembler, a: float, b: float, samples: int) -> EigenCurve:
    if samples < 1:
        raise PreconditionError("samples must be at least 1")
    alphas = np.linspace(a, b, samples) if samples > 1 else np.array([float(a)])
    rows = [eig_sym(assemble(x)).eigenvalues for x in alphas]
    return EigenCurve(alphas, np.vstack(rows))


def eigen_curves(g: ConeGraph, a: float, b: float, samples: int) -> EigenCurve:
    """Sorted eigenvalues of Δ_{αθ} at `samples` uniform points of a nonsingular [a, b]."""
    if not 0 < a <= b:
        raise PreconditionError("need 0 < a <= b")
    inside = [s.alpha for s in singular_degrees(g, b + SINGULAR_TOL) if s.alpha >= a - SINGULAR_TOL]
    if inside:
        raise SingularDegreeError(f"[{a!r}, {b!r}] contains the singular degree {inside[0]!r}")
    return sample_curves(lambda x: delta_matrix(g, x), a, b, samples)
