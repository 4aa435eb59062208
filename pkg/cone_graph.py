"""
Cone graph model.
Combinatorial and metric data of a simplicial cone C(Γ, θ): vertices, faces
(edges) with sector angles θ and optional target angles φ, subdivision of
faces, and structural queries.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from errors import GraphValidationError, PreconditionError

logger = logging.getLogger(__name__)

FRACTION_TOL = 1e-12
SINGULAR_DEDUP_RTOL = 1e-12
WITNESS_TOL = 1e-9

AngleSpec = Union[float, Sequence[float]]


@dataclass(frozen=True)
class Edge:
    """One face of the cone, oriented from tail `u` to head `v`."""

    id: str
    u: str
    v: str
    theta: float
    phi: Optional[float] = None


@dataclass(frozen=True)
class ConeGraph:
    """
    Finite graph Γ with a sector angle θ(e) per edge (and optionally a target angle φ(e)).

    Vertices are indexed densely in sorted id order and edges are kept sorted by
    id, so every matrix built from a graph has a reproducible layout.
    """

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    allow_wide_angles: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence],
        vertices: Optional[Iterable[str]] = None,
        allow_wide_angles: bool = False,
    ) -> "ConeGraph":
        """
        Build a graph from (u, v, theta) or (u, v, theta, phi) tuples.

        Edge ids are "e<k>" in input order; vertices default to all endpoints.
        """
        built = []
        seen = []
        for k, item in enumerate(edges):
            u, v, theta = str(item[0]), str(item[1]), float(item[2])
            phi = float(item[3]) if len(item) > 3 and item[3] is not None else None
            built.append(Edge(f"e{k}", u, v, theta, phi))
            for x in (u, v):
                if x not in seen:
                    seen.append(x)
        if vertices is None:
            vertices = seen
        return cls(tuple(vertices), tuple(built), allow_wide_angles)

    @cached_property
    def vertex_order(self) -> Tuple[str, ...]:
        return tuple(sorted(set(self.vertices)))

    @cached_property
    def index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertex_order)}

    @cached_property
    def edge_by_id(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_order)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def endpoints(self) -> Tuple[np.ndarray, np.ndarray]:
        """Dense (tail, head) vertex indices per edge."""
        tails = np.array([self.index[e.u] for e in self.edges], dtype=int)
        heads = np.array([self.index[e.v] for e in self.edges], dtype=int)
        return tails, heads

    @cached_property
    def theta(self) -> np.ndarray:
        return np.array([e.theta for e in self.edges], dtype=float)

    @cached_property
    def phi(self) -> np.ndarray:
        if not self.has_phi:
            raise PreconditionError("target angles phi are missing on some edges")
        return np.array([e.phi for e in self.edges], dtype=float)

    @property
    def has_phi(self) -> bool:
        return bool(self.edges) and all(e.phi is not None for e in self.edges)

    @property
    def theta_max(self) -> float:
        return float(self.theta.max())

    @property
    def total_angle(self) -> float:
        return float(self.theta.sum())

    def with_phi(self, phi: Union[float, Mapping[str, float], Sequence[float]]) -> "ConeGraph":
        """Copy of the graph with target angles attached (constant, by edge id, or by edge order)."""
        if isinstance(phi, Mapping):
            values = [float(phi[e.id]) for e in self.edges]
        elif np.ndim(phi) == 0:
            values = [float(phi)] * self.n_edges
        else:
            values = [float(x) for x in phi]
            if len(values) != self.n_edges:
                raise PreconditionError("one target angle per edge is required")
        edges = tuple(
            Edge(e.id, e.u, e.v, e.theta, p) for e, p in zip(self.edges, values)
        )
        return ConeGraph(self.vertices, edges, self.allow_wide_angles)

    def to_dict(self) -> dict:
        edges = []
        for e in self.edges:
            item = {"id": e.id, "u": e.u, "v": e.v, "theta": e.theta}
            if e.phi is not None:
                item["phi"] = e.phi
            edges.append(item)
        return {
            "vertices": list(self.vertices),
            "edges": edges,
            "options": {"allow_wide_angles": self.allow_wide_angles},
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class StructureReport:
    bipartite: bool
    has_odd_cycle: bool
    cycle_rank: int
    components: int
    is_complete: bool
    max_theta: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SingularDegree:
    """A degree α with αθ(e) = kπ for the witnessing (edge id, k) pairs."""

    alpha: float
    witnesses: Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class Subdivision:
    """
    Record of an edge subdivision.

    Args:
        parent: graph before subdivision
        child: graph after subdivision
        edge_map: child edge id -> (parent edge id, (start, end) fraction of the parent edge)
        inserted_vertices: vertex ids created by the subdivision
    """

    parent: ConeGraph
    child: ConeGraph
    edge_map: Dict[str, Tuple[str, Tuple[float, float]]] = field(default_factory=dict)
    inserted_vertices: Tuple[str, ...] = ()

    def recovered_angles(self) -> Dict[str, float]:
        """Sum of child angles per parent edge; equals the parent metric."""
        sums: Dict[str, float] = {}
        for e in self.child.edges:
            parent_id = self.edge_map[e.id][0]
            sums[parent_id] = sums.get(parent_id, 0.0) + e.theta
        return sums


def compose(first: Subdivision, second: Subdivision) -> Subdivision:
    """Chain two subdivisions; `second` must subdivide `first.child`."""
    if second.parent is not first.child and second.parent != first.child:
        raise PreconditionError("second subdivision does not start from the first one's result")
    edge_map = {}
    for child_id, (mid_id, (a, b)) in second.edge_map.items():
        parent_id, (c, d) = first.edge_map[mid_id]
        edge_map[child_id] = (parent_id, (c + (d - c) * a, c + (d - c) * b))
    return Subdivision(
        first.parent,
        second.child,
        edge_map,
        first.inserted_vertices + second.inserted_vertices,
    )


def to_networkx(g: ConeGraph) -> nx.MultiGraph:
    """MultiGraph keyed by edge id; edges with unknown endpoints are skipped."""
    G = nx.MultiGraph()
    G.add_nodes_from(g.vertex_order)
    known = set(g.vertex_order)
    for e in g.edges:
        if e.u not in known or e.v not in known:
            continue
        inv_theta = 1.0 / e.theta if e.theta else math.inf
        G.add_edge(e.u, e.v, key=e.id, theta=e.theta, phi=e.phi, inv_theta=inv_theta, count=1.0)
    return G


def validate(g: ConeGraph, allow_wide: Optional[bool] = None) -> ValidationReport:
    """
    Collect every structural and metric violation of a cone graph.

    Args:
        g: graph to check
        allow_wide: admit sector angles in [π, 2π); defaults to the graph's own flag

    Returns:
        ValidationReport: empty when the graph is valid
    """
    wide = g.allow_wide_angles if allow_wide is None else allow_wide
    upper, upper_name = (2 * math.pi, "(0,2π)") if wide else (math.pi, "(0,π)")
    violations: List[str] = []

    if not g.vertices:
        violations.append("empty graph")
    elif not g.edges:
        violations.append("no edges")
    seen = set()
    for v in g.vertices:
        if v in seen:
            violations.append(f"duplicate vertex id {v!r}")
        seen.add(v)

    edge_ids = set()
    for e in g.edges:
        if e.id in edge_ids:
            violations.append(f"duplicate edge id {e.id!r}")
        edge_ids.add(e.id)
        for x in (e.u, e.v):
            if x not in seen:
                violations.append(f"edge {e.id}: unknown endpoint {x!r}")
        if e.u == e.v:
            violations.append(f"edge {e.id}: self-loop at {e.u!r}")
        if not math.isfinite(e.theta):
            violations.append(f"edge {e.id}: theta is not finite")
        elif not 0 < e.theta < upper:
            violations.append(f"edge {e.id}: angle out of {upper_name} (theta={e.theta!r})")
        if e.phi is not None and not (math.isfinite(e.phi) and 0 < e.phi < math.pi):
            violations.append(f"edge {e.id}: target angle out of (0,π) (phi={e.phi!r})")

    if g.vertices and not nx.is_connected(to_networkx(g)):
        violations.append("disconnected")

    return ValidationReport(tuple(violations))


def require_valid(g: ConeGraph, allow_wide: Optional[bool] = None) -> None:
    """Raise GraphValidationError unless `g` is valid."""
    report = validate(g, allow_wide)
    if not report.ok:
        raise GraphValidationError(list(report.violations))


def _fresh_id(base: str, taken: set) -> str:
    candidate, n = base, 1
    while candidate in taken:
        candidate = f"{base}_{n}"
        n += 1
    taken.add(candidate)
    return candidate


def subdivide_edge(
    g: ConeGraph, edge_id: str, fractions: Sequence[float]
) -> Tuple[ConeGraph, Subdivision]:
    """
    Replace one edge by a path whose angles are the given fractions of the original.

    Args:
        g: graph to subdivide
        edge_id: edge to replace
        fractions: positive reals summing to 1

    Returns:
        tuple: (subdivided graph, Subdivision record)
    """
    if edge_id not in g.edge_by_id:
        raise PreconditionError(f"unknown edge {edge_id!r}")
    fr = [float(f) for f in fractions]
    if not fr or any(not math.isfinite(f) or f <= 0 for f in fr):
        raise PreconditionError("fractions must be a nonempty list of positive reals")
    if abs(math.fsum(fr) - 1.0) > FRACTION_TOL:
        raise PreconditionError(f"fractions are not normalized (sum={math.fsum(fr)!r})")

    parent = g.edge_by_id[edge_id]
    identity = {e.id: (e.id, (0.0, 1.0)) for e in g.edges}
    if len(fr) == 1:
        return g, Subdivision(g, g, identity, ())

    taken_vertices = set(g.vertices)
    taken_edges = set(g.edge_by_id)
    inserted = tuple(_fresh_id(f"{edge_id}~{i}", taken_vertices) for i in range(1, len(fr)))
    chain = (parent.u,) + inserted + (parent.v,)

    # last piece absorbs rounding so the pieces sum to the parent angle
    thetas = [f * parent.theta for f in fr[:-1]]
    thetas.append(parent.theta - math.fsum(thetas))
    phis: List[Optional[float]] = [None] * len(fr)
    if parent.phi is not None:
        phis = [f * parent.phi for f in fr[:-1]]
        phis.append(parent.phi - math.fsum(phis))

    starts = np.concatenate([[0.0], np.cumsum(fr)])
    starts[-1] = 1.0
    edges = [e for e in g.edges if e.id != edge_id]
    edge_map = {e.id: (e.id, (0.0, 1.0)) for e in edges}
    for i in range(len(fr)):
        new_id = _fresh_id(f"{edge_id}.{i}", taken_edges)
        edges.append(Edge(new_id, chain[i], chain[i + 1], thetas[i], phis[i]))
        edge_map[new_id] = (edge_id, (float(starts[i]), float(starts[i + 1])))

    child = ConeGraph(g.vertices + inserted, tuple(edges), g.allow_wide_angles)
    return child, Subdivision(g, child, edge_map, inserted)


def subdivide_evenly(g: ConeGraph, pieces: Mapping[str, int]) -> Tuple[ConeGraph, Subdivision]:
    """Subdivide each listed edge into the given number of equal pieces."""
    current = g
    record = Subdivision(g, g, {e.id: (e.id, (0.0, 1.0)) for e in g.edges}, ())
    for edge_id in sorted(pieces):
        k = int(pieces[edge_id])
        if k <= 1:
            continue
        current, step = subdivide_edge(current, edge_id, [1.0 / k] * k)
        record = compose(record, step)
    return current, record


def structure(g: ConeGraph) -> StructureReport:
    """Bipartiteness, cycle rank, component count and completeness of Γ."""
    G = to_networkx(g)
    components = nx.number_connected_components(G) if G.number_of_nodes() else 0
    bipartite = nx.is_bipartite(G)
    n = G.number_of_nodes()
    simple = nx.Graph(G)
    is_complete = n >= 2 and simple.number_of_edges() == n * (n - 1) // 2
    return StructureReport(
        bipartite=bipartite,
        has_odd_cycle=not bipartite,
        cycle_rank=G.number_of_edges() - n + components,
        components=components,
        is_complete=is_complete,
        max_theta=g.theta_max if g.edges else 0.0,
    )


def singular_degrees(g: ConeGraph, alpha_max: float) -> List[SingularDegree]:
    """
    Every α in (0, alpha_max] with αθ(e) ∈ πℤ for some edge, with its witnesses.

    Candidates kπ/θ(e) closer than a relative 1e-12 are merged into one degree.
    """
    if not alpha_max > 0:
        raise PreconditionError("alpha_max must be positive")
    candidates = []
    for e in g.edges:
        k_max = int(math.floor(alpha_max * e.theta / math.pi * (1 + 1e-12)))
        for k in range(1, k_max + 1):
            alpha = k * math.pi / e.theta
            if alpha <= alpha_max * (1 + 1e-12):
                candidates.append((alpha, e.id, k))
    candidates.sort()

    merged: List[SingularDegree] = []
    group: List[Tuple[float, str, int]] = []
    for item in candidates:
        if group and abs(item[0] - group[0][0]) > SINGULAR_DEDUP_RTOL * max(item[0], group[0][0]):
            merged.append(SingularDegree(group[0][0], tuple((eid, k) for _, eid, k in group)))
            group = []
        group.append(item)
    if group:
        merged.append(SingularDegree(group[0][0], tuple((eid, k) for _, eid, k in group)))
    return merged


def normalized_laplacian(g: ConeGraph) -> np.ndarray:
    """ℒ = I − D^{-1/2} A D^{-1/2} over the dense vertex order; parallel edges add."""
    G = to_networkx(g)
    return nx.normalized_laplacian_matrix(G, nodelist=list(g.vertex_order), weight="count").toarray()


def edge_weighted_laplacian(g: ConeGraph, weight: str = "inv_theta") -> np.ndarray:
    """Positive semidefinite Laplacian with the given edge attribute as weight."""
    G = to_networkx(g)
    return nx.laplacian_matrix(G, nodelist=list(g.vertex_order), weight=weight).toarray().astype(float)


def _angles(spec: AngleSpec, count: int) -> List[float]:
    if np.ndim(spec) == 0:
        return [float(spec)] * count
    values = [float(x) for x in spec]
    if len(values) != count:
        raise PreconditionError(f"expected {count} angles, got {len(values)}")
    return values


def _vertex_ids(n: int) -> List[str]:
    width = len(str(max(n - 1, 0)))
    return [f"v{i:0{width}d}" for i in range(n)]


def cycle_graph(n: int, theta: AngleSpec, phi: Optional[AngleSpec] = None) -> ConeGraph:
    """C_n with edges v_i -> v_{i+1 mod n}; n = 2 gives two parallel edges."""
    ids = _vertex_ids(n)
    thetas = _angles(theta, n)
    phis = _angles(phi, n) if phi is not None else [None] * n
    return ConeGraph.from_edges(
        [(ids[i], ids[(i + 1) % n], thetas[i], phis[i]) for i in range(n)], vertices=ids
    )


def path_graph(n: int, theta: AngleSpec, phi: Optional[AngleSpec] = None) -> ConeGraph:
    ids = _vertex_ids(n)
    thetas = _angles(theta, n - 1)
    phis = _angles(phi, n - 1) if phi is not None else [None] * (n - 1)
    return ConeGraph.from_edges(
        [(ids[i], ids[i + 1], thetas[i], phis[i]) for i in range(n - 1)], vertices=ids
    )


def complete_graph(n: int, theta: AngleSpec, phi: Optional[AngleSpec] = None) -> ConeGraph:
    ids = _vertex_ids(n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    thetas = _angles(theta, len(pairs))
    phis = _angles(phi, len(pairs)) if phi is not None else [None] * len(pairs)
    return ConeGraph.from_edges(
        [(ids[i], ids[j], thetas[k], phis[k]) for k, (i, j) in enumerate(pairs)], vertices=ids
    )


def star_graph(leaves: int, theta: AngleSpec, phi: Optional[AngleSpec] = None) -> ConeGraph:
    """K_{1,leaves} with hub v0."""
    ids = _vertex_ids(leaves + 1)
    thetas = _angles(theta, leaves)
    phis = _angles(phi, leaves) if phi is not None else [None] * leaves
    return ConeGraph.from_edges(
        [(ids[0], ids[i + 1], thetas[i], phis[i]) for i in range(leaves)], vertices=ids
    )
