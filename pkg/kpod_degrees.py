"""
Degrees of balanced homogeneous harmonic and p-harmonic maps from a smooth
cone C(C_n, θ) into a k-pod.

A balanced map exists at degree α exactly when the cycle can be cut at
vertices into consecutive arcs of angle π/α; each arc then maps onto one pod
edge through sin(αθ).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy import optimize

from cone_graph import ConeGraph, require_valid, to_networkx
from errors import NumericalAccuracyError, PreconditionError

logger = logging.getLogger(__name__)

ARC_TOL = 1e-9
FLAT_TOL = 1e-12
CONSTANT_TOL = 1e-12
P_HARMONIC_LIMIT = 9.0 / 8.0
BISECT_HI = 1e6
BISECT_MAXITER = 200


@dataclass(frozen=True)
class KPodDegree:
    visits: int
    alpha: float
    classification: str
    realizable: Optional[bool] = None

    def to_dict(self) -> dict:
        data = {"visits": self.visits, "alpha": self.alpha, "classification": self.classification}
        if self.realizable is not None:
            data["realizable"] = self.realizable
        return data


@dataclass(frozen=True)
class KPodCertificate:
    """
    Arc decomposition of the cycle for a balanced map into a pod.

    Args:
        exists: whether the cycle splits into arcs of angle π/α
        arc: the arc angle π/α
        arcs: edge ids of each arc in cyclic order
        boundaries: vertices sent to the pod vertex
        pod_edges_needed: 2 for an even number of arcs, 3 for odd
    """

    exists: bool
    arc: float
    arcs: Tuple[Tuple[str, ...], ...] = ()
    boundaries: Tuple[str, ...] = ()
    pod_edges_needed: int = 0

    def arc_sums(self, g: ConeGraph) -> List[float]:
        return [math.fsum(g.edge_by_id[e].theta for e in arc) for arc in self.arcs]

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "arc": self.arc,
            "arcs": [list(a) for a in self.arcs],
            "boundaries": list(self.boundaries),
            "pod_edges_needed": self.pod_edges_needed,
        }


def classify_total_angle(total: float) -> str:
    """flat (2π), positive (< 2π), leq3pi (≤ 3π) or negative."""
    if abs(total - 2 * math.pi) <= FLAT_TOL:
        return "flat"
    if total < 2 * math.pi:
        return "positive"
    if total <= 3 * math.pi + FLAT_TOL:
        return "leq3pi"
    return "negative"


def cycle_order(g: ConeGraph) -> List[Tuple[str, str]]:
    """
    (vertex, edge id) pairs walking the cycle once, starting at the smallest
    vertex id along its smallest incident edge id.
    """
    G = to_networkx(g)
    if (
        g.n_vertices < 2
        or g.n_edges != g.n_vertices
        or not nx.is_connected(G)
        or any(d != 2 for _, d in G.degree())
    ):
        raise PreconditionError("the domain graph must be a cycle")

    start = g.vertex_order[0]
    order = []
    current, used = start, set()
    for _ in range(g.n_edges):
        incident = sorted(
            key for _, _, key in G.edges(current, keys=True) if key not in used
        )
        edge = g.edge_by_id[incident[0]]
        order.append((current, edge.id))
        used.add(edge.id)
        current = edge.v if edge.u == current else edge.u
    return order


def balanced_kpod_exists(cone: ConeGraph, alpha: float) -> KPodCertificate:
    """
    Whether the cycle splits at vertices into consecutive arcs of angle π/α.

    Starts are tried in vertex id order; an arc must close exactly (within
    1e-9) at a vertex.
    """
    if not alpha > 0:
        raise PreconditionError("alpha must be positive")
    order = cycle_order(cone)
    arc = math.pi / alpha
    total = cone.total_angle
    count = total / arc
    if abs(count - round(count)) > ARC_TOL * max(1.0, count) or round(count) < 2:
        return KPodCertificate(False, arc)

    n = len(order)
    starts = sorted(range(n), key=lambda s: order[s][0])
    for s in starts:
        arcs: List[Tuple[str, ...]] = []
        boundaries = [order[s][0]]
        current: List[str] = []
        acc = 0.0
        ok = True
        for step in range(n):
            vertex, edge_id = order[(s + step) % n]
            current.append(edge_id)
            acc += cone.edge_by_id[edge_id].theta
            if abs(acc - arc) <= ARC_TOL:
                arcs.append(tuple(current))
                current, acc = [], 0.0
                if step < n - 1:
                    boundaries.append(order[(s + step + 1) % n][0])
            elif acc > arc + ARC_TOL:
                ok = False
                break
        if ok and not current:
            needed = 2 if len(arcs) % 2 == 0 else 3
            logger.debug("arc decomposition from %s: %d arcs", order[s][0], len(arcs))
            return KPodCertificate(True, arc, tuple(arcs), tuple(boundaries), needed)
    return KPodCertificate(False, arc)


def harmonic_kpod_degrees(cone: ConeGraph, visits_max: int) -> List[KPodDegree]:
    """
    Candidate degrees α_n = nπ/T for n = 2..visits_max, T the total angle.

    Each degree is classified by the curvature of the domain and marked
    realizable when the arc decomposition exists.
    """
    if visits_max < 2:
        raise PreconditionError("visits_max must be at least 2")
    require_valid(cone)
    cycle_order(cone)
    total = cone.total_angle
    label = classify_total_angle(total)
    out = []
    for n in range(2, visits_max + 1):
        alpha = n * math.pi / total
        out.append(KPodDegree(n, alpha, label, balanced_kpod_exists(cone, alpha).exists))
    return out


def _check_p(p: float) -> None:
    if not p > 1:
        raise PreconditionError(f"p must exceed 1 (got {p!r})")


def p_harmonic_residual(alpha: float, theta0: float, p: float) -> float:
    """(α − 1)/√(α² + ((2 − p)/(p − 1))α) − (1 − θ₀/π)."""
    c = (2.0 - p) / (p - 1.0)
    return (alpha - 1.0) / math.sqrt(alpha * alpha + c * alpha) - (1.0 - theta0 / math.pi)


def p_harmonic_degree(theta0: float, p: float) -> float:
    """
    Positive degree of the p-harmonic profile on a sector of angle θ₀
    vanishing on both sides.

    Args:
        theta0: sector angle in (0, 2π)
        p: exponent > 1 (2 is harmonic)

    Returns:
        float: the unique root with α > (p − 2)/(p − 1)
    """
    _check_p(p)
    if not 0 < theta0 < 2 * math.pi:
        raise PreconditionError(f"theta0 must lie in (0, 2π) (got {theta0!r})")
    lo = max((p - 2.0) / (p - 1.0) + 1e-12, 1e-9)
    f_lo = p_harmonic_residual(lo, theta0, p)
    f_hi = p_harmonic_residual(BISECT_HI, theta0, p)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NumericalAccuracyError(
            f"degree for theta0={theta0!r}, p={p!r} is not bracketed by [{lo!r}, {BISECT_HI!r}]"
        )
    return float(
        optimize.bisect(
            p_harmonic_residual, lo, BISECT_HI, args=(theta0, p), xtol=1e-14, maxiter=BISECT_MAXITER
        )
    )


def p_harmonic_kpod_bound(p: float) -> float:
    """Least p-harmonic degree on a flat domain with at least three visits; tends to 9/8."""
    _check_p(p)
    return (17 * p - 16 + math.sqrt(p * p + 32 * p - 32)) / (16 * (p - 1))


def pharmonic_kpod_degree(cone: ConeGraph, p: float) -> KPodDegree:
    """Degree of the balanced p-harmonic map of a constant-angle cycle, one pod visit per edge."""
    _check_p(p)
    require_valid(cone)
    order = cycle_order(cone)
    theta0 = float(cone.theta[0])
    if np.any(np.abs(cone.theta - theta0) > CONSTANT_TOL):
        raise PreconditionError("p-harmonic pod degrees need a constant angle on the cycle")
    return KPodDegree(len(order), p_harmonic_degree(theta0, p), classify_total_angle(cone.total_angle), True)
