"""
Balanced functions on the collapsed cone C*(Γ, θ) = Γ × R.

Separated solutions ρ(x)τ(t) come from the same degrees as homogeneous
functions on C(Γ, θ), with r^α replaced by e^{±αt}; the only face-wise linear
maps into C*(Γ, φ) are (x, at + b).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Union

import numpy as np

from cone_graph import ConeGraph, edge_weighted_laplacian, require_valid
from dense_spectral import kernel_basis
from errors import NumericalAccuracyError
from euclid_degrees import DegreeSpectrum
from sector_harmonics import evaluate_face

logger = logging.getLogger(__name__)

CONSTANT_TOL = 1e-9


@dataclass(frozen=True)
class LinearFamily:
    """f(x, t) = A + Bt, the degree-zero family."""

    A: float = 0.0
    B: float = 1.0
    alpha: float = 0.0
    kind: str = "linear"

    @property
    def decaying(self) -> bool:
        """Bounded as t → −∞: only the constants."""
        return self.B == 0

    def evaluate(self, edge_id: str, s, t):
        return self.A + self.B * np.asarray(t, dtype=float) + 0.0 * np.asarray(s, dtype=float)


@dataclass(frozen=True)
class SeparatedFamily:
    """f(x, t) = ρ(x)(C e^{αt} + D e^{−αt}) for a kernel vector ρ at degree α."""

    graph: ConeGraph = field(repr=False)
    alpha: float
    rho: np.ndarray
    C: float = 1.0
    D: float = 0.0
    kind: str = "separated"

    @property
    def decaying(self) -> bool:
        """Tends to 0 as t → −∞ exactly when D = 0."""
        return self.D == 0

    def profile(self, edge_id: str, s):
        e = self.graph.edge_by_id[edge_id]
        i, j = self.graph.index[e.u], self.graph.index[e.v]
        return evaluate_face(self.alpha, e.theta, 1.0, s, self.rho[i], self.rho[j])

    def evaluate(self, edge_id: str, s, t):
        t = np.asarray(t, dtype=float)
        tau = self.C * np.exp(self.alpha * t) + self.D * np.exp(-self.alpha * t)
        return self.profile(edge_id, s) * tau


Family = Union[LinearFamily, SeparatedFamily]


def separated_solutions(
    g: ConeGraph,
    spectrum: DegreeSpectrum,
    C: float = 1.0,
    D: float = 0.0,
    A: float = 0.0,
    B: float = 1.0,
) -> List[Family]:
    """
    Catalog of separated balanced functions: A + Bt, then one family per
    kernel vector of every nonsingular degree in the spectrum.
    """
    catalog: List[Family] = [LinearFamily(A, B)]
    for entry in spectrum.entries:
        if entry.kind != "nonsingular":
            continue
        for k in range(entry.kernel.shape[1]):
            catalog.append(SeparatedFamily(g, entry.alpha, entry.kernel[:, k].copy(), C, D))
    logger.debug("separated catalog: %d families from %d degrees", len(catalog), len(spectrum.entries))
    return catalog


def decaying_families(catalog: List[Family]) -> List[Family]:
    return [f for f in catalog if f.decaying]


@dataclass(frozen=True)
class FacewiseLinearReport:
    """
    Kernel of the 1/θ-weighted Laplacian and the t-slopes φ(e)/θ(e) of the
    face-wise linear map.
    """

    kernel: np.ndarray
    slopes: Dict[str, float]

    @property
    def dimension(self) -> int:
        return int(self.kernel.shape[1])

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "kernel": self.kernel.T.tolist(), "slopes": dict(self.slopes)}


def facewise_linear_check(g: ConeGraph, kernel_tol: float = 1e-9) -> FacewiseLinearReport:
    require_valid(g, allow_wide=False)
    kernel = kernel_basis(edge_weighted_laplacian(g, weight="inv_theta"), kernel_tol)
    if kernel.shape[1] != 1 or np.ptp(kernel[:, 0]) > CONSTANT_TOL * math.sqrt(g.n_vertices):
        raise NumericalAccuracyError(
            f"weighted Laplacian kernel is not the constants (dimension {kernel.shape[1]})"
        )
    kernel = kernel * np.sign(kernel[0, 0])
    slopes = {e.id: e.phi / e.theta for e in g.edges} if g.has_phi else {}
    return FacewiseLinearReport(kernel, slopes)
