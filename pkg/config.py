"""
Run configuration for degree scans, the metric-graph oracle and the CLI.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

from errors import PreconditionError

THREADS_ENV_VAR = "CONESPEC_THREADS"


def threads_from_env() -> int:
    """Worker count for interval scans, capped by CONESPEC_THREADS when set."""
    value = os.environ.get(THREADS_ENV_VAR, "").strip()
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ScanConfig:
    """
    Tolerances for the bracket-and-bisect degree scanners.

    Args:
        alpha_tol: bisection stopping width in alpha
        kernel_tol: zero band for eigenvalues, relative to max(1, spectral radius)
        guard_band: distance kept from singular degrees while scanning
        min_samples: lower bound on the localization grid per interval
        samples_per_vertex: grid points per vertex (grid = max(min_samples, k * #V))
        cluster_tol: located zeros closer than this merge into one degree
        residual_tol: acceptable kernel residual, relative to the matrix scale
        nonnegative_resolution: sweep resolution for nonnegative kernel vectors
        nu_resolution: grid resolution per nullspace dimension for the endpoint verdict
        nu_max_dim: largest nullspace searched by grid at the cone-map endpoint
        threads: worker threads for independent intervals
    """

    alpha_tol: float = 1e-10
    kernel_tol: float = 1e-9
    guard_band: float = 1e-6
    min_samples: int = 32
    samples_per_vertex: int = 8
    cluster_tol: float = 1e-8
    residual_tol: float = 1e-6
    nonnegative_resolution: int = 64
    nu_resolution: int = 64
    nu_max_dim: int = 4
    threads: int = field(default_factory=threads_from_env)

    def __post_init__(self):
        for name in ("alpha_tol", "kernel_tol", "guard_band", "cluster_tol", "residual_tol"):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"{name} must be positive")
        if self.threads < 1:
            raise PreconditionError("threads must be at least 1")

    def grid_size(self, n_vertices: int) -> int:
        return max(self.min_samples, self.samples_per_vertex * n_vertices)

    def tolerances(self) -> dict:
        return {
            "alpha_tol": self.alpha_tol,
            "kernel_tol": self.kernel_tol,
            "guard_band": self.guard_band,
            "cluster_tol": self.cluster_tol,
        }


@dataclass(frozen=True)
class OracleConfig:
    """
    Settings for the metric-graph eigenvalue oracle.

    Args:
        m: segments per edge
        dense_max_dim: largest mesh solved with a dense eigensolver
        richardson: also solve at m/2 to estimate discretization error
        match_tol: largest |alpha_scan - alpha_oracle| accepted as a match
    """

    m: int = 512
    dense_max_dim: int = 6000
    richardson: bool = True
    match_tol: float = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    command: str
    input_path: Optional[str] = None
    alpha_max: float = 3.0
    scan: ScanConfig = field(default_factory=ScanConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: Optional[str] = None
    allow_wide_angles: bool = False
    degrees: bool = False

    def __post_init__(self):
        if self.alpha_max <= 0:
            raise PreconditionError("alpha_max must be positive")
