"""
Input and output for the cone degree toolkit.
Reads cone graphs from JSON and writes reports as JSON and tables as CSV.
"""

import json
import logging
import math
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from cone_graph import ConeGraph, Edge
from errors import InputParseError
from metric_graph_oracle import edge_profile

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


class DataManager:
    """Loads cone graphs and writes analysis reports."""

    def __init__(self, output_dir: Optional[str] = None):
        """
        Args:
            output_dir (str): directory for relative output paths (created on demand)
        """
        self.output_dir = output_dir

    def graph_from_dict(self, data: Any, degrees: bool = False) -> ConeGraph:
        """
        Build a ConeGraph from the parsed JSON document.

        Args:
            data: {"vertices": [...], "edges": [{"u", "v", "theta", "phi"?, "id"?}], "options"?}
            degrees (bool): angles are given in degrees

        Returns:
            ConeGraph: angles in radians
        """
        if not isinstance(data, dict):
            raise InputParseError("top-level JSON value must be an object")
        for key in ("vertices", "edges"):
            if key not in data:
                raise InputParseError(f"missing key {key!r}")
            if not isinstance(data[key], list):
                raise InputParseError(f"{key!r} must be a list")

        convert = math.radians if degrees else float
        edges = []
        for k, item in enumerate(data["edges"]):
            if not isinstance(item, dict):
                raise InputParseError(f"edge #{k} must be an object")
            for key in ("u", "v", "theta"):
                if key not in item:
                    raise InputParseError(f"edge #{k}: missing key {key!r}")
            theta = convert(_number(item["theta"], f"edge #{k} theta"))
            phi = item.get("phi")
            if phi is not None:
                phi = convert(_number(phi, f"edge #{k} phi"))
            edge_id = str(item.get("id", f"e{k}"))
            edges.append(Edge(edge_id, str(item["u"]), str(item["v"]), theta, phi))

        options = data.get("options") or {}
        if not isinstance(options, dict):
            raise InputParseError("'options' must be an object")
        wide = options.get("allow_wide_angles", False)
        if not isinstance(wide, bool):
            raise InputParseError("'allow_wide_angles' must be true or false")

        return ConeGraph(tuple(str(v) for v in data["vertices"]), tuple(edges), wide)

    def load_graph(self, path: str, degrees: bool = False, allow_wide_angles: bool = False) -> ConeGraph:
        """Read a cone graph JSON file."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise InputParseError(f"input file not found: {path}")
        except json.JSONDecodeError as exc:
            raise InputParseError(f"malformed JSON in {path}: {exc}")
        g = self.graph_from_dict(data, degrees)
        if allow_wide_angles and not g.allow_wide_angles:
            g = ConeGraph(g.vertices, g.edges, True)
        logger.debug("loaded %s: %d vertices, %d edges", path, g.n_vertices, g.n_edges)
        return g

    def to_json(self, report: Any) -> str:
        """JSON text with shortest round-trip floats; identical inputs give identical bytes."""
        return json.dumps(_plain(report), indent=2, ensure_ascii=False) + "\n"

    def resolve(self, path: str) -> str:
        if self.output_dir and not os.path.isabs(path):
            path = os.path.join(self.output_dir, path)
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        return path

    def write_text(self, text: str, path: str) -> str:
        path = self.resolve(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        return path

    def frame_to_csv(self, df: pd.DataFrame) -> str:
        return df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    def curves_frame(self, curve) -> pd.DataFrame:
        """alpha, lambda_1..lambda_n per sampled degree."""
        n = curve.eigenvalues.shape[1]
        df = pd.DataFrame(curve.eigenvalues, columns=[f"lambda_{j}" for j in range(1, n + 1)])
        df.insert(0, "alpha", curve.alphas)
        return df

    def eigenfunction_frame(self, mesh, rho) -> pd.DataFrame:
        """edge_id, s, rho along every edge of the mesh."""
        parts = []
        for e in mesh.graph.edges:
            s, values = edge_profile(mesh, rho, e.id)
            parts.append(pd.DataFrame({"edge_id": e.id, "s": s, "rho": values}))
        return pd.concat(parts, ignore_index=True)

    def verification_frame(self, report) -> pd.DataFrame:
        columns = ["alpha_scan", "alpha_oracle", "delta", "mult_scan", "mult_oracle", "matched"]
        return pd.DataFrame([r.to_dict() for r in report.rows], columns=columns)

    def summary(self, g: ConeGraph) -> Dict[str, Any]:
        return {
            "vertices": g.n_vertices,
            "edges": g.n_edges,
            "total_angle": g.total_angle if g.edges else 0.0,
            "has_phi": g.has_phi,
        }
