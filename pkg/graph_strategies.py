"""
Hypothesis strategies for random cone graphs used by the property tests.
"""

import math

from hypothesis import strategies as st

from cone_graph import ConeGraph


@st.composite
def connected_cone_graphs(
    draw,
    min_vertices: int = 2,
    max_vertices: int = 6,
    theta_min: float = 0.3,
    theta_max: float = 2.8,
    constant_theta: bool = False,
    simple: bool = True,
    with_phi: bool = False,
    phi_max: float = math.pi - 0.2,
):
    """
    Random connected graph: a random spanning tree plus a few extra edges.

    With `simple` no parallel edges are produced.
    """
    n = draw(st.integers(min_vertices, max_vertices))
    pairs = [(draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    for a, b in extra:
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if simple and any((min(p), max(p)) == key for p in pairs):
            continue
        pairs.append((a, b))

    angle = st.floats(theta_min, theta_max, allow_nan=False, allow_infinity=False)
    if constant_theta:
        theta0 = draw(angle)
        thetas = [theta0] * len(pairs)
    else:
        thetas = [draw(angle) for _ in pairs]
    phis = [None] * len(pairs)
    if with_phi:
        phis = [draw(st.floats(0.2, phi_max)) for _ in pairs]

    names = [f"v{i}" for i in range(n)]
    return ConeGraph.from_edges(
        [(names[a], names[b], t, p) for (a, b), t, p in zip(pairs, thetas, phis)], vertices=names
    )
