"""
Tests for closed-form harmonic functions and maps on a single sector.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cone_graph import path_graph
from errors import PreconditionError, SingularDegreeError
from sector_harmonics import evaluate_face, evaluate_face_map, face_map_in_sector, reconstruct_face


def test_boundary_values_are_attained():
    theta_e, alpha = 1.2, 1.7
    for r in (0.5, 1.0, 3.0):
        assert evaluate_face(alpha, theta_e, r, 0.0, 0.4, -0.9) == pytest.approx(r ** alpha * 0.4)
        assert evaluate_face(alpha, theta_e, r, theta_e, 0.4, -0.9) == pytest.approx(r ** alpha * -0.9)


def test_half_degree_on_a_right_angle():
    value = evaluate_face(0.5, math.pi / 2, 2.0, 0.0, 1.0, 1.0)
    assert value == pytest.approx(math.sqrt(2))
    middle = evaluate_face(0.5, math.pi / 2, 1.0, math.pi / 4, 1.0, 1.0)
    # cos(π/8) + (√2 − 1) sin(π/8)
    assert middle == pytest.approx(math.cos(math.pi / 8) + (math.sqrt(2) - 1) * math.sin(math.pi / 8))


def test_singular_sector_needs_c2():
    with pytest.raises(SingularDegreeError):
        evaluate_face(2.0, math.pi / 2, 1.0, 0.3, 1.0, -1.0)
    value = evaluate_face(2.0, math.pi / 2, 1.0, math.pi / 4, 1.0, c2=0.5)
    assert value == pytest.approx(0.5)
    with pytest.raises(PreconditionError):
        evaluate_face(1.0, 1.0, 1.0, 0.5, 1.0)


def test_polar_arguments_are_checked():
    with pytest.raises(PreconditionError):
        evaluate_face(1.0, 1.0, -1.0, 0.5, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        evaluate_face(1.0, 1.0, 1.0, 1.5, 1.0, 1.0)


@given(
    st.floats(0.2, 3.0),
    st.floats(0.3, 2.5),
    st.floats(-1, 1),
    st.floats(-1, 1),
    st.floats(0.05, 0.95),
    st.floats(0.5, 2.0),
)
def test_faces_are_harmonic(alpha, theta_e, rho0, rho1, frac, r):
    if abs(math.sin(alpha * theta_e)) < 0.1:
        return
    theta = frac * theta_e
    h = 2e-4

    def u(rr, tt):
        return float(evaluate_face(alpha, theta_e, rr, tt, rho0, rho1))

    u0 = u(r, theta)
    u_rr = (u(r + h, theta) - 2 * u0 + u(r - h, theta)) / h ** 2
    u_r = (u(r + h, theta) - u(r - h, theta)) / (2 * h)
    u_tt = (u(r, theta + h) - 2 * u0 + u(r, theta - h)) / h ** 2
    amplitude = r ** alpha * (1 + 2 / abs(math.sin(alpha * theta_e))) / min(r, 1.0) ** 2
    assert abs(u_rr + u_r / r + u_tt / r ** 2) <= 1e-4 * amplitude * (1 + alpha) ** 4


def test_identity_face_map():
    r = np.linspace(0.0, 2.0, 7)
    theta = np.linspace(0.0, math.pi / 2, 7)
    x, y = evaluate_face_map(1.0, 1.0, math.pi / 2, math.pi / 2, 1.0, r, theta)
    assert np.allclose(x, r * np.cos(theta))
    assert np.allclose(y, r * np.sin(theta))


@given(
    st.floats(0.2, 2.5),
    st.floats(0.05, 0.95),
    st.floats(0.1, math.pi - 0.1),
    st.floats(0.0, 2.0),
    st.floats(0.0, 2.0),
)
def test_face_maps_stay_in_the_target_sector(theta_e, fill, phi_e, rho_i, rho_j):
    if rho_i == 0 and rho_j == 0:
        return
    alpha = fill * math.pi / theta_e
    r = np.linspace(0.0, 1.5, 5)[:, None]
    theta = np.linspace(0.0, theta_e, 9)[None, :]
    x, y = evaluate_face_map(rho_i, rho_j, theta_e, phi_e, alpha, r, theta)
    assert face_map_in_sector(x, y, phi_e, tol=1e-9)


def test_face_map_sides():
    x, y = evaluate_face_map(2.0, 3.0, 1.0, math.pi / 3, 1.2, 1.0, 0.0)
    assert (float(x), float(y)) == pytest.approx((2.0, 0.0))
    x, y = evaluate_face_map(2.0, 3.0, 1.0, math.pi / 3, 1.2, 1.0, 1.0)
    assert (float(x), float(y)) == pytest.approx((1.5, 3 * math.sqrt(3) / 2))


def test_face_map_preconditions():
    with pytest.raises(PreconditionError):
        evaluate_face_map(1.0, 1.0, 1.0, 1.0, math.pi, 1.0, 0.5)
    with pytest.raises(PreconditionError):
        evaluate_face_map(1.0, 1.0, 1.0, math.pi, 1.0, 1.0, 0.5)
    with pytest.raises(PreconditionError):
        evaluate_face_map(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.5)
    with pytest.raises(PreconditionError):
        evaluate_face_map(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5)


def test_points_outside_the_sector():
    assert not face_map_in_sector([1.0], [-0.1], math.pi / 2)
    assert not face_map_in_sector([-1.0], [0.5], math.pi / 4)
    assert face_map_in_sector([-0.4], [0.5], 3 * math.pi / 4)


def test_reconstruct_face():
    g = path_graph(3, [1.0, 2.0])
    alpha = math.pi / 3
    rho = np.cos(alpha * np.array([0.0, 1.0, 3.0]))
    s = np.linspace(0.0, 2.0, 11)
    values = reconstruct_face(g, alpha, rho, "e1", 1.0, s)
    assert values == pytest.approx(np.cos(alpha * (1.0 + s)), abs=1e-12)
    with pytest.raises(PreconditionError):
        reconstruct_face(g, alpha, rho, "e7", 1.0, s)
