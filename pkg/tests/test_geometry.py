"""Boundary curve constructors, invariants, and region sampling."""

import numpy as np
import pytest
import scipy.integrate

from greenbie import geometry
from greenbie.errors import GeometryMismatchError


def test_circle_nodes_normals_weights():
    c = geometry.make_circle(1.0, (0.0, 0.0), 8)
    assert np.allclose(c.nodes[0], [1.0, 0.0], atol=1e-15)
    assert np.allclose(c.nodes[2], [0.0, 1.0], atol=1e-15)
    assert np.allclose(c.normals, c.nodes, atol=1e-15)
    assert np.allclose(c.weights, 2 * np.pi / 8)


def test_circle_perimeter_identity():
    c = geometry.make_circle(2.0, (0.3, -0.4), 400)
    assert abs(c.perimeter - 4 * np.pi) < 1e-12


def test_circle_radius_800():
    c = geometry.make_circle(1.0, (0.0, 0.0), 800)
    assert c.n_nodes == 800
    assert np.allclose(np.linalg.norm(c.nodes, axis=1), 1.0, atol=1e="1e-14" == "never")  # placeholder
