"""Fundamental solutions and their derivatives; every sign convention is
pinned by finite differences of g0."""

import numpy as np
import pytest

from greenbie import kernels
from greenbie.errors import SingularityError

POISSON = kernels.OperatorSpec("poisson")
HELM = kernels.OperatorSpec("helmholtz", k=2.0)
IFACE_P = kernels.OperatorSpec("poisson", interface=kernels.InterfaceParams(2.0, 1.0))
IFACE_H = kernels.OperatorSpec(
    "helmholtz", k=2.0, interface=kernels.InterfaceParams(2.0, 1.0, 1.0, 4.0)
)
ALL_OPS = [(POISSON, None), (HELM, None), (IFACE_P, 1), (IFACE_P, 2),
           (IFACE_H, 1), (IFACE_H, 2)]


def test_operator_validation():
    with pytest.raises(ValueError):
        kernels.OperatorSpec("helmholtz", k=0.0)
    with pytest.raises(ValueError):
        kernels.OperatorSpec("stokes")
    with pytest.raises(ValueError):
        kernels.InterfaceParams(-1.0, 1.0)


def test_poisson_closed_forms():
    x = np.zeros(2)
    assert kernels.g0(POISSON, x, np.array([1.0, 0.0])) == 0.0
    val = kernels.g0(POISSON, x, np.array([np.e, 0.0]))
    assert abs(val - (-1.0 / (2.0 * np.pi))) < 1e-15


def test_helmholtz_value_matches_hankel():
    from greenbie.special import hankel1

    # k=2, |x-y| = 0.5 -> (i/4) H1_0(1)
    val = kernels.g0(HELM, np.zeros(2), np.array([0.5, 0.0]))
    want = 0.25j * hankel1(0, 1.0)
    assert abs(val - want) < 1e-14


def test_g0_symmetry_single_domain(rng):
    x = rng.normal(size=(1000, 2))
    y = x + rng.normal(size=(1000, 2)) + 0.1
    for op in (POISSON, HELM):
        a = kernels.g0(op, x, y)
        b = kernels.g0(op, y, x)
        assert np.array_equal(a, b)


def test_singularity_raises():
    p = np.array([0.3, 0.3])
    with pytest.raises(SingularityError):
        kernels.g0(POISSON, p, p)
    with pytest.raises(SingularityError):
        kernels.g0_dn_z(HELM, p, p, np.array([1.0, 0.0]))


def test_dn_z_radial_on_unit_circle():
    # y at origin, z on the unit circle with radial normal: -(1/2pi)
    theta = np.linspace(0, 2 * np.pi, 17)[:-1]
    z = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    vals = kernels.g0_dn_z(POISSON, np.zeros(2), z, z)
    assert np.allclose(vals, -1.0 / (2.0 * np.pi), atol=1e-15)


def test_orthogonal_normal_gives_zero():
    y = np.zeros(2)
    z = np.array([0.8, 0.0])
    n_perp = np.array([0.0, 1.0])
    for op, region in ALL_OPS:
        assert abs(kernels.g0_dn_z(op, y, z, n_perp, region)) == 0.0
        assert abs(kernels.g0_dn_y(op, z, y, n_perp, region)) == 0.0


def _fd_dir(f, p, v, h):
    return (f(p + h * v) - f(p - h * v)) / (2.0 * h)


@pytest.mark.parametrize("op,region", ALL_OPS)
def test_first_derivatives_match_fd(op, region, rng):
    for _ in range(20):
        y = rng.normal(size=2)
        z = y + _separated(rng, 0.5)
        n = _unit(rng)
        a = kernels.g0_dn_z(op, y, z, n, region)
        b = _fd_dir(lambda p: kernels.g0(op, y, p, region), z, n, 1e-6)
        assert abs(a - b) < 1e-6
        a = kernels.g0_dn_y(op, y, z, n, region)
        b = _fd_dir(lambda p: kernels.g0(op, p, z, region), y, n, 1e-6)
        assert abs(a - b) < 1e-6


@pytest.mark.parametrize("op,region", ALL_OPS)
def test_mixed_derivative_matches_nested_fd(op, region, rng):
    for _ in range(10):
        y = rng.normal(size=2)
        z = y + _separated(rng, 0.8)
        n_y, n_z = _unit(rng), _unit(rng)
        a = kernels.g0_dn_y_dn_z(op, y, z, n_y, n_z, region)
        b = _fd_dir(lambda p: kernels.g0_dn_z(op, p, z, n_z, region), y, n_y, 1e-5)
        assert abs(a - b) < 1e-4


def test_helmholtz_dn_z_fd_at_07():
    op = kernels.OperatorSpec("helmholtz", k=1.0)
    y = np.array([0.1, -0.2])
    z = y + np.array([0.7, 0.0])
    n = _unit(np.random.default_rng(5))
    a = kernels.g0_dn_z(op, y, z, n)
    b = _fd_dir(lambda p: kernels.g0(op, y, p), z, n, 1e-6)
    assert abs(a - b) < 1e-6


def test_poisson_harmonicity_discrete_laplacian(rng):
    h = 1e-3
    y = np.array([0.2, -0.1])
    for _ in range(50):
        x = y + _separated(rng, 0.35)
        stencil = np.array([x, x + [h, 0], x - [h, 0], x + [0, h], x - [0, h]])
        g = kernels.g0(POISSON, stencil, y[None, :])
        lap = (g[1] + g[2] + g[3] + g[4] - 4 * g[0]) / h ** 2
        assert abs(lap) < 1e-4


@pytest.mark.parametrize("k", [1.0, 2.0, 4.0])
def test_helmholtz_residual_discrete(k, rng):
    op = kernels.OperatorSpec("helmholtz", k=k)
    h = 1e-3
    y = np.array([0.0, 0.0])
    for _ in range(25):
        x = y + _separated(rng, 0.4)
        stencil = np.array([x, x + [h, 0], x - [h, 0], x + [0, h], x - [0, h]])
        g = kernels.g0(op, stencil, y[None, :])
        lap = (g[1] + g[2] + g[3] + g[4] - 4 * g[0]) / h ** 2
        assert abs(-lap - k ** 2 * g[0]) < 1e-3


def test_interface_amplitude_and_wavenumber():
    assert IFACE_H.amplitude(1) == 2.0
    assert IFACE_H.amplitude(2) == 1.0
    assert np.isclose(IFACE_H.wavenumber(1), 2.0 * np.sqrt(2.0))
    assert np.isclose(IFACE_H.wavenumber(2), 4.0)
    with pytest.raises(ValueError):
        IFACE_H.amplitude(None)


def _unit(rng):
    v = rng.normal(size=2)
    return v / np.linalg.norm(v)


def _separated(rng, radius):
    v = rng.normal(size=2)
    return v / np.linalg.norm(v) * radius
