"""Fundamental solutions of the 2-D Poisson and Helmholtz operators and
their first and mixed second normal derivatives, including the piecewise
parameter variants used by interface problems.

Conventions, all fixed by finite-difference checks in the test suite:

* single domain Poisson      g0(x, y) = -(1/2pi) ln|x - y|
* single domain Helmholtz    g0(x, y) = (i/4) H1_0(k |x - y|)
* interface Poisson          g0 = -(mu_r/2pi) ln|x - y|
* interface Helmholtz        g0 = (i/4) mu_r H1_0(k sqrt(eps_r mu_r) |x-y|)

where r is the subregion supplied by the caller (the branch of the field
point in the representation, never re-derived geometrically here).
Derivatives with respect to the *second* argument use ``g0_dn_z`` and with
respect to the *first* argument ``g0_dn_y``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .special import hankel1

_INV2PI = 1.0 / (2.0 * np.pi)


@dataclass(frozen=True)
class InterfaceParams:
    """Piecewise-constant material parameters, region 1 inside the interface."""

    mu1: float
    mu2: float
    eps1: float = 1.0
    eps2: float = 1.0

    def __post_init__(self):
        if min(self.mu1, self.mu2, self.eps1, self.eps2) <= 0.0:
            raise ValueError("interface parameters must be strictly positive")

    def mu(self, region):
        return self.mu1 if region == 1 else self.mu2

    def eps(self, region):
        return self.eps1 if region == 1 else self.eps2


@dataclass(frozen=True)
class OperatorSpec:
    """Which PDE operator: Poisson or Helmholtz, single-domain or interface."""

    family: str
    k: float = 0.0
    interface: InterfaceParams | None = None

    def __post_init__(self):
        if self.family not in ("poisson", "helmholtz"):
            raise ValueError(f"unknown operator family {self.family!r}")
        if self.family == "helmholtz" and self.k <= 0.0:
            raise ValueError("helmholtz operator requires wavenumber k > 0")

    @property
    def is_complex(self):
        return self.family == "helmholtz"

    @property
    def out_channels(self):
        return 2 if self.is_complex else 1

    def amplitude(self, region=None):
        """Multiplicative factor mu(region) of the fundamental solution."""
        if self.interface is None:
            return 1.0
        if region not in (1, 2):
            raise ValueError("interface operator needs a region label 1 or 2")
        return self.interface.mu(region)

    def wavenumber(self, region=None):
        """Effective wavenumber k sqrt(eps mu) of the region (helmholtz)."""
        if self.interface is None:
            return self.k
        if region not in (1, 2):
            raise ValueError("interface operator needs a region label 1 or 2")
        return self.k * np.sqrt(self.interface.eps(region) * self.interface.mu(region))


def _diffs(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a - b
    r2 = np.einsum("...i,...i->...", d, d)
    if np.any(r2 == 0.0):
        raise SingularityError("kernel evaluated at coincident points")
    return d, r2


def g0(op, x, y, region=None):
    """Fundamental solution G0(x, y).

    ``x`` and ``y`` are broadcastable arrays of 2-D points (shape (..., 2)).
    Returns float for Poisson, complex for Helmholtz.
    """
    d, r2 = _diffs(x, y)
    mu = op.amplitude(region)
    if op.family == "poisson":
        return -0.5 * _INV2PI * mu * np.log(r2)
    kap = op.wavenumber(region)
    return 0.25j * mu * hankel1(0, kap * np.sqrt(r2))


def g0_dn_z(op, y, z, n_z, region=None):
    """d/dn_z of G0(y, z): derivative in the second argument."""
    d, r2 = _diffs(z, y)  # d = z - y
    dot = np.einsum("...i,...i->...", d, np.asarray(n_z, dtype=float))
    mu = op.amplitude(region)
    if op.family == "poisson":
        return -_INV2PI * mu * dot / r2
    kap = op.wavenumber(region)
    r = np.sqrt(r2)
    return -0.25j * mu * kap * hankel1(1, kap * r) * dot / r


def g0_dn_y(op, y, z, n_y, region=None):
    """d/dn_y of G0(y, z): derivative in the first argument."""
    d, r2 = _diffs(y, z)  # d = y - z
    dot = np.einsum("...i,...i->...", d, np.asarray(n_y, dtype=float))
    mu = op.amplitude(region)
    if op.family == "poisson":
        return -_INV2PI * mu * dot / r2
    kap = op.wavenumber(region)
    r = np.sqrt(r2)
    return -0.25j * mu * kap * hankel1(1, kap * r) * dot / r


def g0_dn_y_dn_z(op, y, z, n_y, n_z, region=None):
    """Mixed second derivative d^2/dn_y dn_z of G0(y, z).

    Regular whenever y and z stay apart; in the interface loss it only ever
    couples points on the two disjoint curves.
    """
    d, r2 = _diffs(y, z)  # d = y - z
    n_y = np.asarray(n_y, dtype=float)
    n_z = np.asarray(n_z, dtype=float)
    dot_y = np.einsum("...i,...i->...", d, n_y)
    dot_z = np.einsum("...i,...i->...", d, n_z)
    nn = np.einsum("...i,...i->...", n_y, n_z)
    mu = op.amplitude(region)
    if op.family == "poisson":
        return _INV2PI * mu * (nn / r2 - 2.0 * dot_y * dot_z / (r2 * r2))
    kap = op.wavenumber(region)
    r = np.sqrt(r2)
    h0 = hankel1(0, kap * r)
    h1 = hankel1(1, kap * r)
    # d/dn_y of [-(ik/4) H1(kr) (z-y).n_z / r]; reduces to the Poisson form as k -> 0
    return 0.25j * mu * kap * (
        nn * h1 / r + dot_y * dot_z * (kap * h0 / r2 - 2.0 * h1 / (r2 * r))
    )
