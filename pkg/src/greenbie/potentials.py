"""Quadrature schemes for boundary integrals with weakly singular kernels
and evaluation of single / double layer potentials, off-boundary and
on-boundary (with jump corrections).

The potentials follow

    S[h](y) = -int_G G0(y, z) h(z) ds_z
    D[h](y) = -int_G dG0(y, z)/dn_z h(z) ds_z

with boundary limits (fixed numerically by the Gauss lemma)

    D[h](y0 from inside)  = D_pv[h](y0) + h(y0)/2
    D[h](y0 from outside) = D_pv[h](y0) - h(y0)/2
    d/dn S[h](y0 inside)  = Sdn_pv[h](y0) - h(y0)/2
    d/dn S[h](y0 outside) = Sdn_pv[h](y0) + h(y0)/2

Smooth closed curves use the trapezoid rule with 6th-order Kapur-Rokhlin
corrections for log-singular kernels (and the analytic curvature diagonal
for the smooth Laplace double-layer kernel).  Polygons use per-edge
midpoint panels; near-singular entries are replaced by Simpson panel
integrals with geometric grading toward the target.
"""

import weakref
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SingularityError

# 6th-order Kapur-Rokhlin correction weights for the punctured periodic
# trapezoid rule on log-singular integrands; applied symmetrically at the
# six nodes on each side of the singular node, whose own weight is zero.
KR6_GAMMA = np.array([
    4.967362978287758,
    -16.20501504859126,
    25.85153761832639,
    -22.22599466791883,
    9.930104998037539,
    -1.817995878141594,
])

_INV4PI = 1.0 / (4.0 * np.pi)


@dataclass(frozen=True, eq=False)
class QuadratureScheme:
    """Quadrature rule bound to one discretized curve."""

    curve: object
    rule: str

    def __post_init__(self):
        if self.rule not in ("corrected_trapezoid_KR6", "simpson_panels"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.curve.smooth and self.rule != "corrected_trapezoid_KR6":
            raise ValueError("smooth closed curves use the corrected trapezoid rule")
        if not self.curve.smooth and self.rule != "simpson_panels":
            raise ValueError("polygons use Simpson panel quadrature")

    @property
    def n_nodes(self):
        return self.curve.n_nodes


def make_scheme(curve):
    """Scheme for a curve: KR6-corrected trapezoid if smooth, Simpson panels if not."""
    rule = "corrected_trapezoid_KR6" if curve.smooth else "simpson_panels"
    return QuadratureScheme(curve=curve, rule=rule)


# --- off-boundary matrices ---------------------------------------------------


def _pairwise(targets, curve):
    t = np.atleast_2d(np.asarray(targets, dtype=float))
    return t[:, None, :], curve.nodes[None, :, :]


def slp_matrix(op, scheme, targets, region=None):
    """M with (S[h])(targets) = M @ h, targets off the curve."""
    y, z = _pairwise(targets, scheme.curve)
    return -kernels.g0(op, y, z, region) * scheme.curve.weights[None, :]


def dlp_matrix(op, scheme, targets, region=None):
    """M with (D[h])(targets) = M @ h, targets off the curve."""
    y, z = _pairwise(targets, scheme.curve)
    n_z = scheme.curve.normals[None, :, :]
    return -kernels.g0_dn_z(op, y, z, n_z, region) * scheme.curve.weights[None, :]


def slp_dn_matrix(op, scheme, targets, target_normals, region=None):
    """M with (d/dn_t S[h])(targets) = M @ h, targets off the curve."""
    y, z = _pairwise(targets, scheme.curve)
    n_y = np.atleast_2d(np.asarray(target_normals, dtype=float))[:, None, :]
    return -kernels.g0_dn_y(op, y, z, n_y, region) * scheme.curve.weights[None, :]


def dlp_dn_matrix(op, scheme, targets, target_normals, region=None):
    """M with (d/dn_t D[h])(targets) = M @ h, targets off the curve."""
    y, z = _pairwise(targets, scheme.curve)
    n_y = np.atleast_2d(np.asarray(target_normals, dtype=float))[:, None, :]
    n_z = scheme.curve.normals[None, :, :]
    return -kernels.g0_dn_y_dn_z(op, y, z, n_y, n_z, region) * scheme.curve.weights[None, :]


# --- on-boundary (self) matrices ---------------------------------------------

# schemes are immutable, so their self matrices are cached per (op, region, kind)
_SELF_CACHE = weakref.WeakKeyDictionary()


def _cached(scheme, op, region, kind, build):
    per_scheme = _SELF_CACHE.setdefault(scheme, {})
    key = (op, region, kind)
    if key not in per_scheme:
        per_scheme[key] = build()
        per_scheme[key].flags.writeable = False
    return per_scheme[key]


def _kr_factors(n):
    """Correction factor per cyclic offset: 0 at the diagonal, 1+gamma nearby."""
    fac = np.ones(n)
    fac[0] = 0.0
    for l, g in enumerate(KR6_GAMMA, start=1):
        fac[l % n] += g
        fac[-l % n] += g
    # circulant: factor[i, j] = fac[(j - i) mod n]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return fac[idx]


def _self_entries(op, curve, kernel, region):
    """Kernel values between all node pairs with a masked diagonal."""
    n = curve.n_nodes
    y = curve.nodes[:, None, :]
    z = curve.nodes[None, :, :]
    mask = np.eye(n, dtype=bool)
    zsafe = np.where(mask[:, :, None], z + 1.0, z)
    vals = kernel(y, zsafe)
    vals[mask] = 0.0
    return vals


def slp_matrix_self(op, scheme, region=None):
    """On-boundary single-layer value matrix (continuous limit)."""

    def build():
        curve = scheme.curve
        kern = lambda y, z: -kernels.g0(op, y, z, region)
        vals = _self_entries(op, curve, kern, region)
        if curve.smooth:
            return vals * curve.weights[None, :] * _kr_factors(curve.n_nodes)
        return _polygon_near_fix(op, curve, vals, kind="slp", region=region)

    return _cached(scheme, op, region, "slp", build)


def dlp_matrix_self(op, scheme, region=None):
    """Principal-value double-layer matrix (no jump term)."""

    def build():
        curve = scheme.curve
        kern = lambda y, z: -kernels.g0_dn_z(op, y, z, curve.normals[None, :, :], region)
        vals = _self_entries(op, curve, kern, region)
        if curve.smooth:
            if op.family == "poisson":
                # Laplace DLP kernel is smooth on a smooth curve; diagonal limit
                # of dG0/dn_z is -mu*kappa/(4pi), so the D entry is +mu*kappa/(4pi).
                m = vals * curve.weights[None, :]
                diag = op.amplitude(region) * curve.curvature * _INV4PI * curve.weights
                m[np.diag_indices(curve.n_nodes)] = diag
                return m
            return vals * curve.weights[None, :] * _kr_factors(curve.n_nodes)
        return _polygon_near_fix(op, curve, vals, kind="dlp", region=region)

    return _cached(scheme, op, region, "dlp", build)


def slp_dn_matrix_self(op, scheme, region=None):
    """Principal-value matrix of d/dn_y S[h] at the nodes (no jump term)."""

    def build():
        curve = scheme.curve
        kern = lambda y, z: -kernels.g0_dn_y(op, y, z, curve.normals[:, None, :], region)
        vals = _self_entries(op, curve, kern, region)
        if curve.smooth:
            if op.family == "poisson":
                # same curvature diagonal as the double layer (transposed kernel)
                m = vals * curve.weights[None, :]
                diag = op.amplitude(region) * curve.curvature * _INV4PI * curve.weights
                m[np.diag_indices(curve.n_nodes)] = diag
                return m
            return vals * curve.weights[None, :] * _kr_factors(curve.n_nodes)
        return _polygon_near_fix(op, curve, vals, kind="slp_dn", region=region)

    return _cached(scheme, op, region, "slp_dn", build)


def dlp_boundary_limit_matrix(op, scheme, side, region=None):
    """Matrix of the one-sided boundary limit of D: PV +/- mu I/2.

    The jump magnitude equals the delta strength mu of the region's
    fundamental solution (mu = 1 for single-domain operators)."""
    m = dlp_matrix_self(op, scheme, region).copy()
    half = 0.5 * op.amplitude(region)
    if side != "interior":
        half = -half
    m[np.diag_indices(scheme.n_nodes)] += half
    return m


def slp_dn_boundary_limit_matrix(op, scheme, side, region=None):
    """Matrix of the one-sided boundary limit of d/dn S: PV -/+ mu I/2."""
    m = slp_dn_matrix_self(op, scheme, region).copy()
    half = -0.5 * op.amplitude(region)
    if side != "interior":
        half = -half
    m[np.diag_indices(scheme.n_nodes)] += half
    return m


# --- polygon near-singular panel integrals -----------------------------------

_NEAR_PANELS = 32  # replace entries within this many panel lengths by panel integrals

# composite Simpson with 8 subintervals on [0, 1]
_SIMPSON_T = np.linspace(0.0, 1.0, 17)
_SIMPSON_W = np.array([1, 4, 2, 4, 2, 4, 2, 4, 2, 4, 2, 4, 2, 4, 2, 4, 1]) / 48.0


def _subtended(u1, u2, d):
    """Signed angle of the panel [u1, u2] at perpendicular offset d, in (-pi, pi)."""
    ang = np.arctan2(u2, d) - np.arctan2(u1, d)
    return ang - 2.0 * np.pi * np.round(ang / (2.0 * np.pi))


def _lorentz_integral(u1, u2, d):
    """int du / (u^2 + d^2) over [u1, u2], continuous through d = 0 off the panel."""
    if abs(d) < 1e-14:
        return -(1.0 / u2 - 1.0 / u1) if u1 * u2 > 0 else 0.0
    return _subtended(u1, u2, d) / d


def _laplace_panel_entry(kind, mu, u1, u2, d, a_lin, b_lin):
    """Exact integral of the Laplace kernel over one straight panel.

    The panel is parameterized by u in [u1, u2] with perpendicular offset d
    from the target; for slp_dn the numerator (y-z).n_y = a_lin - b_lin*u.
    """
    if kind == "slp":
        # (mu/4pi) int ln(u^2 + d^2) du
        def F(u):
            t = u * np.log(u * u + d * d) - 2.0 * u if (u != 0.0 or d != 0.0) else 0.0
            if d != 0.0:
                t += 2.0 * d * np.arctan(u / d)
            return t

        return mu / (4.0 * np.pi) * (F(u2) - F(u1))
    if kind == "dlp":
        # -(mu/2pi) d * int du/(u^2+d^2) = -(mu/2pi) * subtended angle
        return -mu / (2.0 * np.pi) * _subtended(u1, u2, d)
    # slp_dn: (mu/2pi) int (a_lin - b_lin u)/(u^2+d^2) du
    val = a_lin * _lorentz_integral(u1, u2, d)
    val -= 0.5 * b_lin * np.log((u2 * u2 + d * d) / (u1 * u1 + d * d))
    return mu / (2.0 * np.pi) * val


def _helmholtz_remainder(kind, op, region, y, n_y, z_pts, n_z, r_floor=1e-12):
    """Helmholtz kernel minus its Laplace singular part, at the Simpson points."""
    mu = op.amplitude(region)
    d = y[None, :] - z_pts
    r2 = np.maximum((d * d).sum(axis=1), r_floor ** 2)
    r = np.sqrt(r2)
    kap = op.wavenumber(region)
    if kind == "slp":
        from .special import hankel1

        return -0.25j * mu * hankel1(0, kap * r) - mu / (2.0 * np.pi) * np.log(r)
    dot = (d * (n_y if kind == "slp_dn" else n_z)[None, :]).sum(axis=1)
    if kind == "dlp":
        dot = -dot  # (z - y).n_z
    from .special import hankel1

    bracket = 0.25j * mu * kap * hankel1(1, kap * r) / r - mu / (2.0 * np.pi) / r2
    return dot * bracket


def _polygon_near_fix(op, curve, vals, kind, region):
    """Midpoint entries everywhere, with near-target entries replaced by exact
    Laplace panel integrals plus a Simpson-integrated Helmholtz remainder."""
    n = curve.n_nodes
    m = vals * curve.weights[None, :]
    seg = curve.segment_ids
    nodes = curve.nodes
    normals = curve.normals
    w = curve.weights
    mu = op.amplitude(region)

    # same-segment normal-derivative kernels vanish identically on straight edges
    same = seg[:, None] == seg[None, :]
    if kind in ("dlp", "slp_dn"):
        m[same] = 0.0

    dist = np.sqrt(((nodes[:, None, :] - nodes[None, :, :]) ** 2).sum(-1))
    h_panel = np.maximum(w[:, None], w[None, :])
    near = dist < _NEAR_PANELS * h_panel
    np.fill_diagonal(near, kind == "slp")  # only S is singular on its own panel
    if kind in ("dlp", "slp_dn"):
        near &= ~same

    helm = op.family == "helmholtz"
    for i, j in zip(*np.nonzero(near)):
        tj = _tangent(normals[j])
        p0 = nodes[j] - 0.5 * w[j] * tj
        c = nodes[i] - p0
        proj = float(c @ tj)
        d_perp = float(c @ normals[j])
        u1, u2 = -proj, w[j] - proj
        a_lin = float(c @ normals[i]) - proj * float(tj @ normals[i])
        b_lin = float(tj @ normals[i])
        entry = _laplace_panel_entry(kind, mu, u1, u2, d_perp, a_lin, b_lin)
        if helm:
            z_pts = p0 + (_SIMPSON_T * w[j])[:, None] * tj
            rem = _helmholtz_remainder(kind, op, region, nodes[i], normals[i],
                                       z_pts, normals[j])
            entry = entry + w[j] * (_SIMPSON_W @ rem)
        m[i, j] = entry
    return m


def _tangent(normal):
    # counterclockwise tangent for an outward normal
    return np.array([-normal[1], normal[0]])


# --- spec-facing potential operations ----------------------------------------


def _as_density(density, n):
    h = np.asarray(density)
    if h.shape != (n,):
        raise ValueError(f"density must have one value per node ({n})")
    return h


def single_layer(op, scheme, density, y, region=None):
    """S[h](y) for y off the boundary."""
    h = _as_density(density, scheme.n_nodes)
    _reject_on_node(scheme, y)
    return (slp_matrix(op, scheme, y, region) @ h)[0]


def double_layer(op, scheme, density, y, region=None):
    """D[h](y) for y off the boundary.

    Targets much closer to the curve than the node spacing are evaluated by
    singularity subtraction against the exact Gauss-lemma value of D[1].
    """
    h = _as_density(density, scheme.n_nodes)
    _reject_on_node(scheme, y)
    y = np.asarray(y, dtype=float)
    curve = scheme.curve
    d2 = ((curve.nodes - y) ** 2).sum(axis=1)
    jstar = int(np.argmin(d2))
    if np.sqrt(d2[jstar]) < 2.0 * curve.weights.max():
        return _double_layer_near(op, scheme, h, y, jstar, region)
    return (dlp_matrix(op, scheme, y, region) @ h)[0]


def _double_layer_near(op, scheme, h, y, jstar, region):
    from .geometry import points_in_curve

    curve = scheme.curve
    inside = bool(points_in_curve(curve, y))
    mu = op.amplitude(region)
    gauss = mu * (1.0 if inside else 0.0)  # exact D_laplace[1](y)

    lap = kernels.OperatorSpec("poisson", interface=op.interface)
    m_lap = dlp_matrix(lap, scheme, y, region)[0]
    if op.family == "poisson":
        return m_lap @ (h - h[jstar]) + h[jstar] * gauss
    m_helm = dlp_matrix(op, scheme, y, region)[0]
    return (m_helm - m_lap) @ h + m_lap @ (h - h[jstar]) + h[jstar] * gauss


def double_layer_on_boundary(op, scheme, density, node_index, side, region=None):
    """One-sided boundary limit of D[h] at a quadrature node."""
    h = _as_density(density, scheme.n_nodes)
    pv = dlp_matrix_self(op, scheme, region)[node_index] @ h
    half = 0.5 * op.amplitude(region) * (1.0 if side == "interior" else -1.0)
    return pv + half * h[node_index]


def single_layer_dn_on_boundary(op, scheme, density, node_index, side, region=None):
    """One-sided boundary limit of d/dn S[h] at a quadrature node."""
    h = _as_density(density, scheme.n_nodes)
    pv = slp_dn_matrix_self(op, scheme, region)[node_index] @ h
    half = -0.5 * op.amplitude(region) * (1.0 if side == "interior" else -1.0)
    return pv + half * h[node_index]


def _reject_on_node(scheme, y):
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        d2 = ((scheme.curve.nodes - y) ** 2).sum(axis=1)
        if d2.min() < 1e-24:
            raise SingularityError(
                "target coincides with a quadrature node; use the on-boundary variant"
            )
