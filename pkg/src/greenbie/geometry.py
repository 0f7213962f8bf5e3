"""Boundary curves and sampling regions for every geometry used in the
experiments: disc, flower, and the polygon family (square, L-shape,
bow-tie, U-shape), plus uniform rejection sampling of interior / exterior
/ interface regions.

All constructors return immutable values (arrays are set read-only);
sampling is deterministic per seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryMismatchError


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Discretized closed boundary.

    nodes:    (n, 2) points, counterclockwise
    normals:  (n, 2) unit outward normals
    weights:  (n,) arc-length quadrature weights
    smooth:   analytic closed curve (True) or polygon (False)
    segment_ids: per-node edge index (polygons only)
    curvature:   per-node signed curvature (smooth curves only)
    """

    nodes: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    smooth: bool
    segment_ids: np.ndarray | None = None
    curvature: np.ndarray | None = None

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def perimeter(self):
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Computation region: one curve (interior/exterior) or interface pair.

    For interface problems ``curves`` is (interface, outer boundary) or just
    (interface,) when the surrounding region is unbounded.  ``sampling_box``
    (xmin, xmax, ymin, ymax) is required for exterior and unbounded kinds.
    """

    kind: str
    curves: tuple
    sampling_box: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("interior", "exterior", "interface"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "interface" and len(self.curves) == 2:
            inner, outer = self.curves
            if not np.all(points_in_curve(outer, inner.nodes)):
                raise ValueError("interface curve must lie strictly inside the outer boundary")

    @property
    def curve(self):
        """The single curve of an interior/exterior domain."""
        if self.kind == "interface":
            raise ValueError("interface domain has more than one curve")
        return self.curves[0]


def signed_area(nodes):
    """Shoelace area of the node polygon (positive for counterclockwise)."""
    x, y = nodes[:, 0], nodes[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_curve(curve, points):
    """Even-odd (crossing number) test of points against the node polygon."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    v0 = curve.nodes
    v1 = np.roll(v0, -1, axis=0)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    cond = (v0[None, :, 1] > py) != (v1[None, :, 1] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = v0[None, :, 0] + (py - v0[None, :, 1]) / (v1[None, :, 1] - v0[None, :, 1]) * (
            v1[None, :, 0] - v0[None, :, 0]
        )
    crossings = np.sum(cond & (px < xint), axis=1)
    inside = (crossings % 2) == 1
    return inside if np.asarray(points).ndim > 1 else bool(inside[0])


def winding_number(curve, points):
    """Winding number of the closed node polygon around each point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d0 = curve.nodes[None, :, :] - pts[:, None, :]
    d1 = np.roll(curve.nodes, -1, axis=0)[None, :, :] - pts[:, None, :]
    ang = np.arctan2(
        d0[..., 0] * d1[..., 1] - d0[..., 1] * d1[..., 0],
        d0[..., 0] * d1[..., 0] + d0[..., 1] * d1[..., 1],
    )
    w = np.rint(ang.sum(axis=1) / (2.0 * np.pi)).astype(int)
    return w if np.asarray(points).ndim > 1 else int(w[0])


def distance_to_curve(curve, points):
    """Distance from each point to the closest curve node (cheap proxy)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = np.sqrt(
        ((pts[:, None, :] - curve.nodes[None, :, :]) ** 2).sum(-1)
    ).min(axis=1)
    return d if np.asarray(points).ndim > 1 else float(d[0])


def _smooth_curve(param_fn, n_nodes):
    """Build a smooth curve from an analytic parameterization r(t), r'(t), r''(t)."""
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    r, dr, ddr = param_fn(t)
    speed = np.sqrt((dr ** 2).sum(axis=1))
    # outward normal for a counterclockwise curve
    normals = np.stack([dr[:, 1], -dr[:, 0]], axis=1) / speed[:, None]
    weights = speed * (2.0 * np.pi / n_nodes)
    curv = (dr[:, 0] * ddr[:, 1] - dr[:, 1] * ddr[:, 0]) / speed ** 3
    return BoundaryCurve(
        nodes=_freeze(r),
        normals=_freeze(normals),
        weights=_freeze(weights),
        smooth=True,
        curvature=_freeze(curv),
    )


def make_circle(radius, center=(0.0, 0.0), n_nodes=400):
    """Equispaced circle with radial outward normals."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if n_nodes < 8:
        raise ValueError("n_nodes must be at least 8")
    cx, cy = center

    def param(t):
        r = np.stack([cx + radius * np.cos(t), cy + radius * np.sin(t)], axis=1)
        dr = np.stack([-radius * np.sin(t), radius * np.cos(t)], axis=1)
        ddr = np.stack([-radius * np.cos(t), -radius * np.sin(t)], axis=1)
        return r, dr, ddr

    return _smooth_curve(param, n_nodes)


def make_flower(a, b, n_petals, n_nodes=800):
    """Flower curve (a cos t - b cos(nt) cos t, a sin t - b cos(nt) sin t)."""
    if not a > b >= 0.0:
        raise ValueError("flower curve requires a > b >= 0 to stay simple")
    if n_nodes < 16 * n_petals:
        raise ValueError("flower curve needs at least 16 nodes per petal")
    n = n_petals

    def param(t):
        rho = a - b * np.cos(n * t)
        drho = b * n * np.sin(n * t)
        ddrho = b * n * n * np.cos(n * t)
        ct, st = np.cos(t), np.sin(t)
        r = np.stack([rho * ct, rho * st], axis=1)
        dr = np.stack([drho * ct - rho * st, drho * st + rho * ct], axis=1)
        ddr = np.stack(
            [ddrho * ct - 2 * drho * st - rho * ct,
             ddrho * st + 2 * drho * ct - rho * st],
            axis=1,
        )
        return r, dr, ddr

    curve = _smooth_curve(param, n_nodes)
    # orientation sanity: outward means pointing away from the centroid at t=0
    centroid = curve.nodes.mean(axis=0)
    if np.dot(curve.nodes[0] - centroid, curve.normals[0]) <= 0.0:
        raise ValueError("flower parameters produced an inverted curve")
    return curve


def make_polygon(vertices, nodes_per_edge):
    """Simple counterclockwise polygon discretized with per-edge midpoint nodes.

    Nodes sit at midpoint offsets (j + 1/2) h along each edge so kernels are
    never evaluated exactly at corners; weights sum to the perimeter exactly.
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
        raise ValueError("polygon needs at least 3 two-dimensional vertices")
    if nodes_per_edge < 1:
        raise ValueError("nodes_per_edge must be at least 1")
    if signed_area(verts) <= 0.0:
        raise ValueError("polygon vertices must be counterclockwise")
    if _self_intersects(verts):
        raise ValueError("polygon must be simple (non-self-intersecting)")

    nodes, normals, weights, seg = [], [], [], []
    m = len(verts)
    for e in range(m):
        p0, p1 = verts[e], verts[(e + 1) % m]
        edge = p1 - p0
        length = np.linalg.norm(edge)
        tangent = edge / length
        normal = np.array([tangent[1], -tangent[0]])
        offs = (np.arange(nodes_per_edge) + 0.5) / nodes_per_edge
        nodes.append(p0 + offs[:, None] * edge)
        normals.append(np.tile(normal, (nodes_per_edge, 1)))
        weights.append(np.full(nodes_per_edge, length / nodes_per_edge))
        seg.append(np.full(nodes_per_edge, e, dtype=int))

    return BoundaryCurve(
        nodes=_freeze(np.concatenate(nodes)),
        normals=_freeze(np.concatenate(normals)),
        weights=_freeze(np.concatenate(weights)),
        smooth=False,
        segment_ids=_freeze(np.concatenate(seg)),
    )


def _self_intersects(verts):
    m = len(verts)
    segs = [(verts[i], verts[(i + 1) % m]) for i in range(m)]

    def crosses(a, b, c, d):
        def orient(p, q, r):
            return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

        return (orient(a, b, c) * orient(a, b, d) < 0) and (orient(c, d, a) * orient(c, d, b) < 0)

    for i in range(m):
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or (i + 1) % m == j:
                continue  # shared endpoint
            if crosses(*segs[i], *segs[j]):
                return True
    return False


def sample_points(domain, count, rng_seed):
    """Uniform rejection sampling of ``count`` points in the domain region.

    interior:  strictly inside the curve
    exterior:  inside the sampling box and strictly outside the curve
    interface: inside the outer boundary (or the sampling box when
               unbounded); use :func:`label_regions` for subregion labels
    Deterministic given the seed.
    """
    rng = np.random.default_rng(rng_seed)
    if domain.kind == "interior":
        box = _bounding_box(domain.curves[0])
        accept = lambda p: points_in_curve(domain.curves[0], p)
    elif domain.kind == "exterior":
        if domain.sampling_box is None:
            raise ValueError("exterior sampling needs a sampling_box")
        box = domain.sampling_box
        accept = lambda p: ~points_in_curve(domain.curves[0], p)
    else:
        if len(domain.curves) == 2:
            box = _bounding_box(domain.curves[1])
            accept = lambda p: points_in_curve(domain.curves[1], p)
        else:
            if domain.sampling_box is None:
                raise ValueError("unbounded interface sampling needs a sampling_box")
            box = domain.sampling_box
            accept = lambda p: np.ones(len(p), dtype=bool)

    xmin, xmax, ymin, ymax = box
    out = []
    got = 0
    drawn = 0
    while got < count:
        batch = max(4 * (count - got), 64)
        cand = np.column_stack(
            [rng.uniform(xmin, xmax, batch), rng.uniform(ymin, ymax, batch)]
        )
        keep = cand[accept(cand)]
        out.append(keep[: count - got])
        got += len(out[-1])
        drawn += batch
        if drawn >= 100 * count and got < 0.01 * drawn:
            raise GeometryMismatchError(
                f"rejection acceptance rate below 1% ({got}/{drawn}); "
                "sampling box does not match the geometry"
            )
    return np.concatenate(out)


def label_regions(domain, points):
    """Subregion labels for interface domains: 1 inside the interface, 2 outside."""
    if domain.kind != "interface":
        raise ValueError("region labels only apply to interface domains")
    inside = points_in_curve(domain.curves[0], points)
    return np.where(inside, 1, 2)


def _bounding_box(curve):
    lo = curve.nodes.min(axis=0)
    hi = curve.nodes.max(axis=0)
    return lo[0], hi[0], lo[1], hi[1]


# --- named geometry presets -------------------------------------------------

SQUARE_VERTICES = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]

LSHAPE_VERTICES = [
    (-1.0, -1.0), (0.0, -1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0),
]

# two mirrored triangle wings of unit total span, pinched by a 0.02 neck
BOWTIE_VERTICES = [
    (0.01, 0.01), (0.5, 0.5), (0.5, -0.5), (0.01, -0.01),
    (-0.01, -0.01), (-0.5, -0.5), (-0.5, 0.5), (-0.01, 0.01),
][::-1]

# outer square [-2,2]^2 with a [-1,1]x[-2,1] slot opening downward
USHAPE_VERTICES = [
    (-2.0, -2.0), (-1.0, -2.0), (-1.0, 1.0), (1.0, 1.0), (1.0, -2.0),
    (2.0, -2.0), (2.0, 2.0), (-2.0, 2.0),
]

EXTERIOR_BOXES = {"bowtie": (-6.0, 6.0, -6.0, 6.0), "ushape": (-8.0, 8.0, -8.0, 8.0)}


def preset_curve(name, n_nodes=None, nodes_per_edge=None, **params):
    """Geometry preset addressable by name from config files."""
    name = name.lower()
    if name == "disc":
        return make_circle(params.get("radius", 1.0), params.get("center", (0.0, 0.0)),
                           n_nodes or 400)
    if name == "flower":
        return make_flower(params.get("a", 0.5), params.get("b", 0.15),
                           params.get("n_petals", 5), n_nodes or 800)
    vertex_table = {
        "square": SQUARE_VERTICES,
        "lshape": LSHAPE_VERTICES,
        "bowtie": BOWTIE_VERTICES,
        "ushape": USHAPE_VERTICES,
    }
    if name in vertex_table:
        verts = params.get("vertices", vertex_table[name])
        return make_polygon(verts, nodes_per_edge or 100)
    if name == "polygon":
        return make_polygon(params["vertices"], nodes_per_edge or 100)
    raise ValueError(f"unknown geometry preset {name!r}")
