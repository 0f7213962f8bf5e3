"""Evaluate a learned Green's function G = G0 + H and use it as a solution
operator for Dirichlet, exterior, and interface boundary-value problems.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import geometry, kernels, network, potentials, representation
from .errors import SingularityError


# --- evaluation grids and metrics ----------------------------------------------


@dataclass(eq=False)
class EvaluationGrid:
    points: np.ndarray  # (m, 2)
    values: np.ndarray  # (m,), complex or float

    def to_csv(self, path):
        vals = np.asarray(self.values)
        re = vals.real if np.iscomplexobj(vals) else vals
        im = vals.imag if np.iscomplexobj(vals) else np.zeros_like(re)
        data = np.column_stack([self.points, re, im])
        np.savetxt(path, data, delimiter=",", header="x,y,re,im", comments="")

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        vals = data[:, 2] + 1j * data[:, 3]
        if np.all(data[:, 3] == 0.0):
            vals = data[:, 2].copy()
        return cls(points=data[:, :2].copy(), values=vals)


def relative_l2(pred, exact):
    """|| p - p* ||_2 / || p* ||_2 over a shared point set (complex by modulus)."""
    pv = pred.values if isinstance(pred, EvaluationGrid) else np.asarray(pred)
    ev = exact.values if isinstance(exact, EvaluationGrid) else np.asarray(exact)
    if isinstance(pred, EvaluationGrid) and isinstance(exact, EvaluationGrid):
        if pv.shape != ev.shape or not np.allclose(pred.points, exact.points):
            raise ValueError("grids must share the same point set")
    denom = np.linalg.norm(ev)
    if denom == 0.0:
        raise ValueError("relative L2 error is undefined for a zero exact field")
    return float(np.linalg.norm(pv - ev) / denom)


# --- source fields --------------------------------------------------------------


@dataclass(eq=False)
class SourceField:
    """Piecewise-constant source on rectangle / triangle cells, or a callable.

    Rectangles are (x0, y0, x1, y1); triangles are ((x1,y1),(x2,y2),(x3,y3)).
    """

    cells: list | None = None  # [(shape_spec, value), ...]
    func: object = None

    def __post_init__(self):
        if (self.cells is None) == (self.func is None):
            raise ValueError("provide exactly one of cells or func")

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            raw = json.load(fh)
        cells = [(tuple(c["rect"]) if "rect" in c else tuple(map(tuple, c["tri"])), c["value"])
                 for c in raw["cells"]]
        return cls(cells=cells)

    def total_area(self):
        return sum(_cell_area(shape) for shape, _ in self.cells)

    def check_tiling(self, domain_area, rel_tol=1e-3):
        area = self.total_area()
        if abs(area - domain_area) > rel_tol * abs(domain_area):
            raise ValueError(
                f"cells cover area {area:.6g}, domain has {domain_area:.6g}"
            )

    def __call__(self, points):
        pts = np.atleast_2d(points)
        if self.func is not None:
            return np.asarray(self.func(pts))
        vals = np.zeros(len(pts))
        for shape, value in self.cells:
            vals[_cell_contains(shape, pts)] = value
        return vals


def _cell_area(shape):
    if len(shape) == 4 and np.isscalar(shape[0]):
        x0, y0, x1, y1 = shape
        return abs((x1 - x0) * (y1 - y0))
    (x1, y1), (x2, y2), (x3, y3) = shape
    return 0.5 * abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))


def _cell_contains(shape, pts):
    if len(shape) == 4 and np.isscalar(shape[0]):
        x0, y0, x1, y1 = shape
        return (pts[:, 0] >= x0) & (pts[:, 0] < x1) & (pts[:, 1] >= y0) & (pts[:, 1] < y1)
    (x1, y1), (x2, y2), (x3, y3) = shape
    v0 = np.array([x3 - x1, y3 - y1])
    v1 = np.array([x2 - x1, y2 - y1])
    v2 = pts - np.array([x1, y1])
    den = v0[0] * v1[1] - v1[0] * v0[1]
    a = (v2[:, 0] * v1[1] - v1[0] * v2[:, 1]) / den
    b = (v0[0] * v2[:, 1] - v2[:, 0] * v0[1]) / den
    return (a >= 0) & (b >= 0) & (a + b <= 1)


def _cell_vertices(shape):
    if len(shape) == 4 and np.isscalar(shape[0]):
        x0, y0, x1, y1 = shape
        return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    return np.array(shape, dtype=float)


def _cell_midpoints(shape, split):
    """Midpoint quadrature nodes and weights of a cell split into subcells."""
    if len(shape) == 4 and np.isscalar(shape[0]):
        x0, y0, x1, y1 = shape
        xs = x0 + (np.arange(split) + 0.5) * (x1 - x0) / split
        ys = y0 + (np.arange(split) + 0.5) * (y1 - y0) / split
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        w = np.full(len(pts), _cell_area(shape) / len(pts))
        return pts, w
    # triangle: uniform barycentric midpoint refinement
    (a, b, c) = (np.array(v, float) for v in shape)
    pts, ws = [], []
    n = split
    for i in range(n):
        for j in range(n - i):
            corners = [(i, j), (i + 1, j), (i, j + 1)]
            pts.append(sum((a + (b - a) * u / n + (c - a) * v / n) for u, v in corners) / 3.0)
            ws.append(1.0)
            if i + j < n - 1:
                corners = [(i + 1, j), (i + 1, j + 1), (i, j + 1)]
                pts.append(sum((a + (b - a) * u / n + (c - a) * v / n) for u, v in corners) / 3.0)
                ws.append(1.0)
    w = _cell_area(shape) * np.array(ws) / len(ws)
    return np.array(pts), w


# --- the learned Green's function -----------------------------------------------


class _ModelEvaluator:
    """Vectorized access to G(x, .) for one model, with optional finer quadrature."""

    def __init__(self, model):
        self.model = model
        self.op = model.op
        curves = model.eval_curves if model.eval_curves is not None else tuple(
            s.curve for s in model.schemes
        )
        self.curves = curves
        if model.domain.kind == "interface":
            dom = model.domain
            self.ops = representation.InterfaceOperators(
                op=model.op,
                scheme1=potentials.make_scheme(curves[0]),
                scheme2=potentials.make_scheme(curves[1]) if len(curves) == 2 else None,
            )
        elif model.mode == "bi":
            side = "interior" if model.domain.kind == "interior" else "exterior"
            self.ops = representation.SingleDomainOperators(
                op=model.op, scheme=potentials.make_scheme(curves[0]), side=side
            )
        else:
            self.ops = None

    def _density_values(self, net, x, nodes):
        feats = np.empty((len(nodes), 4), dtype=net.params.dtype)
        feats[:, 0] = x[0]
        feats[:, 1] = x[1]
        feats[:, 2:] = nodes
        out = network.forward(net, feats)
        return out[:, 0].astype(complex) if out.shape[1] == 1 else out[:, 0] + 1j * out[:, 1]

    def h_grid(self, x, targets):
        """H(x, targets) for one x and many targets."""
        model = self.model
        if model.mode == "db":
            feats = np.column_stack([np.broadcast_to(x, (len(targets), 2)), targets])
            out = network.forward(model.db_network, feats.astype(model.db_network.params.dtype))
            return out[:, 0].astype(complex) if out.shape[1] == 1 else out[:, 0] + 1j * out[:, 1]
        if model.domain.kind != "interface":
            h = self._density_values(model.densities[0], x, self.ops.scheme.curve.nodes)
            return self.ops.eval_matrix(targets) @ h
        labels = geometry.label_regions(model.domain, targets)
        out = np.zeros(len(targets), dtype=complex)
        h1 = self._density_values(model.densities[0], x, self.ops.scheme1.curve.nodes)
        h2 = self._density_values(model.densities[1], x, self.ops.scheme1.curve.nodes)
        h3 = None
        if not self.ops.unbounded:
            h3 = self._density_values(model.densities[2], x, self.ops.scheme2.curve.nodes)
        for region in (1, 2):
            sel = labels == region
            if not sel.any():
                continue
            m1, m2, m3 = self.ops.eval_matrices(targets[sel], region)
            if region == 1:
                out[sel] = m1 @ h1
            else:
                v = m2 @ h2
                if m3 is not None:
                    v = v + m3 @ h3
                out[sel] = v
        return out

    def g_grid(self, x, targets):
        targets = np.atleast_2d(targets)
        r = np.sqrt(((targets - x) ** 2).sum(axis=1))
        if np.any(r < 1e-12):
            raise SingularityError("G(x, y) evaluated at y = x")
        h = self.h_grid(x, targets)
        if self.model.domain.kind == "interface":
            labels = geometry.label_regions(self.model.domain, targets)
            g0v = np.zeros(len(targets), dtype=complex)
            for region in (1, 2):
                sel = labels == region
                if sel.any():
                    g0v[sel] = kernels.g0(self.op, x[None, :], targets[sel], region=region)
        else:
            g0v = kernels.g0(self.op, x[None, :], targets)
        vals = h + g0v
        return vals if self.op.is_complex else vals.real

    # one-sided boundary data of G on the interface, from the region-2 side
    def interface_boundary_rows(self):
        ops = self.ops
        s1 = ops.scheme1
        rows = {
            "g_value_h2": potentials.slp_matrix_self(self.op, s1, region=2),
            "g_dn_h2": potentials.slp_dn_boundary_limit_matrix(self.op, s1, "exterior", region=2),
        }
        if not ops.unbounded:
            nodes, normals = s1.curve.nodes, s1.curve.normals
            rows["g_value_h3"] = potentials.dlp_matrix(self.op, ops.scheme2, nodes, region=2)
            rows["g_dn_h3"] = potentials.dlp_dn_matrix(self.op, ops.scheme2, nodes, normals, region=2)
        return rows


def eval_green(model, x, y):
    """G(x, y) of a trained (or untrained: G = G0) model."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ev = _ModelEvaluator(model)
    return ev.g_grid(x, y[None, :])[0]


def eval_green_grid(model, x, targets):
    """G(x, .) over many targets; far cheaper than point-wise eval_green."""
    return _ModelEvaluator(model).g_grid(np.asarray(x, float), np.asarray(targets, float))


# --- solution operators ----------------------------------------------------------

_CELL_SPLIT = 2  # midpoint rule per cell with 2x2 subdivision
_SING_RADIAL = 16
_SING_ANGULAR = 16
_CALLABLE_GRID = 41  # volume-quadrature cells per side for callable sources (odd,
#                      so cell edges avoid the usual evaluation lattices)


class DirichletSolver:
    """Volume quadrature u(x) = int G(x, y) f(y) dy at fixed targets.

    The Green's-function matrix over the quadrature layout is assembled once,
    so solving for a family of piecewise-constant sources on one partition
    (or many callables) costs a matrix-vector product each.  The cell holding
    a target integrates its G0 part in local polar coordinates.
    """

    def __init__(self, model, targets):
        if model.domain.kind != "interior":
            raise ValueError("volume solves need an interior model")
        self.model = model
        self.ev = _ModelEvaluator(model)
        self.targets = np.atleast_2d(np.asarray(targets, dtype=float))
        if not np.all(geometry.points_in_curve(model.domain.curve, self.targets)):
            raise ValueError("targets must lie inside the domain")
        self._layouts = {}

    def solve(self, f):
        if f.cells is not None:
            cells = f.cells
            values = np.array([v for _, v in cells])
            shapes = tuple(shape for shape, _ in cells)
        else:
            shapes = self._callable_cells()
            values = None
        layout = self._layout_for(shapes)
        fw = layout["w"] * (values[layout["cell_of"]] if values is not None
                            else np.asarray(f(layout["pts"])))
        f_at_targets = (values[layout["own_cell"]] if values is not None
                        else np.asarray(f(self.targets)))

        u = layout["gmat"] @ fw  # far part; own-cell columns are zeroed there
        u = u + layout["polar"] * f_at_targets
        # own-cell H f and the G0 (f - f(x)) remainder
        for i in range(len(self.targets)):
            cols = layout["own_cols"][i]
            if len(cols) == 0:
                continue
            u[i] = u[i] + layout["h_own"][i] @ fw[cols]
            if values is None:
                df = fw[cols] - layout["w"][cols] * f_at_targets[i]
                u[i] = u[i] + layout["g0_own"][i] @ df
        vals = u if self.model.op.is_complex else np.real(u)
        return EvaluationGrid(points=self.targets, values=vals)

    def _callable_cells(self):
        curve = self.model.domain.curve
        lo = curve.nodes.min(axis=0)
        hi = curve.nodes.max(axis=0)
        if not _is_axis_aligned_rectangle(curve):
            raise ValueError("callable sources need an axis-aligned rectangle domain")
        xs = np.linspace(lo[0], hi[0], _CALLABLE_GRID + 1)
        ys = np.linspace(lo[1], hi[1], _CALLABLE_GRID + 1)
        return tuple(
            (xs[i], ys[j], xs[i + 1], ys[j + 1])
            for i in range(_CALLABLE_GRID) for j in range(_CALLABLE_GRID)
        )

    def _layout_for(self, shapes):
        key = hash(shapes)
        if key in self._layouts:
            return self._layouts[key]
        pts_list, w_list, cell_of = [], [], []
        for ci, shape in enumerate(shapes):
            pts, w = _cell_midpoints(shape, _CELL_SPLIT)
            pts_list.append(pts)
            w_list.append(w)
            cell_of.append(np.full(len(pts), ci))
        pts = np.concatenate(pts_list)
        w = np.concatenate(w_list)
        cell_of = np.concatenate(cell_of)

        own_cell = np.full(len(self.targets), -1)
        for i, xt in enumerate(self.targets):
            for ci, shape in enumerate(shapes):
                if _cell_contains(shape, xt[None, :])[0]:
                    own_cell[i] = ci
                    break
        if np.any(own_cell < 0):
            raise ValueError("every target must lie inside a source cell")

        op = self.model.op
        gmat = np.zeros((len(self.targets), len(pts)), dtype=complex)
        polar = np.zeros(len(self.targets), dtype=complex)
        own_cols, h_own, g0_own = [], [], []
        for i, xt in enumerate(self.targets):
            cols = np.nonzero(cell_of == own_cell[i])[0]
            h_row = self.ev.h_grid(xt, pts)
            far = np.ones(len(pts), dtype=bool)
            far[cols] = False
            g0_row = np.zeros(len(pts), dtype=complex)
            g0_row[far] = kernels.g0(op, xt[None, :], pts[far])
            gmat[i] = np.where(far, h_row + g0_row, 0.0)
            polar[i] = _polar_g0_integral(op, xt, shapes[own_cell[i]])
            own_cols.append(cols)
            h_own.append(h_row[cols])
            safe = np.linalg.norm(pts[cols] - xt, axis=1) > 1e-12
            g0c = np.zeros(len(cols), dtype=complex)
            g0c[safe] = kernels.g0(op, xt[None, :], pts[cols][safe])
            g0_own.append(g0c)
        layout = {"pts": pts, "w": w, "cell_of": cell_of, "own_cell": own_cell,
                  "gmat": gmat, "polar": polar, "own_cols": own_cols,
                  "h_own": h_own, "g0_own": g0_own}
        self._layouts[key] = layout
        return layout


def _is_axis_aligned_rectangle(curve):
    if curve.segment_ids is None or curve.segment_ids.max() != 3:
        return False
    return bool(np.all(np.abs(curve.normals).max(axis=1) > 1.0 - 1e-12))


def solve_poisson_dirichlet(model, f, targets):
    """u(x) = int_domain G(x, y) f(y) dy for homogeneous Dirichlet data."""
    if model.op.family != "poisson":
        raise ValueError("solve_poisson_dirichlet needs a Poisson model")
    return DirichletSolver(model, targets).solve(f)


def solve_dirichlet(model, f, targets):
    """Interior Dirichlet solve via the learned G for either operator family."""
    return DirichletSolver(model, targets).solve(f)


def _polar_g0_integral(op, x, shape):
    """int_cell G0(x, y) dy in polar coordinates around x inside the cell."""
    verts = _cell_vertices(shape)
    thetas = (np.arange(_SING_ANGULAR) + 0.5) * 2.0 * np.pi / _SING_ANGULAR
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    rmax = _ray_polygon_exit(verts, x, dirs)
    total = 0.0 + 0.0j
    dtheta = 2.0 * np.pi / _SING_ANGULAR
    for d, rm in zip(dirs, rmax):
        if rm <= 0.0:
            continue
        rs = (np.arange(_SING_RADIAL) + 0.5) * rm / _SING_RADIAL
        pts = x[None, :] + rs[:, None] * d[None, :]
        g0v = np.asarray(kernels.g0(op, x[None, :], pts), dtype=complex)
        total += complex(np.sum(g0v * rs)) * (rm / _SING_RADIAL) * dtheta
    return total


def _ray_polygon_exit(verts, x, dirs):
    """Distance from interior point x to the polygon boundary along each direction.

    A target sitting exactly on the cell boundary gets zero exit distance for
    the outward directions (their polar contribution vanishes)."""
    m = len(verts)
    out = np.full(len(dirs), np.inf)
    for e in range(m):
        p, q = verts[e], verts[(e + 1) % m]
        edge = q - p
        for k, d in enumerate(dirs):
            den = d[0] * (-edge[1]) + d[1] * edge[0]
            if abs(den) < 1e-14:
                continue
            rel = p - x
            t = (rel[0] * (-edge[1]) + rel[1] * edge[0]) / den
            s = (d[0] * rel[1] - d[1] * rel[0]) / den
            if t >= -1e-12 and -1e-12 <= s <= 1 + 1e-12:
                out[k] = min(out[k], max(t, 0.0))
    if not np.all(np.isfinite(out)):
        raise ValueError("polar quadrature target outside its cell")
    return out


def solve_interface_bvp(model, g1, g2, g3, targets):
    """Solution of the homogeneous-source interface problem from jump data.

        u(x) = int_G1 [ (1/mu) dG/dn_y g1 - G g2 ] ds_y
               - int_G2 (1/mu) dG/dnu_y g3 ds_y            (when G2 exists)

    g1, g2 (and g3) are node-sampled data arrays on the evaluation curves.
    The continuous flux (1/mu) dG/dn is evaluated from the region-2 side.
    """
    if model.domain.kind != "interface":
        raise ValueError("solve_interface_bvp needs an interface model")
    ev = _ModelEvaluator(model)
    ops = ev.ops
    s1 = ops.scheme1
    n1 = s1.n_nodes
    g1 = np.asarray(g1)
    g2 = np.asarray(g2)
    if g1.shape != (n1,) or g2.shape != (n1,):
        raise ValueError("g1 and g2 must be sampled at the interface nodes")
    if not ops.unbounded:
        if g3 is None or np.asarray(g3).shape != (ops.scheme2.n_nodes,):
            raise ValueError("g3 must be sampled at the outer boundary nodes")
    mu2 = model.op.interface.mu2

    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    rows = ev.interface_boundary_rows()
    if not ops.unbounded:
        s2 = ops.scheme2
        sdn_cross = potentials.slp_dn_matrix(model.op, s1, s2.curve.nodes,
                                             s2.curve.normals, region=2)
        ddn_self = _hypersingular_matrix(model.op, s2, region=2)
    out = np.zeros(len(targets), dtype=complex)
    for i, xt in enumerate(targets):
        h2 = ev._density_values(model.densities[1], xt, s1.curve.nodes)
        # G and its flux on Gamma1 from the region-2 side
        g_val = kernels.g0(model.op, xt[None, :], s1.curve.nodes, region=2) \
            + rows["g_value_h2"] @ h2
        g_dn = kernels.g0_dn_z(model.op, xt[None, :], s1.curve.nodes,
                               s1.curve.normals, region=2) + rows["g_dn_h2"] @ h2
        h3 = None
        if not ops.unbounded:
            h3 = ev._density_values(model.densities[2], xt, ops.scheme2.curve.nodes)
            g_val = g_val + rows["g_value_h3"] @ h3
            g_dn = g_dn + rows["g_dn_h3"] @ h3
        w1 = s1.curve.weights
        u = np.sum((g_dn / mu2 * g1 - g_val * g2) * w1)
        if not ops.unbounded:
            # flux of G on Gamma2 (continuous across the boundary for D)
            g0_dn2 = kernels.g0_dn_z(model.op, xt[None, :], s2.curve.nodes,
                                     s2.curve.normals, region=2)
            g_dn2 = g0_dn2 + sdn_cross @ h2 + ddn_self @ h3
            u = u - np.sum(g_dn2 / mu2 * np.asarray(g3) * s2.curve.weights)
        out[i] = u
    return EvaluationGrid(points=targets, values=out if model.op.is_complex else out.real)


def _tangential_derivative_matrix(curve):
    """Centered finite differences of node values along the curve; polygons
    difference within each edge (one-sided at edge ends)."""
    n = curve.n_nodes
    d = np.zeros((n, n))
    seg = curve.segment_ids if curve.segment_ids is not None else np.zeros(n, dtype=int)
    nodes = curve.nodes
    for j in range(n):
        jp, jm = (j + 1) % n, (j - 1) % n
        if curve.smooth or (seg[jp] == seg[j] and seg[jm] == seg[j]):
            ds = np.linalg.norm(nodes[jp] - nodes[jm])
            d[j, jp] += 1.0 / ds
            d[j, jm] -= 1.0 / ds
        elif seg[jp] == seg[j]:
            ds = np.linalg.norm(nodes[jp] - nodes[j])
            d[j, jp] += 1.0 / ds
            d[j, j] -= 1.0 / ds
        else:
            ds = np.linalg.norm(nodes[j] - nodes[jm])
            d[j, j] += 1.0 / ds
            d[j, jm] -= 1.0 / ds
    return d


def _hypersingular_matrix(op, scheme, region=None):
    """Normal derivative of the double layer on its own curve via the Maue
    identity: the hypersingular operator reduces to tangential derivatives of
    the single layer plus a wavenumber term (sign fixed by an offset check in
    the test suite)."""
    curve = scheme.curve
    ds = _tangential_derivative_matrix(curve)
    slp = potentials.slp_matrix_self(op, scheme, region)
    t = ds @ slp @ ds
    if op.family == "helmholtz":
        kap = op.wavenumber(region)
        nx = curve.normals[:, 0]
        ny = curve.normals[:, 1]
        t = t + kap ** 2 * (
            nx[:, None] * slp * nx[None, :] + ny[:, None] * slp * ny[None, :]
        )
    return t
