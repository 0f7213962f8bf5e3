"""Independent references: the closed-form unit-disc Green's function, dense
Nyström boundary-integral solves at fixed source points, and a 5-point FDM
Poisson solver.  These are the ground truths the acceptance suite measures
against.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import kernels, representation
from .errors import OracleFailure, SingularityError

_COND_LIMIT = 1e12


def disc_green_exact(x, y):
    """Dirichlet Green's function of -Laplace on the unit disc.

    G(x, y) = (1/2pi) ln(r' rho / r) with r = |x-y|, y' = y/|y|^2,
    r' = |x-y'| and rho = |y|; the r' rho -> 1 limit handles y = 0.
    (The image-point formula; the sign is fixed so that G has the same
    +(1/2pi) ln(1/r) blowup as G0 of -Laplace and G >= 0 on the disc.)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.sqrt(((x - y) ** 2).sum(axis=-1))
    if np.any(r == 0.0):
        raise SingularityError("disc Green's function evaluated at x = y")
    rho = np.sqrt((y ** 2).sum(axis=-1))
    # r' * rho = |x*rho - y/rho| continues through y = 0 with value 1
    safe_rho = np.where(rho == 0.0, 1.0, rho)
    rprho = np.sqrt(((x * safe_rho[..., None] - y / safe_rho[..., None]) ** 2).sum(axis=-1))
    rprho = np.where(rho == 0.0, 1.0, rprho)
    return np.log(rprho / r) / (2.0 * np.pi)


def _check_system(a):
    anorm = np.linalg.norm(a, 1)
    lu, piv = scipy.linalg.lu_factor(a)
    gecon = scipy.linalg.lapack.zgecon if np.iscomplexobj(a) else scipy.linalg.lapack.dgecon
    rcond, info = gecon(lu, anorm)
    if info != 0 or rcond == 0.0 or 1.0 / rcond > _COND_LIMIT:
        raise OracleFailure(
            f"reference system too ill-conditioned (cond ~ {1.0 / max(rcond, 1e-300):.2e})"
        )
    return lu, piv


@dataclass(eq=False)
class NystromReference:
    """Dense collocation reference for H(x, .), factorized once per geometry.

    Solves the boundary (or jump) conditions of the representation by direct
    collocation at the quadrature nodes; ``solve_for(x)`` returns a
    per-source-point evaluator.
    """

    op: object
    domain: object
    _ops: object = field(init=False)
    _lu: tuple = field(init=False)

    def __post_init__(self):
        if self.domain.kind == "interface":
            self._ops = representation.make_interface_operators(self.op, self.domain)
            self._lu = self._factor_interface()
        else:
            self._ops = representation.make_single_domain_operators(self.op, self.domain)
            a = self._ops.limit_matrix
            self._matrix = a
            self._lu = _check_system(a)

    def _factor_interface(self):
        ops = self._ops
        j1 = ops.jump1_blocks()
        j2 = ops.jump2_blocks()
        rows = [j1, j2]
        if not ops.unbounded:
            rows.append(ops.bd_blocks())
        n1 = ops.scheme1.n_nodes
        n2 = 0 if ops.unbounded else ops.scheme2.n_nodes
        sizes = [n1, n1] + ([n2] if n2 else [])
        cols = [n1, n1] + ([n2] if n2 else [])
        dtype = complex if self.op.is_complex else float
        a = np.zeros((sum(sizes), sum(cols)), dtype=dtype)
        r0 = 0
        for row_blocks, nr in zip(rows, sizes):
            c0 = 0
            for blk, nc in zip(row_blocks[: len(cols)], cols):
                if blk is not None:
                    a[r0 : r0 + nr, c0 : c0 + nc] = blk
                c0 += nc
            r0 += nr
        self._matrix = a
        return _check_system(a)

    def solve_for(self, x):
        """Densities and an evaluator of H(x, .) for one fixed x."""
        x = np.asarray(x, dtype=float)
        ops = self._ops
        if self.domain.kind != "interface":
            b = -ops.rhs(x)[0]
            h = scipy.linalg.lu_solve(self._lu, b)
            self._residual_check(h, b)
            return SingleDomainSolution(ops=ops, x=x, density=h)
        parts = [-ops.jump1_rhs(x)[0], -ops.jump2_rhs(x)[0]]
        if not ops.unbounded:
            parts.append(-ops.bd_rhs(x)[0])
        b = np.concatenate(parts)
        h = scipy.linalg.lu_solve(self._lu, b)
        self._residual_check(h, b)
        n1 = ops.scheme1.n_nodes
        h3 = None if ops.unbounded else h[2 * n1 :]
        return InterfaceSolution(ops=ops, x=x, h1=h[:n1], h2=h[n1 : 2 * n1], h3=h3)

    def _residual_check(self, h, b):
        res = np.linalg.norm(self._matrix @ h - b) / max(np.linalg.norm(b), 1e-300)
        if not res < 1e-10:
            raise OracleFailure(f"reference solve residual {res:.2e} exceeds 1e-10")


@dataclass(eq=False)
class SingleDomainSolution:
    ops: object
    x: np.ndarray
    density: np.ndarray

    def h_at(self, points):
        return self.ops.eval_matrix(points) @ self.density

    def g_at(self, points):
        pts = np.atleast_2d(points)
        return self.h_at(pts) + kernels.g0(self.ops.op, self.x[None, :], pts)


@dataclass(eq=False)
class InterfaceSolution:
    ops: object
    x: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray | None

    def h_at(self, points, region):
        m1, m2, m3 = self.ops.eval_matrices(points, region)
        if region == 1:
            return m1 @ self.h1
        out = m2 @ self.h2
        if m3 is not None:
            out = out + m3 @ self.h3
        return out

    def g_at(self, points, region):
        pts = np.atleast_2d(points)
        return self.h_at(pts, region) + kernels.g0(
            self.ops.op, self.x[None, :], pts, region=region
        )


def nystrom_reference(op, domain, x):
    """One-shot reference for a single fixed x (factorizes the system anew;
    build a :class:`NystromReference` once when solving for many x)."""
    return NystromReference(op, domain).solve_for(x)


# --- finite differences -------------------------------------------------------


@dataclass(frozen=True)
class GridDomain:
    """Axis-aligned rectangle minus axis-aligned rectangular blocks.

    Blocks are half-open toward the domain so the paper-style "number of
    discrete points" count attributes re-entrant edge nodes to the domain.
    """

    rect: tuple  # (xmin, xmax, ymin, ymax)
    blocks: tuple = ()


LSHAPE_GRID = GridDomain(rect=(-1.0, 1.0, -1.0, 1.0), blocks=((0.0, 1.0, -1.0, 0.0),))
SQUARE_GRID = GridDomain(rect=(-1.0, 1.0, -1.0, 1.0))
UNIT_SQUARE_GRID = GridDomain(rect=(0.0, 1.0, 0.0, 1.0))


@dataclass(eq=False)
class FdmSolution:
    xs: np.ndarray
    ys: np.ndarray
    interior_mask: np.ndarray  # (nx, ny) True where solved
    values: np.ndarray  # (nx, ny), zero outside interior
    n_points: int  # grid points in the closed domain (paper counting)

    @property
    def interior_points(self):
        ix, iy = np.nonzero(self.interior_mask)
        return np.column_stack([self.xs[ix], self.ys[iy]])

    @property
    def interior_values(self):
        return self.values[self.interior_mask]

    def value_at_nodes(self, points, tol=1e-9):
        """Values at points that must coincide with grid nodes."""
        pts = np.atleast_2d(points)
        ix = np.rint((pts[:, 0] - self.xs[0]) / (self.xs[1] - self.xs[0])).astype(int)
        iy = np.rint((pts[:, 1] - self.ys[0]) / (self.ys[1] - self.ys[0])).astype(int)
        if (np.abs(self.xs[ix] - pts[:, 0]) > tol).any() or (
            np.abs(self.ys[iy] - pts[:, 1]) > tol
        ).any():
            raise ValueError("points do not coincide with grid nodes")
        return self.values[ix, iy]


class FdmSolver:
    """5-point Laplacian on a grid domain, factorized once for many sources."""

    def __init__(self, grid_domain, h):
        xmin, xmax, ymin, ymax = grid_domain.rect
        nx = int(round((xmax - xmin) / h)) + 1
        ny = int(round((ymax - ymin) / h)) + 1
        if not (np.isclose(xmin + (nx - 1) * h, xmax)
                and np.isclose(ymin + (ny - 1) * h, ymax)):
            raise ValueError("mesh width must divide the rectangle sides")
        xs = xmin + h * np.arange(nx)
        ys = ymin + h * np.arange(ny)
        xg, yg = np.meshgrid(xs, ys, indexing="ij")

        tol = 1e-9 * max(xmax - xmin, ymax - ymin)
        in_domain = np.ones((nx, ny), dtype=bool)  # closed-domain membership
        for (bx0, bx1, by0, by1) in grid_domain.blocks:
            # half-open: the block keeps nodes on faces shared with the outer
            # boundary and loses nodes on faces interior to the rectangle
            fx0 = (xg >= bx0 - tol) if np.isclose(bx0, xmin) else (xg > bx0 + tol)
            fx1 = (xg <= bx1 + tol) if np.isclose(bx1, xmax) else (xg < bx1 - tol)
            fy0 = (yg >= by0 - tol) if np.isclose(by0, ymin) else (yg > by0 + tol)
            fy1 = (yg <= by1 + tol) if np.isclose(by1, ymax) else (yg < by1 - tol)
            in_domain &= ~(fx0 & fx1 & fy0 & fy1)
        self.n_points = int(in_domain.sum())

        interior = in_domain.copy()
        interior[0, :] = interior[-1, :] = interior[:, 0] = interior[:, -1] = False
        for (bx0, bx1, by0, by1) in grid_domain.blocks:
            on_block_bd = (
                (xg >= bx0 - tol) & (xg <= bx1 + tol)
                & (yg >= by0 - tol) & (yg <= by1 + tol)
                & (np.isclose(xg, bx0, atol=tol) | np.isclose(xg, bx1, atol=tol)
                   | np.isclose(yg, by0, atol=tol) | np.isclose(yg, by1, atol=tol))
            )
            interior &= ~on_block_bd

        idx = -np.ones((nx, ny), dtype=int)
        ii, jj = np.nonzero(interior)
        idx[ii, jj] = np.arange(len(ii))
        n = len(ii)
        rows, cols, vals = [], [], []
        inv_h2 = 1.0 / (h * h)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            neigh = idx[ii + di, jj + dj]
            has = neigh >= 0
            rows.append(idx[ii[has], jj[has]])
            cols.append(neigh[has])
            vals.append(np.full(has.sum(), -inv_h2))
        rows.append(np.arange(n))
        cols.append(np.arange(n))
        vals.append(np.full(n, 4.0 * inv_h2))
        a = scipy.sparse.csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )
        self._lu = scipy.sparse.linalg.splu(a)
        self.xs, self.ys = xs, ys
        self.interior_mask = interior
        self._nodes = np.column_stack([xs[ii], ys[jj]])

    def solve(self, f):
        rhs = np.asarray(f(self._nodes), dtype=float)
        u = self._lu.solve(rhs)
        values = np.zeros(self.interior_mask.shape)
        values[self.interior_mask] = u
        return FdmSolution(xs=self.xs, ys=self.ys, interior_mask=self.interior_mask,
                           values=values, n_points=self.n_points)


def fdm_poisson(grid_domain, f, h):
    """5-point FDM solve of -Laplace(u) = f, u = 0 on the boundary.

    ``f`` is a callable f(points)->values sampled pointwise at grid nodes
    (values on removed-block boundaries follow the half-open convention a
    node-based grid code naturally applies).
    """
    return FdmSolver(grid_domain, h).solve(f)
