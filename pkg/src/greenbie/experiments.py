"""Declarative experiment presets and their evaluation routines.

Each preset describes geometry, operator, training budget, and an
evaluation list; the same evaluation functions back both the CLI runner
and the acceptance suite.  Desk-scale budgets replace the paper-scale ones
(tens of thousands of GPU epochs); the recipes otherwise follow the
experiments: architecture, learning rate, resampling cadence, and the
published material parameters.
"""

import copy

import numpy as np

from . import geometry, green_solver, kernels, oracle, training

_CLEARANCE = 1e-2  # evaluation grids stay this far from every boundary
_X_EXCLUSION = 0.05  # grid points closer than this to the source x are skipped


# --- presets -------------------------------------------------------------------

PRESETS = {
    "disc-poisson-bi": {
        "geometry": {"name": "disc", "n_nodes": 96, "eval_n_nodes": 800},
        "operator": {"family": "poisson"},
        "training": {"mode": "bi", "epochs": 10000, "resample_every": 500, "n_x": 80,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_disc_exact", "n_x_eval": 20, "grid_step": 0.1},
        ],
        "slices": [(0.8427, 0.4386), (0.2923, 0.0674)],
    },
    "disc-poisson-db": {
        "geometry": {"name": "disc", "n_nodes": 96, "eval_n_nodes": 800},
        "operator": {"family": "poisson"},
        "training": {"mode": "db", "epochs": 10000, "resample_every": 500,
                     "n1": 800, "n2": 200, "lr": 1e-5, "lambda_db": 100.0,
                     "blocks": 8, "width": 100, "activation": "tanh"},
        "evaluation": [
            {"kind": "green_vs_disc_exact", "n_x_eval": 20, "grid_step": 0.1},
        ],
    },
    "square-helmholtz-bi": {
        "geometry": {"name": "square", "nodes_per_edge": 50, "eval_nodes_per_edge": 125},
        "operator": {"family": "helmholtz", "k": 2.0},
        "training": {"mode": "bi", "epochs": 9000, "resample_every": 500, "n_x": 80,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.1},
            {"kind": "helmholtz_family", "n_draws": 20, "grid_step": 0.1},
        ],
    },
    "square-helmholtz-db": {
        "geometry": {"name": "square", "nodes_per_edge": 50, "eval_nodes_per_edge": 125},
        "operator": {"family": "helmholtz", "k": 2.0},
        "training": {"mode": "db", "epochs": 9000, "resample_every": 500,
                     "n1": 800, "n2": 200, "lr": 1e-5, "lambda_db": 100.0,
                     "blocks": 8, "width": 100, "activation": "tanh"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.1},
        ],
    },
    "lshape-poisson-bi": {
        "geometry": {"name": "lshape", "nodes_per_edge": 48, "eval_nodes_per_edge": 120},
        "operator": {"family": "poisson"},
        "training": {"mode": "bi", "epochs": 9000, "resample_every": 500, "n_x": 80,
                     "lr": 1e-5, "blocks": 6, "width": 80, "activation": "relu"},
        "evaluation": [
            {"kind": "lshape_solve", "n_sources": 20, "fdm_h_ref": 1 / 160,
             "fdm_h_cmp": 1 / 80},
        ],
    },
    "bowtie-helmholtz-bi": {
        "geometry": {"name": "bowtie", "nodes_per_edge": 40, "eval_nodes_per_edge": 120,
                     "kind": "exterior"},
        "operator": {"family": "helmholtz", "k": float(np.pi - 0.5)},
        "training": {"mode": "bi", "epochs": 6000, "resample_every": 100, "n_x": 60,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.25},
        ],
        "slices": [(-0.1163, -1.0780), (0.3941, -0.1163)],
    },
    "ushape-helmholtz-bi": {
        "geometry": {"name": "ushape", "nodes_per_edge": 32, "eval_nodes_per_edge": 100,
                     "kind": "exterior"},
        "operator": {"family": "helmholtz", "k": 1.0},
        "training": {"mode": "bi", "epochs": 6000, "resample_every": 100, "n_x": 60,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.4},
        ],
        "slices": [(0.2, 1.2), (-1.9689, -2.0929)],
    },
    "flower-interface-poisson-bi": {
        "geometry": {"name": "flower_in_square", "a": 0.5, "b": 0.15, "n_petals": 5,
                     "n_nodes": 160, "eval_n_nodes": 480,
                     "nodes_per_edge": 40, "eval_nodes_per_edge": 120},
        "operator": {"family": "poisson", "mu1": 1.0, "mu2": 2.0},
        "training": {"mode": "bi", "epochs": 8000, "resample_every": 500, "n_x": 32,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.1},
        ],
        "slices": [(-0.0960, 0.2626), (0.8342, -0.4661)],
    },
    "flower-interface-poisson-bi-b": {
        "geometry": {"name": "flower_in_square", "a": 0.5, "b": 0.1, "n_petals": 8,
                     "n_nodes": 192, "eval_n_nodes": 512,
                     "nodes_per_edge": 40, "eval_nodes_per_edge": 120},
        "operator": {"family": "poisson", "mu1": 2.0, "mu2": 1.0},
        "training": {"mode": "bi", "epochs": 8000, "resample_every": 500, "n_x": 32,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.1},
        ],
    },
    "square-interface-helmholtz-bi": {
        "geometry": {"name": "square_interface", "nodes_per_edge": 64,
                     "eval_nodes_per_edge": 128, "box": (-2.0, 2.0, -2.0, 2.0)},
        "operator": {"family": "helmholtz", "k": 2.0,
                     "mu1": 2.0, "mu2": 1.0, "eps1": 1.0, "eps2": 4.0},
        "training": {"mode": "bi", "epochs": 8000, "resample_every": 500, "n_x": 40,
                     "lr": 1e-5, "blocks": 8, "width": 100, "activation": "relu"},
        "evaluation": [
            {"kind": "green_vs_nystrom", "n_x_eval": 10, "grid_step": 0.2},
            {"kind": "interface_family", "n_draws": 20, "grid_step": 0.2,
             "include_table3": True},
        ],
        "slices": [(-0.8559, -0.8164), (-1.4218, 0.4312)],
    },
}

# parameters of the published interface-solution example (three terms each)
TABLE3_PARAMS = {
    "c1": [0.5550, 0.9934, 0.2986],
    "k1": [1.9959, 1.6667, -0.9091],
    "k2": [-0.1282, -1.1056, 1.7814],
    "c2": [0.3963, 0.3051, 0.3642],
    "x0": [0.2850, 0.1625, 0.2190],
    "y0": [0.5724, -0.1154, 0.6809],
}


def preset_config(name, seed=0, smoke=False):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    cfg = copy.deepcopy(PRESETS[name])
    cfg["preset"] = name
    cfg["seed"] = seed
    if smoke:
        cfg = apply_smoke(cfg)
    return cfg


def apply_smoke(cfg):
    """Shrink a config to a seconds-scale pipeline check."""
    cfg = copy.deepcopy(cfg)
    tr = cfg["training"]
    tr["epochs"] = min(tr["epochs"], 100)
    tr["resample_every"] = min(tr["resample_every"], tr["epochs"])
    tr["n_x"] = min(tr.get("n_x", 80), 8)
    tr["n1"] = min(tr.get("n1", 800), 64)
    tr["n2"] = min(tr.get("n2", 200), 16)
    tr["blocks"] = min(tr["blocks"], 2)
    tr["width"] = min(tr["width"], 24)
    geo = cfg["geometry"]
    node_floor = 16 * geo.get("n_petals", 4)  # flower curves need nodes per petal
    for key, cap in (("n_nodes", max(64, node_floor)),
                     ("eval_n_nodes", max(128, node_floor)),
                     ("nodes_per_edge", 12), ("eval_nodes_per_edge", 24)):
        if key in geo:
            geo[key] = min(geo[key], cap)
    for ev in cfg["evaluation"]:
        for key, cap in (("n_x_eval", 2), ("n_draws", 3), ("n_sources", 2)):
            if key in ev:
                ev[key] = min(ev[key], cap)
        if "grid_step" in ev:
            ev["grid_step"] = max(ev["grid_step"], 0.25)
        if ev["kind"] == "lshape_solve":
            ev["fdm_h_ref"] = max(ev["fdm_h_ref"], 1 / 40)
            ev["fdm_h_cmp"] = max(ev["fdm_h_cmp"], 1 / 20)
    cfg["smoke"] = True
    return cfg


# --- geometry / operator assembly ------------------------------------------------


def build_domain(geo):
    """(training DomainSpec, eval curves tuple) from a geometry section."""
    name = geo["name"]
    if name == "disc":
        train = geometry.make_circle(1.0, (0.0, 0.0), geo["n_nodes"])
        ev = geometry.make_circle(1.0, (0.0, 0.0), geo.get("eval_n_nodes", 800))
        return geometry.DomainSpec("interior", (train,)), (ev,)
    if name == "flower_in_square":
        g1 = geometry.make_flower(geo["a"], geo["b"], geo["n_petals"], geo["n_nodes"])
        g2 = geometry.make_polygon(geometry.SQUARE_VERTICES, geo["nodes_per_edge"])
        e1 = geometry.make_flower(geo["a"], geo["b"], geo["n_petals"],
                                  geo.get("eval_n_nodes", 480))
        e2 = geometry.make_polygon(geometry.SQUARE_VERTICES,
                                   geo.get("eval_nodes_per_edge", 120))
        return geometry.DomainSpec("interface", (g1, g2)), (e1, e2)
    if name == "square_interface":
        g1 = geometry.make_polygon(geometry.SQUARE_VERTICES, geo["nodes_per_edge"])
        e1 = geometry.make_polygon(geometry.SQUARE_VERTICES,
                                   geo.get("eval_nodes_per_edge", 128))
        box = tuple(geo.get("box", (-2.0, 2.0, -2.0, 2.0)))
        return geometry.DomainSpec("interface", (g1,), sampling_box=box), (e1,)

    verts = geo.get("vertices")
    if verts is None:
        verts = {
            "square": geometry.SQUARE_VERTICES,
            "lshape": geometry.LSHAPE_VERTICES,
            "bowtie": geometry.BOWTIE_VERTICES,
            "ushape": geometry.USHAPE_VERTICES,
        }[name]
    train = geometry.make_polygon(verts, geo["nodes_per_edge"])
    ev = geometry.make_polygon(verts, geo.get("eval_nodes_per_edge",
                                              2 * geo["nodes_per_edge"]))
    kind = geo.get("kind", "interior")
    box = geo.get("box", geometry.EXTERIOR_BOXES.get(name))
    if kind == "exterior":
        return geometry.DomainSpec("exterior", (train,), sampling_box=tuple(box)), (ev,)
    return geometry.DomainSpec("interior", (train,)), (ev,)


def build_operator(op_sec):
    family = op_sec["family"]
    iface = None
    if "mu1" in op_sec:
        iface = kernels.InterfaceParams(
            mu1=op_sec["mu1"], mu2=op_sec["mu2"],
            eps1=op_sec.get("eps1", 1.0), eps2=op_sec.get("eps2", 1.0),
        )
    return kernels.OperatorSpec(family=family, k=op_sec.get("k", 0.0), interface=iface)


def build_training_config(tr, seed):
    fields = {k: tr[k] for k in tr if k not in ("mode",)}
    return training.TrainingConfig(seed=seed, **fields)


def train_from_config(cfg):
    """Train per the config; returns the model with eval curves attached."""
    domain, eval_curves = build_domain(cfg["geometry"])
    op = build_operator(cfg["operator"])
    tcfg = build_training_config(cfg["training"], cfg.get("seed", 0))
    if cfg["training"]["mode"] == "db":
        model = training.train_db(tcfg, op, domain)
    else:
        model = training.train_bi(tcfg, op, domain)
    model.eval_curves = eval_curves
    return model


# --- evaluation grids and x draws -------------------------------------------------


def _grid_in_box(box, step, offset=0.0):
    xmin, xmax, ymin, ymax = box
    nx = int(np.floor((xmax - xmin - offset * step) / step)) + 1
    xs = xmin + step * (offset + np.arange(nx))
    ny = int(np.floor((ymax - ymin - offset * step) / step)) + 1
    ys = ymin + step * (offset + np.arange(ny))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def evaluation_grid(domain, eval_curves, step, clearance=_CLEARANCE, offset=0.0):
    """Grid of the domain kind's evaluation region, away from all boundaries."""
    if domain.kind == "interior":
        box = _bounding_box(eval_curves[0])
        pts = _grid_in_box(box, step, offset)
        keep = geometry.points_in_curve(eval_curves[0], pts)
    elif domain.kind == "exterior":
        pts = _grid_in_box(domain.sampling_box, step, offset)
        keep = ~geometry.points_in_curve(eval_curves[0], pts)
    else:
        if len(eval_curves) == 2:
            box = _bounding_box(eval_curves[1])
            pts = _grid_in_box(box, step, offset)
            keep = geometry.points_in_curve(eval_curves[1], pts)
        else:
            pts = _grid_in_box(domain.sampling_box, step, offset)
            keep = np.ones(len(pts), dtype=bool)
    for curve in eval_curves:
        keep &= geometry.distance_to_curve(curve, pts) > clearance
    return pts[keep]


def _bounding_box(curve):
    lo = curve.nodes.min(axis=0)
    hi = curve.nodes.max(axis=0)
    return lo[0], hi[0], lo[1], hi[1]


def draw_eval_x(domain, eval_curves, count, seed, clearance=0.05):
    """Random source points for evaluation, away from all boundaries."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        pts = geometry.sample_points(domain, count, int(rng.integers(0, 2 ** 62)))
        for p in pts:
            ok = all(geometry.distance_to_curve(c, p) > clearance for c in eval_curves)
            if ok and len(out) < count:
                out.append(p)
    return np.array(out)


# --- evaluation kinds ---------------------------------------------------------------


def eval_green_vs_disc_exact(model, n_x_eval, grid_step, seed):
    domain = model.domain
    curves = model.eval_curves
    grid = evaluation_grid(domain, curves, grid_step)
    xs = draw_eval_x(domain, curves, n_x_eval, seed)
    errs = []
    for x in xs:
        sel = grid[np.linalg.norm(grid - x, axis=1) > _X_EXCLUSION]
        g = np.real(green_solver.eval_green_grid(model, x, sel))
        ge = oracle.disc_green_exact(x, sel)
        errs.append(green_solver.relative_l2(g, ge))
    return {
        "rel_l2_green_mean": float(np.mean(errs)),
        "rel_l2_green_max": float(np.max(errs)),
        "per_x": [float(e) for e in errs],
        "x_points": [list(map(float, x)) for x in xs],
    }


def eval_green_vs_nystrom(model, n_x_eval, grid_step, seed):
    domain = model.domain
    curves = model.eval_curves
    eval_domain = geometry.DomainSpec(domain.kind, curves,
                                      sampling_box=domain.sampling_box)
    ref = oracle.NystromReference(model.op, eval_domain)
    grid = evaluation_grid(domain, curves, grid_step)
    labels = None
    if domain.kind == "interface":
        labels = geometry.label_regions(eval_domain, grid)
    xs = draw_eval_x(domain, curves, n_x_eval, seed)
    errs = []
    for x in xs:
        keep = np.linalg.norm(grid - x, axis=1) > _X_EXCLUSION
        sel = grid[keep]
        sol = ref.solve_for(x)
        if domain.kind == "interface":
            lab = labels[keep]
            ge = np.zeros(len(sel), dtype=complex)
            for region in (1, 2):
                m = lab == region
                if m.any():
                    ge[m] = sol.g_at(sel[m], region)
        else:
            ge = sol.g_at(sel)
        g = green_solver.eval_green_grid(model, x, sel)
        errs.append(green_solver.relative_l2(g, ge))
    return {
        "rel_l2_green_mean": float(np.mean(errs)),
        "rel_l2_green_max": float(np.max(errs)),
        "per_x": [float(e) for e in errs],
        "x_points": [list(map(float, x)) for x in xs],
    }


def random_lshape_partition(seed, cells_per_side=10):
    """Seeded rectangle tiling of the L-shape, misaligned with FDM grids.

    Column and row edges are random but include the re-entrant lines, so
    cells tile the domain exactly; roughly 3 * cells_per_side^2 cells.
    """
    rng = np.random.default_rng(seed)

    def edges():
        while True:
            w = rng.uniform(0.6, 1.4, 2 * cells_per_side)
            w = w / w.sum() * 2.0
            e = -1.0 + np.concatenate([[0.0], np.cumsum(w)])
            e[-1] = 1.0
            mid = cells_per_side
            e[mid] = 0.0  # force the re-entrant line
            if np.all(np.diff(e) > 0.04):
                return e
    ex, ey = edges(), edges()
    cells = []
    for i in range(len(ex) - 1):
        for j in range(len(ey) - 1):
            cx = 0.5 * (ex[i] + ex[i + 1])
            cy = 0.5 * (ey[j] + ey[j + 1])
            if cx > 0 and cy < 0:
                continue  # removed quadrant
            cells.append((ex[i], ey[j], ex[i + 1], ey[j + 1]))
    return cells


def lshape_solve_targets(h=0.1):
    """0.1-offset lattice nodes of the L-shape, on both FDM grids."""
    xs = np.arange(-0.95, 0.96, h)
    pts = np.column_stack([a.ravel() for a in np.meshgrid(xs, xs, indexing="ij")])
    keep = ~((pts[:, 0] > -0.025) & (pts[:, 1] < 0.025))  # removed quadrant + margin
    return pts[keep]


def eval_lshape_solve(model, n_sources, seed, fdm_h_ref, fdm_h_cmp):
    cells = random_lshape_partition(seed)
    rng = np.random.default_rng(seed + 1)
    targets = lshape_solve_targets()
    solver = green_solver.DirichletSolver(model, targets)
    fdm_ref = oracle.FdmSolver(oracle.LSHAPE_GRID, fdm_h_ref)
    fdm_cmp = oracle.FdmSolver(oracle.LSHAPE_GRID, fdm_h_cmp)

    errs_model, errs_cmp = [], []
    for _ in range(n_sources):
        values = rng.uniform(-30.0, 30.0, len(cells))
        f = green_solver.SourceField(cells=[(c, v) for c, v in zip(cells, values)])
        f.check_tiling(3.0)
        u_model = solver.solve(f).values
        u_ref = fdm_ref.solve(f).value_at_nodes(targets)
        u_cmp = fdm_cmp.solve(f).value_at_nodes(targets)
        errs_model.append(green_solver.relative_l2(u_model, u_ref))
        errs_cmp.append(green_solver.relative_l2(u_cmp, u_ref))
    return {
        "rel_l2_solve_mean": float(np.mean(errs_model)),
        "rel_l2_fdm_cmp_mean": float(np.mean(errs_cmp)),
        "per_source": [float(e) for e in errs_model],
        "per_source_fdm_cmp": [float(e) for e in errs_cmp],
        "fdm_ref_points": fdm_ref.n_points,
        "fdm_cmp_points": fdm_cmp.n_points,
    }


def helmholtz_source_set(n_draws, seed):
    """Draws from the +-sin product family with c1, c2 in 1..5."""
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n_draws):
        c1, c2 = rng.integers(1, 6, 2)
        s1, s2 = rng.choice([-1.0, 1.0], 2)
        draws.append((int(c1), int(c2), float(s1), float(s2)))
    return draws


def eval_helmholtz_family(model, n_draws, grid_step, seed):
    k2 = model.op.k ** 2
    curves = model.eval_curves
    # half-step offset keeps the targets off the sine-product zero lattice
    grid = evaluation_grid(model.domain, curves, grid_step, offset=0.5)
    solver = green_solver.DirichletSolver(model, grid)
    errs = []
    for (c1, c2, s1, s2) in helmholtz_source_set(n_draws, seed):
        amp = (c1 ** 2 + c2 ** 2) * np.pi ** 2 - k2

        def u_exact(p):
            return s1 * np.sin(c1 * np.pi * p[:, 0]) * s2 * np.sin(c2 * np.pi * p[:, 1])

        f = green_solver.SourceField(func=lambda p: amp * u_exact(p))
        u = solver.solve(f).values
        errs.append(green_solver.relative_l2(u, u_exact(grid)))
    return {
        "rel_l2_solve_mean": float(np.mean(errs)),
        "rel_l2_solve_max": float(np.max(errs)),
        "per_draw": [float(e) for e in errs],
    }


def interface_exact_solution(op, params):
    """The designed plane-wave / outgoing-wave interface solution."""
    iface = op.interface
    k = op.k
    kap1 = k * np.sqrt(iface.eps1 * iface.mu1)
    kap2 = k * np.sqrt(iface.eps2 * iface.mu2)
    c1 = np.asarray(params["c1"], dtype=float)
    k1 = np.asarray(params["k1"], dtype=float)
    k2 = np.asarray(params["k2"], dtype=float)
    c2 = np.asarray(params["c2"], dtype=float)
    x0 = np.asarray(params["x0"], dtype=float)
    y0 = np.asarray(params["y0"], dtype=float)
    scale1 = np.sqrt(iface.eps1 * iface.mu1)

    def u1(p):
        phase = (p[:, 0, None] * k1 + p[:, 1, None] * k2) * scale1
        return (c1 * np.exp(1j * phase)).sum(axis=1)

    def grad_u1(p):
        phase = (p[:, 0, None] * k1 + p[:, 1, None] * k2) * scale1
        e = c1 * np.exp(1j * phase) * 1j * scale1
        return np.stack([(e * k1).sum(axis=1), (e * k2).sum(axis=1)], axis=1)

    def u2(p):
        r = np.sqrt((p[:, 0, None] - x0) ** 2 + (p[:, 1, None] - y0) ** 2)
        from .special import hankel1

        return (c2 * hankel1(0, kap2 * r)).sum(axis=1)

    def grad_u2(p):
        from .special import hankel1

        dx = p[:, 0, None] - x0
        dy = p[:, 1, None] - y0
        r = np.sqrt(dx ** 2 + dy ** 2)
        dr = -kap2 * c2 * hankel1(1, kap2 * r)
        return np.stack([(dr * dx / r).sum(axis=1), (dr * dy / r).sum(axis=1)], axis=1)

    return u1, grad_u1, u2, grad_u2


def random_interface_params(op, seed, terms=3):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, terms)
    return {
        "c1": rng.uniform(0.0, 1.0, terms).tolist(),
        "k1": (op.k * np.cos(theta)).tolist(),
        "k2": (op.k * np.sin(theta)).tolist(),
        "c2": rng.uniform(0.0, 1.0, terms).tolist(),
        "x0": rng.uniform(-0.8, 0.8, terms).tolist(),
        "y0": rng.uniform(-0.8, 0.8, terms).tolist(),
    }


def eval_interface_family(model, n_draws, grid_step, seed, include_table3=True):
    op = model.op
    iface = op.interface
    curves = model.eval_curves
    g1curve = curves[0]
    grid = evaluation_grid(model.domain, curves, grid_step, clearance=0.05)
    labels = geometry.label_regions(
        geometry.DomainSpec("interface", curves, sampling_box=model.domain.sampling_box),
        grid,
    )
    param_sets = [random_interface_params(op, seed + i) for i in range(n_draws)]
    if include_table3:
        param_sets.append(TABLE3_PARAMS)
    errs = []
    for params in param_sets:
        u1, grad_u1, u2, grad_u2 = interface_exact_solution(op, params)
        nodes, normals = g1curve.nodes, g1curve.normals
        g1 = u2(nodes) - u1(nodes)
        flux1 = (grad_u1(nodes) * normals).sum(axis=1) / iface.mu1
        flux2 = (grad_u2(nodes) * normals).sum(axis=1) / iface.mu2
        g2 = flux2 - flux1
        u_num = green_solver.solve_interface_bvp(model, g1, g2, None, grid).values
        u_ex = np.where(labels == 1, u1(grid), u2(grid))
        errs.append(green_solver.relative_l2(u_num, u_ex))
    out = {
        "rel_l2_solve_mean": float(np.mean(errs)),
        "rel_l2_solve_max": float(np.max(errs)),
        "per_draw": [float(e) for e in errs],
    }
    if include_table3:
        out["table3_rel_l2"] = float(errs[-1])
    return out


_EVALUATORS = {
    "green_vs_disc_exact": lambda model, ev, seed: eval_green_vs_disc_exact(
        model, ev["n_x_eval"], ev["grid_step"], seed),
    "green_vs_nystrom": lambda model, ev, seed: eval_green_vs_nystrom(
        model, ev["n_x_eval"], ev["grid_step"], seed),
    "lshape_solve": lambda model, ev, seed: eval_lshape_solve(
        model, ev["n_sources"], seed, ev["fdm_h_ref"], ev["fdm_h_cmp"]),
    "helmholtz_family": lambda model, ev, seed: eval_helmholtz_family(
        model, ev["n_draws"], ev["grid_step"], seed),
    "interface_family": lambda model, ev, seed: eval_interface_family(
        model, ev["n_draws"], ev["grid_step"], seed, ev.get("include_table3", True)),
}


def run_evaluations(model, cfg):
    seed = cfg.get("seed", 0) + 10_000
    out = {}
    for ev in cfg["evaluation"]:
        out[ev["kind"]] = _EVALUATORS[ev["kind"]](model, ev, seed)
    return out
