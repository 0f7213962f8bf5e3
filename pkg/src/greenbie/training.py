"""Training loops for the two ways of learning the smooth remainder H:

* boundary-integral route: H is a layer potential whose density is a
  network h(x, z); only boundary / jump data is fitted, the PDE holds by
  construction.
* derivative route (baseline): a network approximates H(x, y) directly and
  the PDE residual is penalized through exact input derivatives.

Losses reduce with means over sample pairs (the paper-style sums rescale
into the learning rate under Adam), and every run is deterministic in the
config seed.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry, kernels, network, representation
from .errors import TrainingDiverged

_BOUNDARY_CLEARANCE = 1e-3


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int
    resample_every: int = 500
    n_x: int = 80
    lr: float = 1e-5
    lambda_db: float = 100.0
    lambda_jump1: float = 1.0
    lambda_jump2: float = 1.0
    seed: int = 0
    n1: int = 800  # derivative-route interior pairs
    n2: int = 200  # derivative-route boundary pairs
    blocks: int = 8
    width: int = 100
    activation: str = "relu"
    dtype: str = "float32"
    chunk_rows: int = 8192

    def __post_init__(self):
        if self.epochs <= 0:
            raise ValueError("epochs must be positive")
        if not 1 <= self.resample_every <= self.epochs:
            raise ValueError("resample_every must lie in [1, epochs]")

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64


@dataclass(eq=False)
class GreenModel:
    """A learned Green's function G = G0 + H."""

    op: object
    domain: object
    schemes: tuple
    densities: tuple  # (h,) single domain, (h1, h2[, h3]) interface, () for db
    mode: str  # "bi" or "db"
    db_network: object = None
    loss_trace: list = field(default_factory=list)
    eval_curves: tuple | None = None  # optional finer quadrature for evaluation


def _out_channels(op):
    return 2 if op.is_complex else 1


def _to_complex(h):
    """(batch, n, ch) network output -> complex (batch, n)."""
    if h.shape[-1] == 1:
        return h[..., 0].astype(np.complex128)
    return h[..., 0] + 1j * h[..., 1]


def _cot_channels(cot_c, ch, dtype):
    """Complex cotangent -> (batch*n, ch) real-channel cotangent."""
    if ch == 1:
        return np.ascontiguousarray(cot_c.real.reshape(-1, 1), dtype=dtype)
    out = np.empty((cot_c.size, 2), dtype=dtype)
    out[:, 0] = cot_c.real.ravel()
    out[:, 1] = cot_c.imag.ravel()
    return out


def _paired_inputs(x_chunk, nodes, dtype):
    b, n = len(x_chunk), len(nodes)
    feats = np.empty((b, n, 4), dtype=dtype)
    feats[:, :, 0] = x_chunk[:, 0, None]
    feats[:, :, 1] = x_chunk[:, 1, None]
    feats[:, :, 2] = nodes[None, :, 0]
    feats[:, :, 3] = nodes[None, :, 1]
    return feats.reshape(b * n, 4)


def _density_batch(net, x_chunk, nodes, dtype, cache=False):
    inputs = _paired_inputs(x_chunk, nodes, dtype)
    out, cc = network.forward_cached(net, inputs, keep_cache=cache)
    return out.reshape(len(x_chunk), len(nodes), -1), inputs, cc


class _BiSingleLoss:
    """Residual R(x) = boundary-limit D[h](x, .) + G0(x, .) at all curve nodes."""

    def __init__(self, op, domain, cfg):
        self.op = op
        self.cfg = cfg
        self.ops = representation.make_single_domain_operators(op, domain)
        b = self.ops.limit_matrix
        self.bmat = np.asarray(b, dtype=complex if op.is_complex else float)
        self.nodes = self.ops.scheme.curve.nodes
        self.ch = _out_channels(op)

    def schemes(self):
        return (self.ops.scheme,)

    def rhs(self, x_batch):
        return self.ops.rhs(x_batch)

    def loss_and_grads(self, nets, x_batch, rhs):
        (net,) = nets
        n = len(self.nodes)
        n_total = len(x_batch) * n
        dtype = self.cfg.np_dtype
        chunk = max(1, self.cfg.chunk_rows // n)
        loss = 0.0
        grad = np.zeros_like(net.params)
        for lo in range(0, len(x_batch), chunk):
            xs = x_batch[lo : lo + chunk]
            h, _, cache = _density_batch(net, xs, self.nodes, dtype, cache=True)
            hc = _to_complex(h)
            r = hc @ self.bmat.T + rhs[lo : lo + len(xs)]
            loss += float(np.sum(r.real ** 2 + r.imag ** 2))
            cot_c = (2.0 / n_total) * (r @ np.conj(self.bmat))
            cot = _cot_channels(cot_c, self.ch, dtype)
            grad += network.backward_from_cache(net, cache, cot)
        return loss / n_total, (grad,)


class _BiInterfaceLoss:
    """Weighted jump / boundary residuals of the interface representation."""

    def __init__(self, op, domain, cfg):
        self.op = op
        self.cfg = cfg
        self.ops = representation.make_interface_operators(op, domain)
        self.n_nets = 2 if self.ops.unbounded else 3
        cdtype = complex if op.is_complex else float
        terms = [
            ("jump1", self.ops.jump1_blocks(), self.ops.jump1_rhs, cfg.lambda_jump1,
             self.ops.scheme1.curve.nodes),
            ("jump2", self.ops.jump2_blocks(), self.ops.jump2_rhs, cfg.lambda_jump2,
             self.ops.scheme1.curve.nodes),
        ]
        if not self.ops.unbounded:
            terms.append(("bd", self.ops.bd_blocks(), self.ops.bd_rhs, 1.0,
                          self.ops.scheme2.curve.nodes))
        self.terms = [
            (name, tuple(None if b is None else np.asarray(b, dtype=cdtype) for b in blocks),
             rhs_fn, lam, targets)
            for name, blocks, rhs_fn, lam, targets in terms
        ]
        # density nets live on: h1, h2 -> Gamma1 nodes, h3 -> Gamma2 nodes
        self.net_nodes = [self.ops.scheme1.curve.nodes, self.ops.scheme1.curve.nodes]
        if not self.ops.unbounded:
            self.net_nodes.append(self.ops.scheme2.curve.nodes)
        self.ch = _out_channels(op)

    def schemes(self):
        if self.ops.unbounded:
            return (self.ops.scheme1,)
        return (self.ops.scheme1, self.ops.scheme2)

    def rhs(self, x_batch):
        return tuple(rhs_fn(x_batch) for _, _, rhs_fn, _, _ in self.terms)

    def loss_and_grads(self, nets, x_batch, rhs):
        dtype = self.cfg.np_dtype
        n_rows = max(len(nodes) for nodes in self.net_nodes)
        chunk = max(1, self.cfg.chunk_rows // n_rows)
        grads = [np.zeros_like(net.params) for net in nets]
        totals = [len(x_batch) * len(t[4]) for t in self.terms]
        loss = 0.0
        for lo in range(0, len(x_batch), chunk):
            xs = x_batch[lo : lo + chunk]
            hs, caches = [], []
            for net, nodes in zip(nets, self.net_nodes):
                h, _, cache = _density_batch(net, xs, nodes, dtype, cache=True)
                hs.append(_to_complex(h))
                caches.append(cache)
            cots = [np.zeros_like(hs[k]) for k in range(len(nets))]
            for t_idx, (name, blocks, _, lam, targets) in enumerate(self.terms):
                r = np.array(rhs[t_idx][lo : lo + len(xs)])
                for k, blk in enumerate(blocks[: len(nets)]):
                    if blk is not None:
                        r = r + hs[k] @ blk.T
                loss += lam * float(np.sum(r.real ** 2 + r.imag ** 2)) / totals[t_idx]
                scale = 2.0 * lam / totals[t_idx]
                for k, blk in enumerate(blocks[: len(nets)]):
                    if blk is not None:
                        cots[k] += scale * (r @ np.conj(blk))
            for k, net in enumerate(nets):
                cot = _cot_channels(cots[k], self.ch, dtype)
                grads[k] += network.backward_from_cache(net, caches[k], cot)
        return loss, tuple(grads)


def bi_loss_single(model, x_batch):
    """Boundary-integral loss of a single-domain model on one x batch."""
    cfg = _loss_cfg(model)
    state = _BiSingleLoss(model.op, model.domain, cfg)
    _reject_boundary_samples(model.domain, x_batch)
    loss, grads = state.loss_and_grads(model.densities, np.atleast_2d(x_batch),
                                       state.rhs(np.atleast_2d(x_batch)))
    return loss, grads[0]


def bi_loss_interface(model, x_batch):
    """Interface loss (weighted jump1 / jump2 / boundary residuals)."""
    cfg = _loss_cfg(model)
    state = _BiInterfaceLoss(model.op, model.domain, cfg)
    _reject_boundary_samples(model.domain, x_batch)
    x = np.atleast_2d(x_batch)
    return state.loss_and_grads(model.densities, x, state.rhs(x))


def _loss_cfg(model):
    dtype = "float64" if model.densities[0].params.dtype == np.float64 else "float32"
    return TrainingConfig(epochs=1, resample_every=1, dtype=dtype)


def _reject_boundary_samples(domain, x_batch):
    for curve in domain.curves:
        if np.any(geometry.distance_to_curve(curve, x_batch) < 1e-9):
            raise ValueError("sample point lies on the boundary")


def db_loss(net, op, interior_pairs, boundary_pairs, lam, chunk_rows=2048):
    """Derivative-route loss: mean |L_y H|^2 + lam * mean |H + G0|^2."""
    if net.activation != "tanh":
        raise ValueError("derivative-route training needs the tanh activation")
    dtype = net.params.dtype
    ch = _out_channels(op)
    ksq = op.k ** 2 if op.is_complex else 0.0

    n1 = len(interior_pairs)
    loss = 0.0
    grad = np.zeros_like(net.params)
    for lo in range(0, n1, chunk_rows):
        pts = np.asarray(interior_pairs[lo : lo + chunk_rows], dtype=dtype)
        val, lap, cache = network.laplacian_cached(net, pts, (2, 3))
        r = -lap - ksq * val  # L_y H per channel
        loss += float(np.sum(r ** 2))
        cot_lap = -(2.0 / n1) * r
        cot_val = -(2.0 / n1) * ksq * r
        grad += network.laplacian_backward_from_cache(net, cache, cot_val, cot_lap)
    loss /= n1

    n2 = len(boundary_pairs)
    g0b = kernels.g0(op, boundary_pairs[:, :2], boundary_pairs[:, 2:])
    g0b = np.stack([g0b.real, g0b.imag], axis=1)[:, :ch] if op.is_complex \
        else g0b[:, None]
    bd_loss = 0.0
    for lo in range(0, n2, chunk_rows):
        pts = np.asarray(boundary_pairs[lo : lo + chunk_rows], dtype=dtype)
        val, cache = network.forward_cached(net, pts)
        r = val + g0b[lo : lo + len(pts)].astype(dtype)
        bd_loss += float(np.sum(r ** 2))
        grad += network.backward_from_cache(net, cache, (2.0 * lam / n2) * r)
    return loss + lam * bd_loss / n2, grad


# --- sampling -----------------------------------------------------------------


def _draw_x(domain, count, rng):
    """Sample x points for the loss, rejecting near-boundary points."""
    out = []
    got = 0
    while got < count:
        seed = int(rng.integers(0, 2 ** 62))
        pts = geometry.sample_points(domain, count - got, seed)
        keep = np.ones(len(pts), dtype=bool)
        for curve in domain.curves:
            keep &= geometry.distance_to_curve(curve, pts) > _BOUNDARY_CLEARANCE
        pts = pts[keep]
        out.append(pts)
        got += len(pts)
    return np.concatenate(out)[:count]


def _sample_on_curve(curve, count, rng):
    """Uniform arc-length samples on the node polyline."""
    seg_start = curve.nodes
    seg_end = np.roll(curve.nodes, -1, axis=0)
    lengths = np.sqrt(((seg_end - seg_start) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = rng.uniform(0.0, cum[-1], count)
    idx = np.searchsorted(cum, s, side="right") - 1
    frac = (s - cum[idx]) / lengths[idx]
    return seg_start[idx] + frac[:, None] * (seg_end[idx] - seg_start[idx])


# --- training loops -----------------------------------------------------------


def _run_loop(cfg, nets, resample, loss_fn):
    states = [network.adam_init(net.n_params, cfg.lr, dtype=net.params.dtype)
              for net in nets]
    trace = []
    batch = None
    t0 = time.perf_counter()
    for epoch in range(cfg.epochs):
        if epoch % cfg.resample_every == 0:
            batch = resample()
        loss, grads = loss_fn(nets, *batch)
        if not np.isfinite(loss):
            raise TrainingDiverged(f"loss became non-finite at epoch {epoch}", trace)
        new_nets, new_states = [], []
        for net, st, g in zip(nets, states, grads):
            p, st = network.adam_step(st, net.params, g)
            new_nets.append(net.with_params(p))
            new_states.append(st)
        nets, states = new_nets, new_states
        trace.append((epoch, loss, time.perf_counter() - t0))
    return nets, trace


def train_bi(config, op, domain):
    """Boundary-integral training (the loop of the boundary-integral method)."""
    cfg = config
    dtype = cfg.np_dtype
    if domain.kind == "interface":
        state = _BiInterfaceLoss(op, domain, cfg)
        n_nets = state.n_nets
    else:
        state = _BiSingleLoss(op, domain, cfg)
        n_nets = 1
    ch = _out_channels(op)
    nets = [network.init(cfg.blocks, cfg.width, 4, ch, cfg.activation,
                         seed=cfg.seed + k, dtype=dtype) for k in range(n_nets)]
    rng = np.random.default_rng(cfg.seed)

    def resample():
        x = _draw_x(domain, cfg.n_x, rng)
        return x, state.rhs(x)

    def loss_fn(nets_now, x, rhs):
        return state.loss_and_grads(nets_now, x, rhs)

    nets, trace = _run_loop(cfg, nets, resample, loss_fn)
    return GreenModel(op=op, domain=domain, schemes=state.schemes(),
                      densities=tuple(nets), mode="bi", loss_trace=trace)


def train_db(config, op, domain):
    """Derivative-route training (PDE residual + boundary penalty)."""
    cfg = config
    if domain.kind == "interface":
        raise ValueError("the derivative route supports single-domain problems only")
    ch = _out_channels(op)
    # the PDE residual needs second input derivatives, so tanh regardless of config
    net = network.init(cfg.blocks, cfg.width, 4, ch, "tanh",
                       seed=cfg.seed, dtype=cfg.np_dtype)
    rng = np.random.default_rng(cfg.seed)
    curve = domain.curve

    def resample():
        xi = _draw_x(domain, cfg.n1, rng)
        yi = _draw_x(domain, cfg.n1, rng)
        interior = np.hstack([xi, yi])
        xb = _draw_x(domain, cfg.n2, rng)
        yb = _sample_on_curve(curve, cfg.n2, rng)
        boundary = np.hstack([xb, yb])
        return interior, boundary

    def loss_fn(nets_now, interior, boundary):
        loss, grad = db_loss(nets_now[0], op, interior, boundary, cfg.lambda_db,
                             chunk_rows=max(256, cfg.chunk_rows // 4))
        return loss, (grad,)

    (net,), trace = _run_loop(cfg, [net], resample, loss_fn)
    scheme = representation.make_single_domain_operators(op, domain).scheme
    return GreenModel(op=op, domain=domain, schemes=(scheme,), densities=(),
                      mode="db", db_network=net, loss_trace=trace)
