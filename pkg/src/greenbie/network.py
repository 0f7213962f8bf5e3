"""Dense residual network with explicit forward / backward passes, an exact
input-Laplacian facility (forward-mode second derivatives through the graph,
with a hand-derived reverse pass for parameter gradients), and Adam.

Architecture: a linear lift, ``blocks`` residual blocks of the form
y <- y + act(W2 act(W1 y + b1) + b2), and a linear head.  Parameters live in
one flat vector so optimizer state and checkpoints are trivial.
"""

import struct
from dataclasses import dataclass, replace

import numpy as np

_MAGIC = b"GBDN0001"
_ACT_TAGS = {"relu": 0, "tanh": 1}
_TAG_ACTS = {v: k for k, v in _ACT_TAGS.items()}


@dataclass(frozen=True, eq=False)
class DensityNetwork:
    in_dim: int
    out_dim: int
    blocks: int
    width: int
    activation: str
    params: np.ndarray
    rng_seed: int

    @property
    def n_params(self):
        return param_count(self.blocks, self.width, self.in_dim, self.out_dim)

    def with_params(self, params):
        return replace(self, params=params)

    def astype(self, dtype):
        return replace(self, params=self.params.astype(dtype))


def param_count(blocks, width, in_dim, out_dim):
    lift = in_dim * width + width
    per_block = 2 * (width * width + width)
    head = width * out_dim + out_dim
    return lift + blocks * per_block + head


def init(blocks, width, in_dim, out_dim, activation, seed, dtype=np.float64):
    """Network with uniform +-sqrt(6/(fan_in+fan_out)) weights and zero biases."""
    if blocks < 1 or width < 1:
        raise ValueError("blocks and width must be at least 1")
    if activation not in _ACT_TAGS:
        raise ValueError(f"unknown activation {activation!r}")
    rng = np.random.default_rng(seed)
    parts = []

    def weight(fan_out, fan_in):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        parts.append(rng.uniform(-lim, lim, size=(fan_out, fan_in)).ravel())
        parts.append(np.zeros(fan_out))

    weight(width, in_dim)
    for _ in range(blocks):
        weight(width, width)
        weight(width, width)
    weight(out_dim, width)
    params = np.concatenate(parts).astype(dtype)
    return DensityNetwork(
        in_dim=in_dim, out_dim=out_dim, blocks=blocks, width=width,
        activation=activation, params=params, rng_seed=seed,
    )


def _views(net, params=None):
    """(W, b) array views into the flat parameter vector, no copies."""
    p = net.params if params is None else params
    shapes = [(net.width, net.in_dim)]
    for _ in range(net.blocks):
        shapes += [(net.width, net.width), (net.width, net.width)]
    shapes.append((net.out_dim, net.width))
    out = []
    ofs = 0
    for fan_out, fan_in in shapes:
        w = p[ofs : ofs + fan_out * fan_in].reshape(fan_out, fan_in)
        ofs += fan_out * fan_in
        b = p[ofs : ofs + fan_out]
        ofs += fan_out
        out.append((w, b))
    if ofs != p.shape[0]:
        raise ValueError("parameter vector length does not match the architecture")
    return out


def _act(name, t):
    if name == "relu":
        z = np.maximum(t, 0.0)
        return z, (t > 0.0).astype(t.dtype)
    z = np.tanh(t)
    return z, 1.0 - z * z


def forward(net, inputs):
    """Network outputs for a batch of inputs (m, in_dim) -> (m, out_dim)."""
    out, _ = forward_cached(net, inputs, keep_cache=False)
    return out


def forward_cached(net, inputs, keep_cache=True):
    x = np.asarray(inputs, dtype=net.params.dtype)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != net.in_dim:
        raise ValueError(f"expected inputs of width {net.in_dim}, got {x.shape[1]}")
    layers = _views(net)
    w_in, b_in = layers[0]
    a = x @ w_in.T + b_in
    cache = [x] if keep_cache else None
    for blk in range(net.blocks):
        w1, b1 = layers[1 + 2 * blk]
        w2, b2 = layers[2 + 2 * blk]
        z1, d1 = _act(net.activation, a @ w1.T + b1)
        z2, d2 = _act(net.activation, z1 @ w2.T + b2)
        if keep_cache:
            cache.append((a, z1, d1, d2))
        a = a + z2
    w_out, b_out = layers[-1]
    out = a @ w_out.T + b_out
    if keep_cache:
        cache.append(a)
    return out, cache


def backward(net, inputs, output_cotangent):
    """Exact reverse-mode gradient of sum(cotangent * forward) in the parameters."""
    _, cache = forward_cached(net, inputs)
    return backward_from_cache(net, cache, output_cotangent)


def backward_from_cache(net, cache, cot):
    cot = np.asarray(cot, dtype=net.params.dtype)
    if cot.ndim == 1:
        cot = cot[None, :]
    layers = _views(net)
    grad = np.zeros_like(net.params)
    gviews = _views(net, grad)

    x = cache[0]
    a_last = cache[-1]
    w_out, _ = layers[-1]
    gw_out, gb_out = gviews[-1]
    gw_out += cot.T @ a_last
    gb_out += cot.sum(axis=0)
    c = cot @ w_out

    for blk in range(net.blocks - 1, -1, -1):
        a_in, z1, d1, d2 = cache[1 + blk]
        w1, _ = layers[1 + 2 * blk]
        w2, _ = layers[2 + 2 * blk]
        gw1, gb1 = gviews[1 + 2 * blk]
        gw2, gb2 = gviews[2 + 2 * blk]
        g2 = c * d2
        gw2 += g2.T @ z1
        gb2 += g2.sum(axis=0)
        g1 = (g2 @ w2) * d1
        gw1 += g1.T @ a_in
        gb1 += g1.sum(axis=0)
        c = c + g1 @ w1

    gw_in, gb_in = gviews[0]
    gw_in += c.T @ x
    gb_in += c.sum(axis=0)
    return grad


# --- input Laplacian ----------------------------------------------------------


def _tanh_derivs(t):
    z = np.tanh(t)
    d1 = 1.0 - z * z
    d2 = -2.0 * z * d1
    return z, d1, d2


def input_laplacian(net, points, coords):
    """Sum over ``coords`` of the second input derivatives of each output.

    Exact forward-mode differentiation of the forward graph; requires tanh.
    """
    val, lap, _ = laplacian_cached(net, points, coords, keep_cache=False)
    return lap


def laplacian_cached(net, points, coords, keep_cache=True):
    if net.activation != "tanh":
        raise ValueError("input Laplacian needs the tanh activation (relu is not C^2)")
    x = np.asarray(points, dtype=net.params.dtype)
    if x.ndim == 1:
        x = x[None, :]
    coords = tuple(coords)
    layers = _views(net)
    w_in, b_in = layers[0]
    m = x.shape[0]

    a = x @ w_in.T + b_in
    jac = np.broadcast_to(w_in.T[coords, None, :], (len(coords), m, net.width)).copy()
    sec = np.zeros_like(jac)
    cache = [(x, coords)] if keep_cache else None

    for blk in range(net.blocks):
        w1, b1 = layers[1 + 2 * blk]
        w2, b2 = layers[2 + 2 * blk]
        steps = []
        a_l, j_l, s_l = a, jac, sec
        for (w, b) in ((w1, b1), (w2, b2)):
            t = a_l @ w.T + b
            jt = j_l @ w.T
            st = s_l @ w.T
            z, d1, d2 = _tanh_derivs(t)
            if keep_cache:
                steps.append((a_l, j_l, s_l, z, d1, d2, jt, st))
            a_l = z
            j_l = d1 * jt
            s_l = d2 * jt * jt + d1 * st
        if keep_cache:
            cache.append(steps)
        a = a + a_l
        jac = jac + j_l
        sec = sec + s_l
    w_out, b_out = layers[-1]
    val = a @ w_out.T + b_out
    lap = sec.sum(axis=0) @ w_out.T
    if keep_cache:
        cache.append((a, sec))
    return val, lap, cache


def laplacian_backward_from_cache(net, cache, cot_val, cot_lap):
    """Parameter gradient of sum(cot_val * value) + sum(cot_lap * laplacian)."""
    dtype = net.params.dtype
    cot_val = np.asarray(cot_val, dtype=dtype)
    cot_lap = np.asarray(cot_lap, dtype=dtype)
    layers = _views(net)
    grad = np.zeros_like(net.params)
    gviews = _views(net, grad)

    x, coords = cache[0]
    a_last, sec_last = cache[-1]
    w_out, _ = layers[-1]
    gw_out, gb_out = gviews[-1]
    gw_out += cot_val.T @ a_last + cot_lap.T @ sec_last.sum(axis=0)
    gb_out += cot_val.sum(axis=0)
    c_a = cot_val @ w_out
    # the Laplacian sums the coordinate second derivatives, so every coordinate
    # channel receives the same head cotangent
    c_s = np.repeat((cot_lap @ w_out)[None, :, :], len(coords), axis=0)
    c_j = np.zeros_like(c_s)

    for blk in range(net.blocks - 1, -1, -1):
        steps = cache[1 + blk]
        ws = (layers[1 + 2 * blk][0], layers[2 + 2 * blk][0])
        gs = (gviews[1 + 2 * blk], gviews[2 + 2 * blk])
        # adjoint of the residual add: both branches receive the block cotangent
        ca_l, cj_l, cs_l = c_a, c_j, c_s
        for li in (1, 0):
            a_l, j_l, s_l, z, d1, d2, jt, st = steps[li]
            d3 = d1 * (6.0 * z * z - 2.0)
            tbar = ca_l * d1 + (cj_l * d2 * jt).sum(axis=0) + (
                cs_l * (d3 * jt * jt + d2 * st)
            ).sum(axis=0)
            jtbar = cj_l * d1 + 2.0 * cs_l * d2 * jt
            stbar = cs_l * d1
            gw, gb = gs[li]
            gw += tbar.T @ a_l
            gw += np.einsum("cmo,cmi->oi", jtbar, j_l)
            gw += np.einsum("cmo,cmi->oi", stbar, s_l)
            gb += tbar.sum(axis=0)
            w = ws[li]
            ca_l = tbar @ w
            cj_l = jtbar @ w
            cs_l = stbar @ w
        c_a = c_a + ca_l
        c_j = c_j + cj_l
        c_s = c_s + cs_l

    gw_in, gb_in = gviews[0]
    gw_in += c_a.T @ x
    gb_in += c_a.sum(axis=0)
    # lift jacobian rows are the W_in columns of the selected coordinates
    for ci, c in enumerate(coords):
        gw_in[:, c] += c_j[ci].sum(axis=0)
    return grad


def laplacian_backward(net, points, coords, cot_val, cot_lap):
    _, _, cache = laplacian_cached(net, points, coords)
    return laplacian_backward_from_cache(net, cache, cot_val, cot_lap)


# --- Adam ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(n_params, lr, beta1=0.9, beta2=0.999, eps=1e-8, dtype=np.float64):
    zeros = np.zeros(n_params, dtype=dtype)
    return AdamState(first_moment=zeros, second_moment=zeros.copy(),
                     step_count=0, lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state, params, grads):
    """One Adam update with bias correction; returns (params, state)."""
    if grads.shape != params.shape:
        raise ValueError("gradient and parameter shapes differ")
    t = state.step_count + 1
    m = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads
    v = state.beta2 * state.second_moment + (1.0 - state.beta2) * grads * grads
    mhat = m / (1.0 - state.beta1 ** t)
    vhat = v / (1.0 - state.beta2 ** t)
    new_params = params - state.lr * mhat / (np.sqrt(vhat) + state.eps)
    new_state = replace(state, first_moment=m, second_moment=v, step_count=t)
    return new_params, new_state


# --- checkpoints ----------------------------------------------------------------


def save_checkpoint(net, path):
    """Flat little-endian float64 parameter dump with a small header."""
    header = struct.pack(
        "<8s6q", _MAGIC, net.in_dim, net.out_dim, net.blocks, net.width,
        _ACT_TAGS[net.activation], net.rng_seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(net.params, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    head = struct.calcsize("<8s6q")
    magic, in_dim, out_dim, blocks, width, act_tag, seed = struct.unpack("<8s6q", raw[:head])
    if magic != _MAGIC:
        raise ValueError("not a density-network checkpoint")
    params = np.frombuffer(raw[head:], dtype="<f8").astype(np.float64)
    net = DensityNetwork(
        in_dim=in_dim, out_dim=out_dim, blocks=blocks, width=width,
        activation=_TAG_ACTS[act_tag], params=params, rng_seed=seed,
    )
    if params.shape[0] != net.n_params:
        raise ValueError("checkpoint parameter count does not match its header")
    return net
