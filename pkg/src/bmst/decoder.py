"""Iterative decoding of BMST over its normal graph.

Layer ``t`` holds the + node that ties ``c^(t)`` to ``v^(t)`` and to the
interleaved copies ``Pi_i(v^(t-i))``, the = node that shares ``v^(t)`` between
the code node and the + nodes of layers ``t..t+m``, and the code node C.
Messages are LLRs and live at the node that emits them: ``plus_out[i]``
(c-domain) is what + sends on its edge to ``v^(t-i)``; ``eq_out[i]``
(v-domain) is what = sends toward the + node of layer ``t+i``. Interleaving
happens when a neighbour pulls a message.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import channel_llr, log_likelihoods
from .messages import (
    boxplus,
    boxplus_extrinsic,
    clamp,
    from_tanh,
    hard_decision,
    point_mass_llr,
    to_tanh,
)


def node_plus_update(ch_llr, edge_llrs, absorbed=None):
    """Parity node with a channel half edge.

    Returns ``(outgoing, to_channel)``: ``outgoing[e]`` is the box-plus of the
    channel message with every edge message except ``e``; ``to_channel`` is
    the box-plus of all edge messages (and of ``absorbed``, a tanh-domain
    product of edges already folded into the channel), i.e. the message
    the node sends back toward the channel.
    """
    if not edge_llrs:
        full = np.ones_like(ch_llr) if absorbed is None else absorbed
        return [], from_tanh(full)
    tanhs = np.stack([to_tanh(e) for e in edge_llrs])
    out, full = boxplus_extrinsic(tanhs)
    ch_t = to_tanh(ch_llr)
    if absorbed is not None:
        full = full * absorbed
    return [from_tanh(o * ch_t) for o in out], from_tanh(full)


def node_equal_update(incoming):
    """Equality node: each edge gets the sum of every other incoming LLR."""
    total = np.sum(incoming, axis=0)
    return [clamp(total - x) for x in incoming]


@dataclass
class LayerState:
    t: int
    y: np.ndarray
    ch: np.ndarray
    m: int
    absorbed: np.ndarray = None
    plus_out: np.ndarray = None
    eq_out: np.ndarray = None
    eq_to_c: np.ndarray = None
    app_u: np.ndarray = None
    to_channel: np.ndarray = None

    def __post_init__(self):
        n = self.ch.size
        self.absorbed = np.ones(n)
        self.plus_out = np.zeros((self.m + 1, n))
        self.eq_out = np.zeros((self.m + 1, n))
        self.eq_to_c = np.zeros(n)
        self.to_channel = np.zeros(n)


@dataclass
class DecodeWindow:
    """Layers currently held by the decoder; edges from layers before ``start`` are absorbed."""

    cfg: object
    sigma: float
    layers: dict = field(default_factory=dict)
    start: int = 0
    pending: dict = field(default_factory=dict)

    def add_layer(self, t, y):
        lay = LayerState(t, np.asarray(y, dtype=float), channel_llr(y, self.sigma), self.cfg.m)
        self.layers[t] = lay
        for mode, msg in self.pending.pop(t, []):
            _absorb(lay, msg, mode)
        return lay


@dataclass
class DecodeResult:
    u_hat: np.ndarray
    iterations: np.ndarray
    stop_reasons: list
    app_u: list

    def bit_errors(self, u):
        return int(np.sum(self.u_hat != np.asarray(u, dtype=np.uint8)))

    def block_errors(self, u):
        return np.any(self.u_hat != np.asarray(u, dtype=np.uint8), axis=1)


def _plus_update(win, s):
    cfg = win.cfg
    lay = win.layers[s]
    slots, msgs = [], []
    if s < cfg.l:
        slots.append(0)
        msgs.append(lay.eq_out[0])
    for i, pi in enumerate(cfg.interleavers, start=1):
        src = s - i
        if src < win.start or src >= cfg.l:
            continue
        slots.append(i)
        msgs.append(win.layers[src].eq_out[i][pi.pi])
    out, lay.to_channel = node_plus_update(lay.ch, msgs, lay.absorbed)
    for slot, o in zip(slots, out):
        lay.plus_out[slot] = o


def _equal_and_code_update(win, t):
    cfg = win.cfg
    lay = win.layers[t]
    incoming = [lay.plus_out[0]]
    for i, pi in enumerate(cfg.interleavers, start=1):
        nb = win.layers.get(t + i)
        incoming.append(pi.deinterleave(nb.plus_out[i]) if nb is not None else np.zeros_like(lay.ch))
    lay.eq_to_c = clamp(np.sum(incoming, axis=0))
    ext, lay.app_u = cfg.code.siso(lay.eq_to_c)
    lay.eq_out[:] = node_equal_update([ext] + incoming)[1:]


def layer_update(win, t):
    """One pass of the layer schedule + -> Pi -> = -> C -> = -> Pi -> +."""
    _plus_update(win, t)
    if t < win.cfg.l:
        _equal_and_code_update(win, t)
        _plus_update(win, t)
    return win.layers[t]


def layer_entropy(lay, sigma):
    """``-(1/n) sum_j log P_Y(y_j)`` with ``P_Y`` mixing the + node's belief about c."""
    ll = log_likelihoods(lay.y, sigma)
    # log p0 = -log(1 + e^{-L}), log p1 = -log(1 + e^{L})
    logp0 = -np.logaddexp(0.0, -lay.to_channel)
    logp1 = -np.logaddexp(0.0, lay.to_channel)
    return -float(np.mean(np.logaddexp(logp0 + ll[:, 0], logp1 + ll[:, 1])))


def entropy_rate(layers, sigma):
    """Average of :func:`layer_entropy` over ``layers`` weighted by symbol count."""
    layers = list(layers)
    return float(np.mean([layer_entropy(lay, sigma) for lay in layers]))


def _absorb(lay, msg, mode):
    if mode == "hard":
        flip = np.asarray(msg, dtype=bool)
        lay.ch = np.where(flip, -lay.ch, lay.ch)
        lay.absorbed = np.where(flip, -lay.absorbed, lay.absorbed)
    else:
        lay.ch = boxplus(lay.ch, msg)
        lay.absorbed = lay.absorbed * to_tanh(msg)


def cancel_decided(win, t, v_hat=None, mode=None):
    """Fold block t's contribution into the channel messages of layers t+1..t+m.

    Soft mode uses the = node's message toward each later + node; hard mode
    flips the channel message wherever
    ``Pi_i(v_hat)`` is 1. Layers not yet received get the update on arrival.
    """
    cfg = win.cfg
    mode = mode or cfg.cancel_mode
    src = win.layers[t]
    for i, pi in enumerate(cfg.interleavers, start=1):
        s = t + i
        if s >= cfg.blocks:
            continue
        if mode == "hard":
            msg = np.asarray(v_hat, dtype=np.uint8)[pi.pi]
        else:
            msg = src.eq_out[i][pi.pi]
        if s in win.layers:
            _absorb(win.layers[s], msg, mode)
        else:
            win.pending.setdefault(s, []).append((mode, msg))
    win.start = t + 1
    return win


def crc_stop_and_list(cfg, layer):
    """List-decode a block whose iterations ran out; return ``(decided, u_siso)``.

    The inner code's list decoder runs on the = node's message toward C and
    the first candidate passing the CRC wins. Without one, the rank-1
    candidate is returned with ``decided=False``.
    """
    cands = cfg.code.list_decode(layer.eq_to_c, max(cfg.list_size, 1))
    for u, _ in cands:
        if cfg.code.crc_ok(u):
            return True, u
    return False, cands[0][0]


def _trace(trace, **rec):
    if trace is not None:
        trace.append(rec)


def decode_forward_backward(cfg, y_blocks, sigma, trace=None):
    """Iterate full forward and backward sweeps over all L + m layers."""
    y_blocks = list(y_blocks)
    if len(y_blocks) != cfg.blocks:
        raise ValueError(f"expected {cfg.blocks} received blocks, got {len(y_blocks)}")
    win = DecodeWindow(cfg, sigma)
    for t, y in enumerate(y_blocks):
        win.add_layer(t, y)
    order = list(range(cfg.blocks))
    h_prev = 0.0
    reason = "i_max"
    it = 0
    for it in range(1, cfg.i_max + 1):
        for t in order:
            layer_update(win, t)
        for t in reversed(order):
            layer_update(win, t)
        u_siso = [hard_decision(win.layers[t].app_u) for t in range(cfg.l)]
        h = entropy_rate(win.layers.values(), sigma)
        _trace(trace, block=None, iteration=it, h=h)
        if cfg.stop_rule == "entropy" and abs(h - h_prev) <= cfg.epsilon:
            reason = "entropy"
            break
        if cfg.stop_rule == "crc" and all(cfg.code.crc_ok(u) for u in u_siso):
            reason = "crc"
            break
        h_prev = h
    reasons = [reason] * cfg.l
    if reason == "i_max" and cfg.stop_rule == "crc" and cfg.list_size:
        for t in range(cfg.l):
            if not cfg.code.crc_ok(u_siso[t]):
                ok, u_siso[t] = crc_stop_and_list(cfg, win.layers[t])
                reasons[t] = "list" if ok else "i_max"
    u_hat = np.array([cfg.code.data_bits(u) for u in u_siso], dtype=np.uint8)
    app = [win.layers[t].app_u.copy() for t in range(cfg.l)]
    return DecodeResult(u_hat, np.full(cfg.l, it), reasons, app)


def decode_sliding_window(cfg, y_stream, sigma, trace=None):
    """Decode block t from the window of layers t..t+d, then cancel and slide.

    ``y_stream`` is consumed lazily: block t is decided after exactly
    ``min(t + d + 1, L + m)`` received blocks have been read.
    """
    stream = iter(y_stream)
    win = DecodeWindow(cfg, sigma)
    total = cfg.blocks
    received = 0

    def receive():
        nonlocal received
        try:
            y = next(stream)
        except StopIteration:
            raise ValueError(f"stream ended after {received} of {total} blocks") from None
        win.add_layer(received, y)
        received += 1

    for _ in range(min(cfg.d, total)):
        receive()
    u_hat = np.zeros((cfg.l, cfg.k), dtype=np.uint8)
    iters = np.zeros(cfg.l, dtype=int)
    reasons, apps = [], []
    for t in range(cfg.l):
        if t + cfg.d <= total - 1:
            receive()
        hi = min(cfg.d, total - 1 - t)
        h_prev = 0.0
        reason = "i_max"
        for it in range(1, cfg.i_max + 1):
            for i in range(hi + 1):
                layer_update(win, t + i)
            for i in range(hi, -1, -1):
                layer_update(win, t + i)
            lay = win.layers[t]
            u_siso = hard_decision(lay.app_u)
            if cfg.stop_rule == "entropy":
                h = layer_entropy(lay, sigma)
                _trace(trace, block=t, iteration=it, h=h, received=received)
                if abs(h - h_prev) <= cfg.epsilon:
                    reason = "entropy"
                    break
                h_prev = h
            elif cfg.stop_rule == "crc":
                _trace(trace, block=t, iteration=it, received=received)
                if cfg.code.crc_ok(u_siso):
                    reason = "crc"
                    break
            else:
                _trace(trace, block=t, iteration=it, received=received)
        lay = win.layers[t]
        mode = cfg.cancel_mode
        if reason == "i_max" and cfg.stop_rule == "crc" and cfg.list_size:
            ok, u_siso = crc_stop_and_list(cfg, lay)
            if ok:
                reason = "list"
                mode = "hard"  # the CRC-checked list output outranks the soft messages
        v_hat = cfg.code.reencode(u_siso) if (mode == "hard" and cfg.m) else None
        cancel_decided(win, t, v_hat, mode)
        del win.layers[t]
        u_hat[t] = cfg.code.data_bits(u_siso)
        iters[t] = it
        reasons.append(reason)
        apps.append(lay.app_u.copy())
        _trace(trace, block=t, stop=reason, received=received)
    return DecodeResult(u_hat, iters, reasons, apps)
