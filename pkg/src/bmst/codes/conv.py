"""Terminated rate-1/n convolutional codes, BCJR and list Viterbi decoding.

An encoder is a register ``w`` with ``w_t = u_t + sum_{i>=1} f_i w_{t-i}``
(``f = 1`` for feedforward codes) and outputs ``o_l = sum_i g_{l,i} w_{t-i}``.
A recursive systematic code ``[1, g/f]`` is the generator pair ``(f, g)``
with feedback ``f``. Termination appends ``nu`` steps whose input drives the
register back to the zero state.
"""

from dataclasses import dataclass
import heapq
import itertools

import numpy as np
from numba import njit

from ..messages import clamp
from .block import BasicCode
from .crc import CRC_LEN, crc_attach, crc_check


def octal_to_poly(text, nu):
    """Octal generator (MSB = coefficient of D^0) to a coefficient list of length nu+1."""
    value = int(str(text), 8)
    width = nu + 1
    if value >= 1 << width:
        raise ValueError(f"generator {text} does not fit memory {nu}")
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


@dataclass(frozen=True)
class Trellis:
    next_state: np.ndarray  # (S, 2)
    out_bits: np.ndarray  # (S, 2, n_out)
    tail_input: np.ndarray  # (S,)
    nu: int

    @property
    def states(self):
        return self.next_state.shape[0]

    @property
    def n_out(self):
        return self.out_bits.shape[2]


def build_trellis(gens, feedback=None):
    nu = len(gens[0]) - 1
    if any(len(g) != nu + 1 for g in gens):
        raise ValueError("all generators must have the same memory")
    f = [1] + [0] * nu if feedback is None else list(feedback)
    if len(f) != nu + 1 or f[0] != 1:
        raise ValueError("feedback polynomial must have constant term 1 and match the memory")
    S = 1 << nu
    next_state = np.zeros((S, 2), dtype=np.int64)
    out_bits = np.zeros((S, 2, len(gens)), dtype=np.uint8)
    tail = np.zeros(S, dtype=np.int64)
    for s in range(S):
        past = [(s >> (i - 1)) & 1 for i in range(1, nu + 1)]  # w_{t-1} .. w_{t-nu}
        fb = sum(f[i] * past[i - 1] for i in range(1, nu + 1)) & 1
        tail[s] = fb
        for u in (0, 1):
            w = u ^ fb
            reg = [w] + past
            for l, g in enumerate(gens):
                out_bits[s, u, l] = sum(gi * ri for gi, ri in zip(g, reg)) & 1
            next_state[s, u] = ((s << 1) | w) & (S - 1)
    return Trellis(next_state, out_bits, tail, nu)


@njit(cache=True)
def _encode(u, next_state, out_bits, tail_input, nu):
    k = u.size
    n_out = out_bits.shape[2]
    out = np.empty((k + nu) * n_out, dtype=np.uint8)
    s = 0
    for t in range(k + nu):
        b = u[t] if t < k else tail_input[s]
        for o in range(n_out):
            out[t * n_out + o] = out_bits[s, b, o]
        s = next_state[s, b]
    return out


@njit(cache=True)
def _logadd(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@njit(cache=True)
def _branch_metrics(llr, out_bits, steps):
    S = out_bits.shape[0]
    n_out = out_bits.shape[2]
    g = np.zeros((steps, S, 2))
    for t in range(steps):
        for s in range(S):
            for b in range(2):
                acc = 0.0
                for o in range(n_out):
                    x = 0.5 * llr[t * n_out + o]
                    acc += x if out_bits[s, b, o] == 0 else -x
                g[t, s, b] = acc
    return g


@njit(cache=True)
def _bcjr(llr, next_state, out_bits, tail_input, k, nu):
    # scaled probability domain; every alpha/beta row is renormalized
    S = next_state.shape[0]
    n_out = out_bits.shape[2]
    steps = k + nu
    e = np.empty((steps * n_out, 2))
    for j in range(steps * n_out):
        x = 0.5 * llr[j]
        e[j, 0] = np.exp(x)
        e[j, 1] = np.exp(-x)
    gam = np.empty((steps, S, 2))
    for t in range(steps):
        for s in range(S):
            for b in range(2):
                acc = 1.0
                for o in range(n_out):
                    acc *= e[t * n_out + o, out_bits[s, b, o]]
                gam[t, s, b] = acc
    alpha = np.zeros((steps + 1, S))
    beta = np.zeros((steps + 1, S))
    alpha[0, 0] = 1.0
    for t in range(steps):
        tot = 0.0
        for s in range(S):
            a = alpha[t, s]
            if a == 0.0:
                continue
            for b in range(2):
                if t >= k and b != tail_input[s]:
                    continue
                v = a * gam[t, s, b]
                alpha[t + 1, next_state[s, b]] += v
                tot += v
        for s in range(S):
            alpha[t + 1, s] /= tot
    beta[steps, 0] = 1.0
    for t in range(steps - 1, -1, -1):
        tot = 0.0
        for s in range(S):
            acc = 0.0
            for b in range(2):
                if t >= k and b != tail_input[s]:
                    continue
                acc += gam[t, s, b] * beta[t + 1, next_state[s, b]]
            beta[t, s] = acc
            tot += acc
        for s in range(S):
            beta[t, s] /= tot
    app = np.zeros(k)
    ext = np.zeros(steps * n_out)
    tiny = 1e-300
    num_v = np.zeros((n_out, 2))
    for t in range(steps):
        num_u0 = 0.0
        num_u1 = 0.0
        num_v[:, :] = 0.0
        for s in range(S):
            a = alpha[t, s]
            if a == 0.0:
                continue
            for b in range(2):
                if t >= k and b != tail_input[s]:
                    continue
                pa = a * beta[t + 1, next_state[s, b]]
                if pa == 0.0:
                    continue
                full = pa * gam[t, s, b]
                if b == 0:
                    num_u0 += full
                else:
                    num_u1 += full
                for o in range(n_out):
                    bit = out_bits[s, b, o]
                    num_v[o, bit] += full / e[t * n_out + o, bit]
        if t < k:
            app[t] = np.log(num_u0 + tiny) - np.log(num_u1 + tiny)
        for o in range(n_out):
            ext[t * n_out + o] = np.log(num_v[o, 0] + tiny) - np.log(num_v[o, 1] + tiny)
    return ext, app


@njit(cache=True)
def _best_completion(llr, next_state, out_bits, tail_input, k, nu):
    """Viterbi metrics run backwards: best metric from (t, s) to the end."""
    S = next_state.shape[0]
    steps = k + nu
    g = _branch_metrics(llr, out_bits, steps)
    best = np.full((steps + 1, S), -np.inf)
    best[steps, 0] = 0.0
    for t in range(steps - 1, -1, -1):
        for s in range(S):
            acc = -np.inf
            for b in range(2):
                if t >= k and b != tail_input[s]:
                    continue
                acc = max(acc, g[t, s, b] + best[t + 1, next_state[s, b]])
            best[t, s] = acc
    return best, g


def min_weight(trellis, k, horizon=64):
    """Minimum nonzero codeword weight of the terminated code (exact for k <= horizon).

    Longer blocks reach the same value, since the lightest codeword is a single
    short detour from the zero state.
    """
    k = min(k, horizon)
    S = trellis.states
    inf = 1 << 30
    w = trellis.out_bits.sum(axis=2)
    zero, div = 0, [inf] * S  # weight of the all-zero path; best diverged path per state
    for t in range(k + trellis.nu):
        nxt = [inf] * S
        for s in range(S):
            for b in ((0, 1) if t < k else (int(trellis.tail_input[s]),)):
                ns = trellis.next_state[s, b]
                if div[s] < inf:
                    nxt[ns] = min(nxt[ns], div[s] + int(w[s, b]))
                if s == 0 and b == 1 and t < k:
                    nxt[ns] = min(nxt[ns], zero + int(w[0, 1]))
        div = nxt
    return div[0]


def bcjr(trellis, llr, k):
    """Exact symbol-wise MAP on a zero-terminated trellis (log domain).

    Returns ``(ext_v, app_u)`` LLRs; ``ext_v`` excludes each bit's own input.
    """
    llr = clamp(np.ascontiguousarray(llr, dtype=float))
    expected = (k + trellis.nu) * trellis.n_out
    if llr.size != expected:
        raise ValueError(f"terminated trellis needs {expected} messages, got {llr.size}")
    ext, app = _bcjr(llr, trellis.next_state, trellis.out_bits, trellis.tail_input, k, trellis.nu)
    return clamp(ext), clamp(app)


def list_viterbi(trellis, llr, k, list_size):
    """The ``list_size`` most likely (u, v) paths, best first.

    Best-first search over path prefixes ranked by metric-so-far plus the
    exact best completion (a backward Viterbi pass), so complete paths leave
    the queue in order of likelihood. Rank 1 is the Viterbi decision.
    """
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    llr = clamp(np.ascontiguousarray(llr, dtype=float))
    nu = trellis.nu
    steps = k + nu
    best, g = _best_completion(llr, trellis.next_state, trellis.out_bits, trellis.tail_input, k, nu)
    ns_tab = trellis.next_state
    tail = trellis.tail_input
    counter = itertools.count()
    # entries: (-priority, tie, t, state, metric, node); node = (bit, parent)
    heap = [(-best[0, 0], next(counter), 0, 0, 0.0, None)]
    found = []
    while heap and len(found) < list_size:
        _, _, t, s, metric, node = heapq.heappop(heap)
        if t == steps:
            bits = []
            while node is not None:
                bits.append(node[0])
                node = node[1]
            u_path = np.array(bits[::-1], dtype=np.uint8)
            u = u_path[:k]
            v = _encode(u, ns_tab, trellis.out_bits, tail, nu)
            found.append((u, v, metric))
            continue
        choices = (0, 1) if t < k else (int(tail[s]),)
        for b in choices:
            nxt = int(ns_tab[s, b])
            m = metric + g[t, s, b]
            rest = best[t + 1, nxt]
            if rest == -np.inf:
                continue
            heapq.heappush(heap, (-(m + rest), next(counter), t + 1, nxt, m, (b, node)))
    return [(u, v) for u, v, _ in found]


class ConvCode(BasicCode):
    """Zero-terminated rate-1/n_out convolutional code with k input bits per block."""

    kind = "conv"

    def __init__(self, gens, k, feedback=None, name=None):
        if k < 1:
            raise ValueError("k must be positive")
        self.gens = [list(g) for g in gens]
        self.feedback = None if feedback is None else list(feedback)
        self.trellis = build_trellis(self.gens, self.feedback)
        self.nu = self.trellis.nu
        self.n_out = len(gens)
        self.k_inner = k
        self.k = k
        self.n = (k + self.nu) * self.n_out
        self.name = name or "conv"
        self.d_min = min_weight(self.trellis, k)

    def __repr__(self):
        return f"ConvCode({self.name}, k={self.k}, n={self.n})"

    def _encode_inner(self, u):
        tr = self.trellis
        return _encode(np.ascontiguousarray(u, dtype=np.uint8), tr.next_state, tr.out_bits, tr.tail_input, tr.nu)

    def encode(self, u):
        return self._encode_inner(self._check_u(u))

    def siso(self, llr):
        return bcjr(self.trellis, self._check_llr(llr), self.k_inner)

    def list_decode(self, llr, list_size):
        return list_viterbi(self.trellis, self._check_llr(llr), self.k_inner, list_size)


class CRCConvCode(ConvCode):
    """32-bit CRC outer code inside a terminated convolutional inner code.

    SISO decoding ignores the outer constraint; the CRC is checked on the
    hard-decided inner input.
    """

    kind = "crc-conv"
    has_crc = True

    def __init__(self, gens, k, feedback=None, name=None):
        super().__init__(gens, k + CRC_LEN, feedback, name)
        self.k = k

    @property
    def k_siso(self):
        return self.k_inner

    def encode(self, u):
        return self._encode_inner(crc_attach(self._check_u(u)))

    def reencode(self, u_siso):
        return self._encode_inner(u_siso)

    def crc_ok(self, u_siso):
        return crc_check(u_siso)
