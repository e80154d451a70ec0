"""Weight enumerators of basic and BMST codes, spectra, and BER bounds.

Bivariate polynomials ``sum A_ij X^i Y^j`` (i = input weight, j = output
weight) are stored as dense float arrays truncated at ``(i_max, j_max)``.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np
from scipy.signal import convolve2d
from scipy.stats import hypergeom

from .channel import q_function
from .codes import ConvCode, ProductCode


class TruncationError(RuntimeError):
    pass


@dataclass
class BiPoly:
    coef: np.ndarray
    dropped: float = 0.0

    def __post_init__(self):
        self.coef = np.atleast_2d(np.asarray(self.coef, dtype=float))

    @classmethod
    def zeros(cls, i_max, j_max):
        return cls(np.zeros((i_max + 1, j_max + 1)))

    @classmethod
    def from_terms(cls, terms, i_max=None, j_max=None):
        """Build from ``{(i, j): coefficient}``."""
        i_max = max((i for i, _ in terms), default=0) if i_max is None else i_max
        j_max = max((j for _, j in terms), default=0) if j_max is None else j_max
        p = cls.zeros(i_max, j_max)
        for (i, j), c in terms.items():
            if i <= i_max and j <= j_max:
                p.coef[i, j] += c
            else:
                p.dropped += c
        return p

    @property
    def i_max(self):
        return self.coef.shape[0] - 1

    @property
    def j_max(self):
        return self.coef.shape[1] - 1

    def __getitem__(self, ij):
        i, j = ij
        if i > self.i_max or j > self.j_max:
            return 0.0
        return float(self.coef[i, j])

    def terms(self):
        return {(int(i), int(j)): float(self.coef[i, j]) for i, j in zip(*np.nonzero(self.coef))}

    def total(self):
        return float(self.coef.sum())

    def truncate(self, i_max, j_max):
        kept = self.coef[: i_max + 1, : j_max + 1]
        out = BiPoly.zeros(i_max, j_max)
        out.coef[: kept.shape[0], : kept.shape[1]] = kept
        out.dropped = self.dropped + float(self.coef.sum() - kept.sum())
        return out

    def __add__(self, other):
        i_max, j_max = max(self.i_max, other.i_max), max(self.j_max, other.j_max)
        out = BiPoly.zeros(i_max, j_max)
        out.coef[: self.i_max + 1, : self.j_max + 1] += self.coef
        out.coef[: other.i_max + 1, : other.j_max + 1] += other.coef
        out.dropped = self.dropped + other.dropped
        return out

    def mul(self, other, i_max=None, j_max=None):
        i_max = self.i_max + other.i_max if i_max is None else i_max
        j_max = self.j_max + other.j_max if j_max is None else j_max
        full = BiPoly(convolve2d(self.coef, other.coef))
        return full.truncate(i_max, j_max)

    __mul__ = mul

    def power(self, e, i_max=None, j_max=None):
        i_max = self.i_max * e if i_max is None else i_max
        j_max = self.j_max * e if j_max is None else j_max
        out = BiPoly(np.ones((1, 1))).truncate(i_max, j_max)
        for _ in range(e):
            out = out.mul(self, i_max, j_max)
        return out


# -- basic code IOWEF -----------------------------------------------------------


def _enumerate_iowef(encode, k, n, max_k=24):
    if k > max_k:
        raise ValueError(f"cannot enumerate 2^{k} inputs; k must be <= {max_k}")
    coef = np.zeros((k + 1, n + 1))
    for bits in itertools.product((0, 1), repeat=k):
        u = np.array(bits, dtype=np.uint8)
        coef[u.sum(), int(encode(u).sum())] += 1
    return BiPoly(coef)


def _unit_iowef(unit):
    u = np.array(list(itertools.product((0, 1), repeat=unit.k)), dtype=np.uint8)
    v = unit.encode(u)
    coef = np.zeros((unit.k + 1, unit.n + 1))
    np.add.at(coef, (u.sum(axis=1), v.sum(axis=1)), 1)
    return BiPoly(coef)


def _conv_iowef(code):
    """Forward recursion over the trellis with polynomial state metrics."""
    tr = code.trellis
    k, n = code.k_inner, code.n
    S = tr.states
    alpha = np.zeros((S, k + 1, n + 1))
    alpha[0, 0, 0] = 1.0
    out_w = tr.out_bits.sum(axis=2)
    for t in range(k + tr.nu):
        nxt = np.zeros_like(alpha)
        for s in range(S):
            if not alpha[s].any():
                continue
            for b in ((0, 1) if t < k else (int(tr.tail_input[s]),)):
                di = b if t < k else 0
                dj = int(out_w[s, b])
                ns = tr.next_state[s, b]
                nxt[ns, di:, dj:] += alpha[s, : k + 1 - di, : n + 1 - dj]
        alpha = nxt
    return BiPoly(alpha[0])


def iowef_basic(code):
    """Exact input-output weight enumerator ``B(X, Y)`` of a basic code."""
    if isinstance(code, ProductCode):
        unit = _unit_iowef(code.unit)
        return unit.power(code.copies)
    if isinstance(code, ConvCode):
        if code.has_crc:
            return _enumerate_iowef(code.encode, code.k, code.n)
        return _conv_iowef(code)
    return _enumerate_iowef(code.encode, code.k, code.n)


# -- ensemble IOWEF of BMST, m = 1 ------------------------------------------------


def overlap_pmf(n, p, q):
    """Weights ``p + q - 2r`` of the sum of a weight-p and a random weight-q vector.

    Returns ``{weight: probability}`` with the hypergeometric law
    ``C(p, r) C(n-p, q-r) / C(n, q)``.
    """
    if not (0 <= p <= n and 0 <= q <= n):
        raise ValueError(f"weights p={p}, q={q} must lie in [0, {n}]")
    r = np.arange(max(0, p + q - n), min(p, q) + 1)
    probs = hypergeom.pmf(r, n, p, q)
    return {int(p + q - 2 * ri): float(pr) for ri, pr in zip(r, probs)}


def branch_metric(p, q, b, n=None):
    """Trellis branch label ``gamma_{p->q}`` for the m = 1 ensemble (n defaults to B's Y cap)."""
    n = b.j_max if n is None else n
    col = b.coef[:, q] if q <= b.j_max else np.zeros(b.i_max + 1)
    terms = {}
    for w, pr in overlap_pmf(n, p, q).items():
        for i in np.nonzero(col)[0]:
            terms[(int(i), w)] = terms.get((int(i), w), 0.0) + pr * col[i]
    return BiPoly.from_terms(terms, b.i_max, 2 * n)


def default_caps(code, l, m=1):
    d_min = code.d_min or 1
    return code.k * l, 4 * d_min * (m + 1)


def iowef_bmst_m1(b, n, l, caps=None, tol=None):
    """Ensemble IOWEF ``A(X, Y)`` of BMST with memory 1 and L data blocks.

    Interleavers are uniform and independent per transmitted block, so the
    trellis state is the weight of the previous basic codeword. Terms with
    output weight above ``j_max`` are dropped (states above ``j_max`` can only
    feed dropped terms); ``A.dropped`` reports the removed coefficient mass,
    and ``tol`` turns an excess over it into :class:`TruncationError`.
    """
    k = b.i_max
    if caps is None:
        caps = (k * l, n * (l + 1))
    i_cap, j_cap = caps
    n_states = min(n, j_cap) + 1
    bq = np.zeros((b.i_max + 1, n + 1))
    bq[:, : min(n, b.j_max) + 1] = b.coef[:, : n + 1]
    # W[p, q, w]: probability that the overlap gives output weight w
    W = np.zeros((n_states, n_states, j_cap + 1))
    for p in range(n_states):
        for q in range(n_states):
            for w, pr in overlap_pmf(n, p, q).items():
                if w <= j_cap:
                    W[p, q, w] += pr
    alpha = np.zeros((n_states, i_cap + 1, j_cap + 1))
    for p in range(n_states):
        ii = min(b.i_max, i_cap)
        alpha[p, : ii + 1, p] = bq[: ii + 1, p]
    for _ in range(l):
        beta = np.zeros_like(alpha)
        for w in range(j_cap + 1):
            if not W[:, :, w].any():
                continue
            beta[:, :, w:] += np.tensordot(W[:, :, w], alpha[:, :, : j_cap + 1 - w], axes=([0], [0]))
        nxt = np.zeros_like(alpha)
        for q in range(n_states):
            for a in np.nonzero(bq[:, q])[0]:
                if a > i_cap:
                    continue
                nxt[q, a:, :] += bq[a, q] * beta[q, : i_cap + 1 - a, :]
        alpha = nxt
    a_poly = BiPoly(alpha[0])
    total = float(b.total()) ** l
    a_poly.dropped = max(0.0, total - a_poly.total()) if math.isfinite(total) else math.inf
    if tol is not None and a_poly.dropped > tol:
        raise TruncationError(f"dropped coefficient mass {a_poly.dropped:g} exceeds {tol:g}")
    return a_poly


def spectrum_dj(a, l, k):
    """``D_j = sum_i (i / (L k)) A_ij`` as ``{j: D_j}`` over nonzero entries (D_0 = 0)."""
    i = np.arange(a.i_max + 1)[:, None]
    d = (i / (l * k) * a.coef).sum(axis=0)
    return {int(j): float(d[j]) for j in np.nonzero(d)[0]}


def independent_spectrum(b, l, j_max=None):
    """Spectrum of sending L basic codewords plus one zero block, from ``B(X, Y)^L``."""
    k = b.i_max
    j_cap = b.j_max * l if j_max is None else j_max
    return spectrum_dj(b.power(l, k * l, j_cap), l, k)


def union_bound_ber(dj, rate, ebn0_db):
    """``sum_j D_j Q(sqrt(2 j R Eb/N0))`` (plain union bound on the bit error rate)."""
    g = 10.0 ** (np.asarray(ebn0_db, dtype=float) / 10.0)
    out = np.zeros_like(g)
    for j, d in dj.items():
        if j > 0:
            out = out + d * q_function(np.sqrt(2.0 * j * rate * g))
    return out if out.ndim else float(out)


# -- BER curves and the genie-aided bound ----------------------------------------


@dataclass
class BerCurve:
    """``(gamma_db, ber)`` points, sorted by gamma; interpolation is linear in log10(ber)."""

    gamma_db: np.ndarray
    ber: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        g = np.asarray(self.gamma_db, dtype=float)
        b = np.asarray(self.ber, dtype=float)
        if g.shape != b.shape or g.ndim != 1 or g.size == 0:
            raise ValueError("a BER curve needs matching, non-empty 1-D arrays")
        order = np.argsort(g)
        self.gamma_db, self.ber = g[order], b[order]

    def ber_at(self, gamma):
        pos = self.ber > 0
        return 10.0 ** np.interp(gamma, self.gamma_db[pos], np.log10(self.ber[pos]))

    def gamma_at(self, target):
        """Smallest-gamma crossing of ``target`` BER (linear in log10 BER), or None."""
        lt = np.log10(target)
        g, b = self.gamma_db, self.ber
        for a in range(len(g) - 1):
            if b[a] >= target > b[a + 1] or (b[a] > target >= b[a + 1]):
                la = np.log10(b[a])
                lb = np.log10(b[a + 1]) if b[a + 1] > 0 else la - 10.0
                return float(g[a] + (lt - la) * (g[a + 1] - g[a]) / (lb - la))
        return None


def genie_shift_db(m, l):
    """``10 log10(m + 1) - 10 log10(1 + m / L)``; ``l=math.inf`` gives the ceiling."""
    loss = 0.0 if math.isinf(l) else 10.0 * math.log10(1.0 + m / l)
    return 10.0 * math.log10(m + 1) - loss


def genie_bound(f_o, m, l):
    """Lower bound ``f_o(gamma + shift)``: the basic-code curve moved left by the shift."""
    return BerCurve(f_o.gamma_db - genie_shift_db(m, l), f_o.ber.copy(), label=f"genie m={m}")
