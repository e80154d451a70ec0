"""F2 vectors and matrices, interleavers, and the BMST matrices.

Bit blocks are plain ``uint8`` numpy arrays holding 0/1. Matrices are only
materialized for verification and analysis; the encoder never builds them.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from numba import njit


def as_bits(x, length=None):
    """Validate and return ``x`` as a 1-D uint8 0/1 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"bit block must be 1-D, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit block entries must be 0 or 1")
    arr = arr.astype(np.uint8)
    if length is not None and arr.size != length:
        raise ValueError(f"bit block has length {arr.size}, expected {length}")
    return arr


class GF2Matrix:
    """Dense matrix over F2 (rows x cols), rank by elimination on packed rows."""

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 2:
            raise ValueError("GF2Matrix needs a 2-D array")
        if data.size and (data.min() < 0 or data.max() > 1):
            raise ValueError("GF2Matrix entries must be 0 or 1")
        self.data = data.astype(np.uint8)
        self.data.setflags(write=False)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def T(self):
        return GF2Matrix(self.data.T)

    def __matmul__(self, other):
        if isinstance(other, GF2Matrix):
            other = other.data
        prod = self.data.astype(np.int64) @ np.asarray(other).astype(np.int64)
        return GF2Matrix(prod & 1)

    def __add__(self, other):
        return GF2Matrix(self.data ^ other.data)

    def __eq__(self, other):
        return isinstance(other, GF2Matrix) and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"GF2Matrix({self.rows}x{self.cols})"

    def _packed(self):
        words = -(-self.cols // 64) or 1
        padded = np.zeros((self.rows, words * 64), dtype=np.uint8)
        padded[:, : self.cols] = self.data
        return np.packbits(padded, axis=1).view(">u8").astype(np.uint64)

    def rank(self):
        rows = self._packed()
        nrows, nwords = rows.shape
        r = 0
        for col in range(self.cols):
            if r == nrows:
                break
            w, bit = divmod(col, 64)
            mask = np.uint64(1 << (63 - bit))
            hits = np.nonzero(rows[r:, w] & mask)[0]
            if hits.size == 0:
                continue
            piv = r + hits[0]
            if piv != r:
                rows[[r, piv]] = rows[[piv, r]]
            below = r + 1 + np.nonzero(rows[r + 1 :, w] & mask)[0]
            rows[below] ^= rows[r]
            r += 1
        return r

    def nullspace(self):
        """Basis (as rows) of ``{x : M x^T = 0}``."""
        a = self.data.copy()
        m, n = a.shape
        pivots = []
        r = 0
        for c in range(n):
            if r == m:
                break
            hits = np.nonzero(a[r:, c])[0]
            if hits.size == 0:
                continue
            piv = r + hits[0]
            a[[r, piv]] = a[[piv, r]]
            others = np.nonzero(a[:, c])[0]
            others = others[others != r]
            a[others] ^= a[r]
            pivots.append(c)
            r += 1
        free = [c for c in range(n) if c not in set(pivots)]
        basis = np.zeros((len(free), n), dtype=np.uint8)
        for b, f in enumerate(free):
            basis[b, f] = 1
            for i, p in enumerate(pivots):
                basis[b, p] = a[i, f]
        return GF2Matrix(basis)


def gf2_mat_vec(m, x):
    """Row vector times matrix over F2: ``x . m``."""
    x = as_bits(x)
    if x.size != m.rows:
        raise ValueError(f"vector of length {x.size} cannot multiply a {m.rows}x{m.cols} matrix")
    return ((x.astype(np.int64) @ m.data.astype(np.int64)) & 1).astype(np.uint8)


def block_diag(blocks):
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols), dtype=np.uint8)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.data
        r += b.rows
        c += b.cols
    return GF2Matrix(out)


# -- interleavers -------------------------------------------------------------


def default_spread(n):
    """``floor(sqrt(n / 4))``."""
    return math.isqrt(n // 4)


class InterleaverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Interleaver:
    """Permutation in gather form: ``out[j] = in[pi[j]]``."""

    pi: np.ndarray = field(repr=False)
    s: int = 0
    seed: int = 0

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.int64)
        if pi.ndim != 1 or not np.array_equal(np.sort(pi), np.arange(pi.size)):
            raise ValueError("pi must be a permutation of 0..n-1")
        pi.setflags(write=False)
        inv = np.empty_like(pi)
        inv[pi] = np.arange(pi.size)
        inv.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "_inv", inv)

    @property
    def n(self):
        return self.pi.size

    @property
    def inverse(self):
        return self._inv

    def __call__(self, x):
        return apply_interleaver(self, x)

    def deinterleave(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise ValueError(f"length {x.shape[-1]} does not match interleaver size {self.n}")
        return x[..., self._inv]

    def matrix(self):
        """Permutation matrix P with ``v . P == apply_interleaver(self, v)``."""
        p = np.zeros((self.n, self.n), dtype=np.uint8)
        p[self.pi, np.arange(self.n)] = 1
        return GF2Matrix(p)

    def spread_ok(self, s=None):
        s = self.s if s is None else s
        pi = self.pi
        for lag in range(1, min(s, self.n - 1) + 1):
            if np.any(np.abs(pi[lag:] - pi[:-lag]) <= s):
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, Interleaver)
            and np.array_equal(self.pi, other.pi)
            and (self.s, self.seed) == (other.s, other.seed)
        )

    def __hash__(self):
        return hash((self.pi.tobytes(), self.s, self.seed))

    def dumps(self):
        return f"{self.n} {self.s} {self.seed}\n" + " ".join(map(str, self.pi.tolist())) + "\n"

    @classmethod
    def loads(cls, text):
        lines = text.strip().splitlines()
        if len(lines) < 1:
            raise ValueError("empty interleaver file")
        n, s, seed = (int(v) for v in lines[0].split())
        pi = [int(v) for v in lines[1].split()] if len(lines) > 1 else []
        if len(pi) != n:
            raise ValueError(f"header says n={n} but {len(pi)} entries follow")
        return cls(np.array(pi, dtype=np.int64), s, seed)


def identity_interleaver(n):
    return Interleaver(np.arange(n), 0, 0)


def apply_interleaver(pi, v):
    v = np.asarray(v)
    if v.shape[-1] != pi.n:
        raise ValueError(f"length {v.shape[-1]} does not match interleaver size {pi.n}")
    return v[..., pi.pi]


@njit(cache=True)
def _fits(pi, pos, val, lo, hi, s):
    for q in range(lo, hi):
        if q != pos and abs(val - pi[q]) <= s:
            return False
    return True


@njit(cache=True)
def _s_random_fill(pool, s):
    n = pool.size
    pi = np.empty(n, dtype=np.int64)
    left = n
    for j in range(n):
        lo = max(0, j - s)
        found = -1
        for idx in range(left):
            if _fits(pi, j, pool[idx], lo, j, s):
                found = idx
                break
        if found >= 0:
            pi[j] = pool[found]
        else:
            # swap repair: a leftover candidate takes an earlier slot q whose
            # old value fits at j
            done = False
            for idx in range(left):
                cand = pool[idx]
                for q in range(j - s - 1, -1, -1):
                    if _fits(pi, q, cand, max(0, q - s), min(j, q + s + 1), s) and _fits(
                        pi, j, pi[q], lo, j, s
                    ):
                        pi[j] = pi[q]
                        pi[q] = cand
                        found = idx
                        done = True
                        break
                if done:
                    break
            if not done:
                return pi, False
        left -= 1
        pool[found] = pool[left]
    return pi, True


def gen_s_random(n, s=None, seed=0, max_restarts=1000):
    """S-random permutation: ``|i - j| <= s`` implies ``|pi[i] - pi[j]| > s``.

    Positions are filled in order; each takes the first candidate (from a
    shuffled pool) that keeps the spread against the previous ``s`` entries.
    When none fits, a leftover candidate is swapped into an earlier slot; if
    that also fails the whole draw restarts with a fresh shuffle.
    """
    if n < 1:
        raise ValueError("interleaver length must be positive")
    if s is None:
        s = default_spread(n)
    if s < 0:
        raise ValueError("spread must be nonnegative")
    rng = np.random.default_rng(seed)
    if s == 0:
        return Interleaver(rng.permutation(n), 0, seed)
    for _ in range(max_restarts):
        pi, ok = _s_random_fill(rng.permutation(n).astype(np.int64), s)
        if ok:
            return Interleaver(pi, s, seed)
    raise InterleaverError(f"no S-random permutation found for n={n}, s={s} after {max_restarts} restarts")


def make_interleavers(n, m, seed=0, s=None):
    """The m fixed interleavers of one BMST system, seeded ``seed + i``."""
    return [gen_s_random(n, s, seed + i) for i in range(m)]


# -- BMST matrices --------------------------------------------------------------


def build_generator_bmst(g, pis, l):
    """``diag(G, ..., G) . Pi`` with Pi the block banded [I Pi_1 ... Pi_m] matrix."""
    k, n = g.shape
    m = len(pis)
    for p in pis:
        if p.n != n:
            raise ValueError(f"interleaver length {p.n} != code length {n}")
    blocks = [g.data] + [(g @ p.matrix()).data for p in pis]
    out = np.zeros((k * l, n * (l + m)), dtype=np.uint8)
    for t in range(l):
        for i, blk in enumerate(blocks):
            out[t * k : (t + 1) * k, (t + i) * n : (t + i + 1) * n] = blk
    return GF2Matrix(out)


def p_matrices(pis, count):
    """``P_0 = I`` and ``P_t = sum_{l=1..m} P_{t-l} Pi_l`` for t < count."""
    n = pis[0].n if pis else None
    if n is None:
        raise ValueError("need at least one interleaver to size the recursion")
    mats = [GF2Matrix.identity(n)]
    pms = [p.matrix() for p in pis]
    for t in range(1, count):
        acc = GF2Matrix.zeros(n, n)
        for ell, pm in enumerate(pms, start=1):
            if t - ell >= 0:
                acc = acc + mats[t - ell] @ pm
        mats.append(acc)
    return mats


def build_parity_bmst(h, pis, l, n=None):
    """``diag(H, ..., H, I, ..., I) . P^T`` (L copies of H, m identities)."""
    r, n_h = h.shape
    n = n_h if n is None else n
    if n_h != n:
        raise ValueError("parity-check width does not match code length")
    m = len(pis)
    for p in pis:
        if p.n != n:
            raise ValueError(f"interleaver length {p.n} != code length {n}")
    total = l + m
    ps = p_matrices(pis, total) if m else [GF2Matrix.identity(n)] + [GF2Matrix.zeros(n, n)] * (total - 1)
    big_p = np.zeros((n * total, n * total), dtype=np.uint8)
    for s in range(total):
        for t in range(s, total):
            big_p[s * n : (s + 1) * n, t * n : (t + 1) * n] = ps[t - s].data
    diag = block_diag([h] * l + [GF2Matrix.identity(n)] * m)
    return diag @ GF2Matrix(big_p).T
