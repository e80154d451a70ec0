"""Short block codes used as Cartesian-product basic codes.

Each unit code works on ``(N, n_unit)`` arrays so a product of N copies
decodes in one vectorized call. Messages are LLRs ``ln(p0/p1)``.
"""

import itertools

import numpy as np
from scipy.special import logsumexp

from ..gf2 import GF2Matrix, as_bits
from ..messages import LLR_MAX, clamp, from_tanh, to_tanh, boxplus_extrinsic


class BasicCode:
    """Common surface of every basic code (node C of the decoding graph).

    ``k`` is the number of data bits per block, ``k_siso`` the length of the
    a-posteriori vector returned by :meth:`siso` (they differ only when an
    outer CRC rides inside the inner code).
    """

    kind = "abstract"
    linear = True
    has_crc = False
    d_min = None

    @property
    def k_siso(self):
        return self.k

    @property
    def rate(self):
        return self.k / self.n

    def encode(self, u):
        raise NotImplementedError

    def siso(self, llr):
        """Return ``(ext_v, app_u)`` LLRs for the channel-side input ``llr``."""
        raise NotImplementedError

    def data_bits(self, u_siso):
        return np.asarray(u_siso)[: self.k]

    def reencode(self, u_siso):
        """Codeword for a hard-decided SISO input vector (length ``k_siso``)."""
        return self.encode(u_siso)

    def crc_ok(self, u_siso):
        return True

    def generator(self):
        """k x n generator matrix built from unit-vector encodings (linear kinds)."""
        if not self.linear:
            raise TypeError(f"{self.kind} code is not linear")
        eye = np.eye(self.k, dtype=np.uint8)
        return GF2Matrix(np.array([self.encode(row) for row in eye]))

    def parity_check(self):
        return self.generator().nullspace()

    def _check_u(self, u):
        return as_bits(u, self.k)

    def _check_llr(self, llr):
        llr = np.asarray(llr, dtype=float)
        if llr.shape != (self.n,):
            raise ValueError(f"expected {self.n} input messages, got shape {llr.shape}")
        return clamp(llr)


class ProductCode(BasicCode):
    """N independent copies of a short unit code, concatenated."""

    def __init__(self, unit, copies):
        if copies < 1:
            raise ValueError("product multiplicity must be >= 1")
        self.unit = unit
        self.copies = copies
        self.n = unit.n * copies
        self.k = unit.k * copies
        self.kind = f"{unit.name}-product"
        self.linear = unit.linear
        self.d_min = unit.d_min

    def __repr__(self):
        return f"ProductCode({self.unit.name}, N={self.copies})"

    def encode(self, u):
        u = self._check_u(u).reshape(self.copies, self.unit.k)
        return self.unit.encode(u).reshape(-1)

    def siso(self, llr):
        llr = self._check_llr(llr).reshape(self.copies, self.unit.n)
        ext, app = self.unit.siso(llr)
        return clamp(ext.reshape(-1)), clamp(app.reshape(-1))

    def codewords_valid(self, v):
        return self.unit.is_codeword(np.asarray(v).reshape(self.copies, self.unit.n)).all()


class RepetitionUnit:
    linear = True

    def __init__(self, n):
        if n < 2:
            raise ValueError("repetition length must be >= 2")
        self.n, self.k, self.d_min = n, 1, n
        self.name = f"rep{n}"

    def encode(self, u):
        return np.repeat(u, self.n, axis=1).astype(np.uint8)

    def siso(self, llr):
        total = llr.sum(axis=1, keepdims=True)
        return total - llr, total

    def is_codeword(self, v):
        return (v == v[:, :1]).all(axis=1)


class SPCUnit:
    """Systematic single parity check: info bits first, parity last."""

    linear = True

    def __init__(self, n):
        if n < 2:
            raise ValueError("SPC length must be >= 2")
        self.n, self.k, self.d_min = n, n - 1, 2
        self.name = f"spc{n}"

    def encode(self, u):
        u = np.asarray(u, dtype=np.uint8)
        return np.concatenate([u, u.sum(axis=1, keepdims=True) & 1], axis=1)

    def siso(self, llr):
        out, _ = boxplus_extrinsic(to_tanh(llr).T)
        ext = from_tanh(out.T)
        return ext, llr[:, :-1] + ext[:, :-1]

    def is_codeword(self, v):
        return v.sum(axis=1) % 2 == 0


class Codebook:
    """An (n, M, d) code given as an explicit list of codewords.

    Codeword ``i`` carries the index bits of ``i`` (MSB first), so a codebook
    of size ``2**b`` encodes ``b`` bits by table look-up.
    """

    def __init__(self, words, info=None):
        words = np.asarray(words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[0] == 0:
            raise ValueError("codebook must be a non-empty 2-D array of codewords")
        self.words = words
        self.words.setflags(write=False)
        self.size, self.n = words.shape
        if info is None:
            b = int(np.log2(self.size))
            if 2**b != self.size:
                raise ValueError("codebook size must be a power of two to carry index bits")
            info = index_bits(self.size, b)
        self.info = np.asarray(info, dtype=np.uint8)
        self.k = self.info.shape[1]
        self._lookup = {row.tobytes(): i for i, row in enumerate(self.info)}
        self._signs = 1.0 - 2.0 * words

    def __len__(self):
        return self.size

    def distance_matrix(self):
        w = self.words.astype(np.int32)
        return (w[:, None, :] != w[None, :, :]).sum(axis=2)

    def min_distance(self):
        if self.size < 2:
            return None
        d = self.distance_matrix()
        return int(d[np.triu_indices(self.size, 1)].min())

    def weight_enumerator(self):
        return np.bincount(self.words.sum(axis=1), minlength=self.n + 1)

    def index_of(self, u):
        return self._lookup[np.asarray(u, dtype=np.uint8).tobytes()]

    def encode_rows(self, u):
        u = np.asarray(u, dtype=np.uint8)
        # index bits are MSB first; a generic info table falls back to look-up
        if self.k and np.array_equal(self.info, index_bits(self.size, self.k)):
            idx = u @ (1 << np.arange(self.k - 1, -1, -1))
        else:
            idx = np.array([self.index_of(row) for row in u])
        return self.words[idx]

    def metrics(self, llr):
        """Log-likelihood (up to a per-row constant) of each codeword, shape (N, M)."""
        return 0.5 * llr @ self._signs.T

    def posterior(self, llr):
        met = self.metrics(llr)
        return np.exp(met - logsumexp(met, axis=1, keepdims=True))

    def siso(self, llr):
        met = self.metrics(llr)
        w = np.exp(met - met.max(axis=1, keepdims=True))
        tiny = np.finfo(float).tiny
        c1 = w @ self.words
        c0 = w.sum(axis=1, keepdims=True) - c1
        ext = np.log(np.maximum(c0, tiny)) - np.log(np.maximum(c1, tiny)) - llr
        if self.k:
            u1 = w @ self.info
            u0 = w.sum(axis=1, keepdims=True) - u1
            app = np.log(np.maximum(u0, tiny)) - np.log(np.maximum(u1, tiny))
        else:
            app = np.zeros((llr.shape[0], 0))
        return np.clip(ext, -LLR_MAX, LLR_MAX), np.clip(app, -LLR_MAX, LLR_MAX)


def index_bits(size, b):
    idx = np.arange(size)
    return ((idx[:, None] >> np.arange(b - 1, -1, -1)) & 1).astype(np.uint8)


class CodebookUnit:
    """Unit code backed by a codebook; SISO by brute-force MAP over all codewords."""

    def __init__(self, codebook, name, linear, d_min=None):
        self.codebook = codebook
        self.n, self.k = codebook.n, codebook.k
        self.name = name
        self.linear = linear
        self.d_min = codebook.min_distance() if d_min is None else d_min

    def encode(self, u):
        return self.codebook.encode_rows(u)

    def siso(self, llr):
        return self.codebook.siso(llr)

    def is_codeword(self, v):
        words = {w.tobytes() for w in self.codebook.words}
        return np.array([row.astype(np.uint8).tobytes() in words for row in v])


HAMMING74_G = np.array(
    [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)


def hamming74_unit():
    info = np.array(list(itertools.product([0, 1], repeat=4)), dtype=np.uint8)
    words = (info.astype(int) @ HAMMING74_G) % 2
    return CodebookUnit(Codebook(words, info), "hamming74", linear=True, d_min=3)


def brute_force_map(cb, llr):
    """Bitwise MAP over an explicit codebook for a single received block.

    Returns ``(ext_v, app_u)`` LLRs; ``app_u`` is over the codebook's index bits.
    """
    if len(cb) == 0:
        raise ValueError("empty codebook")
    llr = clamp(np.asarray(llr, dtype=float))
    if llr.shape != (cb.n,):
        raise ValueError(f"expected {cb.n} messages, got shape {llr.shape}")
    ext, app = cb.siso(llr[None, :])
    return ext[0], app[0]


def codeword_posterior(cb, llr):
    llr = clamp(np.asarray(llr, dtype=float))
    return cb.posterior(llr[None, :])[0]
