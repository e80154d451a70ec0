"""Block Markov superposition encoding with zero-tail termination."""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .codes import BasicCode
from .gf2 import Interleaver, as_bits

STOP_RULES = ("entropy", "crc", "none")
CANCEL_MODES = ("soft", "hard")


@dataclass
class BmstConfig:
    """A BMST system plus the knobs of its iterative decoder.

    ``stop_rule="none"`` always runs ``i_max`` iterations. ``list_size=0``
    disables list decoding after a failed CRC-stopped block.
    """

    code: BasicCode
    m: int
    l: int
    interleavers: list = field(default_factory=list)
    d: int = 0
    i_max: int = 18
    epsilon: float = 1e-5
    stop_rule: str = "entropy"
    list_size: int = 0
    cancel_mode: str = "soft"

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("encoding memory m must be >= 0")
        if self.l < 1:
            raise ValueError("number of blocks L must be >= 1")
        if self.d < 0:
            raise ValueError("decoding delay d must be >= 0")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if len(self.interleavers) != self.m:
            raise ValueError(f"need {self.m} interleavers, got {len(self.interleavers)}")
        for pi in self.interleavers:
            if not isinstance(pi, Interleaver) or pi.n != self.code.n:
                raise ValueError(f"every interleaver must have length n={self.code.n}")
        if self.stop_rule not in STOP_RULES:
            raise ValueError(f"stop_rule must be one of {STOP_RULES}")
        if self.stop_rule == "crc" and not self.code.has_crc:
            raise ValueError("CRC stopping needs a basic code with an outer CRC")
        if self.cancel_mode not in CANCEL_MODES:
            raise ValueError(f"cancel_mode must be one of {CANCEL_MODES}")
        if self.list_size < 0:
            raise ValueError("list_size must be >= 0")

    @property
    def n(self):
        return self.code.n

    @property
    def k(self):
        return self.code.k

    @property
    def blocks(self):
        return self.l + self.m

    @property
    def rate(self):
        return self.k * self.l / (self.n * (self.l + self.m))


class EncoderState:
    """The last m basic codewords, most recent first; zeros before time 0."""

    def __init__(self, m, n):
        self.history = deque([np.zeros(n, dtype=np.uint8) for _ in range(m)], maxlen=m)
        self.t = 0


def encode_block(state, cfg, u):
    """Emit ``c = v + sum_i Pi_i(v^(t-i))`` for the next data block and advance."""
    v = cfg.code.encode(as_bits(u, cfg.k))
    c = v.copy()
    for pi, past in zip(cfg.interleavers, state.history):
        c ^= past[pi.pi]
    if cfg.m:
        state.history.appendleft(v)
    state.t += 1
    return c


def encode_sequence(cfg, u_blocks):
    """All L + m transmitted blocks for L data blocks (termination appends zero data)."""
    u_blocks = list(u_blocks)
    if len(u_blocks) != cfg.l:
        raise ValueError(f"expected {cfg.l} data blocks, got {len(u_blocks)}")
    state = EncoderState(cfg.m, cfg.n)
    zero = np.zeros(cfg.k, dtype=np.uint8)
    return [encode_block(state, cfg, u) for u in u_blocks + [zero] * cfg.m]
