"""Encode a short BMST frame, send it over BPSK/AWGN and decode it.

Walks through the pieces one at a time: a basic code, m interleavers, the
superposition encoder, the channel and the sliding-window decoder.
"""

import numpy as np

from bmst.channel import add_awgn, ebn0_to_sigma, frame_rng, modulate
from bmst.codes import parse_code
from bmst.decoder import decode_sliding_window
from bmst.encoder import BmstConfig, encode_sequence
from bmst.gf2 import make_interleavers

code = parse_code("conv:2-1-2:octal(5,7):k=200")
m, l = 2, 20
cfg = BmstConfig(code, m, l, make_interleavers(code.n, m, seed=0), d=4)
print(f"basic code [{code.n}, {code.k}], m={m}, L={l}, overall rate {cfg.rate:.4f}")

rng = frame_rng(2024)
u = rng.integers(0, 2, (l, code.k), dtype=np.uint8)
c = encode_sequence(cfg, list(u))
print(f"{len(c)} transmitted blocks ({m} of them carry only the superposition tail)")

for gamma in (0.5, 1.0, 1.5, 2.0):
    sigma = ebn0_to_sigma(gamma, cfg.rate)
    y = [add_awgn(modulate(x), sigma, frame_rng(2024, int(gamma * 10))) for x in c]
    res = decode_sliding_window(cfg, y, sigma)
    print(f"Eb/N0 {gamma:.1f} dB: {res.bit_errors(u):5d} bit errors, "
          f"{int(res.block_errors(u).sum()):2d} block errors, "
          f"mean iterations {res.iterations.mean():.1f}")
