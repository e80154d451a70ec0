"""The nonlinear (15, 256, 5) Nordstrom-Robinson code as a BMST basic code.

The codebook comes from the octacode under the Gray map with one coordinate
punctured. It has twice as many words as any linear code of that length and
distance, and its SISO decoder works directly on the 256-word list.
"""

from bmst.codes import build_nordstrom_robinson
from bmst.harness import ExperimentConfig, run_sweep

cb = build_nordstrom_robinson()
print(f"{len(cb.words)} codewords of length {cb.n}, minimum distance {cb.min_distance()}")
print("distance distribution from the zero word:", cb.weight_enumerator())

exp = ExperimentConfig(code="nr15:20", snr_list_db=[3.0, 4.0, 5.0], m=1, l=10, d=2,
                       max_frames=30, min_bit_errors=200)
for p in run_sweep(exp):
    print(f"Eb/N0 {p.gamma_db:.1f} dB: BER {p.ber:.2e} over {p.frames} frames")
