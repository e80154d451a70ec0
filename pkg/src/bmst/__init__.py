"""Block Markov superposition transmission: encoding, iterative decoding, bounds."""

__version__ = "0.1.0"
