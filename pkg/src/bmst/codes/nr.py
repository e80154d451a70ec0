"""Nordstrom-Robinson (15, 256, 5) code.

Built as the Gray image of the Z4 octacode, which is the (16, 256, 6)
Nordstrom-Robinson code, punctured in its last coordinate.
"""

import itertools

import numpy as np

from .block import Codebook, CodebookUnit

OCTACODE_G = np.array(
    [
        [1, 0, 0, 0, 3, 1, 2, 1],
        [0, 1, 0, 0, 1, 2, 3, 1],
        [0, 0, 1, 0, 3, 3, 3, 2],
        [0, 0, 0, 1, 2, 3, 1, 1],
    ]
)
GRAY = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)


def octacode():
    msgs = np.array(list(itertools.product(range(4), repeat=4)))
    return (msgs @ OCTACODE_G) % 4


def nordstrom_robinson_16():
    return GRAY[octacode()].reshape(256, 16)


def build_nordstrom_robinson():
    words = nordstrom_robinson_16()[:, :15]
    cb = Codebook(words)
    if cb.size != 256 or len({w.tobytes() for w in cb.words}) != 256:
        raise AssertionError("Nordstrom-Robinson construction lost codewords")
    return cb


def nr15_unit():
    return CodebookUnit(build_nordstrom_robinson(), "nr15", linear=False, d_min=5)
