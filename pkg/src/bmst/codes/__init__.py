"""Basic codes and the text descriptors that name them.

Descriptor strings::

    rc:2x5000                          repetition [2,1] product, N = 5000
    spc:8x2500                         single parity check [8,7] product
    hamming74:2500                     Hamming [7,4] product
    nr15:800                           Nordstrom-Robinson (15,256,5) product
    conv:2-1-2:octal(5,7):k=10000      feedforward (n,k,nu) code, G = [1+D^2, 1+D+D^2]
    conv:2-1-2:rsc(7/5):k=50           recursive systematic [1, (1+D+D^2)/(1+D^2)]
    crc32+conv:2-1-2:octal(5,7):k=10000   32-bit CRC on k data bits, then conv
"""

import re

from .block import (
    BasicCode,
    Codebook,
    CodebookUnit,
    ProductCode,
    RepetitionUnit,
    SPCUnit,
    brute_force_map,
    codeword_posterior,
    hamming74_unit,
)
from .conv import CRCConvCode, ConvCode, Trellis, bcjr, build_trellis, list_viterbi, octal_to_poly
from .crc import CRC32_POLY, crc_attach, crc_bits, crc_check
from .nr import build_nordstrom_robinson, nr15_unit

__all__ = [
    "BasicCode",
    "CRCConvCode",
    "Codebook",
    "CodebookUnit",
    "ConvCode",
    "ProductCode",
    "RepetitionUnit",
    "SPCUnit",
    "Trellis",
    "bcjr",
    "brute_force_map",
    "build_nordstrom_robinson",
    "build_trellis",
    "codeword_posterior",
    "crc_attach",
    "crc_bits",
    "crc_check",
    "CRC32_POLY",
    "hamming74_unit",
    "list_viterbi",
    "nr15_unit",
    "octal_to_poly",
    "parse_code",
    "siso_decode",
    "encode_basic",
]

_CONV = re.compile(
    r"^(?P<crc>crc32\+)?conv:(?P<n>\d+)-1-(?P<nu>\d+):"
    r"(?:octal\((?P<oct>[0-7,\s]+)\)|rsc\((?P<num>[0-7]+)/(?P<den>[0-7]+)\)):k=(?P<k>\d+)$"
)


def parse_code(text):
    """Build a basic code from its descriptor string."""
    desc = text.strip().lower()
    m = re.fullmatch(r"rc:(\d+)x(\d+)", desc)
    if m:
        return ProductCode(RepetitionUnit(int(m[1])), int(m[2]))
    m = re.fullmatch(r"spc:(\d+)x(\d+)", desc)
    if m:
        return ProductCode(SPCUnit(int(m[1])), int(m[2]))
    m = re.fullmatch(r"hamming74:(\d+)", desc)
    if m:
        return ProductCode(hamming74_unit(), int(m[1]))
    m = re.fullmatch(r"nr15:(\d+)", desc)
    if m:
        return ProductCode(nr15_unit(), int(m[1]))
    m = _CONV.fullmatch(desc)
    if m:
        nu = int(m["nu"])
        n_out = int(m["n"])
        if m["oct"]:
            gens = [octal_to_poly(g.strip(), nu) for g in m["oct"].split(",")]
            feedback = None
        else:
            if n_out != 2:
                raise ValueError("rsc(num/den) describes a rate-1/2 systematic code")
            feedback = octal_to_poly(m["den"], nu)
            gens = [feedback, octal_to_poly(m["num"], nu)]
        if len(gens) != n_out:
            raise ValueError(f"{text!r}: {len(gens)} generators for n={n_out}")
        cls = CRCConvCode if m["crc"] else ConvCode
        return cls(gens, int(m["k"]), feedback=feedback, name=desc)
    raise ValueError(f"unrecognized basic-code descriptor {text!r}")


def encode_basic(code, u):
    return code.encode(u)


def siso_decode(code, msgs):
    """SISO decoding with pmf messages at the boundary.

    ``msgs`` is an ``(n, 2)`` array of channel-side pmfs; returns
    ``(ext_v, app_u)`` as ``(n, 2)`` and ``(k_siso, 2)`` pmf arrays.
    """
    from ..messages import from_llr, to_llr

    ext, app = code.siso(to_llr(msgs))
    return from_llr(ext), from_llr(app)
