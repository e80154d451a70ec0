"""32-bit CRC over bit blocks: polynomial 0x04C11DB7, MSB first, zero init, no final XOR."""

import numpy as np
from numba import njit

CRC32_POLY = 0x04C11DB7
CRC_LEN = 32


@njit(cache=True)
def _crc_register(bits, poly):
    reg = np.uint32(0)
    p = np.uint32(poly)
    for b in bits:
        top = ((reg >> np.uint32(31)) & np.uint32(1)) ^ np.uint32(b)
        reg = np.uint32(reg << np.uint32(1))
        if top:
            reg ^= p
    return reg


def crc_bits(u, poly=CRC32_POLY):
    """Remainder of ``u(x) x^32`` modulo the generator, as 32 bits MSB first."""
    reg = int(_crc_register(np.ascontiguousarray(u, dtype=np.uint8), poly))
    return np.array([(reg >> (31 - i)) & 1 for i in range(CRC_LEN)], dtype=np.uint8)


def crc_attach(u, poly=CRC32_POLY):
    u = np.asarray(u, dtype=np.uint8)
    return np.concatenate([u, crc_bits(u, poly)])


def crc_check(x, poly=CRC32_POLY):
    x = np.asarray(x, dtype=np.uint8)
    if x.size < CRC_LEN:
        raise ValueError(f"block of {x.size} bits is shorter than the {CRC_LEN}-bit CRC")
    return int(_crc_register(np.ascontiguousarray(x), poly)) == 0
