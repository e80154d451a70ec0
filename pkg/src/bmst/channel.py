"""BPSK over AWGN and the channel-side posteriors of the decoding graph."""

import numpy as np
from scipy.special import log_ndtr
from scipy.stats import norm

from .messages import clamp


def ebn0_to_sigma(ebn0_db, rate):
    """Noise std per dimension for unit-energy BPSK at the given E_b/N_0 and rate."""
    if rate <= 0 or rate > 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))))


def modulate(c):
    """0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(c, dtype=float)


def add_awgn(x, sigma, rng):
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    x = np.asarray(x, dtype=float)
    return x + sigma * rng.standard_normal(x.shape)


def channel_llr(y, sigma):
    """``ln Pr{c=0|y} / Pr{c=1|y}`` under a uniform prior."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return clamp(2.0 * np.asarray(y, dtype=float) / sigma**2)


def channel_posterior(y, sigma):
    """Per-bit pmfs ``(p0, p1)`` with ``p0 = 1 / (1 + exp(-2y/sigma^2))``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    z = 2.0 * np.asarray(y, dtype=float) / sigma**2
    p0 = np.exp(-np.logaddexp(0.0, -z))
    p1 = np.exp(-np.logaddexp(0.0, z))
    return np.stack([p0, p1], axis=-1)


def log_likelihoods(y, sigma):
    """``(log p(y|c=0), log p(y|c=1))`` Gaussian densities, stacked on the last axis."""
    y = np.asarray(y, dtype=float)
    c = -0.5 * np.log(2 * np.pi) - np.log(sigma)
    return np.stack([c - (y - 1.0) ** 2 / (2 * sigma**2), c - (y + 1.0) ** 2 / (2 * sigma**2)], axis=-1)


def q_function(x):
    return norm.sf(x)


def log_q(x):
    return log_ndtr(-np.asarray(x, dtype=float))


def uncoded_ber(ebn0_db):
    return q_function(np.sqrt(2.0 * 10.0 ** (np.asarray(ebn0_db) / 10.0)))


def frame_rng(master_seed, *keys):
    """Independent counter-based (Philox) stream per (seed, keys...) tuple."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, keys)])
    return np.random.Generator(np.random.Philox(ss))
