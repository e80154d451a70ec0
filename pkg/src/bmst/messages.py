"""Binary messages and the two primitive combining rules.

A message about a bit Z is its pmf ``(p0, p1)``. At API boundaries a list of
messages is an ``(n, 2)`` float array; inside the decoder the same
information travels as log-likelihood ratios ``L = ln(p0 / p1)``.
Probabilities are clamped to ``[DELTA, 1 - DELTA]`` which bounds every LLR
by ``LLR_MAX``.
"""

import numpy as np

DELTA = 1e-12
LLR_MAX = float(np.log((1.0 - DELTA) / DELTA))
_T_MAX = float(np.tanh(LLR_MAX / 2))


def clamp(llr):
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def normalize(msgs):
    """Normalize an ``(n, 2)`` array of nonnegative weights to pmfs, clamped."""
    msgs = np.asarray(msgs, dtype=float)
    if msgs.ndim != 2 or msgs.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) message array, got shape {msgs.shape}")
    total = msgs.sum(axis=1, keepdims=True)
    if np.any(~np.isfinite(total)) or np.any(total <= 0) or np.any(msgs < 0):
        raise FloatingPointError("degenerate message: weights must be nonnegative with positive sum")
    p = np.clip(msgs / total, DELTA, 1.0 - DELTA)
    return p / p.sum(axis=1, keepdims=True)


def to_llr(msgs):
    p = normalize(msgs)
    return clamp(np.log(p[:, 0]) - np.log(p[:, 1]))


def from_llr(llr):
    llr = clamp(np.asarray(llr, dtype=float))
    p0 = 0.5 * (1.0 + np.tanh(llr / 2))
    return np.stack([p0, 1.0 - p0], axis=1)


def uniform(n):
    return np.full((n, 2), 0.5)


def hard_decision(llr):
    """Bitwise decision; a tie (LLR exactly 0) decides 0."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def point_mass_llr(bits):
    """LLRs of messages that put all (clamped) mass on ``bits``."""
    return np.where(np.asarray(bits, dtype=np.uint8) == 0, LLR_MAX, -LLR_MAX)


def to_tanh(llr):
    return np.tanh(clamp(llr) / 2)


def from_tanh(t):
    return 2.0 * np.arctanh(np.clip(t, -_T_MAX, _T_MAX))


def boxplus(*llrs):
    """F2-convolution of independent messages: the pmf of the sum of the bits."""
    t = to_tanh(llrs[0])
    for x in llrs[1:]:
        t = t * to_tanh(x)
    return from_tanh(t)


def boxplus_extrinsic(tanhs, prior=None):
    """Leave-one-out products for a parity node.

    ``tanhs`` has shape ``(e, n)`` (one row per edge, tanh(L/2) domain).
    Returns ``(out, full)`` where ``out[e]`` is the product over all rows except
    ``e`` and ``full`` the product over every row; both include ``prior`` when
    given and stay in the tanh domain.
    """
    tanhs = np.asarray(tanhs)
    e = tanhs.shape[0]
    prefix = np.empty_like(tanhs)
    suffix = np.empty_like(tanhs)
    acc = np.ones(tanhs.shape[1]) if prior is None else np.array(prior, dtype=float)
    for i in range(e):
        prefix[i] = acc
        acc = acc * tanhs[i]
    full = acc
    acc = np.ones(tanhs.shape[1])
    for i in range(e - 1, -1, -1):
        suffix[i] = acc
        acc = acc * tanhs[i]
    return prefix * suffix, full
