import itertools
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmst.codes import (
    Codebook,
    brute_force_map,
    build_nordstrom_robinson,
    codeword_posterior,
    crc_attach,
    crc_bits,
    crc_check,
    encode_basic,
    list_viterbi,
    parse_code,
    siso_decode,
)
from bmst.codes.conv import bcjr
from bmst.messages import from_llr, to_llr, uniform

DATA = Path(__file__).parent / "data"

ALL_CODES = [
    "rc:2x3",
    "rc:3x2",
    "spc:3x2",
    "spc:5x1",
    "hamming74:2",
    "nr15:1",
    "conv:2-1-2:octal(5,7):k=6",
    "conv:2-1-2:rsc(7/5):k=6",
    "crc32+conv:2-1-2:rsc(7/5):k=4",
]


def _codebook(code):
    """Every codeword of a small code, keyed by its input vector."""
    k = code.k_siso
    info = np.array(list(itertools.product([0, 1], repeat=k)), dtype=np.uint8)
    return Codebook(np.array([code.encode(u) for u in info]), info)


def test_encode_examples():
    assert encode_basic(parse_code("rc:2x1"), [1]).tolist() == [1, 1]
    assert encode_basic(parse_code("spc:3x1"), [1, 0]).tolist() == [1, 0, 1]
    v = encode_basic(parse_code("conv:2-1-2:octal(5,7):k=5"), [1, 0, 0, 0, 0])
    assert v.reshape(-1, 2).tolist() == [[1, 1], [0, 1], [1, 1], [0, 0], [0, 0], [0, 0], [0, 0]]


def test_example_one_dimensions():
    c = parse_code("conv:2-1-2:rsc(7/5):k=50")
    assert (c.k, c.n) == (50, 104)
    u = np.random.default_rng(0).integers(0, 2, 50).astype(np.uint8)
    v = c.encode(u)
    assert np.array_equal(v[0:100:2], u)  # systematic


def test_length_mismatch():
    with pytest.raises(ValueError):
        encode_basic(parse_code("spc:3x1"), [1, 0, 1])
    with pytest.raises(ValueError):
        parse_code("spc:3x1").siso(np.zeros(4))


def test_bad_descriptor():
    for bad in ("ldpc:1", "conv:2-1-2:rsc(7/5)", "spc:3"):
        with pytest.raises(ValueError):
            parse_code(bad)


@pytest.mark.parametrize("desc", ALL_CODES)
def test_encode_is_codeword(desc, rng):
    code = parse_code(desc)
    if code.linear:
        h = code.parity_check()
        for _ in range(20):
            v = code.encode(rng.integers(0, 2, code.k))
            assert not ((h.data.astype(int) @ v) % 2).any()
    else:
        words = {w.tobytes() for w in code.unit.codebook.words}
        for _ in range(20):
            v = code.encode(rng.integers(0, 2, code.k)).reshape(code.copies, -1)
            assert all(r.tobytes() in words for r in v)


def test_repetition_siso_example():
    code = parse_code("rc:2x1")
    ext, app = siso_decode(code, np.array([[0.9, 0.1], [0.8, 0.2]]))
    assert np.allclose(ext, [[0.8, 0.2], [0.9, 0.1]])
    assert np.allclose(app[0], [0.72 / 0.74, 0.02 / 0.74])
    assert np.allclose(app[0], [0.973, 0.027], atol=5e-4)


@pytest.mark.parametrize("desc", ["rc:2x2", "spc:4x2", "hamming74:1", "conv:2-1-2:octal(5,7):k=4"])
def test_uniform_in_uniform_out(desc):
    code = parse_code(desc)
    ext, app = siso_decode(code, uniform(code.n))
    assert np.allclose(ext, 0.5) and np.allclose(app, 0.5)


def _unit_codebook(unit):
    info = np.array(list(itertools.product([0, 1], repeat=unit.k)), dtype=np.uint8)
    return Codebook(unit.encode(info), info)


@pytest.mark.parametrize("desc", [s for s in ALL_CODES if not s.startswith("crc")])
def test_siso_equals_brute_force(desc, rng):
    code = parse_code(desc)
    for _ in range(10):
        llr = rng.normal(0, 3, code.n)
        ext, app = code.siso(llr)
        if hasattr(code, "copies"):
            ucb = _unit_codebook(code.unit)
            parts = [brute_force_map(ucb, p) for p in llr.reshape(code.copies, -1)]
            e_ref = np.concatenate([p[0] for p in parts])
            a_ref = np.concatenate([p[1] for p in parts])
        else:
            e_ref, a_ref = brute_force_map(_codebook(code), llr)
        assert np.abs(from_llr(ext) - from_llr(e_ref)).max() < 1e-9
        assert np.abs(from_llr(app) - from_llr(a_ref)).max() < 1e-9


def test_crc_conv_siso_ignores_outer_code(rng):
    outer = parse_code("crc32+conv:2-1-2:rsc(7/5):k=4")
    inner = parse_code("conv:2-1-2:rsc(7/5):k=36")
    assert outer.n == inner.n and outer.k_siso == 36
    llr = rng.normal(0, 2, outer.n)
    for a, b in zip(outer.siso(llr), inner.siso(llr)):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("desc", ALL_CODES)
def test_extrinsic_property(desc, rng):
    code = parse_code(desc)
    llr = rng.normal(0, 2, code.n)
    ext, _ = code.siso(llr)
    for j in rng.choice(code.n, size=min(5, code.n), replace=False):
        moved = llr.copy()
        moved[j] += 3.7
        assert abs(code.siso(moved)[0][j] - ext[j]) < 1e-8


def test_product_decodes_blockwise(rng):
    code = parse_code("hamming74:3")
    single = parse_code("hamming74:1")
    llr = rng.normal(0, 2, 21)
    ext, app = code.siso(llr)
    for b in range(3):
        e, a = single.siso(llr[7 * b : 7 * b + 7])
        assert np.allclose(ext[7 * b : 7 * b + 7], e)
        assert np.allclose(app[4 * b : 4 * b + 4], a)


def test_bcjr_k8_and_noiseless():
    code = parse_code("conv:2-1-2:octal(5,7):k=8")
    cb = _codebook(code)
    rng = np.random.default_rng(3)
    llr = rng.normal(0, 2, code.n)
    e, a = bcjr(code.trellis, llr, 8)
    e2, a2 = brute_force_map(cb, llr)
    assert np.abs(from_llr(e) - from_llr(e2)).max() < 1e-9
    assert np.abs(from_llr(a) - from_llr(a2)).max() < 1e-9
    u = rng.integers(0, 2, 8).astype(np.uint8)
    v = code.encode(u)
    _, app = code.siso(np.where(v == 0, 20.0, -20.0))
    assert np.array_equal((app < 0).astype(np.uint8), u)


def test_bcjr_length_contract():
    code = parse_code("conv:2-1-2:octal(5,7):k=8")
    with pytest.raises(ValueError):
        bcjr(code.trellis, np.zeros(code.n - 2), 8)


def test_codebook_posterior_example():
    cb = Codebook(np.array([[0, 0], [1, 1]]))
    post = codeword_posterior(cb, to_llr(np.array([[0.9, 0.1], [0.6, 0.4]])))
    assert np.allclose(post, [0.54 / 0.58, 0.04 / 0.58])
    assert np.allclose(post, [0.931, 0.069], atol=5e-4)


def test_single_codeword_codebook():
    cb = Codebook(np.array([[1, 0, 1]]), info=np.zeros((1, 0), dtype=np.uint8))
    assert np.allclose(codeword_posterior(cb, np.array([5.0, -3.0, 2.0])), [1.0])


def test_nordstrom_robinson():
    cb = build_nordstrom_robinson()
    assert len(cb) == 256 and cb.n == 15
    assert len({w.tobytes() for w in cb.words}) == 256
    assert cb.min_distance() == 5
    d = cb.distance_matrix()
    assert (d[np.triu_indices(256, 1)] >= 5).all()
    golden = json.loads((DATA / "nr15_weight_enumerator.json").read_text())
    we = cb.weight_enumerator()
    assert {str(w): int(c) for w, c in enumerate(we) if c} == golden["weights"]


def test_nr_dispatch_identity(rng):
    code = parse_code("nr15:1")
    llr = rng.normal(0, 2, 15)
    e1, a1 = code.siso(llr)
    e2, a2 = brute_force_map(code.unit.codebook, llr)
    assert np.allclose(e1, e2) and np.allclose(a1, a2)


def test_nr_index_bits():
    code = parse_code("nr15:2")
    assert (code.k, code.n) == (16, 30)
    u = np.array([0, 0, 0, 0, 0, 0, 0, 1] + [1] * 8, dtype=np.uint8)
    v = code.encode(u)
    cb = code.unit.codebook
    assert np.array_equal(v[:15], cb.words[1]) and np.array_equal(v[15:], cb.words[255])


@given(st.lists(st.integers(0, 1), min_size=0, max_size=200))
@settings(max_examples=200, deadline=None)
def test_crc_roundtrip(bits):
    x = crc_attach(np.array(bits, dtype=np.uint8))
    assert x.size == len(bits) + 32
    assert crc_check(x)


def test_crc_single_flip_detected(rng):
    x = crc_attach(rng.integers(0, 2, 60).astype(np.uint8))
    for j in range(x.size):
        y = x.copy()
        y[j] ^= 1
        assert not crc_check(y)


def test_crc_zero_and_short():
    assert not crc_bits(np.zeros(40, dtype=np.uint8)).any()
    with pytest.raises(ValueError):
        crc_check(np.zeros(31, dtype=np.uint8))


def test_crc_known_value():
    # "123456789" MSB first, zero init, no reflection, no final XOR
    msg = np.unpackbits(np.frombuffer(b"123456789", dtype=np.uint8))
    value = int("".join(map(str, crc_bits(msg))), 2)
    assert value == 0x89A1897F


def _path_metric(llr, v):
    return float(np.sum(np.where(v == 0, 0.5 * llr, -0.5 * llr)))


@pytest.mark.parametrize("desc", ["conv:2-1-2:octal(5,7):k=8", "conv:2-1-2:rsc(7/5):k=7"])
def test_list_viterbi_top_candidates(desc, rng):
    code = parse_code(desc)
    cb = _codebook(code)
    for _ in range(5):
        llr = rng.normal(0, 2, code.n)
        ranked = sorted(range(len(cb)), key=lambda i: -_path_metric(llr, cb.words[i]))
        got = list_viterbi(code.trellis, llr, code.k, 3)
        assert [c[1].tolist() for c in got] == [cb.words[i].tolist() for i in ranked[:3]]


def test_list_viterbi_noiseless(rng):
    code = parse_code("conv:2-1-2:octal(5,7):k=20")
    u = rng.integers(0, 2, 20).astype(np.uint8)
    v = code.encode(u)
    (u1, v1), = list_viterbi(code.trellis, np.where(v == 0, 9.0, -9.0), 20, 1)
    assert np.array_equal(u1, u) and np.array_equal(v1, v)
    with pytest.raises(ValueError):
        list_viterbi(code.trellis, np.zeros(code.n), 20, 0)


def test_conv_free_distance():
    assert parse_code("conv:2-1-2:octal(5,7):k=100").d_min == 5
    assert parse_code("conv:2-1-2:rsc(7/5):k=50").d_min == 5
    assert parse_code("conv:2-1-6:octal(171,133):k=40").d_min == 10
