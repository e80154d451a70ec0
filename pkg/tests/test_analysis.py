import math

import numpy as np
import pytest

from bmst.analysis import (
    BerCurve,
    BiPoly,
    TruncationError,
    branch_metric,
    genie_bound,
    genie_shift_db,
    independent_spectrum,
    iowef_basic,
    iowef_bmst_m1,
    overlap_pmf,
    spectrum_dj,
    union_bound_ber,
)
from bmst.channel import q_function
from bmst.codes import parse_code


def ensemble_iowef(code, l, trials, seed=0):
    """Average IOWEF over independent uniformly random interleavers (one per block)."""
    import itertools

    from bmst.gf2 import Interleaver

    rng = np.random.default_rng(seed)
    us = np.array(list(itertools.product([0, 1], repeat=code.k * l)), dtype=np.uint8)
    v = np.array([[code.encode(u[t * code.k : (t + 1) * code.k]) for t in range(l)] for u in us])
    iw = us.sum(axis=1)
    n = code.n
    acc = np.zeros((trials, code.k * l + 1, n * (l + 1) + 1))
    for s in range(trials):
        c = v[:, 0].copy()
        weights = [v[:, 0].sum(axis=1)]
        for t in range(1, l + 1):
            pi = rng.permutation(n)
            cur = v[:, t] if t < l else np.zeros_like(v[:, 0])
            weights.append((cur ^ v[:, t - 1][:, pi]).sum(axis=1))
        ow = np.sum(weights, axis=0)
        np.add.at(acc[s], (iw, ow), 1)
    return acc


def test_bipoly_basics():
    p = BiPoly.from_terms({(0, 0): 1, (1, 2): 1})
    q = p.mul(p)
    assert q.terms() == {(0, 0): 1.0, (1, 2): 2.0, (2, 4): 1.0}
    t = q.truncate(1, 3)
    assert t.terms() == {(0, 0): 1.0, (1, 2): 2.0} and t.dropped == 1.0
    assert p.power(3)[3, 6] == 1.0 and p[5, 5] == 0.0


def test_iowef_basic_examples():
    assert iowef_basic(parse_code("rc:2x1")).terms() == {(0, 0): 1.0, (1, 2): 1.0}
    assert iowef_basic(parse_code("spc:3x1")).terms() == {(0, 0): 1.0, (1, 2): 2.0, (2, 2): 1.0}


@pytest.mark.parametrize(
    "desc", ["rc:3x2", "spc:4x2", "hamming74:2", "nr15:1", "conv:2-1-2:rsc(7/5):k=9", "conv:2-1-2:octal(5,7):k=50"]
)
def test_iowef_total(desc):
    code = parse_code(desc)
    b = iowef_basic(code)
    assert b.total() == 2.0**code.k
    assert np.array_equal(b.coef, np.round(b.coef))


def test_iowef_conv_matches_enumeration():
    import itertools

    code = parse_code("conv:2-1-2:rsc(7/5):k=8")
    b = iowef_basic(code)
    ref = np.zeros_like(b.coef)
    for bits in itertools.product([0, 1], repeat=8):
        u = np.array(bits, dtype=np.uint8)
        ref[u.sum(), code.encode(u).sum()] += 1
    assert np.array_equal(b.coef, ref)


def test_iowef_too_large():
    with pytest.raises(ValueError):
        iowef_basic(parse_code("crc32+conv:2-1-2:octal(5,7):k=30"))


def test_overlap_examples():
    pmf = overlap_pmf(4, 1, 1)
    assert pmf[2] == pytest.approx(0.75) and pmf[0] == pytest.approx(0.25)
    assert overlap_pmf(7, 3, 0) == {3: 1.0}
    with pytest.raises(ValueError):
        overlap_pmf(4, 5, 1)


def test_overlap_normalized_exhaustive():
    for n in range(1, 13):
        for p in range(n + 1):
            for q in range(n + 1):
                assert sum(overlap_pmf(n, p, q).values()) == pytest.approx(1.0, abs=1e-12)


def test_branch_metric_examples():
    b = iowef_basic(parse_code("rc:2x1"))
    assert branch_metric(0, 0, b).terms() == {(0, 0): 1.0}
    assert branch_metric(2, 0, b).terms() == {(0, 2): 1.0}
    assert branch_metric(0, 2, b).terms() == {(1, 2): 1.0}


def test_iowef_bmst_rep():
    b = iowef_basic(parse_code("rc:2x1"))
    a = iowef_bmst_m1(b, 2, 1)
    assert a.terms() == {(0, 0): 1.0, (1, 4): 1.0}


def test_iowef_bmst_spc_exact_and_total():
    b = iowef_basic(parse_code("spc:3x1"))
    a = iowef_bmst_m1(b, 3, 2)
    assert a[0, 0] == 1.0
    assert a.total() == pytest.approx(16.0)
    assert a.dropped == pytest.approx(0.0, abs=1e-12)
    frozen = {(0, 0): 1, (1, 4): 4, (2, 4): 10 / 3, (2, 6): 8 / 3, (3, 4): 4 / 3,
              (3, 6): 8 / 3, (4, 4): 1 / 3, (4, 6): 2 / 3}
    assert a.terms().keys() == frozen.keys()
    for key, v in frozen.items():
        assert a[key] == pytest.approx(v, abs=1e-12)


def test_iowef_bmst_monte_carlo_small():
    code = parse_code("spc:3x1")
    a = iowef_bmst_m1(iowef_basic(code), 3, 2)
    acc = ensemble_iowef(code, 2, 4000, seed=1)
    mean, std = acc.mean(axis=0), acc.std(axis=0, ddof=1) / math.sqrt(acc.shape[0])
    for i in range(mean.shape[0]):
        for j in range(mean.shape[1]):
            assert abs(a[i, j] - mean[i, j]) <= 3 * std[i, j] + 1e-12


def test_truncation_reported():
    b = iowef_basic(parse_code("spc:3x1"))
    a = iowef_bmst_m1(b, 3, 2, caps=(4, 4))
    assert a.dropped == pytest.approx(16.0 - a.total())
    assert a.dropped > 0
    with pytest.raises(TruncationError):
        iowef_bmst_m1(b, 3, 2, caps=(4, 4), tol=1.0)


def test_spectrum():
    a = BiPoly.from_terms({(0, 0): 1, (1, 4): 1})
    assert spectrum_dj(a, 1, 1) == {4: 1.0}
    b = iowef_basic(parse_code("spc:3x1"))
    dj = spectrum_dj(iowef_bmst_m1(b, 3, 2), 2, 2)
    assert 0 not in dj and all(v >= 0 for v in dj.values())


def test_independent_spectrum_matches_power():
    b = iowef_basic(parse_code("spc:3x1"))
    dj = independent_spectrum(b, 2)
    # B^2 = 1 + 4XY^2 + 2X^2Y^2 + 4X^2Y^4 + 4X^3Y^4 + X^4Y^4
    assert dj == pytest.approx({2: 1.0 + 1.0, 4: 2.0 + 3.0 + 1.0})


def test_scaled_example_spectrum_comparison():
    """BMST has fewer low-weight codewords than independent transmission."""
    code = parse_code("conv:2-1-2:rsc(7/5):k=8")
    b = iowef_basic(code)
    l = 4
    bm = spectrum_dj(iowef_bmst_m1(b, code.n, l), l, code.k)
    ind = independent_spectrum(b, l)
    j0 = min(ind)
    assert bm.get(j0, 0.0) < ind[j0]
    assert min(bm) > j0


def test_genie_shift():
    assert genie_shift_db(0, 10) == 0.0
    assert genie_shift_db(1, math.inf) == pytest.approx(3.0103, abs=1e-4)
    assert genie_shift_db(4, 1000) == pytest.approx(6.9724, abs=1e-4)


def test_genie_bound_is_pure_shift():
    f = BerCurve(np.array([1.0, 2.0, 3.0]), np.array([1e-1, 1e-2, 1e-4]))
    g = genie_bound(f, 1, 19)
    s = genie_shift_db(1, 19)
    assert np.allclose(g.gamma_db, f.gamma_db - s)
    assert np.array_equal(g.ber, f.ber)
    assert g.gamma_at(1e-3) == pytest.approx(f.gamma_at(1e-3) - s)


def test_ber_curve_interpolation():
    f = BerCurve(np.array([2.0, 1.0]), np.array([1e-3, 1e-1]))
    assert f.gamma_db.tolist() == [1.0, 2.0]
    assert f.ber_at(1.5) == pytest.approx(1e-2)
    assert f.gamma_at(1e-2) == pytest.approx(1.5)
    assert f.gamma_at(1e-6) is None


def test_union_bound():
    assert union_bound_ber({}, 0.5, 1.0) == 0.0
    assert union_bound_ber({4: 1.0}, 0.5, 0.0) == pytest.approx(q_function(2.0))
    assert union_bound_ber({4: 1.0}, 0.5, 0.0) == pytest.approx(0.02275, abs=1e-5)
    dj = {5: 2.0, 6: 4.0, 7: 8.0}
    g = np.linspace(0, 8, 9)
    ub = union_bound_ber(dj, 0.5, g)
    assert np.all(np.diff(ub) < 0)
    assert union_bound_ber({5: 2.0}, 0.5, 12.0) / ub[-1] < 1.0
    assert union_bound_ber({5: 2.0}, 0.5, 12.0) / union_bound_ber(dj, 0.5, 12.0) > 0.99
