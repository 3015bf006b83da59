import math

import pytest

import vlcq


def test_closed_forms():
    a = vlcq.alpha_of(1.0, 10.0)
    assert a == pytest.approx(0.1)
    assert vlcq.out_full_closed(2, a) == pytest.approx(1 - math.exp(-a) * (1 + a), rel=1e-12)
    assert vlcq.out_open_closed(a) == pytest.approx(1 - math.exp(-a), rel=1e-12)
    with pytest.raises(ValueError):
        vlcq.alpha_of(-1.0, 10.0)


def test_codebook_layers():
    assert vlcq.layer_sizes(2, 0) == [80]
    assert vlcq.layer_sizes(1, 2) == [8, 32, 120]
    book = vlcq.codebook(1, 1)
    assert len(book) == 32
    units = {tuple(round(c, 12) for z in vlcq.unit_vector(p) for c in (z.real, z.imag)) for p in book}
    assert len(units) == 32


def test_codewords():
    assert [vlcq.codeword_bstar(n) for n in range(4)] == ["", "0", "1", "00"]
    assert vlcq.length_prefix_free(0) == 1
    assert vlcq.length_prefix_free(3) == math.ceil(2 * math.log2(4) + 1)


def test_encode_and_simulate():
    o = vlcq.encode_vlq([0.01 + 0j, 0.01j], 0.1)
    assert o["outage"] and o["index"] == 0
    r = vlcq.simulate(t=2, rho=1.0, P=10.0, mode="vlq", samples=20000, seed=3)
    assert abs(r["out_hat"] - r["closed_full"]) <= 4 * r["out_se"] + r["truncation_frac"]
    assert r["rate_bstar_hat"] > 0
    one = vlcq.sweep_csv(2, 1.0, [10, 20], "vlq", samples=5000, seed=3, shards=1)
    four = vlcq.sweep_csv(2, 1.0, [10, 20], "vlq", samples=5000, seed=3, shards=4)
    assert one == four
    assert one.splitlines()[0].startswith("mode,t,rho,P,alpha")


def test_analysis_and_toy():
    assert vlcq.find_ell0(2) == 4
    assert vlcq.tail_bound(2, 0.1, 4) == pytest.approx(0.0028125)
    lo, hi = vlcq.toy_vlq_rate(100000)
    assert lo <= hi < lo + 1e-3
    assert vlcq.example2_encode(1.0) == 0
    ok, checks = vlcq.verify(samples=5000, seed=2)
    assert ok, [c for c in checks if not c["passed"]]
