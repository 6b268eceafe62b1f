import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ksband.bessel import (MAX_ARG, MAX_ORDER, bessel_i, bessel_i_eval, bessel_i_sequence,
                           bessel_i_triple_scaled)
from ksband.errors import RangeError

mpmath.mp.dps = 40


def oracle(n, x):
    return float(mpmath.besseli(n, x))


def series_oracle(n, x, terms=60):
    # independent extended-precision power series
    h = mpmath.mpf(x) / 2
    return float(mpmath.fsum(h ** (n + 2 * m) / (mpmath.factorial(m) * mpmath.factorial(n + m))
                             for m in range(terms)))


def test_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    for n in range(1, 6):
        assert bessel_i(n, 0.0) == 0.0
    assert bessel_i_sequence(5, 0.0).tolist() == [1.0, 0, 0, 0, 0, 0]


def test_i0_of_one_against_series():
    assert bessel_i(0, 1.0) == pytest.approx(series_oracle(0, 1.0), rel=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 30, 100, 200])
@pytest.mark.parametrize("x", [1e-3, 0.5, 1.0, 7.5, 29.9, 30.1, 95.0, 250.0, 699.0])
def test_against_mpmath(n, x):
    assert bessel_i(n, x) == pytest.approx(oracle(n, x), rel=1e-12, abs=1e-300)


def test_methods_reported():
    assert bessel_i_eval(0, 1.0).method == "series"
    assert bessel_i_eval(0, 100.0).method == "asymptotic"
    assert bessel_i_eval(3, 100.0).value == pytest.approx(oracle(3, 100.0), rel=1e-13)


def test_recurrence_residual():
    seq = bessel_i_sequence(11, 2.0)
    for n in range(1, 11):
        assert abs(seq[n - 1] - seq[n + 1] - (2 * n / 2.0) * seq[n]) < 1e-10 * seq[n - 1]


def test_tiny_arguments():
    assert bessel_i(0, 5e-324) == 1.0
    seq = bessel_i_sequence(4, -1e-10)
    assert seq[0] == 1.0 and seq[1] == pytest.approx(-5e-11, rel=1e-12)


def test_normalization_identity():
    seq = bessel_i_sequence(40, 1.0)
    assert seq[0] + 2 * seq[1:].sum() == pytest.approx(math.e, abs=1e-10)


@given(n_max=st.integers(1, 60), x=st.floats(1e-3, 300.0))
def test_sequence_matches_pointwise(n_max, x):
    seq = bessel_i_sequence(n_max, x)
    for n in (0, n_max // 2, n_max):
        ref = oracle(n, x)
        if ref > 1e-290:
            assert seq[n] == pytest.approx(ref, rel=1e-11)


@given(n=st.integers(0, 50), x=st.floats(0.0, 200.0), dx=st.floats(1e-3, 10.0))
def test_positive_and_increasing(n, x, dx):
    a, b = bessel_i(n, x), bessel_i(n, x + dx)
    assert a >= 0 and b > 0
    assert b >= a


@given(n=st.integers(0, MAX_ORDER), x=st.floats(-MAX_ARG, MAX_ARG))
def test_symmetries(n, x):
    assert bessel_i(-n, x) == bessel_i(n, x)
    assert bessel_i(n, -x) == (-1) ** n * bessel_i(n, x)


@given(n=st.integers(1, 30), x=st.floats(0.1, 200.0))
def test_recurrence_property(n, x):
    a, b, c = bessel_i(n - 1, x), bessel_i(n, x), bessel_i(n + 1, x)
    assert abs(a - c - 2 * n / x * b) < 1e-10 * a


def test_range_errors():
    with pytest.raises(RangeError):
        bessel_i(MAX_ORDER + 1, 1.0)
    with pytest.raises(RangeError):
        bessel_i(0, 701.0)
    with pytest.raises(RangeError):
        bessel_i(0, math.nan)


@pytest.mark.parametrize("eta", [-7, -1, 0, 1, 3, 150])
@pytest.mark.parametrize("x", [0.3, 2.0, -5.0, 40.0])
def test_scaled_triple_ratios(eta, x):
    im, i0, ip = bessel_i_triple_scaled(eta, x)
    ref = [mpmath.re(mpmath.besseli(o, x)) for o in (eta - 1, eta, eta + 1)]
    assert max(abs(im), abs(i0), abs(ip)) == pytest.approx(1.0)
    top = max(ref, key=abs)
    for got, want in zip((im, i0, ip), ref):
        assert got == pytest.approx(float(want / abs(top)), rel=1e-12)
