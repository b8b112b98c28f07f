"""Weight function registry: values, supports, parsing."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dilutecw.testfunctions import make_test_function, parse_test_function


def test_one_is_constant():
    g = make_test_function("one")
    assert g(0.0) == 1.0
    assert g(-17.3) == 1.0


def test_gauss_values():
    g = make_test_function("gauss")
    assert g(0.0) == 1.0
    assert g(1.0) == pytest.approx(math.exp(-1.0))
    assert g(-2.0) == g(2.0)


def test_cosine_values():
    g = make_test_function("cosine")
    assert g(0.0) == pytest.approx(1.0)
    assert g(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert g(math.pi / 2) == pytest.approx(0.5)


def test_bump_values_and_support():
    g = make_test_function("bump", 0.5, 2.0)
    assert g(0.5) == pytest.approx(1.0)
    assert g(2.5) == 0.0
    assert g(100.0) == 0.0
    assert g.support == (-1.5, 2.5)
    assert make_test_function("one").support is None


def test_bump_validation():
    with pytest.raises(ValueError):
        make_test_function("bump", 0.0)
    with pytest.raises(ValueError):
        make_test_function("bump", 0.0, -1.0)
    with pytest.raises(ValueError):
        make_test_function("one", 3.0)
    with pytest.raises(ValueError):
        make_test_function("heaviside")


def test_parse_roundtrip():
    for spec in ("one", "gauss", "cosine", "bump:0.5,2.0"):
        g = parse_test_function(spec)
        assert parse_test_function(g.label()) == g
    with pytest.raises(ValueError):
        parse_test_function("bump:a,b")
    with pytest.raises(ValueError):
        parse_test_function("nope")


@given(st.sampled_from(["one", "gauss", "cosine"]), st.floats(-50, 50))
def test_registry_nonnegative_and_bounded(name, x):
    g = make_test_function(name)
    assert 0.0 <= g(x) <= 1.0


@given(st.floats(-10, 10), st.floats(0.1, 5), st.floats(-50, 50))
def test_bump_nonnegative_and_bounded(center, width, x):
    g = make_test_function("bump", center, width)
    assert 0.0 <= g(x) <= 1.0
