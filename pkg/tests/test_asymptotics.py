import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectwalk.asymptotics import (
    asymptotic_expectation,
    asymptotic_from_constants,
    constants_closed_form,
    constants_root_sum,
    darboux_predict,
    decomposition_eval,
    gamma_half,
    k_alpha,
    k_alpha_series,
)
from reflectwalk.dp import expected_position_dp
from reflectwalk.errors import WalkError
from reflectwalk.jump_model import Case, validate
from reflectwalk.series import h_series
from reflectwalk.spectral import spectrum_report

from conftest import random_distribution

F = Fraction


def a4_distribution(rng, max_n=8):
    """Random law with p0 < 1, not the half/half law, whose phi is squarefree."""
    while True:
        d = random_distribution(rng, max_n=max_n, min_n=1)
        tag_ok = d.probs not in ((F(1, 2), F(1, 2)),)
        if tag_ok and spectrum_report(d).squarefree:
            return d


def test_constants_reference(ref_law):
    c = constants_closed_form(ref_law)
    assert c.c2 == pytest.approx(10 / 9, abs=1e-15)
    assert round(c.c1, 6) == -0.182099
    assert c.c3 == 0.5


def test_constants_point_mass_refuses():
    with pytest.raises(WalkError) as exc:
        constants_closed_form(validate([1]))
    assert exc.value.code == "ZERO_MEAN_JUMP"


def test_root_sum_reference(ref_law):
    a, b = constants_closed_form(ref_law), constants_root_sum(ref_law)
    for x, y in [(a.c1, b.c1), (a.c2, b.c2), (a.c3, b.c3)]:
        assert abs(x - y) < 1e-10
    for v in (b.c1, b.c2, b.c3, b.c4):
        assert abs(v.imag) < 1e-10


def test_root_sum_parity():
    c = constants_root_sum(validate(["0", "1"]))
    assert abs(c.c3 - 0.5) < 1e-10


@pytest.mark.parametrize("probs, code", [(["1/2", "1/2"], "NO_PSI_ROOTS"), (["1"], "A4_VIOLATED")])
def test_root_sum_refuses(probs, code):
    with pytest.raises(WalkError) as exc:
        constants_root_sum(validate(probs))
    assert exc.value.code == code


@pytest.mark.parametrize("seed", range(15))
def test_two_routes_random(seed):
    d = a4_distribution(random.Random(seed))
    a, b = constants_closed_form(d), constants_root_sum(d)
    assert max(abs(a.c1 - b.c1), abs(a.c2 - b.c2), abs(a.c3 - b.c3)) < 1e-10


def test_decomposition_vanishes_at_origin(ref_law):
    assert abs(decomposition_eval(ref_law, 0)) < 1e-12


def test_breakdown_reference_n10(ref_law):
    b = asymptotic_expectation(ref_law, 5, 10)
    # printed reference cells, compared at the 1e-5 tolerance after rounding
    for value, printed in [(b.term1, 2.52314), (b.term1 + b.term2, 3.63425), (b.total, 5.40355)]:
        assert abs(round(value, 5) - printed) <= 1e-5 + 1e-9
    assert b.total == b.term1 + b.term2 + b.term3
    assert b.case is Case.GENERIC and b.parity_sign == 0


def test_breakdown_point_mass():
    b = asymptotic_expectation(validate([1]), 7, 1000)
    assert (b.term1, b.term3, b.total) == (0, 0, 7)


def test_parity_anchor():
    d = validate(["0", "1"])
    b = asymptotic_expectation(d, 0, 5)
    assert b.parity_sign == 1
    assert round(b.total, 5) == 1.87333
    assert expected_position_dp(d, 0, 5) == F(15, 8)


@pytest.mark.parametrize("n", [0, -3])
def test_not_asymptotic(ref_law, n):
    with pytest.raises(WalkError) as exc:
        asymptotic_expectation(ref_law, 0, n)
    assert exc.value.code == "NOT_ASYMPTOTIC"


@given(st.integers(0, 6), st.integers(1, 500), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_constant_form_matches_moment_form(j, n, seed):
    d = a4_distribution(random.Random(seed), max_n=5)
    b = asymptotic_expectation(d, j, n)
    alt = asymptotic_from_constants(constants_closed_form(d), j, n, b.parity_sign)
    assert alt == pytest.approx(b.total, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("x", [F(1, 2), F(3, 2), F(-1, 2), F(-3, 2), F(-7, 2), F(4), F(1)])
def test_gamma_half(x):
    assert gamma_half(x) == pytest.approx(math.gamma(float(x)), rel=1e-14)


def test_gamma_pole():
    with pytest.raises(WalkError):
        gamma_half(F(-2))


def test_darboux_central_binomial():
    pred = darboux_predict([(1, F(-1, 2), 1)], 100)
    assert round(pred, 7) == 0.0564190
    exact = math.comb(200, 100) / 4**100
    assert round(exact, 7) == 0.0563485
    assert (pred - exact) / exact == pytest.approx(1 / 800, rel=0.01)


def test_darboux_leading_shapes():
    n = 400
    assert darboux_predict([(1, F(-1, 2), math.sqrt(2))], n) == pytest.approx(
        2 / math.sqrt(2 * math.pi) / math.sqrt(n), rel=1e-14
    )
    assert darboux_predict([(1, F(-3, 2), math.sqrt(2))], n) == pytest.approx(
        4 / math.sqrt(2 * math.pi) * math.sqrt(n), rel=1e-14
    )


def test_darboux_rotation():
    # (1+z)^(-1/2): singularity at -1, coefficients alternate
    assert darboux_predict([(-1, F(-1, 2), 1)], 101) < 0 < darboux_predict([(-1, F(-1, 2), 1)], 100)


@pytest.mark.parametrize("sing, code", [([(1, 2, 1)], "INTEGER_WEIGHT"), ([(2, F(-1, 2), 1)], "NOT_ON_CIRCLE")])
def test_darboux_errors(sing, code):
    with pytest.raises(WalkError) as exc:
        darboux_predict(sing, 10)
    assert exc.value.code == code


@pytest.mark.parametrize("alpha", [2.0, -1.41617, 0.1 + 0.8j, -3 + 1j, 0.5])
def test_k_alpha_at_zero(alpha):
    assert k_alpha(alpha, 0) == pytest.approx(-(alpha * alpha - alpha + 1) / alpha, rel=1e-13)


@pytest.mark.parametrize("alpha", [2.0, -1.41617, 0.10808 + 0.83334j, -3 + 1j, 1.2 + 0.1j])
def test_k_alpha_series_sums_to_function(alpha):
    coeffs = k_alpha_series(alpha, 200)
    for z in (0.3, -0.2 + 0.1j):
        total = sum(c * z**k for k, c in enumerate(coeffs))
        assert abs(total - k_alpha(alpha, z)) < 1e-11


def test_k_alpha_series_refuses_pole_inside_disk():
    # alpha = 1/2 puts a genuine pole at z = 4/5; no root of phi does this
    with pytest.raises(WalkError) as exc:
        k_alpha_series(0.5, 10)
    assert exc.value.code == "BAD_ALPHA"


def test_decomposition_reference(ref_law):
    series = h_series(ref_law, 0, 120)
    value = decomposition_eval(ref_law, 0.3)
    assert abs(value - series.evaluate(0.3)) < 1e-10


def test_decomposition_out_of_range(ref_law):
    with pytest.raises(WalkError):
        decomposition_eval(ref_law, 0.6)


@pytest.mark.parametrize("seed", range(4))
def test_decomposition_random(seed):
    rng = random.Random(50 + seed)
    d = a4_distribution(rng, max_n=6)
    series = h_series(d, 0, 120)
    for _ in range(25):
        z = 0.5 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
        assert abs(decomposition_eval(d, z) - series.evaluate(z)) < 1e-9


@pytest.mark.parametrize("probs", [["0", "1"], ["0", "1/3", "0", "2/3"]])
@pytest.mark.parametrize("j, n", [(0, 1), (0, 2), (1, 7), (3, 40)])
def test_constant_form_parity_case(probs, j, n):
    d = validate(probs)
    b = asymptotic_expectation(d, j, n)
    assert b.parity_sign != 0
    alt = asymptotic_from_constants(constants_closed_form(d), j, n, b.parity_sign)
    assert alt == pytest.approx(b.total, rel=1e-12, abs=1e-12)
