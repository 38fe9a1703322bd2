import csv
import io
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qldc.bounds import (
    FORMULAS,
    NOT_CHECKABLE,
    binary_entropy,
    bound_value,
    check_instance,
    exponent_constant,
    reports_to_csv,
)


def entropy_nats(p):
    # independent form: natural logs rescaled
    if p in (0, 1):
        return 0.0
    return -(p * math.log(p) + (1 - p) * math.log1p(-p)) / math.log(2)


def test_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0) == 0.0
    assert binary_entropy(1) == 0.0
    assert binary_entropy(Fraction(11, 14)) == pytest.approx(0.7495952572594, abs=1e-12)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


@given(st.floats(0, 1))
def test_entropy_matches_natural_log_form(p):
    assert binary_entropy(p) == pytest.approx(entropy_nats(p), abs=1e-12)
    assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)


def test_lqdc1_constant():
    c = exponent_constant("lqdc1", Fraction(1, 4), Fraction(1, 2))
    assert c == pytest.approx(1 - entropy_nats(0.5 + 1 / 32), abs=1e-15)


def test_pir2_xor_at_perfect_recovery():
    # eps = 1/2 gives c = 1, so t >= n - 1
    assert exponent_constant("pir2_xor", eps=Fraction(1, 2)) == 1.0
    assert bound_value("pir2_xor", {"n": 8, "eps": Fraction(1, 2)}) == 7.0


def test_pir2_constant():
    c = exponent_constant("pir2", eps=Fraction(1, 2))
    assert c == pytest.approx(1 - entropy_nats(11 / 14), abs=1e-12)
    assert c == pytest.approx(0.2504, abs=1e-4)


def test_alphabet_bound_exponent():
    p = {"n": 10, "delta": Fraction(1, 4), "eps": Fraction(1, 2), "ell": 2}
    c = exponent_constant("ldc2_alphabet", p["delta"], p["eps"], 2)
    assert c == pytest.approx(1 - entropy_nats(0.5 + 0.125 / 2**7), abs=1e-15)
    assert bound_value("ldc2_alphabet", p) == pytest.approx(2 ** (c * 10 - 2))


def test_hadamard_meets_lqdc1():
    rep = check_instance("lqdc1", {"n": 6, "m": 64, "delta": Fraction(1, 4), "eps": Fraction(1, 2)})
    assert rep.verdict == "pass"
    assert rep.quantity == "m"
    assert rep.slack > 0


def test_xor2_meets_pir2_xor_with_slack_one():
    rep = check_instance("pir2_xor", {"n": 8, "t": 8, "eps": Fraction(1, 2)})
    assert rep.verdict == "pass"
    assert rep.slack == pytest.approx(1.0)


def test_fabricated_instance_fails():
    rep = check_instance("pir2_xor", {"n": 30, "t": 10, "eps": Fraction(1, 2)})
    assert rep.verdict == "fail"
    assert rep.slack == pytest.approx(-19.0)
    rep = check_instance("lqdc1", {"n": 1000, "m": 2**20, "delta": 1, "eps": Fraction(1, 2)})
    assert rep.verdict == "fail"


def test_not_checkable_and_unknown():
    rep = check_instance("pir2_large_answers", {"n": 8, "t": 8, "eps": 0.5})
    assert rep.verdict == "not checkable"
    assert rep.slack is None
    assert "pir2_large_answers" in NOT_CHECKABLE
    with pytest.raises(ValueError):
        check_instance("ldc3", {"n": 4, "m": 16, "delta": 0.1, "eps": 0.1})
    with pytest.raises(ValueError):
        bound_value("pir2_large_answers", {"n": 4, "eps": 0.1})
    with pytest.raises(ValueError):
        check_instance("lqdc1", {"n": 4, "delta": 0.1, "eps": 0.1})


def test_parameter_validation():
    with pytest.raises(ValueError):
        exponent_constant("ldc2", Fraction(1, 4), Fraction(3, 4))
    with pytest.raises(ValueError):
        exponent_constant("ldc2", None, Fraction(1, 4))
    with pytest.raises(ValueError):
        exponent_constant("ldc2_alphabet", Fraction(1, 4), Fraction(1, 4), ell=0)
    with pytest.raises(ValueError):
        bound_value("ldc2", {"n": 0, "delta": 0.1, "eps": 0.1})


@given(st.sampled_from(sorted(FORMULAS)), st.fractions(Fraction(1, 1000), 1), st.fractions(Fraction(1, 1000), Fraction(1, 2)), st.integers(1, 3))
def test_constant_in_unit_interval(formula, delta, eps, ell):
    c = exponent_constant(formula, delta, eps, ell)
    assert 0 < c <= 1
    inner = {"ldc2": 3 * delta * eps / 14, "ldc2_xor": 3 * delta * eps / 8, "lqdc1": delta * eps / 4,
             "ldc2_alphabet": delta * eps / 2 ** (3 * ell + 1), "pir2": 4 * eps / 7, "pir2_xor": eps}[formula]
    # second-order expansion 1 - H(1/2 + x) ~ 2 x^2 / ln 2 as an independent check at small x
    if inner < Fraction(1, 10**4):
        assert c == pytest.approx(2 * float(inner) ** 2 / math.log(2), rel=1e-6)


@given(st.sampled_from(sorted(FORMULAS)), st.fractions(Fraction(1, 100), Fraction(1, 2)), st.fractions(Fraction(1, 100), Fraction(1, 2)), st.fractions(Fraction(1, 100), Fraction(1, 2)))
def test_constant_monotone(formula, delta, e1, e2):
    lo, hi = sorted((e1, e2))
    assert exponent_constant(formula, delta, lo) <= exponent_constant(formula, delta, hi) + 1e-15
    assert exponent_constant(formula, delta / 2, hi) <= exponent_constant(formula, delta, hi) + 1e-15


def test_report_serialization():
    reps = [
        check_instance("lqdc1", {"n": 6, "m": 64, "delta": Fraction(1, 4), "eps": Fraction(1, 2)}),
        check_instance("pir2_large_answers", {"n": 8, "t": 8, "eps": 0.5}),
    ]
    doc = json.loads(reps[0].to_json())
    assert doc["params"]["delta"] == "1/4"
    assert doc["verdict"] == "pass"
    rows = list(csv.reader(io.StringIO(reports_to_csv(reps))))
    assert rows[0][0] == "formula"
    assert rows[1][-1] == "pass"
    assert rows[2][-1] == "not checkable"
