import cmath
import math

import pytest

from delaymor import ExpressionParseError, parse_expression


def test_simple_rational():
    e = parse_expression("1/(s+1)")
    assert e.eval(1.0) == pytest.approx(0.5)
    assert e.eval(0.0) == pytest.approx(1.0)


def test_whitespace_insignificant():
    a = parse_expression("1 / ( s + 1 )")
    b = parse_expression("1/(s+1)")
    assert a.eval(2.3) == b.eval(2.3)


def test_exp_and_powers():
    e = parse_expression("s^2*exp(-2*s)")
    s = 0.7 + 0.4j
    assert e.eval(s) == pytest.approx(s**2 * cmath.exp(-2 * s))


def test_negative_exponent():
    e = parse_expression("s^-1")
    assert e.eval(4.0) == pytest.approx(0.25)


def test_unary_minus_nests():
    e = parse_expression("--s")
    assert e.eval(3.0) == pytest.approx(3.0)


def test_scientific_notation_numbers():
    e = parse_expression("1e-2*s + 2.5E3")
    assert e.eval(100.0) == pytest.approx(1.0 + 2500.0)


def test_example_transfer_value():
    # independent hand evaluation frozen below
    expr = "(2*s+1.3*exp(-s))/(s^2+1.3*s*exp(-s)+0.3*exp(-2*s))"
    e = parse_expression(expr)
    s = 1.0
    byhand = (2 * s + 1.3 * math.exp(-s)) / (
        s**2 + 1.3 * s * math.exp(-s) + 0.3 * math.exp(-2 * s))
    assert byhand == pytest.approx(1.631664281791541)
    assert e.eval(1.0) == pytest.approx(byhand, rel=1e-14)


def test_derivative_of_exp():
    d = parse_expression("exp(-s)").derivative()
    assert d.eval(0.0) == pytest.approx(-1.0)


def test_derivative_quotient_rule():
    e = parse_expression("(2*s+1)/(s^2+3)")
    d = e.derivative()
    s = 1.3 + 0.2j
    h = 1e-7
    fd = (e.eval(s + h) - e.eval(s - h)) / (2 * h)
    assert d.eval(s) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("text, pos", [
    ("1 +", 3),
    ("(s+1", 4),
    ("s^1.5", 2),
    ("sin(s)", 0),
    ("2 ** s", 3),
    ("s $ 2", 2),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ExpressionParseError) as exc:
        parse_expression(text)
    assert exc.value.position == pos


def test_trailing_garbage_rejected():
    with pytest.raises(ExpressionParseError):
        parse_expression("s+1 )")
