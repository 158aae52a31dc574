import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disknorms.expr import (Add, Const, EvalDomainError, Mul, Neg,
                            NotPolynomialError, ParseError, Pow, Z,
                            boundary_singularities, boundary_structure,
                            evaluate, exponent_value, parse,
                            substitute_negate, substitute_rotate,
                            substitute_square, to_polynomial, to_string,
                            BoundaryEvaluator)

RNG = np.random.default_rng(42)
POINTS = 0.8 * np.sqrt(RNG.uniform(size=16)) * np.exp(
    2j * math.pi * RNG.uniform(size=16))


def close(a, b, tol=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(a))))
    return float(np.max(np.abs(a - b))) <= tol * scale


# ---------------------------------------------------------------------------
# parsing and printing

GRAMMAR_SAMPLES = [
    "1",
    "z",
    "1+z",
    "(1+z)^2",
    "1/(1-z)",
    "(1+z)/(1-z)",
    "(4*z)/(1-z^2)",
    "-1/(1+z)",
    "(1+z)^(4/p)",
    "(1+z)^(2-eps) / (1-z)^(2+eps)",
    "(8*z*(1+z^2)) / (1-z^2)^(2+eps)",
    "(1-z)^(-1/4)",
    "(1-z)^(-alpha)",
    "2*z^3 - z + 0.5",
    "(1+2*z)*(3-z)",
    "z^2*(1-z)^(-0.25)",
]

ENV = {"p": 0.25, "eps": 0.5, "alpha": 1.5, "q": 2.0}


@pytest.mark.parametrize("text", GRAMMAR_SAMPLES)
def test_round_trip_evaluates_identically(text):
    e = parse(text)
    e2 = parse(to_string(e))
    assert close(evaluate(e, POINTS, ENV), evaluate(e2, POINTS, ENV))


def test_parse_rejects_garbage():
    for bad in ["", "1+", "(1+z", "z^", "w+1", "1//z", "^2", "1..2"]:
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc_info:
        parse("1+*z")
    assert exc_info.value.position == 2


def test_unknown_parameter_rejected():
    with pytest.raises(ParseError):
        parse("(1+z)^(1/t)")


def test_evaluate_hand_values():
    f = parse("(1+z)/(1-z)")
    assert close(evaluate(f, 0.0), 1.0)
    assert close(evaluate(f, 0.5j), (1 + 0.5j) / (1 - 0.5j))
    g = parse("(1+z)^(4/p)")
    assert close(evaluate(g, 0.5, {"p": 4.0}), 1.5)
    assert close(evaluate(g, 0.0, {"p": 0.25}), 1.0)


def test_unbound_parameter_raises():
    with pytest.raises(EvalDomainError):
        evaluate(parse("(1+z)^(4/p)"), 0.3)


def test_division_by_zero_raises():
    with pytest.raises(EvalDomainError):
        evaluate(parse("1/(1-z)"), 1.0)


def test_exponent_value():
    e = parse("(1-z)^(-(2+eps))")
    assert exponent_value(e.exponent, {"eps": 0.5}) == -2.5
    assert exponent_value(parse("4/p").exponent if False else
                          parse("(1+z)^(4/p)").exponent,
                          {"p": 0.25}) == 16.0


# ---------------------------------------------------------------------------
# substitutions


@pytest.mark.parametrize("text", GRAMMAR_SAMPLES)
def test_substitute_negate_matches_pointwise(text):
    e = parse(text)
    assert close(evaluate(substitute_negate(e), POINTS, ENV),
                 evaluate(e, -POINTS, ENV))


@pytest.mark.parametrize("text", ["1+z", "(1+z)^2", "2*z^3 - z + 0.5",
                                  "(1+2*z)*(3-z)"])
def test_substitute_square_matches_pointwise(text):
    e = parse(text)
    assert close(evaluate(substitute_square(e), POINTS, ENV),
                 evaluate(e, POINTS ** 2, ENV))


def test_substitute_rotate_matches_pointwise():
    lam = complex(math.cos(0.7), math.sin(0.7))
    for text in GRAMMAR_SAMPLES:
        e = parse(text)
        assert close(evaluate(substitute_rotate(e, lam), POINTS, ENV),
                     evaluate(e, lam * POINTS, ENV))


# ---------------------------------------------------------------------------
# polynomials


def _eval_coeffs(coeffs, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@st.composite
def polynomial_exprs(draw, depth=0):
    options = ["const", "z"]
    if depth < 4:
        options += ["add", "mul", "neg", "pow"]
    kind = draw(st.sampled_from(options))
    if kind == "const":
        return Const(complex(draw(st.integers(-5, 5))))
    if kind == "z":
        return Z()
    if kind == "neg":
        return Neg(draw(polynomial_exprs(depth=depth + 1)))
    if kind == "pow":
        base = draw(polynomial_exprs(depth=depth + 1))
        return Pow(base, Const(complex(draw(st.integers(0, 3)))))
    left = draw(polynomial_exprs(depth=depth + 1))
    right = draw(polynomial_exprs(depth=depth + 1))
    return (Add if kind == "add" else Mul)(left, right)


@given(polynomial_exprs())
def test_to_polynomial_matches_direct_evaluation(e):
    coeffs = to_polynomial(e).coeffs
    direct = evaluate(e, POINTS)
    via_coeffs = _eval_coeffs(coeffs, POINTS)
    scale = max(1.0, float(np.max(np.abs(direct))))
    assert float(np.max(np.abs(direct - via_coeffs))) <= 1e-12 * scale


def test_to_polynomial_known_coefficients():
    assert to_polynomial(parse("(1+z)^2")).coeffs == (1 + 0j, 2 + 0j, 1 + 0j)
    assert to_polynomial(parse("2*z^3 - z + 0.5")).coeffs == \
        (0.5 + 0j, -1 + 0j, 0j, 2 + 0j)


def test_to_polynomial_rejects_non_polynomial():
    with pytest.raises(NotPolynomialError):
        to_polynomial(parse("1/(1-z)"))
    with pytest.raises(NotPolynomialError):
        to_polynomial(parse("(1-z)^(-1/4)"))


def test_to_polynomial_parameterized_exponent():
    coeffs = to_polynomial(parse("(1+z)^(4/p)"), {"p": 2.0}).coeffs
    assert coeffs == (1 + 0j, 2 + 0j, 1 + 0j)


# ---------------------------------------------------------------------------
# boundary structure


def test_boundary_singularities_basic():
    assert boundary_singularities(parse("1/(1-z)")) == {0.0}
    assert boundary_singularities(parse("(1+z)/(1-z)")) == {0.0}
    assert boundary_singularities(parse("1/(1-z^2)")) == {0.0, math.pi}
    assert boundary_singularities(parse("(1+z)^(4/p)"), {"p": 0.25}) == set()


def test_boundary_structure_strengths():
    st_ = boundary_structure(parse("(1+z)^(2-eps) / (1-z)^(2+eps)"),
                             {"eps": 0.15})
    assert len(st_.singular) == 1
    pt = st_.singular[0]
    assert pt.angle == 0.0 and pt.root == 1 + 0j
    assert pt.blowup == pytest.approx(2.15, abs=0)
    assert st_.zeros == (math.pi,)


def test_boundary_structure_symmetric_pair():
    st_ = boundary_structure(parse("(8*z*(1+z^2)) / (1-z^2)^(2+eps)"),
                             {"eps": 1.0})
    assert sorted(s.angle for s in st_.singular) == [0.0, math.pi]
    assert all(s.blowup == 3.0 for s in st_.singular)
    assert sorted(st_.zeros) == pytest.approx([math.pi / 2, 3 * math.pi / 2])


def test_boundary_structure_rotated_root_snaps():
    lam = complex(math.cos(1.0), math.sin(1.0))
    st_ = boundary_structure(substitute_rotate(parse("1/(1-z)"), lam))
    assert len(st_.singular) == 1
    # singularity where lam*z = 1, i.e. at canonical angle 2*pi - 1
    assert st_.singular[0].angle == pytest.approx(2 * math.pi - 1.0,
                                                  abs=1e-12)


# ---------------------------------------------------------------------------
# cancellation-safe boundary evaluation


def test_near_matches_direct_at_moderate_offsets():
    ev = BoundaryEvaluator(parse("(1+z)/(1-z)"))
    for delta, gap in [(1e-3, 0.0), (1e-5, 1e-4), (-1e-4, 1e-6)]:
        z = (1.0 - gap) * complex(math.cos(delta), math.sin(delta))
        assert close(ev.near(1 + 0j, delta, gap), evaluate(parse(
            "(1+z)/(1-z)"), z), tol=1e-11)


def test_near_is_accurate_far_below_machine_epsilon():
    ev = BoundaryEvaluator(parse("1/(1-z)"))
    for delta in (1e-30, 1e-100, 1e-250):
        got = abs(complex(ev.near(1 + 0j, delta, 0.0)))
        want = 1.0 / (2.0 * math.sin(delta / 2.0))
        assert got == pytest.approx(want, rel=1e-13)


def test_near_with_radial_gap_only():
    ev = BoundaryEvaluator(parse("1/(1-z)"))
    gap = 1e-200
    got = abs(complex(ev.near(1 + 0j, 0.0, gap)))
    assert got == pytest.approx(1.0 / gap, rel=1e-13)


def test_near_at_negative_anchor():
    ev = BoundaryEvaluator(parse("-1/(1+z)"))
    delta = 1e-40
    got = abs(complex(ev.near(-1 + 0j, delta, 0.0)))
    assert got == pytest.approx(1.0 / (2.0 * math.sin(delta / 2.0)),
                                rel=1e-13)
