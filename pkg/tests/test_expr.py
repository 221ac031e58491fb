import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ktlab.expr import (
    BinOp,
    Blaschke,
    Cayley,
    Const,
    EvaluationError,
    Neg,
    ParseError,
    Pow,
    Series,
    Var,
    check_denominators,
    compose,
    parse_expr,
    validate_self_map,
)

PTS = np.array([0, 0.3, -0.5j, 0.7 + 0.2j, np.exp(1j)], dtype=complex)


@pytest.mark.parametrize(
    "src, ref",
    [
        ("(1+z)/2", lambda z: (1 + z) / 2),
        ("z^2 - 3*z + 1", lambda z: z**2 - 3 * z + 1),
        ("-z^2", lambda z: -(z**2)),
        ("2^3^2", lambda z: 2.0**9 + 0 * z),
        ("z^(-1)", lambda z: 1 / z),
        ("exp(i*pi/3)*z", lambda z: np.exp(1j * np.pi / 3) * z),
        ("blaschke(0.5)", lambda z: (0.5 - z) / (1 - 0.5 * z)),
        ("blaschke(0.5, z^2)", lambda z: (0.5 - z**2) / (1 - 0.5 * z**2)),
        ("series([1, 2, 3])", lambda z: 1 + 2 * z + 3 * z**2),
        ("series([1, 1], z/2)", lambda z: 1 + z / 2),
        ("moebius_cayley", lambda z: (1 - z) / (1 + z)),
        ("moebius_cayley(z/2)", lambda z: (1 - z / 2) / (1 + z / 2)),
        ("compose(z^2, (1+z)/2)", lambda z: ((1 + z) / 2) ** 2),
        ("exp(z) * 0.5 + 1e-3", lambda z: np.exp(z) * 0.5 + 1e-3),
    ],
)
def test_parse_and_evaluate(src, ref):
    e = parse_expr(src)
    z = PTS[1:] if "^(-1)" in src else PTS
    np.testing.assert_allclose(e(z), ref(z), rtol=1e-14, atol=1e-14)


def test_half_plane_variable():
    e = parse_expr("2*s + 1", "s")
    assert complex(e(1.0)) == 3
    with pytest.raises(ParseError) as ei:
        parse_expr("z", "s")
    assert ei.value.kind == "unknown-identifier"


@pytest.mark.parametrize(
    "src, kind",
    [
        ("", "syntax"),
        ("1 +", "syntax"),
        ("(z", "syntax"),
        ("2z", "syntax"),
        ("w + 1", "unknown-identifier"),
        ("blaschke(1.2)", "parameter-out-of-range"),
        ("blaschke(0.5, z, z)", "arity"),
        ("exp(z, z)", "arity"),
        ("z^z", "syntax"),
        ("z^0.5", "syntax"),
        ("series([])", "arity"),
        ("blaschke", "arity"),
    ],
)
def test_parse_errors(src, kind):
    with pytest.raises(ParseError) as ei:
        parse_expr(src)
    assert ei.value.kind == kind
    assert 0 <= ei.value.position <= max(len(src) - 1, 0)


def test_constant_folding_and_degree():
    e = parse_expr("(2 + 3) * z^3 + z")
    assert e.degree() == 3
    assert parse_expr("1/(1-z)").degree() is None
    assert parse_expr("2*3").is_constant()
    assert isinstance(parse_expr("2*3"), Const)


def test_compose_substitutes():
    outer = parse_expr("z^2 + 1")
    inner = parse_expr("(1+z)/2")
    c = compose(outer, inner)
    np.testing.assert_allclose(c(PTS), outer(inner(PTS)), rtol=1e-14)
    b = compose(Blaschke(0.3), Cayley())
    np.testing.assert_allclose(b(PTS), Blaschke(0.3)(Cayley()(PTS)), rtol=1e-14)


def test_self_map_validation():
    assert validate_self_map(parse_expr("(1+z)/2")).passed
    assert validate_self_map(parse_expr("blaschke(0.9)")).passed
    rep = validate_self_map(parse_expr("1.01*z"))
    assert not rep.passed and rep.max_modulus == pytest.approx(1.01)
    rep = validate_self_map(parse_expr("1/(z-0.5)"))
    assert not rep.passed


def test_check_denominators():
    e = check_denominators(parse_expr("1/(2+z)"))
    assert isinstance(e, BinOp) and e.denominator_checked
    with pytest.raises(EvaluationError):
        check_denominators(parse_expr("1/(1-z)"))


coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@given(st.lists(coef, min_size=1, max_size=6))
def test_series_matches_polyval(cs):
    e = Series(tuple(cs))
    np.testing.assert_allclose(e(PTS), np.polyval(cs[::-1], PTS), rtol=1e-12, atol=1e-12)


small = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
trees = st.recursive(
    st.one_of(st.just(Var()), small.map(Const), st.just(Cayley())),
    lambda kids: st.one_of(
        st.tuples(st.sampled_from("+-*"), kids, kids).map(lambda t: BinOp(*t)),
        st.tuples(kids, st.integers(0, 3)).map(lambda t: Pow(*t)),
        kids.map(Neg),
        st.tuples(st.just(Blaschke(0.25 - 0.5j)), kids).map(lambda t: compose(*t)),
    ),
    max_leaves=8,
)


@given(trees)
def test_source_round_trip(e):
    e2 = parse_expr(e.to_source())
    a, b = e(PTS[:4]), e2(PTS[:4])
    ok = np.isfinite(a)
    np.testing.assert_allclose(b[ok], a[ok], rtol=1e-9, atol=1e-9)


@given(st.complex_numbers(max_magnitude=0.99, allow_nan=False, allow_infinity=False))
def test_blaschke_is_inner(a):
    if abs(a) >= 0.99:
        return
    b = Blaschke(a)
    circle = np.exp(2j * np.pi * np.arange(64) / 64)
    np.testing.assert_allclose(np.abs(b(circle)), 1, atol=1e-10)
    assert abs(complex(b(a))) < 1e-12
    assert validate_self_map(b).passed
