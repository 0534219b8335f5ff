import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import affine_add, affine_mul, all_affine_points, to_aff
from expsos.arith import ArithContext
from expsos.curve import (
    INFINITY,
    CurveParams,
    ProjectivePoint,
    add,
    add_formula,
    double,
    double_formula,
    group_order_bruteforce,
    linear_combination,
    load_curve,
    negate,
    on_curve,
    point_add,
    point_double,
    proj_eq,
    save_curve,
    scalar_mul,
)
from expsos.errors import DegenerateAdditionError, DomainError, InvalidModulusError


def test_curve_validation():
    with pytest.raises(InvalidModulusError):
        CurveParams(2, 3, 91, 1)
    with pytest.raises(DomainError):
        CurveParams(0, 0, 97, 1)


def test_point_count(f97):
    assert len(all_affine_points(f97)) + 1 == 100


def test_exhaustive_add_double_against_affine(f97):
    pts = all_affine_points(f97)
    ctx = ArithContext()
    for P in pts:
        PP = ProjectivePoint.affine(*P)
        for Q in pts:
            expected = affine_add(f97, P, Q)
            assert to_aff(f97, add(ctx, f97, PP, ProjectivePoint.affine(*Q))) == expected


def test_formula_costs(f97):
    ctx = ArithContext()
    P, Q = ProjectivePoint.affine(3, 6), ProjectivePoint.affine(80, 10)
    add_formula(ctx, P, Q, f97.p)
    assert ctx.mult_count == 14
    ctx = ArithContext()
    double_formula(ctx, P, f97.coef_b, f97.p)
    assert ctx.mult_count == 12


def test_point_add_degenerate(f97):
    P = ProjectivePoint.affine(3, 6)
    with pytest.raises(DegenerateAdditionError):
        point_add(ArithContext(), f97, P, P)
    with pytest.raises(DegenerateAdditionError):
        point_add(ArithContext(), f97, P, negate(f97, P))
    with pytest.raises(DomainError):
        point_add(ArithContext(), f97, P, INFINITY)


def test_identity_and_two_torsion(f97):
    ctx = ArithContext()
    P = ProjectivePoint.affine(3, 6)
    assert add(ctx, f97, INFINITY, P) == P and double(ctx, f97, INFINITY).is_infinity
    two_torsion = [pt for pt in all_affine_points(f97) if pt[1] == 0]
    for pt in two_torsion:
        assert point_double(ctx, f97, ProjectivePoint.affine(*pt)).is_infinity


def test_proj_eq_scaling(f97):
    P = ProjectivePoint.affine(3, 6)
    assert proj_eq(f97, P, ProjectivePoint(3 * 5, 6 * 5, 5))
    assert not proj_eq(f97, P, ProjectivePoint.affine(3, 91))
    assert proj_eq(f97, INFINITY, ProjectivePoint(0, 7, 0))


def test_on_curve(f97):
    assert on_curve(f97, ProjectivePoint.affine(0, 10))
    assert on_curve(f97, INFINITY)
    assert not on_curve(f97, ProjectivePoint(0, 0, 0))
    assert not on_curve(f97, ProjectivePoint.affine(0, 11))


def test_scalar_mul_against_repeated_addition(f97):
    ctx = ArithContext()
    for pt in ((0, 10), (3, 6), (21, 24)):
        P = ProjectivePoint.affine(*pt)
        for s in range(0, 60):
            assert to_aff(f97, scalar_mul(ctx, f97, s, P)) == affine_mul(f97, s, pt)


def test_group_orders(f97):
    assert group_order_bruteforce(f97, f97.base) == 50
    assert group_order_bruteforce(f97, ProjectivePoint.affine(3, 6)) == 5
    assert group_order_bruteforce(f97, INFINITY) == 1


def test_group_order_refuses_large_field(p256):
    with pytest.raises(DomainError):
        group_order_bruteforce(p256, p256.base)


def test_p256_known_multiple(p256):
    # [2]G for P-256, published test vector
    Q = scalar_mul(ArithContext(), p256, 2, p256.base)
    x, _ = to_aff(p256, Q)
    assert x == 0x7CF27B188D034F7E8A52380304B51AC3C08969E277F21B35A60B48FC47669978
    assert scalar_mul(ArithContext(), p256, p256.m, p256.base).is_infinity


@settings(max_examples=200, deadline=None)
@given(s1=st.integers(0, 200), s2=st.integers(0, 200))
def test_linear_combination(f97, s1, s2):
    P1, P2 = f97.base, ProjectivePoint.affine(3, 6)
    ctx = ArithContext()
    R = linear_combination(ctx, f97, s1, P1, s2, P2)
    expected = affine_add(f97, affine_mul(f97, s1 % 50, (0, 10)), affine_mul(f97, s2 % 5, (3, 6)))
    assert to_aff(f97, R) == expected
    assert ctx.point_ops <= max(2 * max(s1.bit_length(), s2.bit_length()) - 1, 1)


def test_curve_file_round_trip(tmp_path, f97):
    path = tmp_path / "c.json"
    save_curve(f97, path)
    assert json.loads(path.read_text()) == {"b": "2", "c": "3", "p": "61", "m": "32", "gx": "0", "gy": "a"}
    assert load_curve(path) == f97


def test_curve_file_off_curve_base(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"b": "2", "c": "3", "p": "61", "m": "32", "gx": "0", "gy": "b"}')
    with pytest.raises(DomainError):
        load_curve(path)
