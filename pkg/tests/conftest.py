import json
from importlib import resources

import pytest

from expsos.arith import ArithContext
from expsos.blind import load_key
from expsos.curve import CurveParams, ProjectivePoint, curve_from_json


def _data(name):
    return resources.files("expsos").joinpath("data", name)


@pytest.fixture
def ctx():
    return ArithContext(1234)


@pytest.fixture
def example_key():
    with resources.as_file(_data("example1_key.json")) as path:
        return load_key(path)


@pytest.fixture(scope="session")
def golden():
    return json.loads(_data("golden_example1.json").read_text())


@pytest.fixture(scope="session")
def f97():
    # y^2 = x^3 + 2x + 3 over F_97, 100 points; base (0, 10) of order 50
    return curve_from_json(json.loads(_data("f97.json").read_text()))


@pytest.fixture(scope="session")
def p256():
    return curve_from_json(json.loads(_data("p256.json").read_text()))


# --- independent affine oracle (chord and tangent, with inversions) ---

def affine_add(E: CurveParams, P, Q):
    """P, Q are (x, y) tuples or None for the identity."""
    p = E.p
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + E.coef_b) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def affine_mul(E, s, P):
    R = None
    for _ in range(s):
        R = affine_add(E, R, P)
    return R


def all_affine_points(E):
    p = E.p
    return [(x, y) for x in range(p) for y in range(p)
            if (y * y - (x ** 3 + E.coef_b * x + E.coef_c)) % p == 0]


def to_aff(E, P: ProjectivePoint):
    if P.z % E.p == 0:
        return None
    zi = pow(P.z, -1, E.p)
    return P.x * zi % E.p, P.y * zi % E.p
