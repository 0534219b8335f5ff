"""Short-Weierstrass curves y^2 = x^3 + b*x + c in homogeneous projective coordinates.

Counting convention: multiplications by the small constants 2, 3, 4 and 8
appearing in the add/double formulas are done with additions and are not
charged to the context. Under that convention an addition costs exactly 14
counted multiplications and a doubling exactly 12.

The raw formula functions take an explicit modulus so the same code serves
both the client (over F_p) and the worker (over the blinded ring Z_N).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .arith import ArithContext, from_hex, is_probable_prime, mod_mul, to_hex
from .errors import DegenerateAdditionError, DomainError, InvalidModulusError

BRUTEFORCE_LIMIT = 1 << 20


@dataclass(frozen=True)
class ProjectivePoint:
    x: int
    y: int
    z: int

    @property
    def is_infinity(self) -> bool:
        return self.z == 0

    def reduce(self, modulus: int) -> "ProjectivePoint":
        return ProjectivePoint(self.x % modulus, self.y % modulus, self.z % modulus)

    @classmethod
    def affine(cls, x: int, y: int) -> "ProjectivePoint":
        return cls(x, y, 1)


INFINITY = ProjectivePoint(0, 1, 0)


@dataclass(frozen=True)
class CurveParams:
    coef_b: int
    coef_c: int
    p: int
    m: int
    base: ProjectivePoint | None = None

    def __post_init__(self) -> None:
        if not is_probable_prime(self.p):
            raise InvalidModulusError(f"field modulus {self.p} is not prime")
        if (4 * self.coef_b**3 + 27 * self.coef_c**2) % self.p == 0:
            raise DomainError("singular curve: discriminant vanishes")
        if self.m < 1:
            raise DomainError("torsion order must be positive")


def add_formula(ctx: ArithContext, P: ProjectivePoint, Q: ProjectivePoint, mod: int) -> ProjectivePoint:
    """P + Q for P != +-Q, no case analysis. 14 counted multiplications."""
    x1, y1, z1 = P.x, P.y, P.z
    x2, y2, z2 = Q.x, Q.y, Q.z
    y1z2 = mod_mul(ctx, y1, z2, mod)
    x1z2 = mod_mul(ctx, x1, z2, mod)
    z1z2 = mod_mul(ctx, z1, z2, mod)
    A = (mod_mul(ctx, y2, z1, mod) - y1z2) % mod
    B = (mod_mul(ctx, x2, z1, mod) - x1z2) % mod
    B2 = mod_mul(ctx, B, B, mod)
    B3 = mod_mul(ctx, B2, B, mod)
    B2x1z2 = mod_mul(ctx, B2, x1z2, mod)
    C = (mod_mul(ctx, mod_mul(ctx, A, A, mod), z1z2, mod) - B3 - (B2x1z2 + B2x1z2)) % mod
    x3 = mod_mul(ctx, B, C, mod)
    y3 = (mod_mul(ctx, A, B2x1z2 - C, mod) - mod_mul(ctx, B3, y1z2, mod)) % mod
    z3 = mod_mul(ctx, B3, z1z2, mod)
    return ProjectivePoint(x3, y3, z3)


def double_formula(ctx: ArithContext, P: ProjectivePoint, coef_b: int, mod: int) -> ProjectivePoint:
    """2P with no case analysis. 12 counted multiplications."""
    x1, y1, z1 = P.x, P.y, P.z
    x1sq = mod_mul(ctx, x1, x1, mod)
    A = (mod_mul(ctx, coef_b, mod_mul(ctx, z1, z1, mod), mod) + x1sq + x1sq + x1sq) % mod
    B = mod_mul(ctx, y1, z1, mod)
    y1B = mod_mul(ctx, y1, B, mod)
    C = mod_mul(ctx, x1, y1B, mod)
    C4 = (C + C + C + C) % mod
    C8 = (C4 + C4) % mod
    D = (mod_mul(ctx, A, A, mod) - C8) % mod
    BD = mod_mul(ctx, B, D, mod)
    x4 = (BD + BD) % mod
    # 8*y1^2*B^2 == 8*(y1*B)^2
    y1B_sq = mod_mul(ctx, y1B, y1B, mod)
    y1B_sq8 = (y1B_sq * 8) % mod
    y4 = (mod_mul(ctx, A, C4 - D, mod) - y1B_sq8) % mod
    B3 = mod_mul(ctx, mod_mul(ctx, B, B, mod), B, mod)
    z4 = (B3 * 8) % mod
    return ProjectivePoint(x4, y4, z4)


def point_add(ctx: ArithContext, E: CurveParams, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
    """P + Q over F_p; requires P != +-Q and neither at infinity."""
    if P.is_infinity or Q.is_infinity:
        raise DomainError("point_add does not take the point at infinity")
    R = add_formula(ctx, P, Q, E.p)
    if R.z == 0:
        raise DegenerateAdditionError("P == +-Q: use point_double or the identity")
    return R


def point_double(ctx: ArithContext, E: CurveParams, P: ProjectivePoint) -> ProjectivePoint:
    if P.is_infinity:
        raise DomainError("point_double does not take the point at infinity")
    if P.y % E.p == 0:
        return INFINITY
    return double_formula(ctx, P, E.coef_b, E.p)


def negate(E: CurveParams, P: ProjectivePoint) -> ProjectivePoint:
    return ProjectivePoint(P.x, (-P.y) % E.p, P.z)


def proj_eq(E: CurveParams, P: ProjectivePoint, Q: ProjectivePoint) -> bool:
    """Same projective class, by cross-multiplication (no inversion)."""
    p = E.p
    if P.z % p == 0 or Q.z % p == 0:
        return P.z % p == 0 and Q.z % p == 0
    return (P.x * Q.z - Q.x * P.z) % p == 0 and (P.y * Q.z - Q.y * P.z) % p == 0


def on_curve(E: CurveParams, P: ProjectivePoint) -> bool:
    p = E.p
    x, y, z = P.x % p, P.y % p, P.z % p
    if x == y == z == 0:
        return False
    lhs = y * y * z
    rhs = x**3 + E.coef_b * x * z * z + E.coef_c * z**3
    return (lhs - rhs) % p == 0


def add(ctx: ArithContext, E: CurveParams, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
    """Group law with the identity and inverse cases dispatched."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if proj_eq(E, P, Q):
        ctx.point_ops += 1
        return point_double(ctx, E, P)
    if proj_eq(E, P, negate(E, Q)):
        return INFINITY
    ctx.point_ops += 1
    return point_add(ctx, E, P, Q)


def double(ctx: ArithContext, E: CurveParams, P: ProjectivePoint) -> ProjectivePoint:
    if P.is_infinity:
        return P
    ctx.point_ops += 1
    return point_double(ctx, E, P)


def scalar_mul(ctx: ArithContext, E: CurveParams, s: int, P: ProjectivePoint) -> ProjectivePoint:
    """[s]P by left-to-right double-and-add."""
    if s < 0:
        raise DomainError("negative scalar")
    R = INFINITY
    for bit in bin(s)[2:]:
        R = double(ctx, E, R)
        if bit == "1":
            R = add(ctx, E, R, P)
    return R


def linear_combination(
    ctx: ArithContext, E: CurveParams, s1: int, P1: ProjectivePoint, s2: int, P2: ProjectivePoint
) -> ProjectivePoint:
    """[s1]P1 + [s2]P2 with one shared doubling chain (Shamir's trick).

    Costs at most 2*max(bitlen(s1), bitlen(s2)) - 1 point operations.
    """
    if s1 < 0 or s2 < 0:
        raise DomainError("negative scalar")
    both = add(ctx, E, P1, P2)
    table = {(1, 0): P1, (0, 1): P2, (1, 1): both}
    width = max(s1.bit_length(), s2.bit_length())
    R = INFINITY
    for i in range(width - 1, -1, -1):
        R = double(ctx, E, R)
        key = ((s1 >> i) & 1, (s2 >> i) & 1)
        if key != (0, 0):
            R = add(ctx, E, R, table[key])
    return R


def to_affine(E: CurveParams, P: ProjectivePoint) -> tuple[int, int] | None:
    """Affine coordinates (None for infinity). Uses an inversion: diagnostics only."""
    if P.z % E.p == 0:
        return None
    zi = pow(P.z, -1, E.p)
    return (P.x * zi % E.p, P.y * zi % E.p)


def group_order_bruteforce(E: CurveParams, P: ProjectivePoint) -> int:
    """Smallest m >= 1 with [m]P = O, by repeated addition. Small fields only."""
    if E.p > BRUTEFORCE_LIMIT:
        raise DomainError(f"brute-force order refused for p > 2^20 (p = {E.p})")
    if P.is_infinity:
        return 1
    ctx = ArithContext()
    R, m = P, 1
    while not R.is_infinity:
        R = add(ctx, E, R, P)
        m += 1
        if m > 2 * E.p + 2:
            raise DomainError("point is not on the curve")
    return m


def save_curve(E: CurveParams, path: str | os.PathLike) -> None:
    if E.base is None:
        raise DomainError("curve file needs a base point")
    gx, gy = to_affine(E, E.base)
    doc = {k: to_hex(v) for k, v in
           (("b", E.coef_b), ("c", E.coef_c), ("p", E.p), ("m", E.m), ("gx", gx), ("gy", gy))}
    Path(path).write_text(json.dumps(doc) + "\n")


def curve_from_json(doc: dict) -> CurveParams:
    E = CurveParams(
        from_hex(doc["b"]), from_hex(doc["c"]), from_hex(doc["p"]), from_hex(doc["m"]),
        ProjectivePoint.affine(from_hex(doc["gx"]), from_hex(doc["gy"])),
    )
    if not on_curve(E, E.base):
        raise DomainError("base point is not on the curve")
    return E


def load_curve(path: str | os.PathLike) -> CurveParams:
    return curve_from_json(json.loads(Path(path).read_text()))
