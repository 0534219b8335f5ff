"""Outsourcing of point addition/doubling and scalar multiplication.

The field prime p is hidden inside the ring modulus N = p*q. Coordinates and
curve coefficients are blinded with random multiples of p, the scalar with a
random multiple of the base point's order m. The worker runs the projective
formulas over Z_N without ever normalizing; reducing its answer mod p gives
the F_p result.

The worker cannot detect the exceptional cases of the addition law mod p
(adding P to +-P, or operating on the identity), so an unlucky blinded
scalar would drive its ladder through a degenerate step. Before sending, the
client replays the ladder on residues mod m and redraws the blinding
multiple if any step would be exceptional, falling back to asking for
[m - s]P and negating. An off-curve answer is still caught at recovery and
retried.
"""
from __future__ import annotations

from dataclasses import dataclass

from .arith import ArithContext, gen_prime, is_probable_prime
from .blind import VerificationTag, draw_tag
from .curve import (
    CurveParams,
    ProjectivePoint,
    linear_combination,
    on_curve,
    proj_eq,
)
from .errors import (
    DegenerateAdditionError,
    DomainError,
    IntegrityError,
    InvalidModulusError,
    SessionError,
)

MAX_RETRIES = 4
_SCREEN_DRAWS = 64


@dataclass(frozen=True)
class EcOutsourceKey:
    field_p: int
    q: int
    N: int

    def __post_init__(self) -> None:
        if self.N != self.field_p * self.q:
            raise InvalidModulusError("N must equal p * q")
        if self.q == self.field_p or not is_probable_prime(self.q):
            raise InvalidModulusError("q must be a prime distinct from p")


@dataclass(frozen=True)
class TransformedCurve:
    coef_b: int
    coef_c: int
    modulus: int


def ec_keygen(field_p: int, q_bits: int, ctx: ArithContext) -> EcOutsourceKey:
    while True:
        q = gen_prime(q_bits, ctx)
        if q != field_p:
            return EcOutsourceKey(field_p, q, field_p * q)


def _blind_coord(key: EcOutsourceKey, v: int, k: int, ctx: ArithContext) -> int:
    return (v + ctx.mul(k, key.field_p)) % key.N


def conceal_point(
    key: EcOutsourceKey, P: ProjectivePoint, ctx: ArithContext, *, ks: tuple[int, int, int] | None = None
) -> ProjectivePoint:
    """Blind each coordinate with its own fresh multiple of p."""
    if ks is None:
        ks = tuple(ctx.randrange(1, key.q) for _ in range(3))
    return ProjectivePoint(*(_blind_coord(key, v, k, ctx) for v, k in zip((P.x, P.y, P.z), ks)))


def conceal_curve(
    key: EcOutsourceKey, E: CurveParams, ctx: ArithContext, *, ks: tuple[int, int] | None = None
) -> TransformedCurve:
    if E.p != key.field_p:
        raise DomainError("key was generated for a different field")
    if ks is None:
        ks = (ctx.randrange(1, key.q), ctx.randrange(1, key.q))
    k4, k6 = ks
    return TransformedCurve(_blind_coord(key, E.coef_b, k4, ctx), _blind_coord(key, E.coef_c, k6, ctx), key.N)


def recover_point(key: EcOutsourceKey, E: CurveParams, P: ProjectivePoint) -> ProjectivePoint:
    R = P.reduce(key.field_p)
    if not on_curve(E, R):
        raise IntegrityError("recovered point is not on the curve")
    return R


def ladder_is_regular(s: int, m: int) -> bool:
    """Whether formal double-and-add for [s]P, with P of order m, avoids the
    exceptional cases of the projective formulas.

    Tracks the multiple j of P held by the accumulator. Forbidden: any
    operation on j = 0 (identity), adding P to j = 1 (P + P), and reaching
    j = 0 before the final step. Reaching the identity on the last step is
    fine: the formulas then output a valid (0 : y : 0).
    """
    if s <= 0:
        return False
    steps = []
    for bit in bin(s)[3:]:
        steps.append("d")
        if bit == "1":
            steps.append("a")
    j = 1 % m
    for i, op in enumerate(steps):
        if j == 0:
            return False
        if op == "a" and j == 1 % m:
            return False
        j = (2 * j if op == "d" else j + 1) % m
        if j == 0 and i != len(steps) - 1:
            return False
    return True


def conceal_scalar_screened(m: int, s: int, ctx: ArithContext, *, r: int | None = None) -> tuple[int, bool]:
    """(s', negated) with s' = s + r*m, or s' = (m - s) + r*m and negated set,
    redrawn until the worker's ladder is regular.

    The negated form is needed because some residues have no regular ladder
    at all (s = 1 with m even: the last step would have to be O + P or a
    doubling onto P). The client flips the sign of the recovered point.
    """
    if r is not None:
        return s + ctx.mul(r, m), False
    for i in range(_SCREEN_DRAWS):
        negated = bool(i % 2)
        base = (m - s) % m if negated else s
        cand_r = ctx.randrange(1, m) if m > 1 else 1
        cand = base + cand_r * m
        if ladder_is_regular(cand, m):
            ctx.mult_count += 1
            return cand, negated
    raise SessionError(f"no regular blinding found for s={s} mod {m}")


def _signed(E: CurveParams, P: ProjectivePoint, negated: bool) -> ProjectivePoint:
    return ProjectivePoint(P.x, -P.y % E.p, P.z) if negated else P


def outsource_point_add(
    key: EcOutsourceKey, E: CurveParams, P: ProjectivePoint, Q: ProjectivePoint, worker, ctx: ArithContext
) -> ProjectivePoint:
    """P + Q with the formula evaluated by the worker over Z_N."""
    if P.is_infinity or Q.is_infinity:
        raise DomainError("outsourced addition takes finite points")
    if proj_eq(E, P, Q) or proj_eq(E, P, ProjectivePoint(Q.x, -Q.y % E.p, Q.z)):
        raise DegenerateAdditionError("P == +-Q; use outsource_point_double")
    last_error: Exception | None = None
    for _ in range(MAX_RETRIES + 1):
        curve = conceal_curve(key, E, ctx)
        answer = worker.serve_point_add(curve, conceal_point(key, P, ctx), conceal_point(key, Q, ctx))
        try:
            return recover_point(key, E, answer)
        except IntegrityError as exc:
            last_error = exc
    raise SessionError("point addition failed after retries") from last_error


def outsource_point_double(
    key: EcOutsourceKey, E: CurveParams, P: ProjectivePoint, worker, ctx: ArithContext
) -> ProjectivePoint:
    if P.is_infinity or P.y % E.p == 0:
        raise DomainError("doubling needs a finite point of order > 2")
    last_error: Exception | None = None
    for _ in range(MAX_RETRIES + 1):
        answer = worker.serve_point_double(conceal_curve(key, E, ctx), conceal_point(key, P, ctx))
        try:
            return recover_point(key, E, answer)
        except IntegrityError as exc:
            last_error = exc
    raise SessionError("point doubling failed after retries") from last_error


def outsource_scalar_mul_hcs(
    key: EcOutsourceKey, E: CurveParams, s: int, P: ProjectivePoint, worker, ctx: ArithContext
) -> ProjectivePoint:
    """[s]P for P of order E.m, via one blinded query (retried on corruption)."""
    if not 0 <= s < E.m:
        raise DomainError("scalar must lie in [0, m)")
    last_error: Exception | None = None
    for _ in range(MAX_RETRIES + 1):
        curve = conceal_curve(key, E, ctx)
        blinded = conceal_point(key, P, ctx)
        s_blind, negated = conceal_scalar_screened(E.m, s, ctx)
        answer = worker.serve_scalar_mul(curve, s_blind, blinded)
        try:
            return _signed(E, recover_point(key, E, answer), negated)
        except IntegrityError as exc:
            last_error = exc
    raise SessionError("scalar multiplication failed after retries") from last_error


def outsource_scalar_mul_ms(
    key: EcOutsourceKey,
    E: CurveParams,
    s: int,
    P: ProjectivePoint,
    B: int,
    worker,
    ctx: ArithContext,
    *,
    tag: VerificationTag | None = None,
) -> tuple[ProjectivePoint | None, bool]:
    """[s]P checked by Q2 == [t1]Q1 + [t2]P; returns (point, accepted).

    Both scalars run against the same blinded base. The combination on the
    right is evaluated over F_p after recovery.
    """
    if not 0 <= s < E.m:
        raise DomainError("scalar must lie in [0, m)")
    if B < 2:
        raise DomainError("security bound must be >= 2")
    tag = tag or draw_tag(B, ctx)
    curve = conceal_curve(key, E, ctx)
    blinded = conceal_point(key, P, ctx)
    s1, neg1 = conceal_scalar_screened(E.m, s, ctx)
    s2, neg2 = conceal_scalar_screened(E.m, (tag.t1 * s + tag.t2) % E.m, ctx)
    order = [s2, s1] if tag.swapped else [s1, s2]
    answers = [worker.serve_scalar_mul(curve, sc, blinded) for sc in order]
    if tag.swapped:
        answers.reverse()
    try:
        Q1 = _signed(E, recover_point(key, E, answers[0]), neg1)
        Q2 = _signed(E, recover_point(key, E, answers[1]), neg2)
    except IntegrityError:
        return None, False
    expected = linear_combination(ctx, E, tag.t1, Q1, tag.t2, P)
    if proj_eq(E, Q2, expected):
        return Q1, True
    return None, False

