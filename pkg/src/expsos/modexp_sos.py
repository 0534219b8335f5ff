"""Client sessions that outsource u^a mod N under the three threat models.

* HCS: one blinded query, result recovered by reduction mod N.
* MS: two queries related through secret tags (t1, t2), sent in random
  order; the client accepts iff (R1 mod N)^t1 * u^t2 == R2 (mod N).
* MM: the same blinded query to two non-colluding workers; accept iff the
  recovered answers agree.

Each session charges the formation of the public modulus L = p*N to its own
multiplication count, so ``local_mults`` is the full per-session client cost.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .arith import ArithContext, mod_exp, mod_mul
from .blind import (
    OutsourceKey,
    VerificationTag,
    blind_exponent,
    blind_exponent_affine,
    conceal_base,
    draw_tag,
    recover,
)
from .errors import DomainError


class Verdict(enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class ModExpQuery:
    base: int
    exponent: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2 or self.exponent < 1:
            raise DomainError("query needs modulus >= 2 and exponent >= 1")
        if not 0 <= self.base < self.modulus:
            raise DomainError("query base must lie in [0, modulus)")


@dataclass
class SessionReport:
    result: int | None
    verified: Verdict
    local_mults: int
    queries_sent: int


def _check_inputs(key: OutsourceKey, u: int, a: int) -> None:
    if not 0 <= u < key.N:
        raise DomainError("u must lie in [0, N)")
    if a < 1:
        raise DomainError("a must be >= 1")


def _public_modulus(key: OutsourceKey, ctx: ArithContext) -> int:
    return ctx.mul(key.p, key.N)


def outsource_hcs(
    key: OutsourceKey,
    u: int,
    a: int,
    worker,
    ctx: ArithContext,
    *,
    r: int | None = None,
    k: int | None = None,
) -> SessionReport:
    _check_inputs(key, u, a)
    start = ctx.mult_count
    L = _public_modulus(key, ctx)
    U = conceal_base(key, u, ctx, r=r)
    A = blind_exponent(key, a, ctx, k=k)
    R1 = worker.serve_modexp(ModExpQuery(U, A.value, L))
    return SessionReport(recover(key, R1), Verdict.NOT_APPLICABLE, ctx.mult_count - start, 1)


def verify_ms(
    key: OutsourceKey,
    u: int,
    tag: VerificationTag,
    R1: int,
    R2: int,
    ctx: ArithContext | None = None,
) -> bool:
    """(R1 mod N)^t1 * u^t2 == R2 (mod N)."""
    ctx = ctx or ArithContext()
    N = key.N
    lhs = mod_mul(ctx, mod_exp(ctx, R1 % N, tag.t1, N), mod_exp(ctx, u, tag.t2, N), N)
    return lhs == R2 % N


def outsource_ms(
    key: OutsourceKey,
    u: int,
    a: int,
    B: int,
    worker,
    ctx: ArithContext,
    *,
    tag: VerificationTag | None = None,
    r: int | None = None,
    k1: int | None = None,
    k2: int | None = None,
) -> SessionReport:
    _check_inputs(key, u, a)
    if B < 2:
        raise DomainError("security bound B must be >= 2")
    tag = tag or draw_tag(B, ctx)
    start = ctx.mult_count
    L = _public_modulus(key, ctx)
    U = conceal_base(key, u, ctx, r=r)
    A1 = blind_exponent(key, a, ctx, k=k1)
    A2 = blind_exponent_affine(key, a, tag, ctx, k=k2)
    queries = [ModExpQuery(U, A1.value, L), ModExpQuery(U, A2.value, L)]
    if tag.swapped:
        queries.reverse()
    answers = [worker.serve_modexp(q) for q in queries]
    if tag.swapped:
        answers.reverse()
    R1, R2 = answers
    ok = verify_ms(key, u, tag, R1, R2, ctx)
    return SessionReport(
        recover(key, R1) if ok else None,
        Verdict.ACCEPTED if ok else Verdict.REJECTED,
        ctx.mult_count - start,
        2,
    )


def outsource_mm(
    key: OutsourceKey,
    u: int,
    a: int,
    worker1,
    worker2,
    ctx: ArithContext,
    *,
    r: int | None = None,
    k: int | None = None,
) -> SessionReport:
    _check_inputs(key, u, a)
    start = ctx.mult_count
    L = _public_modulus(key, ctx)
    U = conceal_base(key, u, ctx, r=r)
    A = blind_exponent(key, a, ctx, k=k)
    query = ModExpQuery(U, A.value, L)
    R1 = worker1.serve_modexp(query)
    R2 = worker2.serve_modexp(query)
    ok = recover(key, R1) == recover(key, R2)
    return SessionReport(
        recover(key, R1) if ok else None,
        Verdict.ACCEPTED if ok else Verdict.REJECTED,
        ctx.mult_count - start,
        2,
    )
