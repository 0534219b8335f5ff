"""DSA signing/verification and IBE encryption with the exponentiations outsourced.

The DSA prime p plays the role of the secret modulus: the signer embeds it
into L = Q*p for a private prime Q, disguises the generator as
G = (g + r*p) mod L and blinds exponents with multiples of phi(p) = p - 1.
G, the disguised public key R1 and L are published so verifiers can reuse
the same disguise.

Verification outsources four exponentiations. U1 and U3 run on base G and
U2 and U4 on base R1, so the two affine checks compare like with like
(g^u1 paired with g^(t4*u1 + t5), y^u2 with y^(t6*u2 + t7)).
"""
from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass

from .arith import ArithContext, FactoredModulus, from_hex, gen_prime, is_probable_prime, mod_exp, mod_inv, mod_mul, to_hex
from .blind import OutsourceKey, VerificationTag, conceal_base, draw_tag, keygen
from .curve import CurveParams, ProjectivePoint, on_curve, scalar_mul
from .ecsm_sos import EcOutsourceKey, outsource_scalar_mul_ms
from .errors import DomainError, VerificationRejected
from .modexp_sos import ModExpQuery, Verdict, outsource_ms

PARAMGEN_TRIES = 1 << 16


# --- DSA reference ------------------------------------------------------------


@dataclass(frozen=True)
class DsaParams:
    p: int
    q: int
    g: int

    def __post_init__(self) -> None:
        if (self.p - 1) % self.q:
            raise DomainError("q must divide p - 1")
        if not (is_probable_prime(self.p) and is_probable_prime(self.q)):
            raise DomainError("p and q must be prime")
        if not 1 < self.g < self.p or pow(self.g, self.q, self.p) != 1:
            raise DomainError("g must generate the order-q subgroup")


@dataclass(frozen=True)
class DsaKeys:
    x: int
    y: int


@dataclass(frozen=True)
class DsaSignature:
    r: int
    s: int

    def to_json(self) -> str:
        return json.dumps({"r": to_hex(self.r), "s": to_hex(self.s)})

    @classmethod
    def from_json(cls, text: str) -> "DsaSignature":
        doc = json.loads(text)
        return cls(from_hex(doc["r"]), from_hex(doc["s"]))


@dataclass(frozen=True)
class DsaPublicTriple:
    """The signer's shared disguise {G, R1, L}."""

    G: int
    R1: int
    L: int

    def to_json(self) -> str:
        return json.dumps({"g": to_hex(self.G), "r1": to_hex(self.R1), "l": to_hex(self.L)})

    @classmethod
    def from_json(cls, text: str) -> "DsaPublicTriple":
        doc = json.loads(text)
        return cls(from_hex(doc["g"]), from_hex(doc["r1"]), from_hex(doc["l"]))


def dsa_hash(message: bytes, q: int) -> int:
    """h(M) = SHA-256(M) as a big-endian integer, reduced mod q."""
    return int.from_bytes(hashlib.sha256(message).digest(), "big") % q


def dsa_paramgen(q_bits: int, p_bits: int, ctx: ArithContext) -> DsaParams:
    if q_bits < 2 or p_bits <= q_bits:
        raise DomainError("need 2 <= q_bits < p_bits")
    while True:
        q = gen_prime(q_bits, ctx)
        lo, hi = (1 << (p_bits - 1)) // q + 1, ((1 << p_bits) - 1) // q
        for _ in range(PARAMGEN_TRIES):
            j = ctx.randrange(lo, hi + 1) & ~1
            p = j * q + 1
            if p.bit_length() == p_bits and is_probable_prime(p, ctx.rng):
                break
        else:
            continue
        for h in range(2, p - 1):
            g = pow(h, (p - 1) // q, p)
            if g > 1:
                return DsaParams(p, q, g)


def dsa_keygen(params: DsaParams, ctx: ArithContext) -> DsaKeys:
    x = ctx.randrange(1, params.q)
    return DsaKeys(x, pow(params.g, x, params.p))


def _finish_signature(params: DsaParams, x: int, k: int, r: int, message: bytes, ctx: ArithContext) -> int:
    q = params.q
    return mod_mul(ctx, mod_inv(k, q), (dsa_hash(message, q) + mod_mul(ctx, x, r, q)) % q, q)


def dsa_local_sign(
    params: DsaParams, keys: DsaKeys, message: bytes, ctx: ArithContext, *, k: int | None = None
) -> DsaSignature:
    while True:
        kk = k if k is not None else ctx.randrange(1, params.q)
        r = pow(params.g, kk, params.p) % params.q
        s = _finish_signature(params, keys.x, kk, r, message, ctx) if r else 0
        if r and s:
            return DsaSignature(r, s)
        if k is not None:
            raise DomainError("supplied nonce gives r = 0 or s = 0")


def dsa_local_verify(params: DsaParams, y: int, sig: DsaSignature, message: bytes) -> bool:
    p, q = params.p, params.q
    if not (0 < sig.r < q and 0 < sig.s < q):
        return False
    w = pow(sig.s, -1, q)
    u1 = dsa_hash(message, q) * w % q
    u2 = sig.r * w % q
    return pow(params.g, u1, p) * pow(y, u2, p) % p % q == sig.r


# --- outsourced DSA -------------------------------------------------------------


def dsa_outsource_key(params: DsaParams, ctx: ArithContext, Q_bits: int | None = None) -> OutsourceKey:
    """Embeds p into L = Q*p for a fresh private prime Q."""
    return keygen(FactoredModulus.from_factors([params.p]), Q_bits, ctx)


def _blind(e: int, phi: int, ctx: ArithContext, k: int | None = None) -> int:
    """e + k*phi with k in [1, phi). e = 0 is allowed: every base used here
    is a unit mod p, so its order divides phi."""
    if k is None:
        k = ctx.randrange(1, phi)
    return e + ctx.mul(k, phi)


def _tag_exp(R: int, t: int, p: int, ctx: ArithContext) -> int:
    return mod_exp(ctx, R % p, t, p)


def _draw_tags(n: int, B: int, ctx: ArithContext) -> tuple[int, ...]:
    return tuple(ctx.randrange(1, B + 1) for _ in range(n))


def _ask_shuffled(worker, queries: list[ModExpQuery], ctx: ArithContext) -> list[int]:
    order = list(range(len(queries)))
    ctx.rng.shuffle(order)
    answers = [0] * len(queries)
    for i in order:
        answers[i] = worker.serve_modexp(queries[i])
    return answers


def dsa_outsourced_sign(
    params: DsaParams,
    x: int,
    message: bytes,
    B: int,
    worker,
    ctx: ArithContext,
    *,
    key: OutsourceKey | None = None,
    tags: tuple[int, int, int] | None = None,
) -> tuple[DsaSignature, DsaPublicTriple]:
    """Sign with g^x and g^k computed by the worker and checked jointly.

    Raises VerificationRejected when the joint check fails.
    """
    p, q, g = params.p, params.q, params.g
    if not 0 < x < q:
        raise DomainError("private key must lie in (0, q)")
    if B < 1:
        raise DomainError("security bound must be >= 1")
    if key is None:
        key = dsa_outsource_key(params, ctx)
    if key.N != p:
        raise DomainError("outsourcing key was made for a different prime")
    phi = p - 1
    while True:
        t1, t2, t3 = tags or _draw_tags(3, B, ctx)
        k = ctx.randrange(1, q)
        L = ctx.mul(key.p, p)
        G = conceal_base(key, g, ctx)
        X = _blind(x, phi, ctx)
        K = _blind(k, phi, ctx)
        XK = _blind(t1 * x + t2 * k + t3, phi, ctx)
        R1, R2, R3 = _ask_shuffled(worker, [ModExpQuery(G, e, L) for e in (X, K, XK)], ctx)
        lhs = mod_mul(ctx, mod_mul(ctx, _tag_exp(R1, t1, p, ctx), _tag_exp(R2, t2, p, ctx), p), mod_exp(ctx, g, t3, p), p)
        if lhs != R3 % p:
            raise VerificationRejected("signing check failed")
        r = R2 % p % q
        if r == 0:
            continue
        s = _finish_signature(params, x, k, r, message, ctx)
        if s:
            return DsaSignature(r, s), DsaPublicTriple(G, R1, L)


def dsa_outsourced_verify(
    params: DsaParams,
    triple: DsaPublicTriple,
    sig: DsaSignature,
    message: bytes,
    B: int,
    worker,
    ctx: ArithContext,
    *,
    tags: tuple[int, int, int, int] | None = None,
    literal: bool = False,
) -> bool:
    """Verify a signature with g^u1 and y^u2 computed by the worker.

    Returns the DSA verdict. Raises VerificationRejected when a worker check
    fails, which is distinct from an invalid signature.

    ``literal`` reproduces the printed query list (U2 on base G, U3 on base
    R1, y^u2 recovered from R6). It fails on honest workers and exists only
    for the regression test.
    """
    p, q, g = params.p, params.q, params.g
    if not (0 < sig.r < q and 0 < sig.s < q):
        return False
    phi = p - 1
    t4, t5, t6, t7 = tags or _draw_tags(4, B, ctx)
    w = mod_inv(sig.s, q)
    u1 = mod_mul(ctx, dsa_hash(message, q), w, q)
    u2 = mod_mul(ctx, sig.r, w, q)
    G, R1, L = triple.G, triple.R1, triple.L
    U1 = _blind(u1, phi, ctx)
    U2 = _blind(u2, phi, ctx)
    U3 = _blind(t4 * u1 + t5, phi, ctx)
    U4 = _blind(t6 * u2 + t7, phi, ctx)
    if literal:
        bases = (G, G, R1, R1)
    else:
        bases = (G, R1, G, R1)
    R4, R5, R6, R7 = _ask_shuffled(
        worker, [ModExpQuery(b, e, L) for b, e in zip(bases, (U1, U2, U3, U4))], ctx
    )
    ok1 = mod_mul(ctx, _tag_exp(R4, t4, p, ctx), mod_exp(ctx, g, t5, p), p) == R6 % p
    ok2 = mod_mul(ctx, _tag_exp(R5, t6, p, ctx), _tag_exp(R1, t7, p, ctx), p) == R7 % p
    if not (ok1 and ok2):
        raise VerificationRejected("verification check failed")
    gu1 = R4 % p
    yu2 = R6 % p if literal else R5 % p
    return mod_mul(ctx, gu1, yu2, p) % q == sig.r


# --- IBE --------------------------------------------------------------------------


@dataclass(frozen=True)
class IbeCiphertext:
    c1: ProjectivePoint
    c2: bytes

    def to_json(self) -> str:
        return json.dumps({
            "c1": [to_hex(self.c1.x), to_hex(self.c1.y), to_hex(self.c1.z)],
            "c2": base64.b64encode(self.c2).decode("ascii"),
        })

    @classmethod
    def from_json(cls, text: str) -> "IbeCiphertext":
        doc = json.loads(text)
        return cls(ProjectivePoint(*(from_hex(v) for v in doc["c1"])), base64.b64decode(doc["c2"], validate=True))


def _int_bytes(v: int, modulus: int) -> bytes:
    return v.to_bytes(max(1, (modulus.bit_length() + 7) // 8), "big")


def hash_to_int(v: int, p: int) -> int:
    """H(v) = SHA-256 of v's fixed-width big-endian encoding, reduced mod p."""
    return int.from_bytes(hashlib.sha256(_int_bytes(v % p, p)).digest(), "big") % p


def keystream(v: int, p: int, length: int) -> bytes:
    """SHA-256(v_bytes || counter) blocks, counter as 4-byte big-endian."""
    seed = _int_bytes(v % p, p)
    out = bytearray()
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(seed + counter.to_bytes(4, "big")).digest()
        counter += 1
    return bytes(out[:length])


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def ibe_local_encrypt(E: CurveParams, P: ProjectivePoint, g_pair: int, message: bytes, r: int) -> IbeCiphertext:
    """Reference encryption with the session scalar r given."""
    c1 = scalar_mul(ArithContext(), E, r, P)
    v = pow(hash_to_int(g_pair, E.p), r, E.p)
    return IbeCiphertext(c1, _xor(message, keystream(v, E.p, len(message))))


def ibe_outsourced_encrypt(
    E: CurveParams,
    P: ProjectivePoint,
    g_pair: int,
    message: bytes,
    B: int,
    worker,
    ctx: ArithContext,
    *,
    q_bits: int | None = None,
    r: int | None = None,
    tag: VerificationTag | None = None,
) -> IbeCiphertext:
    """C1 = [r]P and C2 = M xor keystream(H(g)^r mod p), both outsourced.

    The two verifications share one tag. Raises VerificationRejected if
    either fails.
    """
    if not message:
        raise DomainError("message must be nonempty")
    if E.m < 2:
        raise DomainError("base point order must be >= 2")
    if not on_curve(E, P):
        raise DomainError("base point is not on the curve")
    p = E.p
    if q_bits is None:
        q_bits = max(p.bit_length(), 16)
    while True:
        q = gen_prime(q_bits, ctx)
        if q != p:
            break
    ec_key = EcOutsourceKey(p, q, p * q)
    mx_key = OutsourceKey.from_parts([p], q)
    if r is None:
        r = ctx.randrange(1, E.m)
    if not 1 <= r < E.m:
        raise DomainError("session scalar must lie in [1, m)")
    tag = tag or draw_tag(B, ctx)
    Q1, ec_ok = outsource_scalar_mul_ms(ec_key, E, r, P, B, worker, ctx, tag=tag)
    h = hash_to_int(g_pair, p)
    report = outsource_ms(mx_key, h, r, B, worker, ctx, tag=tag)
    if not ec_ok or report.verified is not Verdict.ACCEPTED:
        raise VerificationRejected("IBE outsourcing check failed")
    return IbeCiphertext(Q1, _xor(message, keystream(report.result, p, len(message))))
