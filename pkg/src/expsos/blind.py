"""Ring-homomorphic blinding of bases, exponents and scalars.

The secret modulus N is embedded into the public ring Z_L with L = p*N.
A value x in Z_N is concealed as (x + r*N) mod L; any polynomial evaluated
on concealed values in Z_L reduces mod N to the same polynomial on the
originals. Exponents are hidden by adding multiples of phi(N), which is
sound for square-free N whenever the exponent is at least 1.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .arith import (
    ArithContext,
    FactoredModulus,
    from_hex,
    gen_prime,
    is_probable_prime,
    to_hex,
)
from .errors import DomainError, InvalidModulusError

KEYGEN_RETRIES = 16


@dataclass(frozen=True)
class OutsourceKey:
    modulus: FactoredModulus
    p: int
    L: int

    def __post_init__(self) -> None:
        if self.L != self.p * self.modulus.value:
            raise InvalidModulusError("L must equal p * N")
        if not is_probable_prime(self.p):
            raise InvalidModulusError("cofactor p must be prime")
        if self.modulus.value % self.p == 0:
            raise InvalidModulusError("p must not divide N")

    @classmethod
    def from_parts(cls, n_factors, p: int) -> "OutsourceKey":
        modulus = FactoredModulus.from_factors(n_factors)
        return cls(modulus, p, p * modulus.value)

    @property
    def N(self) -> int:
        return self.modulus.value

    @property
    def phi(self) -> int:
        return self.modulus.totient


@dataclass(frozen=True)
class BlindedExponent:
    value: int
    k: int


@dataclass(frozen=True)
class VerificationTag:
    t1: int
    t2: int
    B: int
    swapped: bool = False

    def __post_init__(self) -> None:
        if self.B < 1:
            raise DomainError("security bound B must be positive")
        if not (1 <= self.t1 <= self.B and 1 <= self.t2 <= self.B):
            raise DomainError(f"tags must lie in [1, {self.B}]")


def draw_tag(B: int, ctx: ArithContext) -> VerificationTag:
    """Fresh (t1, t2) uniform in [1, B] plus a fair coin for query order."""
    return VerificationTag(ctx.randrange(1, B + 1), ctx.randrange(1, B + 1), B, ctx.coin())


def keygen(n_factored: FactoredModulus, p_bits: int | None, ctx: ArithContext) -> OutsourceKey:
    """Pick a fresh prime cofactor p (default: same bit length as N)."""
    if p_bits is None:
        p_bits = n_factored.value.bit_length()
    if p_bits < 2:
        raise DomainError("p_bits must be >= 2")
    for _ in range(KEYGEN_RETRIES):
        p = gen_prime(p_bits, ctx)
        if n_factored.value % p:
            return OutsourceKey(n_factored, p, p * n_factored.value)
    raise InvalidModulusError(f"no prime of {p_bits} bits coprime to N after {KEYGEN_RETRIES} tries")


def conceal_base(key: OutsourceKey, u: int, ctx: ArithContext, *, r: int | None = None) -> int:
    """U = (u + r*N) mod L with fresh r uniform in [0, N)."""
    if not 0 <= u < key.N:
        raise DomainError("base must lie in [0, N)")
    if r is None:
        r = ctx.randrange(0, key.N)
    return (u + ctx.mul(r, key.N)) % key.L


def blind_exponent(key: OutsourceKey, a: int, ctx: ArithContext, *, k: int | None = None) -> BlindedExponent:
    """A = a + k*phi(N) with fresh k uniform in [1, N)."""
    if a < 1:
        # u^(0 + k*phi) != 1 mod N when gcd(u, N) > 1
        raise DomainError("exponent must be >= 1")
    if k is None:
        k = ctx.randrange(1, key.N)
    return BlindedExponent(a + ctx.mul(k, key.phi), k)


def blind_exponent_affine(
    key: OutsourceKey,
    a: int,
    tag: VerificationTag,
    ctx: ArithContext,
    *,
    k: int | None = None,
) -> BlindedExponent:
    """A = t1*a + t2 + k*phi(N).

    ``t1 * a`` multiplies by a tag of at most log2(B) bits and is not counted,
    in line with how small constants are treated elsewhere.
    """
    if a < 1:
        raise DomainError("exponent must be >= 1")
    if k is None:
        k = ctx.randrange(1, key.N)
    return BlindedExponent(tag.t1 * a + tag.t2 + ctx.mul(k, key.phi), k)


def recover(key: OutsourceKey, R: int) -> int:
    return R % key.N


def conceal_scalar(m: int, s: int, ctx: ArithContext, *, r: int | None = None) -> int:
    """s' = s + r*m with fresh r uniform in [1, m); [s']P = [s]P for P of order m."""
    if not 0 <= s < m:
        raise DomainError("scalar must lie in [0, m)")
    if r is None:
        r = ctx.randrange(1, m) if m > 1 else 1
    return s + ctx.mul(r, m)


def save_key(key: OutsourceKey, path: str | os.PathLike) -> None:
    doc = {
        "p": to_hex(key.p),
        "n_factors": [to_hex(f) for f in key.modulus.prime_factors],
        "l": to_hex(key.L),
    }
    path = Path(path)
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    os.chmod(path, 0o600)


def load_key(path: str | os.PathLike) -> OutsourceKey:
    doc = json.loads(Path(path).read_text())
    key = OutsourceKey.from_parts([from_hex(f) for f in doc["n_factors"]], from_hex(doc["p"]))
    if key.L != from_hex(doc["l"]):
        raise InvalidModulusError("stored L does not match p * N")
    return key
