"""Modular arithmetic with a multiplication counter.

Every ring operation the client performs goes through :func:`mod_mul` (or
:meth:`ArithContext.mul` for unreduced products) so that the number of
multiplications spent locally can be read off ``ctx.mult_count``.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from functools import reduce

from .errors import DomainError, InvalidModulusError, NoInverseError

MR_ROUNDS = 64

_SMALL_PRIMES = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
    239, 241, 251,
]

_HEX_RE = re.compile(r"(?:0|[1-9a-f][0-9a-f]*)\Z")


@dataclass
class ArithContext:
    """Per-session mutable state: the multiplication counter and the RNG.

    Not thread-safe; give each concurrent session its own context.
    """

    rng_seed: int | None = None
    mult_count: int = 0
    point_ops: int = 0
    rng: random.Random = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.rng = random.Random(self.rng_seed)

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi)``."""
        return self.rng.randrange(lo, hi)

    def randbits(self, k: int) -> int:
        return self.rng.getrandbits(k)

    def coin(self) -> bool:
        return bool(self.rng.getrandbits(1))

    def mul(self, a: int, b: int) -> int:
        """Unreduced product, counted as one multiplication."""
        self.mult_count += 1
        return a * b

    def spawn(self) -> "ArithContext":
        """Child context with an independent, deterministically derived seed."""
        return ArithContext(rng_seed=self.rng.getrandbits(64))


def mod_mul(ctx: ArithContext, a: int, b: int, m: int) -> int:
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    ctx.mult_count += 1
    return (a * b) % m


def mod_exp(ctx: ArithContext, u: int, a: int, m: int) -> int:
    """Left-to-right binary square-and-multiply.

    Costs ``bitlen(a) - 1`` squarings plus ``popcount(a) - 1`` multiplications.
    """
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    if a < 0:
        raise DomainError("negative exponent")
    if a == 0:
        return 1 % m
    base = u % m
    acc = base
    for bit in bin(a)[3:]:
        acc = mod_mul(ctx, acc, acc, m)
        if bit == "1":
            acc = mod_mul(ctx, acc, base, m)
    return acc


def mod_inv(a: int, m: int) -> int:
    if m < 1:
        raise DomainError(f"modulus must be positive, got {m}")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse modulo {m}") from None


def is_probable_prime(n: int, rng: random.Random | None = None, rounds: int = MR_ROUNDS) -> bool:
    """Trial division by small primes, then Miller-Rabin with random bases."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    rng = rng or random.Random(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        x = pow(rng.randrange(2, n - 1), d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits: int, ctx: ArithContext) -> int:
    """Random probable prime with exactly ``bits`` bits (top bit set)."""
    if bits < 2:
        raise DomainError("a prime needs at least 2 bits")
    if bits == 2:
        return ctx.rng.choice((2, 3))
    while True:
        cand = ctx.randbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand, ctx.rng):
            return cand


@dataclass(frozen=True)
class FactoredModulus:
    """A square-free modulus N together with its distinct prime factors."""

    value: int
    prime_factors: tuple[int, ...]
    totient: int

    @classmethod
    def from_factors(cls, factors) -> "FactoredModulus":
        factors = tuple(sorted(int(f) for f in factors))
        if not factors:
            raise InvalidModulusError("empty factorization")
        if len(set(factors)) != len(factors):
            raise InvalidModulusError(f"repeated prime factor in {factors}")
        for f in factors:
            if not is_probable_prime(f):
                raise InvalidModulusError(f"{f} is not prime")
        value = math.prod(factors)
        return cls(value, factors, math.prod(f - 1 for f in factors))

    def __post_init__(self) -> None:
        if math.prod(self.prime_factors) != self.value:
            raise InvalidModulusError("factors do not multiply to the modulus")
        if len(set(self.prime_factors)) != len(self.prime_factors):
            raise InvalidModulusError("modulus is not square-free")
        if self.totient != math.prod(f - 1 for f in self.prime_factors):
            raise InvalidModulusError("totient does not match the factorization")


def totient(f: FactoredModulus | list[int] | tuple[int, ...]) -> int:
    """Euler's totient of a square-free modulus from its prime factors."""
    factors = f.prime_factors if isinstance(f, FactoredModulus) else tuple(f)
    if len(set(factors)) != len(factors):
        raise InvalidModulusError(f"repeated prime factor in {tuple(factors)}")
    return reduce(lambda acc, q: acc * (q - 1), factors, 1)


def random_modulus(bits: int, n_factors: int, ctx: ArithContext) -> FactoredModulus:
    """Square-free N of roughly ``bits`` bits with ``n_factors`` distinct primes."""
    if n_factors < 1:
        raise DomainError("need at least one prime factor")
    share = max(2, bits // n_factors)
    while True:
        factors = {gen_prime(share, ctx) for _ in range(n_factors)}
        if len(factors) == n_factors:
            return FactoredModulus.from_factors(factors)


def to_hex(n: int) -> str:
    """Lowercase big-endian hex with no leading zeros; ``"0"`` for zero."""
    if n < 0:
        raise DomainError("cannot serialize a negative integer")
    return format(n, "x")


def from_hex(s: str) -> int:
    if not isinstance(s, str) or not _HEX_RE.match(s):
        raise DomainError(f"not a canonical hex integer: {s!r}")
    return int(s, 16)
