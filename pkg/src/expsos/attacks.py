"""Attacks on two naive verification designs, kept as demonstrations.

DualPlain sends A1 = a + k1*phi and A2 = a + k2*phi and compares the results
mod N. The difference A1 - A2 is a multiple of phi(N), and for toy sizes the
candidates for N can be shortlisted from its divisors.

AdditiveOffset sends A2 = a + t + k2*phi and checks R1 * u^t == R2. Shifting
both exponents by the same delta keeps the check true while the recovered
value is wrong.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .arith import ArithContext, is_probable_prime
from .blind import OutsourceKey, blind_exponent, conceal_base
from .errors import DomainError

MAX_TOY_BITS = 40
# enough to factor any difference arising from toy keys up to 20 bits
TRIAL_BOUND = 1 << 21


class NaiveVariant(enum.Enum):
    DUAL_PLAIN = "dual-plain"
    ADDITIVE_OFFSET = "additive-offset"


@dataclass(frozen=True)
class NaiveScheme:
    variant: NaiveVariant
    t: int = 0

    def __post_init__(self) -> None:
        if self.variant is NaiveVariant.ADDITIVE_OFFSET and self.t < 1:
            raise DomainError("additive offset needs t >= 1")

    def blind(self, key: OutsourceKey, u: int, a: int, ctx: ArithContext) -> tuple[int, int, int]:
        """(U, A1, A2) as the naive client would send them."""
        U = conceal_base(key, u, ctx)
        A1 = blind_exponent(key, a, ctx).value
        A2 = blind_exponent(key, a + self.t, ctx).value
        return U, A1, A2

    def check(self, key: OutsourceKey, u: int, R1: int, R2: int) -> bool:
        N = key.N
        if self.variant is NaiveVariant.DUAL_PLAIN:
            return R1 % N == R2 % N
        return R1 * pow(u, self.t, N) % N == R2 % N


@lru_cache(maxsize=4)
def _primes_below(bound: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * bound
    sieve[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytes(len(range(i * i, bound, i)))
    return tuple(i for i, v in enumerate(sieve) if v)


def trial_factor(n: int, bound: int = TRIAL_BOUND) -> dict[int, int]:
    """Prime factorization by trial division up to ``bound``.

    A cofactor left over above bound**2 is reported as if it were prime.
    """
    if n < 1:
        raise DomainError("can only factor positive integers")
    out: dict[int, int] = {}
    for d in _primes_below(bound):
        if d * d > n:
            break
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _divisors(factors: dict[int, int]) -> list[int]:
    divs = [1]
    for prime, exp in factors.items():
        divs = [d * prime**e for d in divs for e in range(exp + 1)]
    return sorted(divs)


def ce1_candidates_from_multiple(D: int, n_bits: int, max_factors: int = 2) -> list[int]:
    """Square-free N of exactly ``n_bits`` bits, with at most ``max_factors``
    prime factors, whose totient divides D."""
    if D == 0:
        raise DomainError("need a nonzero multiple of phi(N)")
    if not 2 <= n_bits <= MAX_TOY_BITS:
        raise DomainError(f"toy sizes are capped at {MAX_TOY_BITS} bits")
    D = abs(D)
    limit = 1 << n_bits
    primes = [d + 1 for d in _divisors(trial_factor(D)) if d + 1 < limit and is_probable_prime(d + 1)]
    found = set()
    for count in range(1, max_factors + 1):
        for combo in combinations(primes, count):
            n = math.prod(combo)
            if n.bit_length() != n_bits:
                continue
            if D % math.prod(f - 1 for f in combo) == 0:
                found.add(n)
    return sorted(found)


def ce1_recover_modulus(A1: int, A2: int, n_bits: int, max_factors: int = 2) -> list[int]:
    """Shortlist N from a DualPlain pair: A1 - A2 = (k1 - k2) * phi(N)."""
    if A1 == A2:
        raise DomainError("A1 == A2 carries no information")
    return ce1_candidates_from_multiple(A1 - A2, n_bits, max_factors)


def ce1_attack_ms_transcript(
    A_first: int, A_second: int, n_bits: int, B: int, ctx: ArithContext, max_factors: int = 2
) -> list[int]:
    """The same extraction against an affine pair seen in unknown order.

    The attacker guesses which exponent is the affine one and the tags
    (t1, t2), then runs the shortlist on t1*A1 + t2 - A2. Only a correct
    guess makes that a multiple of phi(N).
    """
    if ctx.coin():
        A_first, A_second = A_second, A_first
    t1, t2 = ctx.randrange(1, B + 1), ctx.randrange(1, B + 1)
    D = t1 * A_first + t2 - A_second
    if D == 0:
        return []
    return ce1_candidates_from_multiple(D, n_bits, max_factors)


def ce2_forge(U: int, A1: int, A2: int, L: int, delta: int) -> tuple[int, int]:
    """Shift both exponents by delta. The naive offset check still passes."""
    if not 0 <= U < L:
        raise DomainError("U must lie in [0, L)")
    return A1 + delta, A2 + delta


def ce2_forge_targeted(A_first: int, A_second: int, delta: int, guess: int) -> tuple[int, int]:
    """Variant aimed at the affine check: assumes A_first is the plain exponent
    and guesses t1, shifting the second one by guess * delta."""
    return A_first + delta, A_second + guess * delta
