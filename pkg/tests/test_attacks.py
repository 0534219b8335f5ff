import statistics

import pytest

from expsos.arith import ArithContext, random_modulus
from expsos.attacks import (
    NaiveScheme,
    NaiveVariant,
    ce1_candidates_from_multiple,
    ce1_recover_modulus,
    ce2_forge,
    ce2_forge_targeted,
    trial_factor,
)
from expsos.blind import VerificationTag, blind_exponent_affine, conceal_base, keygen
from expsos.errors import DomainError
from expsos.modexp_sos import verify_ms


def _toy_key(seed, bits=16):
    ctx = ArithContext(seed)
    return keygen(random_modulus(bits, 2, ctx), None, ctx), ctx


def test_trial_factor():
    assert trial_factor(360) == {2: 3, 3: 2, 5: 1}
    assert trial_factor(1) == {}
    assert trial_factor(2**31 - 1) == {2**31 - 1: 1}


def test_ce1_toy_35():
    A1, A2 = 3 + 9 * 24, 3 + 2 * 24
    assert 35 in ce1_recover_modulus(A1, A2, 6)


def test_ce1_equal_pair_refused():
    with pytest.raises(DomainError):
        ce1_recover_modulus(5, 5, 8)


def test_ce1_prime_difference():
    # D = 13: only divisors 1 and 13, so the only prime p with p - 1 | D is 2
    assert ce1_candidates_from_multiple(13, 2, 1) == [2]
    assert ce1_candidates_from_multiple(13, 8) == []


def test_ce1_shortlists_true_modulus():
    lengths = []
    for seed in range(100):
        key, ctx = _toy_key(seed)
        scheme = NaiveScheme(NaiveVariant.DUAL_PLAIN)
        _, A1, A2 = scheme.blind(key, 5, 1234, ctx)
        if A1 == A2:
            continue
        cands = ce1_recover_modulus(A1, A2, key.N.bit_length())
        assert key.N in cands
        lengths.append(len(cands))
    assert statistics.median(lengths) < 2 ** 10


def test_dual_plain_check_passes_honest():
    key, ctx = _toy_key(1)
    scheme = NaiveScheme(NaiveVariant.DUAL_PLAIN)
    U, A1, A2 = scheme.blind(key, 7, 99, ctx)
    assert scheme.check(key, 7, pow(U, A1, key.L), pow(U, A2, key.L))


def test_ce2_delta_zero_is_honest():
    key, ctx = _toy_key(2)
    scheme = NaiveScheme(NaiveVariant.ADDITIVE_OFFSET, t=5)
    U, A1, A2 = scheme.blind(key, 7, 99, ctx)
    F1, F2 = ce2_forge(U, A1, A2, key.L, 0)
    assert (F1, F2) == (A1, A2)
    R1 = pow(U, F1, key.L)
    assert scheme.check(key, 7, R1, pow(U, F2, key.L)) and R1 % key.N == pow(7, 99, key.N)


def test_ce2_forgery_passes_naive_check():
    for seed in range(50):
        key, ctx = _toy_key(seed)
        u = ctx.randrange(2, key.N)
        scheme = NaiveScheme(NaiveVariant.ADDITIVE_OFFSET, t=ctx.randrange(1, 8))
        U, A1, A2 = scheme.blind(key, u, 1000, ctx)
        F1, F2 = ce2_forge(U, A1, A2, key.L, 1)
        R1, R2 = pow(U, F1, key.L), pow(U, F2, key.L)
        assert scheme.check(key, u, R1, R2)


def test_ce2_forgery_against_affine_check():
    """Equal shifts pass the affine check only when t1 = 1."""
    key, ctx = _toy_key(3)
    u, a = 12345 % key.N, 777
    for t1 in (1, 2, 3):
        tag = VerificationTag(t1, 2, 4)
        U = conceal_base(key, u, ctx)
        A1 = a + key.phi * 5
        A2 = blind_exponent_affine(key, a, tag, ctx).value
        F1, F2 = ce2_forge(U, A1, A2, key.L, 1)
        ok = verify_ms(key, u, tag, pow(U, F1, key.L), pow(U, F2, key.L))
        assert ok == (t1 == 1 or pow(u, t1 - 1, key.N) == 1)


def test_targeted_forge_needs_right_guess():
    key, ctx = _toy_key(4)
    u, a = 3, 777
    tag = VerificationTag(3, 2, 4)
    U = conceal_base(key, u, ctx)
    A1, A2 = a + key.phi, blind_exponent_affine(key, a, tag, ctx).value
    for guess in (2, 3, 4):
        F1, F2 = ce2_forge_targeted(A1, A2, 1, guess)
        assert verify_ms(key, u, tag, pow(U, F1, key.L), pow(U, F2, key.L)) == (guess == 3)


def test_toy_size_cap():
    with pytest.raises(DomainError):
        ce1_candidates_from_multiple(10**20, 41)
