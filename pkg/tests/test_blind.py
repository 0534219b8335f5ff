import os
import stat

import pytest
from hypothesis import given, settings, strategies as st

from expsos.arith import ArithContext, FactoredModulus, random_modulus
from expsos.blind import (
    OutsourceKey,
    VerificationTag,
    blind_exponent,
    blind_exponent_affine,
    conceal_base,
    conceal_scalar,
    draw_tag,
    keygen,
    load_key,
    recover,
    save_key,
)
from expsos.errors import DomainError, InvalidModulusError


def test_example_key_values(example_key):
    assert example_key.N == 431 and example_key.p == 397 and example_key.L == 171107
    assert example_key.phi == 430


def test_example_blinding_values(example_key):
    ctx = ArithContext()
    assert conceal_base(example_key, 189, ctx, r=146) == 63115
    assert blind_exponent(example_key, 346, ctx, k=332).value == 143106
    tag = VerificationTag(4, 12, 16)
    assert blind_exponent_affine(example_key, 346, tag, ctx, k=68).value == 30636


def test_key_invariants():
    with pytest.raises(InvalidModulusError):
        OutsourceKey(FactoredModulus.from_factors([431]), 397, 397 * 431 + 1)
    with pytest.raises(InvalidModulusError):
        OutsourceKey.from_parts([431], 400)
    with pytest.raises(InvalidModulusError):
        OutsourceKey.from_parts([5, 7], 7)


def test_keygen_default_size(ctx):
    modulus = random_modulus(64, 2, ctx)
    key = keygen(modulus, None, ctx)
    assert key.p.bit_length() == modulus.value.bit_length()
    assert key.L == key.p * key.N


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n_factors=st.sampled_from([1, 2]), data=st.data())
def test_blinding_is_ring_homomorphic(seed, n_factors, data):
    ctx = ArithContext(seed)
    key = keygen(random_modulus(48, n_factors, ctx), 32, ctx)
    u = data.draw(st.integers(0, key.N - 1))
    v = data.draw(st.integers(0, key.N - 1))
    U, V = conceal_base(key, u, ctx), conceal_base(key, v, ctx)
    assert recover(key, U * V % key.L) == u * v % key.N
    assert recover(key, (U + V) % key.L) == (u + v) % key.N


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), a=st.integers(1, 2**40))
def test_exponent_blinding_sound_even_for_non_units(seed, a):
    ctx = ArithContext(seed)
    modulus = random_modulus(40, 2, ctx)
    key = keygen(modulus, None, ctx)
    q = modulus.prime_factors[0]
    for u in (0, 1, q, q * 3 % key.N, key.N - 1):
        A = blind_exponent(key, a, ctx).value
        assert pow(conceal_base(key, u, ctx), A, key.L) % key.N == pow(u, a, key.N)


def test_zero_exponent_refused(example_key, ctx):
    with pytest.raises(DomainError):
        blind_exponent(example_key, 0, ctx)


def test_base_range_checked(example_key, ctx):
    with pytest.raises(DomainError):
        conceal_base(example_key, 431, ctx)


def test_tag_bounds():
    with pytest.raises(DomainError):
        VerificationTag(0, 1, 4)
    with pytest.raises(DomainError):
        VerificationTag(1, 5, 4)
    ctx = ArithContext(3)
    tags = [draw_tag(3, ctx) for _ in range(600)]
    assert {t.t1 for t in tags} == {1, 2, 3} == {t.t2 for t in tags}
    assert 200 < sum(t.swapped for t in tags) < 400


def test_conceal_scalar(ctx):
    s = conceal_scalar(50, 7, ctx)
    assert s % 50 == 7 and s >= 57
    with pytest.raises(DomainError):
        conceal_scalar(50, 50, ctx)


def test_key_file_round_trip(tmp_path, ctx):
    key = keygen(random_modulus(40, 2, ctx), None, ctx)
    path = tmp_path / "k.json"
    save_key(key, path)
    assert stat.S_IMODE(os.stat(path).st_mode) == 0o600
    assert load_key(path) == key


def test_key_file_rejects_inconsistent_l(tmp_path):
    path = tmp_path / "k.json"
    path.write_text('{"p": "18d", "n_factors": ["1af"], "l": "29c64"}')
    with pytest.raises(InvalidModulusError):
        load_key(path)
