# %% [markdown]
# # Why the check is affine
#
# Two simpler designs and how they break on toy sizes.

# %%
from expsos.arith import ArithContext, random_modulus
from expsos.attacks import (
    NaiveScheme, NaiveVariant, ce1_attack_ms_transcript, ce1_recover_modulus, ce2_forge,
)
from expsos.blind import VerificationTag, blind_exponent, blind_exponent_affine, conceal_base, keygen
from expsos.modexp_sos import verify_ms

ctx = ArithContext(11)
key = keygen(random_modulus(16, 2, ctx), None, ctx)
print("secret N =", key.N)

# %% Dual plain queries: A1 - A2 is a multiple of phi(N).
_, A1, A2 = NaiveScheme(NaiveVariant.DUAL_PLAIN).blind(key, 5, 1234, ctx)
shortlist = ce1_recover_modulus(A1, A2, key.N.bit_length())
print(f"{len(shortlist)} candidates, true N included: {key.N in shortlist}")

# %% Against affine transcripts the attacker must guess the tags and order.
hits = 0
for _ in range(200):
    tag = VerificationTag(ctx.randrange(1, 5), ctx.randrange(1, 5), 4)
    B1 = blind_exponent(key, 1234, ctx).value
    B2 = blind_exponent_affine(key, 1234, tag, ctx).value
    hits += key.N in ce1_attack_ms_transcript(B1, B2, key.N.bit_length(), 4, ctx)
print(f"affine transcripts: N shortlisted in {hits}/200")

# %% Additive offset: shifting both exponents keeps the naive check happy.
u, a, naive = 5, 1234, NaiveScheme(NaiveVariant.ADDITIVE_OFFSET, t=3)
U, A1, A2 = naive.blind(key, u, a, ctx)
F1, F2 = ce2_forge(U, A1, A2, key.L, delta=1)
R1, R2 = pow(U, F1, key.L), pow(U, F2, key.L)
print("naive check passes:", naive.check(key, u, R1, R2), " result correct:", R1 % key.N == pow(u, a, key.N))

# %% The same shift against the affine check.
tag = VerificationTag(3, 2, 4)
B1 = blind_exponent(key, a, ctx).value
B2 = blind_exponent_affine(key, a, tag, ctx).value
F1, F2 = ce2_forge(U, B1, B2, key.L, delta=1)
print("affine check passes:", verify_ms(key, u, tag, pow(U, F1, key.L), pow(U, F2, key.L)))
