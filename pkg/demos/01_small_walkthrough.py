# %% [markdown]
# # One verified session by hand
#
# A 9-bit modulus N = 431 is hidden inside L = 397 * 431. We compute
# 189^346 mod 431 with one honest worker and check the answer with tags
# (t1, t2) = (4, 12).

# %%
import json
from importlib import resources

from expsos.arith import ArithContext
from expsos.blind import VerificationTag, blind_exponent, blind_exponent_affine, conceal_base, load_key
from expsos.cloud import local_worker
from expsos.modexp_sos import outsource_ms, verify_ms

data = resources.files("expsos").joinpath("data")
with resources.as_file(data.joinpath("example1_key.json")) as path:
    key = load_key(path)
print("N =", key.N, " p =", key.p, " L =", key.L, " phi(N) =", key.phi)

# %%
ctx = ArithContext()
tag = VerificationTag(4, 12, 16)
U = conceal_base(key, 189, ctx, r=146)
A1 = blind_exponent(key, 346, ctx, k=332).value
A2 = blind_exponent_affine(key, 346, tag, ctx, k=68).value
print("worker sees U =", U, " A1 =", A1, " A2 =", A2)

# %% What the worker returns, and what the client checks.
R1, R2 = pow(U, A1, key.L), pow(U, A2, key.L)
print("R1 =", R1, " R2 =", R2)
print("check (R1 mod N)^4 * 189^12 mod N =", pow(R1 % key.N, 4, key.N) * pow(189, 12, key.N) % key.N)
print("R2 mod N =", R2 % key.N, " accepted:", verify_ms(key, 189, tag, R1, R2))

# %% The same thing through the library, with the multiplication count.
report = outsource_ms(key, 189, 346, 16, local_worker(), ArithContext(), tag=tag, r=146, k1=332, k2=68)
print(report)
assert report.result == pow(189, 346, 431) == 190

golden = json.loads(data.joinpath("golden_example1.json").read_text())
print("stored outputs:", golden["outputs"])
