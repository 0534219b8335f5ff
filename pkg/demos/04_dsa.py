# %% [markdown]
# # DSA with outsourced exponentiations

# %%
from expsos.apps import (
    dsa_keygen, dsa_local_verify, dsa_outsourced_sign, dsa_outsourced_verify, dsa_paramgen,
)
from expsos.arith import ArithContext
from expsos.cloud import ExponentShift, local_worker
from expsos.errors import VerificationRejected

ctx = ArithContext(2024)
params = dsa_paramgen(160, 1024, ctx)
keys = dsa_keygen(params, ctx)
print("p bits:", params.p.bit_length(), " q bits:", params.q.bit_length())

# %%
msg = b"transfer 10 units to bob"
sig, triple = dsa_outsourced_sign(params, keys.x, msg, 16, local_worker(), ctx)
print("signature:", sig.to_json())
print("reference verify:", dsa_local_verify(params, keys.y, sig, msg))
print("outsourced verify:", dsa_outsourced_verify(params, triple, sig, msg, 16, local_worker(), ctx))
print("tampered message:", dsa_outsourced_verify(params, triple, sig, msg + b"0", 16, local_worker(), ctx))

# %% A worker that shifts exponents is caught most of the time.
caught = 0
for i in range(200):
    try:
        dsa_outsourced_sign(params, keys.x, msg, 16, local_worker(ExponentShift(seed=i)), ctx)
    except VerificationRejected:
        caught += 1
print(f"shifted signing sessions rejected: {caught}/200")
