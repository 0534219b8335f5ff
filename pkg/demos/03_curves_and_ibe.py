# %% [markdown]
# # Scalar multiplication and IBE encryption on a blinded curve
#
# The toy curve is y^2 = x^3 + 2x + 3 over F_97 with a base point of order 50.

# %%
import json
from importlib import resources

from expsos.apps import ibe_local_encrypt, ibe_outsourced_encrypt, keystream, hash_to_int
from expsos.arith import ArithContext
from expsos.cloud import RandomForger, local_worker, recorded
from expsos.curve import curve_from_json, scalar_mul, to_affine
from expsos.ecsm_sos import ec_keygen, outsource_scalar_mul_ms

E = curve_from_json(json.loads(resources.files("expsos").joinpath("data", "f97.json").read_text()))
ctx = ArithContext(5)
key = ec_keygen(E.p, 16, ctx)
print("field p =", E.p, " hidden in N =", key.N)

# %%
worker, rec = recorded(local_worker())
for s in (1, 7, 33, 49):
    Q, ok = outsource_scalar_mul_ms(key, E, s, E.base, 4, worker, ctx)
    print(f"[{s}]P = {to_affine(E, Q)}  accepted={ok}  local={to_affine(E, scalar_mul(ArithContext(), E, s, E.base))}")
print("first request on the wire:", rec.requests[0])

# %% A forger is caught.
_, ok = outsource_scalar_mul_ms(key, E, 7, E.base, 4, local_worker(RandomForger(seed=1)), ctx)
print("forged answer accepted:", ok)

# %% Encryption: C1 = [r]P and the keystream exponent are both outsourced.
msg = b"meet at the north gate"
ct = ibe_outsourced_encrypt(E, E.base, 42, msg, 4, local_worker(), ctx, r=17)
print(ct.to_json())
assert ct == ibe_local_encrypt(E, E.base, 42, msg, 17)
v = pow(hash_to_int(42, E.p), 17, E.p)
print(bytes(a ^ b for a, b in zip(ct.c2, keystream(v, E.p, len(msg)))))
