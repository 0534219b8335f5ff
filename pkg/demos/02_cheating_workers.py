# %% [markdown]
# # How often does a cheating worker get through?
#
# Each row runs MS sessions against one seeded behaviour and compares the
# acceptance rate with what that behaviour should achieve.

# %%
from expsos.experiments import expected_ms_rate, verify_mc

TRIALS = 4000
for adversary in ("honest", "random", "replay", "shift", "guess"):
    for B in (2, 4, 8):
        res = verify_mc(adversary, B, TRIALS, seed=7)
        print(f"{adversary:>7} B={B}: accepted {res.accepted:>5}/{TRIALS} "
              f"rate {res.rate:.4f}  expected {expected_ms_rate(adversary, B):.4f} +- {3 * res.sigma:.4f}")

# %% [markdown]
# `shift` replies u^(A+1) to one query and guesses the matching shift on the
# other. It is right about 1/(2B) of the time. `guess` must also hit the
# affine tag and lands near 1/(2B^2).

# %% Client cost against doing the exponentiation locally (512-bit exponent).
from expsos.experiments import bench, rows_to_table

print(rows_to_table(bench([512], [2, 4, 16], trials=50, seed=1)))
