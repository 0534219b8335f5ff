"""Multiplication-count benchmarks and Monte-Carlo verifiability runs.

Every trial derives its own seed from (seed, cell, trial), so results do not
depend on execution order and reruns with the same flags are byte-identical.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from .arith import ArithContext, mod_exp, random_modulus
from .blind import OutsourceKey, keygen
from .cloud import local_worker, make_behavior
from .curve import CurveParams
from .ecsm_sos import ec_keygen, outsource_scalar_mul_ms
from .errors import DomainError
from .modexp_sos import Verdict, outsource_hcs, outsource_mm, outsource_ms

CSV_HEADER = ("bits", "B", "pi_oracle", "pi_local", "alpha", "pass_rate", "trials")
ADVERSARIES_WITH_GUESS = ("shift", "guess")


def derive_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class BenchRow:
    bits: int
    B: int
    pi_oracle: float
    pi_local: float
    alpha: float
    pass_rate: float
    trials: int


KEY_POOL = 64


@lru_cache(maxsize=1024)
def _pooled_key(bits: int, n_factors: int, seed: int, index: int) -> OutsourceKey:
    ctx = ArithContext(derive_seed(seed, "key", bits, n_factors, index))
    return keygen(random_modulus(bits, n_factors, ctx), None, ctx)


def _instance(bits: int, n_factors: int, seed: int, trial: int):
    """Key from a pool of KEY_POOL per cell, fresh (u, a) per trial."""
    key = _pooled_key(bits, n_factors, seed, trial % KEY_POOL)
    ctx = ArithContext(derive_seed(seed, "instance", bits, n_factors, trial))
    u = ctx.randrange(0, key.N)
    a = ctx.randrange(1 << (bits - 1), 1 << bits)
    return key, u, a


def bench_cell(bits: int, B: int, trials: int, seed: int, mode: str = "ms") -> BenchRow:
    """Mean client cost of direct mod_exp versus one outsourced session.

    Instances depend on (bits, trial) only, so rows that differ in B are
    measured on the same (u, a, N).
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    oracle_total = local_total = passed = 0
    for trial in range(trials):
        key, u, a = _instance(bits, 2, seed, trial)
        oracle_ctx = ArithContext()
        expected = mod_exp(oracle_ctx, u, a, key.N)
        ctx = ArithContext(derive_seed(seed, "session", bits, B, trial))
        worker = local_worker()
        if mode == "hcs":
            report = outsource_hcs(key, u, a, worker, ctx)
        elif mode == "mm":
            report = outsource_mm(key, u, a, worker, local_worker(), ctx)
        elif mode == "ms":
            report = outsource_ms(key, u, a, B, worker, ctx)
        else:
            raise DomainError(f"unknown mode {mode!r}")
        oracle_total += oracle_ctx.mult_count
        local_total += report.local_mults
        passed += report.result == expected
    return BenchRow(bits, B, oracle_total / trials, local_total / trials,
                    oracle_total / local_total, passed / trials, trials)


def bench(bits_list, b_list, trials: int, seed: int, mode: str = "ms") -> list[BenchRow]:
    return [bench_cell(bits, B, trials, seed, mode) for bits in bits_list for B in b_list]


def _fmt(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in asdict(row).values()])
    return buf.getvalue()


def rows_to_table(rows: list[BenchRow]) -> str:
    lines = ["{:>6} {:>4} {:>10} {:>9} {:>9} {:>9} {:>7}".format(*CSV_HEADER)]
    for r in rows:
        lines.append(f"{r.bits:>6} {r.B:>4} {r.pi_oracle:>10.2f} {r.pi_local:>9.2f} "
                     f"{r.alpha:>9.3f} {r.pass_rate:>9.4f} {r.trials:>7}")
    return "\n".join(lines)


@dataclass
class McResult:
    adversary: str
    B: int
    trials: int
    accepted: int
    rate: float
    target: float
    sigma: float


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def _behavior(adversary: str, B: int, seed: int):
    params = {"guess_bound": B} if adversary in ADVERSARIES_WITH_GUESS else {}
    return make_behavior(adversary, seed, **params)


def expected_ms_rate(adversary: str, B: int) -> float:
    """Acceptance rate each behaviour should achieve against the MS check."""
    return {
        "honest": 1.0,
        "random": 0.0,
        "replay": 0.0,
        "shift": 1 / (2 * B),
        "guess": 1 / (2 * B * B),
    }[adversary]


def verify_mc(adversary: str, B: int, trials: int, seed: int, bits: int = 64) -> McResult:
    """Acceptance rate of MS modexp sessions against a seeded adversary."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    accepted = 0
    for trial in range(trials):
        key, u, a = _instance(bits, 2, seed, trial)
        ctx = ArithContext(derive_seed(seed, "mc", adversary, B, trial))
        worker = local_worker(_behavior(adversary, B, derive_seed(seed, "adv", trial)))
        report = outsource_ms(key, u, a, B, worker, ctx)
        if report.verified is Verdict.ACCEPTED:
            accepted += 1
    target = expected_ms_rate(adversary, B)
    return McResult(adversary, B, trials, accepted, accepted / trials, target, binomial_sigma(target, trials))


def verify_mc_ec(adversary: str, E: CurveParams, B: int, trials: int, seed: int) -> McResult:
    """Acceptance rate of MS scalar-multiplication sessions on curve E."""
    if E.base is None:
        raise DomainError("curve needs a base point")
    accepted = 0
    for trial in range(trials):
        ctx = ArithContext(derive_seed(seed, "ecmc", adversary, B, trial))
        key = ec_keygen(E.p, max(E.p.bit_length(), 16), ctx)
        s = ctx.randrange(0, E.m)
        worker = local_worker(_behavior(adversary, B, derive_seed(seed, "adv", trial)))
        _, ok = outsource_scalar_mul_ms(key, E, s, E.base, B, worker, ctx)
        accepted += ok
    target = 1.0 if adversary == "honest" else 1 / (2 * B * B)
    return McResult(adversary, B, trials, accepted, accepted / trials, target, binomial_sigma(target, trials))
