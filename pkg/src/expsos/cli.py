"""Command-line entry point.

Exit codes: 0 success or accepted, 1 signature invalid (dsa-verify only),
2 verification rejected, 3 transport or protocol error, 4 usage error.
Integers are read and printed as lowercase hex. ``--seed`` falls back to the
EXPSOS_SEED environment variable.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import sys
from importlib import resources
from pathlib import Path

from . import apps, attacks, experiments
from .arith import ArithContext, FactoredModulus, from_hex, gen_prime, random_modulus, to_hex
from .blind import keygen, load_key, save_key
from .cloud import BEHAVIORS, local_worker, make_behavior, remote_worker, run_server
from .curve import ProjectivePoint, curve_from_json, load_curve, on_curve, to_affine
from .ecsm_sos import ec_keygen, outsource_scalar_mul_hcs, outsource_scalar_mul_ms
from .errors import DomainError, ExpSOSError, ProtocolError, SessionError, TransportError, VerificationRejected
from .modexp_sos import Verdict, outsource_hcs, outsource_mm, outsource_ms

EXIT_OK, EXIT_INVALID, EXIT_REJECTED, EXIT_TRANSPORT, EXIT_USAGE = 0, 1, 2, 3, 4
BUILTIN_CURVES = ("f97", "p256")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("EXPSOS_SEED")
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"EXPSOS_SEED is not an integer: {env!r}") from None
    return secrets.randbits(64)


def _hex_arg(text: str) -> int:
    try:
        return from_hex(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=False))


def _worker(args, seed: int):
    if args.worker == "inproc":
        params = {}
        if args.behavior in experiments.ADVERSARIES_WITH_GUESS:
            params["guess_bound"] = args.b_bound
        return local_worker(make_behavior(args.behavior, seed, **params))
    if args.behavior != "honest":
        raise UsageError("--behavior only applies to the in-process worker")
    return remote_worker(args.worker)


def _load_curve(name: str):
    if name in BUILTIN_CURVES:
        text = resources.files("expsos").joinpath("data", f"{name}.json").read_text()
        return curve_from_json(json.loads(text))
    return load_curve(name)


def _message(args) -> bytes:
    if args.message_file:
        return Path(args.message_file).read_bytes()
    if args.message is None:
        raise UsageError("give --message or --message-file")
    return args.message.encode()


# --- commands -------------------------------------------------------------------


def cmd_keygen(args) -> int:
    ctx = ArithContext(_seed(args))
    if args.n_factors not in (1, 2):
        raise UsageError("--n-factors must be 1 or 2")
    if args.n_factors == 1:
        modulus = FactoredModulus.from_factors([gen_prime(args.n_bits, ctx)])
    else:
        modulus = random_modulus(args.n_bits, 2, ctx)
    key = keygen(modulus, args.p_bits, ctx)
    save_key(key, args.out)
    _emit({"n": to_hex(key.N), "l": to_hex(key.L), "out": str(args.out)})
    return EXIT_OK


def cmd_outsource(args) -> int:
    seed = _seed(args)
    key = load_key(args.key)
    ctx = ArithContext(seed)
    worker = _worker(args, seed)
    try:
        if args.mode == "hcs":
            report = outsource_hcs(key, args.u, args.a, worker, ctx)
        elif args.mode == "ms":
            report = outsource_ms(key, args.u, args.a, args.b_bound, worker, ctx)
        else:
            second = _worker(args, seed + 1)
            report = outsource_mm(key, args.u, args.a, worker, second, ctx)
    finally:
        worker.close()
    doc = {"mode": args.mode, "verdict": report.verified.value,
           "local_mults": report.local_mults, "queries_sent": report.queries_sent}
    if report.verified is Verdict.REJECTED:
        _emit(doc)
        return EXIT_REJECTED
    _emit({"result": to_hex(report.result), **doc})
    return EXIT_OK


def cmd_ecmul(args) -> int:
    seed = _seed(args)
    E = _load_curve(args.curve)
    P = E.base if args.x is None else ProjectivePoint.affine(args.x, args.y)
    if not on_curve(E, P):
        raise UsageError("point is not on the curve")
    ctx = ArithContext(seed)
    key = ec_keygen(E.p, args.q_bits or max(E.p.bit_length(), 16), ctx)
    worker = _worker(args, seed)
    s = args.s % E.m
    try:
        if args.mode == "hcs":
            Q, ok = outsource_scalar_mul_hcs(key, E, s, P, worker, ctx), True
        else:
            Q, ok = outsource_scalar_mul_ms(key, E, s, P, args.b_bound, worker, ctx)
    finally:
        worker.close()
    if not ok:
        _emit({"mode": args.mode, "verdict": "rejected"})
        return EXIT_REJECTED
    aff = to_affine(E, Q)
    point = {"infinity": True} if aff is None else {"x": to_hex(aff[0]), "y": to_hex(aff[1])}
    _emit({**point, "mode": args.mode, "verdict": "accepted" if args.mode == "ms" else "not-applicable"})
    return EXIT_OK


def _dsa_doc(params: apps.DsaParams, keys: apps.DsaKeys | None) -> dict:
    doc = {"p": to_hex(params.p), "q": to_hex(params.q), "g": to_hex(params.g)}
    if keys is not None:
        doc.update({"x": to_hex(keys.x), "y": to_hex(keys.y)})
    return doc


def _load_dsa(path) -> tuple[apps.DsaParams, dict]:
    doc = json.loads(Path(path).read_text())
    return apps.DsaParams(from_hex(doc["p"]), from_hex(doc["q"]), from_hex(doc["g"])), doc


def cmd_dsa_keygen(args) -> int:
    ctx = ArithContext(_seed(args))
    params = apps.dsa_paramgen(args.q_bits, args.p_bits, ctx)
    keys = apps.dsa_keygen(params, ctx)
    text = json.dumps(_dsa_doc(params, keys)) + "\n"
    fd = os.open(args.out, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    _emit({**_dsa_doc(params, None), "y": to_hex(keys.y), "out": str(args.out)})
    return EXIT_OK


def cmd_dsa_sign(args) -> int:
    seed = _seed(args)
    params, doc = _load_dsa(args.key)
    if "x" not in doc:
        raise UsageError("key file has no private key")
    ctx = ArithContext(seed)
    worker = _worker(args, seed)
    try:
        sig, triple = apps.dsa_outsourced_sign(params, from_hex(doc["x"]), _message(args), args.b_bound, worker, ctx)
    finally:
        worker.close()
    if args.triple_out:
        Path(args.triple_out).write_text(triple.to_json() + "\n")
    if args.sig_out:
        Path(args.sig_out).write_text(sig.to_json() + "\n")
    print(sig.to_json())
    return EXIT_OK


def cmd_dsa_verify(args) -> int:
    seed = _seed(args)
    params, doc = _load_dsa(args.key)
    sig = apps.DsaSignature.from_json(Path(args.sig).read_text())
    message = _message(args)
    if args.triple is None:
        valid = apps.dsa_local_verify(params, from_hex(doc["y"]), sig, message)
        _emit({"valid": valid, "outsourced": False})
        return EXIT_OK if valid else EXIT_INVALID
    triple = apps.DsaPublicTriple.from_json(Path(args.triple).read_text())
    ctx = ArithContext(seed)
    worker = _worker(args, seed)
    try:
        valid = apps.dsa_outsourced_verify(params, triple, sig, message, args.b_bound, worker, ctx)
    finally:
        worker.close()
    _emit({"valid": valid, "outsourced": True})
    return EXIT_OK if valid else EXIT_INVALID


def cmd_ibe_encrypt(args) -> int:
    seed = _seed(args)
    E = _load_curve(args.curve)
    if E.base is None:
        raise UsageError("curve has no base point")
    ctx = ArithContext(seed)
    worker = _worker(args, seed)
    try:
        ct = apps.ibe_outsourced_encrypt(E, E.base, args.g_pair, _message(args), args.b_bound, worker, ctx)
    finally:
        worker.close()
    print(ct.to_json())
    return EXIT_OK


def cmd_serve(args) -> int:
    params = {}
    if args.behavior in experiments.ADVERSARIES_WITH_GUESS:
        params["guess_bound"] = args.b_bound
    if args.behavior == "shift":
        params["delta"] = args.delta
    behavior = make_behavior(args.behavior, _seed(args), **params)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        run_server(args.listen, behavior)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = experiments.bench(args.bits, args.b_bound, args.trials, _seed(args), args.mode)
    text = experiments.rows_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    print(experiments.rows_to_table(rows))
    return EXIT_OK


def cmd_verify_mc(args) -> int:
    res = experiments.verify_mc(args.adversary, args.b_bound, args.trials, _seed(args), args.bits)
    _emit({
        "adversary": res.adversary, "B": res.B, "trials": res.trials, "accepted": res.accepted,
        "pass_rate": round(res.rate, 6), "expected": round(res.target, 6), "sigma": round(res.sigma, 6),
    })
    return EXIT_OK


def cmd_attack_demo(args) -> int:
    ctx = ArithContext(_seed(args))
    if not 4 <= args.toy_bits <= attacks.MAX_TOY_BITS:
        raise UsageError(f"--toy-bits must lie in [4, {attacks.MAX_TOY_BITS}]")
    modulus = random_modulus(args.toy_bits, 2, ctx)
    key = keygen(modulus, None, ctx)
    u, a = ctx.randrange(2, key.N), ctx.randrange(1, key.N)
    if args.which == "ce1":
        scheme = attacks.NaiveScheme(attacks.NaiveVariant.DUAL_PLAIN)
        _, A1, A2 = scheme.blind(key, u, a, ctx)
        if A1 == A2:
            A2 += key.phi
        cands = attacks.ce1_recover_modulus(A1, A2, key.N.bit_length())
        _emit({"which": "ce1", "n": to_hex(key.N), "candidates": len(cands),
               "recovered": key.N in cands, "shortlist": [to_hex(c) for c in cands[:16]]})
        return EXIT_OK
    scheme = attacks.NaiveScheme(attacks.NaiveVariant.ADDITIVE_OFFSET, t=ctx.randrange(1, 16))
    U, A1, A2 = scheme.blind(key, u, a, ctx)
    F1, F2 = attacks.ce2_forge(U, A1, A2, key.L, 1)
    R1, R2 = pow(U, F1, key.L), pow(U, F2, key.L)
    _emit({"which": "ce2", "naive_check_passed": scheme.check(key, u, R1, R2),
           "recovered": to_hex(R1 % key.N), "correct": to_hex(pow(u, a, key.N)),
           "recovered_is_correct": R1 % key.N == pow(u, a, key.N)})
    return EXIT_OK


# --- parser -----------------------------------------------------------------------


def _add_worker_args(p, default_b: int = 4) -> None:
    p.add_argument("--worker", default="inproc", help="'inproc' or host:port of a running worker")
    p.add_argument("--behavior", default="honest", choices=sorted(BEHAVIORS),
                   help="in-process worker behaviour")
    p.add_argument("--b-bound", type=int, default=default_b, help="tag bound B")


def _add_message_args(p) -> None:
    p.add_argument("--message")
    p.add_argument("--message-file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expsos", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default: $EXPSOS_SEED)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate an outsourcing key")
    p.add_argument("--n-bits", type=int, required=True)
    p.add_argument("--n-factors", type=int, default=2)
    p.add_argument("--p-bits", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("outsource", help="outsource u^a mod N")
    p.add_argument("--key", required=True)
    p.add_argument("--mode", choices=("hcs", "ms", "mm"), default="ms")
    p.add_argument("--u", type=_hex_arg, required=True)
    p.add_argument("--a", type=_hex_arg, required=True)
    _add_worker_args(p)
    p.set_defaults(func=cmd_outsource)

    p = sub.add_parser("ecmul", help="outsource [s]P")
    p.add_argument("--curve", default="f97", help=f"curve file or one of {BUILTIN_CURVES}")
    p.add_argument("--s", type=_hex_arg, required=True)
    p.add_argument("--x", type=_hex_arg)
    p.add_argument("--y", type=_hex_arg)
    p.add_argument("--q-bits", type=int)
    p.add_argument("--mode", choices=("hcs", "ms"), default="ms")
    _add_worker_args(p)
    p.set_defaults(func=cmd_ecmul)

    p = sub.add_parser("dsa-keygen", help="generate DSA parameters and a key pair")
    p.add_argument("--q-bits", type=int, default=160)
    p.add_argument("--p-bits", type=int, default=1024)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dsa_keygen)

    p = sub.add_parser("dsa-sign", help="sign with outsourced exponentiations")
    p.add_argument("--key", required=True)
    _add_message_args(p)
    p.add_argument("--sig-out")
    p.add_argument("--triple-out", help="where to write the shared {G, R1, L}")
    _add_worker_args(p, default_b=2)
    p.set_defaults(func=cmd_dsa_sign)

    p = sub.add_parser("dsa-verify", help="verify a signature, outsourced if --triple is given")
    p.add_argument("--key", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--triple")
    _add_message_args(p)
    _add_worker_args(p, default_b=2)
    p.set_defaults(func=cmd_dsa_verify)

    p = sub.add_parser("ibe-encrypt", help="IBE encryption with outsourced [r]P and H(g)^r")
    p.add_argument("--curve", default="p256")
    p.add_argument("--g-pair", type=_hex_arg, required=True, help="pairing value e(P_A, P_T)")
    _add_message_args(p)
    _add_worker_args(p)
    p.set_defaults(func=cmd_ibe_encrypt)

    p = sub.add_parser("serve", help="run a worker")
    p.add_argument("--listen", default="127.0.0.1:7788")
    p.add_argument("--behavior", default="honest", choices=sorted(BEHAVIORS))
    p.add_argument("--b-bound", type=int, default=4, help="guess bound for guessing adversaries")
    p.add_argument("--delta", type=int, default=1)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="multiplication counts: direct vs outsourced")
    p.add_argument("--bits", type=_int_list, default=[128, 256, 512, 1024])
    p.add_argument("--b-bound", type=_int_list, default=[2, 4, 8, 16])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--mode", choices=("hcs", "ms", "mm"), default="ms")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify-mc", help="Monte-Carlo acceptance rate of an adversary")
    p.add_argument("--adversary", default="random", choices=sorted(BEHAVIORS))
    p.add_argument("--b-bound", type=int, default=4)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--bits", type=int, default=64)
    p.set_defaults(func=cmd_verify_mc)

    p = sub.add_parser("attack-demo", help="run a naive-scheme attack on a toy key")
    p.add_argument("--which", choices=("ce1", "ce2"), required=True)
    p.add_argument("--toy-bits", type=int, default=20)
    p.set_defaults(func=cmd_attack_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    try:
        return args.func(args)
    except VerificationRejected as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (TransportError, ProtocolError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except SessionError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (UsageError, DomainError, OSError, KeyError, json.JSONDecodeError, ExpSOSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
