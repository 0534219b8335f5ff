"""Blinded, verifiable outsourcing of modular exponentiation and elliptic-curve
scalar multiplication to untrusted workers."""
from .arith import ArithContext, FactoredModulus, mod_exp, mod_inv, mod_mul
from .blind import OutsourceKey, VerificationTag, keygen, load_key, save_key
from .cloud import local_worker, remote_worker, start_server
from .curve import CurveParams, ProjectivePoint, scalar_mul
from .errors import ExpSOSError
from .modexp_sos import SessionReport, Verdict, outsource_hcs, outsource_mm, outsource_ms

__version__ = "0.1.0"

__all__ = [
    "ArithContext", "FactoredModulus", "mod_exp", "mod_inv", "mod_mul",
    "OutsourceKey", "VerificationTag", "keygen", "load_key", "save_key",
    "local_worker", "remote_worker", "start_server",
    "CurveParams", "ProjectivePoint", "scalar_mul",
    "ExpSOSError", "SessionReport", "Verdict", "outsource_hcs", "outsource_mm", "outsource_ms",
]
