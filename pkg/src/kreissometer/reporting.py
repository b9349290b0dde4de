"""Deterministic JSON encoding of analysis artifacts.

Dicts are built in a fixed key order and floats serialize via Python's
shortest round-trip repr, so identical inputs produce byte-identical
documents.  Non-finite floats are carried as the strings "inf", "-inf"
and "nan" (JSON has no spelling for them).  Matrices are embedded up to
dimension 16.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .certificates import Condition3Certificate, Condition4Certificate
from .constants import SupSearchResult
from .families import FamilyReport, MemberRecord
from .spectra import SpectrumReport, StabilityVerdict

SCHEMA = "kreissometer/1"

#: matrices above this dimension are summarized, not embedded
EMBED_LIMIT = 16


def encode_float(x) -> object:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def encode_complex(z) -> list:
    z = complex(z)
    return [encode_float(z.real), encode_float(z.imag)]


def encode_location(loc) -> object:
    if loc is None:
        return None
    if isinstance(loc, (int, np.integer)):
        return int(loc)
    if isinstance(loc, (float, np.floating)):
        return encode_float(loc)
    return encode_complex(loc)


def encode_matrix(a) -> object:
    arr = np.asarray(a, dtype=complex)
    if arr.shape[0] > EMBED_LIMIT:
        return {"embedded": False, "shape": list(arr.shape)}
    return [[encode_complex(v) for v in row] for row in arr]


def encode_sup_result(r: SupSearchResult | None) -> object:
    if r is None:
        return None
    return {
        "value": encode_float(r.value),
        "argmax": encode_location(r.argmax),
        "diverged": bool(r.diverged),
        "trace": [[int(level), encode_float(v)] for level, v in r.trace],
        "budget_used": int(r.budget_used),
        "growth_certificate": None
        if r.growth_certificate is None
        else [[encode_location(loc), encode_float(v)] for loc, v in r.growth_certificate],
    }


def encode_spectrum(report: SpectrumReport) -> dict:
    return {
        "eigenvalues": [
            {
                "value": encode_complex(c.value),
                "multiplicity": int(c.algebraic_multiplicity),
                "max_block_size": int(c.max_block_size),
            }
            for c in report.eigenvalues
        ],
        "cluster_tolerance": encode_float(report.cluster_tolerance),
        "abscissa": encode_float(report.abscissa),
        "radius": encode_float(report.radius),
    }


def encode_verdict(v: StabilityVerdict) -> dict:
    return {
        "stable": bool(v.quasi_stable),
        "witness": None
        if v.witness is None
        else {"eigenvalue": encode_complex(v.witness.eigenvalue), "reason": v.witness.reason},
        "tolerance": encode_float(v.tolerance),
    }


def encode_condition3(cert: Condition3Certificate, bound: float | None = None) -> dict:
    out = {
        "mode": cert.mode,
        "scaling_eps": encode_float(cert.scaling_eps),
        "k31": encode_float(cert.k31),
        "k32": encode_float(cert.k32),
        "kappa_s": encode_float(cert.kappa_s),
        "ordering_valid": bool(cert.ordering_valid),
        "triangular_valid": bool(cert.triangular_valid),
        "diagonal_sign_valid": bool(cert.diagonal_sign_valid),
        "eps_table": [
            {"eps": encode_float(e), "k31": encode_float(a), "k32": encode_float(b)}
            for e, a, b in cert.eps_table
        ],
        "similarity": encode_matrix(cert.s),
        "triangular_form": encode_matrix(cert.t),
    }
    if bound is not None:
        out["ratio_bound"] = encode_float(bound)
    return out


def encode_condition4(cert: Condition4Certificate) -> dict:
    return {
        "mode": cert.mode,
        "k4": encode_float(cert.k4),
        "negativity_residual": encode_float(cert.negativity_residual),
        "lambda_min": encode_float(cert.lambda_min),
        "valid": bool(cert.valid),
        "h": encode_matrix(cert.h),
    }


def encode_member(record: MemberRecord) -> dict:
    return {
        "index": int(record.index),
        "error": record.error,
        "k1": encode_sup_result(record.k1),
        "k2": encode_sup_result(record.k2),
        "cal_k": encode_sup_result(record.cal_k),
        "k31": None if record.k31 is None else encode_float(record.k31),
        "k32": None if record.k32 is None else encode_float(record.k32),
        "k4": None if record.k4 is None else encode_float(record.k4),
        "cond4_reason": record.cond4_reason,
        "stable": record.stable_verdict,
        "witness_reason": record.witness_reason,
    }


def encode_family_report(report: FamilyReport) -> dict:
    return {
        "mode": report.mode,
        "verdict": report.verdict,
        "witness_index": report.witness_index,
        "failure_count": int(report.failure_count),
        "sup_k1": encode_float(report.sup_k1),
        "sup_k2": encode_float(report.sup_k2),
        "sup_cal_k": encode_float(report.sup_cal_k),
        "growth_trace": [[int(i), encode_float(v)] for i, v in report.growth_trace],
        "members": [encode_member(r) for r in report.members],
    }


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"
