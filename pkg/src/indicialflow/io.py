"""JSON encoding of pencils, cone realizations and fixtures.

Complex numbers are always written as two-element arrays [re, im] of IEEE
doubles, which makes a parse/serialize round trip bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .pencil import SelfAdjointPencil

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "encode_vector",
    "decode_vector",
    "pencil_to_dict",
    "pencil_from_dict",
    "load_json",
    "dump_json",
]


def _pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _unpair(v) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise ValueError(f"expected a complex number as [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def encode_vector(v) -> list:
    return [_pair(z) for z in np.asarray(v).ravel()]


def decode_vector(data) -> np.ndarray:
    if not isinstance(data, list):
        raise ValueError("expected a list of [re, im] entries")
    return np.array([_unpair(z) for z in data], dtype=complex)


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.asarray(m)]


def decode_matrix(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ValueError("expected a nonempty list of rows")
    rows = [decode_vector(r) for r in data]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix rows")
    return np.array(rows, dtype=complex)


def pencil_to_dict(p: SelfAdjointPencil) -> dict:
    return {"mu": p.mu, "dim": p.dim, "coeffs": [encode_matrix(a) for a in p.coeffs]}


def pencil_from_dict(data: dict) -> SelfAdjointPencil:
    """Parse and validate a pencil JSON object."""
    if not isinstance(data, dict) or "coeffs" not in data:
        raise ValueError("pencil JSON needs a 'coeffs' array")
    coeffs = [decode_matrix(a) for a in data["coeffs"]]
    p = SelfAdjointPencil(coeffs)
    if "mu" in data and data["mu"] != p.mu:
        raise ValueError(f"declared mu={data['mu']} but {len(coeffs)} coefficients given")
    if "dim" in data and data["dim"] != p.dim:
        raise ValueError(f"declared dim={data['dim']} but coefficients are {p.dim}x{p.dim}")
    return p


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=1)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
