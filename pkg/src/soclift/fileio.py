"""JSON file formats.

Matrices travel either as a row-major dense array under "matrix" or as
svec coordinates under "svec" (exactly one of the two).  Certificates
pin the coordinate convention explicitly so that a file produced by one
implementation cannot be misread by another.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import InputError
from .lifts import LiftCertificate, Provenance
from .linalg import Subspace, SymMat3, orthonormal_basis, smat, svec
from .spectra import LMI

COORDINATE_CONVENTION = "lorentz-x3-radial"


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}")


def _dump_json(obj: Any, path: str | None, pretty: bool = False) -> str:
    text = json.dumps(obj, indent=2 if pretty else None)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def matrix_from_dict(data: dict) -> SymMat3:
    if not isinstance(data, dict):
        raise InputError("matrix entry must be a JSON object")
    keys = {"matrix", "svec"} & set(data)
    if len(keys) != 1:
        raise InputError(
            'matrix object needs exactly one of the keys "matrix", "svec"'
        )
    if "matrix" in data:
        arr = np.asarray(data["matrix"], dtype=float)
        if arr.shape != (3, 3):
            raise InputError(f"expected 3x3 rows, got shape {arr.shape}")
        scale = float(np.max(np.abs(arr)))
        return SymMat3.from_array(arr, sym_tol=1e-12 * max(scale, 1.0))
    vec = np.asarray(data["svec"], dtype=float)
    if vec.shape != (6,):
        raise InputError(f"svec must hold 6 numbers, got shape {vec.shape}")
    return smat(vec)


def matrix_to_dict(a: SymMat3) -> dict:
    return {"matrix": a.mat.tolist()}


def load_matrix(path: str) -> SymMat3:
    return matrix_from_dict(_load_json(path))


def save_matrix(a: SymMat3, path: str) -> None:
    _dump_json(matrix_to_dict(a), path)


def load_subspace(path: str) -> Subspace:
    """Generators are orthonormalized on load; dimension is detected."""
    data = _load_json(path)
    if not isinstance(data, dict) or "generators" not in data:
        raise InputError('subspace file needs a "generators" key')
    gens = data["generators"]
    if not isinstance(gens, list):
        raise InputError('"generators" must be a list of matrix objects')
    vecs = [svec(matrix_from_dict(g)) for g in gens]
    if not vecs:
        return Subspace(np.zeros((0, 6)))
    return orthonormal_basis(np.array(vecs))


def save_subspace(sub: Subspace, path: str) -> None:
    gens = [matrix_to_dict(smat(row)) for row in sub.basis]
    _dump_json({"generators": gens}, path)


def certificate_to_dict(cert: LiftCertificate) -> dict:
    return {
        "m": cert.m,
        "G": cert.G.tolist(),
        "E": cert.E.tolist(),
        "provenance": cert.provenance.value,
        "coordinate_convention": COORDINATE_CONVENTION,
    }


def certificate_from_dict(data: dict) -> LiftCertificate:
    for key in ("m", "G", "E", "provenance", "coordinate_convention"):
        if key not in data:
            raise InputError(f'certificate file is missing "{key}"')
    if data["coordinate_convention"] != COORDINATE_CONVENTION:
        raise InputError(
            f'unknown coordinate convention {data["coordinate_convention"]!r}'
        )
    if data["m"] != 2:
        raise InputError("only m = 2 certificates are supported")
    g = np.asarray(data["G"], dtype=float)
    if g.shape != (6, 6):
        raise InputError(f"G must be 6x6, got {g.shape}")
    e = np.asarray(data["E"], dtype=float)
    if e.size == 0:
        e = np.zeros((0, 6))
    if e.ndim != 2 or e.shape[1] != 6 or e.shape[0] > 6:
        raise InputError(f"E must be k x 6 with k <= 6, got {e.shape}")
    try:
        provenance = Provenance(data["provenance"])
    except ValueError:
        raise InputError(f'unknown provenance {data["provenance"]!r}')
    return LiftCertificate(g, e, provenance)


def load_certificate(path: str) -> LiftCertificate:
    return certificate_from_dict(_load_json(path))


def save_certificate(cert: LiftCertificate, path: str | None,
                     pretty: bool = False) -> str:
    return _dump_json(certificate_to_dict(cert), path, pretty)


def load_lmi(path: str) -> LMI:
    data = _load_json(path)
    if not isinstance(data, dict) or "A" not in data or "B" not in data:
        raise InputError('LMI file needs keys "A" (list) and "B"')
    if not isinstance(data["A"], list):
        raise InputError('"A" must be a list of matrix objects')
    coeffs = tuple(matrix_from_dict(a) for a in data["A"])
    return LMI(coeffs, matrix_from_dict(data["B"]))


def dump_report(obj: dict, pretty: bool = False) -> str:
    return json.dumps(obj, indent=2 if pretty else None)
