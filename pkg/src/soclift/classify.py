"""Second-order-cone representability of slices of the 3x3 PSD cone.

A slice is representable exactly when its dimension is at most 4 or it
is the orthogonal slice S_B of a singular indefinite normal B.  The
6-dimensional slice (the full cone) is not representable; that verdict
is consumed as a known impossibility result, not recomputed.

Both decision routes for "singular and indefinite" are provided: the
eigenvalue route (inertia) and the principal-minor route

    det(B) = 0   and   det(B_12) + det(B_13) + det(B_23) < 0.

The minor sum equals the second elementary symmetric function of the
eigenvalues, so for a singular B it is the product of the two remaining
eigenvalues and is negative precisely for indefinite B (for example,
spectrum (1, -1, 0) gives -1).  The two routes are cross-checked on
import against fixed witnesses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ZeroMatrix
from .geometry import SliceDescription, slice_dimension
from .linalg import (
    Subspace,
    SymMat3,
    default_zero_tol,
    inertia,
    orthogonal_complement,
    smat,
)

DET_TOL = 1e-9  # relative to ||B||^3, see marginal flag below


class Reason(str, enum.Enum):
    DIM_AT_MOST_4 = "DimAtMost4"
    SINGULAR_INDEFINITE_NORMAL = "SingularIndefiniteNormal"
    FACE_SLICE = "FaceSlice"
    FULL_CONE = "FullCone"
    NONSINGULAR_INDEFINITE_NORMAL = "NonsingularIndefiniteNormal"


@dataclass(frozen=True)
class Verdict:
    socr: bool
    reason: Reason
    dim_S: int
    witness_B: SymMat3 | None = None
    marginal: bool = False

    def to_dict(self) -> dict:
        out = {
            "socr": self.socr,
            "reason": self.reason.value,
            "dim_S": self.dim_S,
            "marginal": self.marginal,
        }
        if self.witness_B is not None:
            out["witness_B"] = self.witness_B.mat.tolist()
        return out


def _marginal(b: SymMat3) -> bool:
    """True when |det B| sits in the gray band around the singularity
    threshold, where the representability verdict is discontinuous."""
    scale = max(1.0, b.norm()) ** 3
    d = abs(b.det())
    return DET_TOL * scale / 10.0 < d < 10.0 * DET_TOL * scale


def classify_orthogonal(b: SymMat3, zero_tol: float | None = None) -> Verdict:
    """Verdict for the orthogonal slice S_B = {A PSD : <A, B> = 0}.

    Semidefinite B: S_B is a face, always representable, of dimension
    (3-r)(4-r)/2 for r = rank(B).  Indefinite B: S_B is a hyperplane
    slice of dimension 5, representable iff B is singular.
    """
    if b.norm() <= 1e-12:
        raise ZeroMatrix("S_B for B = 0 is the full cone; classify the "
                         "subspace instead")
    sig = inertia(b, zero_tol)
    r = sig.n_plus + sig.n_minus
    if sig.n_plus == 0 or sig.n_minus == 0:
        dim = (3 - r) * (4 - r) // 2
        return Verdict(True, Reason.FACE_SLICE, dim, b, _marginal(b))
    if sig.n_zero >= 1:
        return Verdict(
            True, Reason.SINGULAR_INDEFINITE_NORMAL, 5, b, _marginal(b)
        )
    return Verdict(
        False, Reason.NONSINGULAR_INDEFINITE_NORMAL, 5, b, _marginal(b)
    )


def singular_indefinite_by_minors(b: SymMat3, tol: float = DET_TOL) -> bool:
    """Minor-based test for "singular and indefinite".

    Requires |det B| <= tol * max(1, ||B||^3) together with a strictly
    negative principal 2x2 minor sum.  Note the sign: the minor sum of
    a singular matrix is the product of its two nonzero eigenvalues.
    """
    m12 = b.a11 * b.a22 - b.a12 * b.a12
    m13 = b.a11 * b.a33 - b.a13 * b.a13
    m23 = b.a22 * b.a33 - b.a23 * b.a23
    singular = abs(b.det()) <= tol * max(1.0, b.norm() ** 3)
    return bool(singular and (m12 + m13 + m23) < -tol)


def classify_slice(
    L: Subspace, seed: int = 0, restarts: int = 16
) -> Verdict:
    """Full classification pipeline for S = PSD ∩ L."""
    desc = slice_dimension(L, seed=seed, restarts=restarts)
    return classify_description(desc)


def classify_description(desc: SliceDescription) -> Verdict:
    """Classification from a precomputed slice description."""
    if desc.dim_S == 6:
        return Verdict(False, Reason.FULL_CONE, 6)
    if desc.dim_S <= 4:
        return Verdict(True, Reason.DIM_AT_MOST_4, desc.dim_S)
    # dim 5: the slice hull has a unique normal direction, necessarily
    # indefinite because the slice has codimension one.
    normal = orthogonal_complement(desc.span_S)
    if normal.dim != 1:
        raise NumericalFailure(
            f"5-dimensional slice with a {normal.dim}-dimensional normal"
        )
    vec = normal.basis[0]
    lead = vec[np.argmax(np.abs(vec))]
    b = smat(vec if lead >= 0 else -vec)
    verdict = classify_orthogonal(b, default_zero_tol(b))
    if verdict.reason is Reason.FACE_SLICE:
        raise NumericalFailure(
            "5-dimensional slice reported a semidefinite normal; "
            "this contradicts the codimension-one structure"
        )
    return verdict


def _self_check() -> bool:
    """Cross-check the minor route against the inertia route on fixed
    witnesses (runs once on import)."""
    cases = [
        (SymMat3.diag(1, -1, 0), True),
        (SymMat3.diag(1, 1, 0), False),
        (SymMat3.diag(1, -1, -1), False),
    ]
    for b, expect in cases:
        sig = inertia(b)
        by_eigen = sig.n_zero >= 1 and sig.n_plus >= 1 and sig.n_minus >= 1
        if by_eigen != expect or singular_indefinite_by_minors(b) != expect:
            raise AssertionError(
                f"minor/inertia self-check failed on {b}"
            )
    return True


_SELF_CHECK_OK = _self_check()
