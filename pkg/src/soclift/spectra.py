"""Affine second-order-cone representations of size-3 spectrahedra.

A spectrahedron SP = {x : A(x) + B PSD} is handled through the cone
slice spanned by the coefficient matrices: if that slice admits a lift
certificate (G, E), then

    x in SP  <=>  exists z in Q^2 with  G z - A(x) = B,  E z = 0,

because A(x) + B always lies in the span and the certificate covers
exactly its PSD points.  Spectrahedra of dimension at most 3 always
qualify; the pipeline also succeeds for 5-dimensional spans with a
singular indefinite normal.  A non-representable span yields an
"inapplicable" report, which does not prove the spectrahedron itself
has no affine representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import Verdict, classify_slice
from .errors import EmptyInterval, InputError, NotInSlice
from .lifts import LiftCertificate, lift_slice, preimage
from .linalg import Subspace, SymMat3, orthonormal_basis, smat, svec


@dataclass(frozen=True)
class LMI:
    """Constraint A(x) + B PSD with A(x) = sum_i x_i * A_i."""

    coeffs: tuple[SymMat3, ...]
    B: SymMat3

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def evaluate(self, x) -> SymMat3:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise InputError(f"expected {self.n} variables, got {x.shape}")
        vec = svec(self.B).copy()
        for xi, ai in zip(x, self.coeffs):
            vec += xi * svec(ai)
        return smat(vec)


@dataclass(frozen=True)
class AffineSocRep:
    """Existential description {x : exists z in Q^2, H_x x + H_z z = h}.

    The rows stack G z - A(x) = B over E z = 0.
    """

    n: int
    H_x: np.ndarray
    H_z: np.ndarray
    h: np.ndarray
    certificate: LiftCertificate
    lmi: LMI

    def to_dict(self) -> dict:
        return {
            "variables": self.n,
            "auxiliaries": 6,
            "cone": "Q x Q (lorentz-x3-radial)",
            "H_x": self.H_x.tolist(),
            "H_z": self.H_z.tolist(),
            "h": self.h.tolist(),
            "provenance": self.certificate.provenance.value,
        }


@dataclass(frozen=True)
class Inapplicable:
    """The span of the LMI is not representable; no claim is made about
    the spectrahedron itself."""

    verdict: Verdict

    def to_dict(self) -> dict:
        return {"inapplicable": True, "verdict": self.verdict.to_dict()}


def image_subspace(lmi: LMI) -> Subspace:
    """Span of the coefficient matrices and the constant term."""
    gens = [svec(a) for a in lmi.coeffs] + [svec(lmi.B)]
    return orthonormal_basis(np.array(gens))


def lmi_lineality(lmi: LMI) -> Subspace:
    """Kernel of (x, y) -> svec(A(x) + y B) in R^(n+1).

    Directions in the kernel are parallel to lines contained in every
    fiber of the homogenized cone {(x, y) : A(x) + y B PSD}.
    """
    cols = [svec(a) for a in lmi.coeffs] + [svec(lmi.B)]
    phi = np.array(cols).T  # (6, n+1)
    _, s, vt = np.linalg.svd(phi)
    rank = int(np.sum(s > 1e-10 * max(float(s[0]), 1e-300))) if s.size else 0
    kernel = vt[rank:]
    return Subspace(kernel, ambient=lmi.n + 1)


def affine_soc_rep(lmi: LMI, seed: int = 0, verify: bool = True):
    """Emit an AffineSocRep for the LMI, or Inapplicable."""
    span = image_subspace(lmi)
    verdict = classify_slice(span, seed=seed)
    if not verdict.socr:
        return Inapplicable(verdict)
    cert = lift_slice(span, seed=seed, verify=verify)
    k = cert.E.shape[0]
    h_x = np.vstack([
        -np.array([svec(a) for a in lmi.coeffs]).T.reshape(6, lmi.n),
        np.zeros((k, lmi.n)),
    ])
    h_z = np.vstack([cert.G, cert.E])
    h = np.concatenate([svec(lmi.B), np.zeros(k)])
    return AffineSocRep(lmi.n, h_x, h_z, h, cert, lmi)


def lmi_feasible(lmi: LMI, x, tol: float = 1e-8) -> bool:
    """Direct oracle: smallest eigenvalue of A(x) + B above -tol."""
    from .linalg import eigen_sym3

    return float(eigen_sym3(lmi.evaluate(x)).lam[0]) >= -tol


def soc_feasible(rep: AffineSocRep, x, tol: float = 1e-8) -> bool:
    """Existential-system oracle through the certificate's preimage.

    A(x) + B always satisfies the linear part, so feasibility reduces
    to finding z in Q^2 on the fiber, which the preimage solver decides
    deterministically.
    """
    target = rep.lmi.evaluate(x)
    try:
        preimage(rep.certificate, target, tol)
        return True
    except (NotInSlice, EmptyInterval):
        return False


def sampling_box(lmi: LMI) -> float:
    """Half-width covering the boundary region of the spectrahedron."""
    denom = max([a.norm() for a in lmi.coeffs] + [1.0])
    return 1.0 + lmi.B.norm() / denom


def agreement_stats(
    rep: AffineSocRep,
    count: int = 10_000,
    seed: int = 0,
    tol: float = 1e-8,
    band: float = 1e-7,
    box: float | None = None,
) -> dict:
    """Compare the LMI oracle with the SOC-feasibility oracle on random
    points; points whose smallest eigenvalue falls inside the boundary
    band are excused."""
    from .linalg import eigvals_batch

    lmi = rep.lmi
    if box is None:
        box = sampling_box(lmi)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-box, box, size=(count, lmi.n))
    base = svec(lmi.B)
    coeff = (
        np.array([svec(a) for a in lmi.coeffs])
        if lmi.n
        else np.zeros((0, 6))
    )
    vecs = base + xs @ coeff
    from .linalg import smat_batch

    lam_min = eigvals_batch(smat_batch(vecs))[:, 0]
    disagreements = 0
    checked = 0
    for i in range(count):
        if abs(lam_min[i]) <= band:
            continue
        checked += 1
        lmi_ok = lam_min[i] >= -tol
        soc_ok = soc_feasible(rep, xs[i], tol)
        if lmi_ok != soc_ok:
            disagreements += 1
    return {
        "sampled": count,
        "checked_outside_band": checked,
        "disagreements": disagreements,
        "box_half_width": box,
    }
