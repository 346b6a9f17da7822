"""Second-order cone representability of slices of the 3x3 PSD cone.

Classify a slice S = PSD ∩ L, synthesize an explicit Q^2-lift
certificate when S is representable, verify certificates by two-sided
sampling, and emit affine second-order-cone representations of
spectrahedra defined by size-3 linear matrix inequalities.
"""

from .classify import (
    Reason,
    Verdict,
    classify_orthogonal,
    classify_slice,
    singular_indefinite_by_minors,
)
from .geometry import (
    MaxRankWitness,
    SliceDescription,
    max_rank_element,
    sample_slice_points,
    slice_dimension,
)
from .lifts import (
    LiftCertificate,
    Provenance,
    canonical_lift,
    face_lift,
    find_singular_complement,
    lift_orthogonal_singular,
    lift_slice,
    preimage,
)
from .linalg import (
    CongruenceFactor,
    EigenTriple,
    Inertia,
    Subspace,
    SymMat3,
    congruence_factor,
    eigen_sym3,
    inertia,
    is_psd,
    orthogonal_complement,
    orthonormal_basis,
    psd_project,
    smat,
    svec,
)
from .spectra import (
    AffineSocRep,
    Inapplicable,
    LMI,
    affine_soc_rep,
    image_subspace,
    lmi_lineality,
)
from .verify import VerificationReport, sample_q2, verify_backward, verify_forward

__version__ = "0.1.0"

__all__ = [
    "AffineSocRep",
    "CongruenceFactor",
    "EigenTriple",
    "Inapplicable",
    "Inertia",
    "LMI",
    "LiftCertificate",
    "MaxRankWitness",
    "Provenance",
    "Reason",
    "SliceDescription",
    "Subspace",
    "SymMat3",
    "VerificationReport",
    "Verdict",
    "affine_soc_rep",
    "canonical_lift",
    "classify_orthogonal",
    "classify_slice",
    "congruence_factor",
    "eigen_sym3",
    "face_lift",
    "find_singular_complement",
    "image_subspace",
    "inertia",
    "is_psd",
    "lift_orthogonal_singular",
    "lift_slice",
    "lmi_lineality",
    "max_rank_element",
    "orthogonal_complement",
    "orthonormal_basis",
    "preimage",
    "psd_project",
    "sample_q2",
    "sample_slice_points",
    "singular_indefinite_by_minors",
    "slice_dimension",
    "smat",
    "svec",
    "verify_backward",
    "verify_forward",
]
