"""Synthesis of Q^2-lift certificates for representable slices.

A certificate is a pair (G, E): the claim is

    S = { smat(G z) : z in Q^2, E z = 0 },

where z = (w1, w2, w3, v1, v2, v3) stacks two Lorentz-cone triples with
the third coordinate radial.

The canonical certificate covers S1 = {A PSD : a11 = a22}.  Writing
A = [[t, a, b], [a, t, c], [b, c, s]], a rotation of the first two
coordinates by 45 degrees turns A into an arrow matrix with diagonal
(t+a, t-a, s), so A is PSD iff the "weight" s can be split as
s = x3 + y3 with

    (t+a) * 2*x3 >= (b+c)^2      and      (t-a) * 2*y3 >= (b-c)^2,

two rotated-cone memberships.  (The split variable 2*x3 is the free
parameter u of the preimage solver.)  Each rotated triple (r1, r2, r3),
r2*r3 >= r1^2, r2, r3 >= 0, is expressed in genuine Lorentz coordinates
through r1 = w2, r2 = w3 - w1, r3 = w3 + w1, giving the matrix G0 below.

Every other representable slice reduces to the canonical case: slices
orthogonal to a singular indefinite B by a congruence that normalizes
B to Diag(1, -1, 0); low-dimensional slices with an interior point by
slicing the certificate of a singular indefinite complement direction;
slices of proper faces by embedding the PSD cone of the face, which has
size at most 2 and is itself a Lorentz cone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .classify import classify_description
from .errors import (
    EmptyInterval,
    IndefinitenessLost,
    NotInSlice,
    NotSingularIndefinite,
    NotSocr,
    PreconditionViolated,
    RankTooLarge,
    VerificationFailed,
)
from .geometry import MaxRankWitness, slice_dimension
from .linalg import (
    SQRT2,
    Subspace,
    SymMat3,
    congruence_factor,
    congruence_map,
    eigen_sym3,
    inertia,
    intersect,
    orthogonal_complement,
    smat,
    span_of_face,
    svec,
)

# svec rows (a11, a22, a33, sqrt2*a12, sqrt2*a13, sqrt2*a23) against
# z = (w1, w2, w3, v1, v2, v3).
G0 = np.array([
    [-1.0, 0.0, 1.0, -1.0, 0.0, 1.0],
    [-1.0, 0.0, 1.0, -1.0, 0.0, 1.0],
    [1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
    [-SQRT2, 0.0, SQRT2, SQRT2, 0.0, -SQRT2],
    [0.0, SQRT2, 0.0, 0.0, SQRT2, 0.0],
    [0.0, SQRT2, 0.0, 0.0, -SQRT2, 0.0],
])

_EMPTY_E = np.zeros((0, 6))


class Provenance(str, enum.Enum):
    CANONICAL = "Canonical"
    CONGRUENCE_CONJUGATED = "CongruenceConjugated"
    FACE_EMBEDDING = "FaceEmbedding"
    SLICED_CONGRUENCE = "SlicedCongruence"


@dataclass(frozen=True)
class LiftCertificate:
    """Certificate S = {smat(G z) : z in Q^2, E z = 0}.

    `conjugation` (the matrix M with B = M^T D M) and `face_range` are
    in-memory aids for the preimage solver; certificates loaded from
    files lack them and fall back to the self-contained generic solver.
    """

    G: np.ndarray
    E: np.ndarray
    provenance: Provenance
    m: int = 2
    conjugation: np.ndarray | None = None
    face_range: np.ndarray | None = None

    @property
    def rank_G(self) -> int:
        return int(np.linalg.matrix_rank(self.G, tol=1e-10))


def lorentz_from_rotated(r: np.ndarray) -> np.ndarray:
    """(r1, r2, r3) with r2 r3 >= r1^2, r2, r3 >= 0  ->  Lorentz (w1, w2, w3)."""
    return np.array([0.5 * (r[2] - r[1]), r[0], 0.5 * (r[1] + r[2])])


def rotated_from_lorentz(w: np.ndarray) -> np.ndarray:
    return np.array([w[1], w[2] - w[0], w[2] + w[0]])


def q2_violation(z: np.ndarray) -> np.ndarray:
    """Membership defect of each Lorentz factor: max over factors of
    ||(x1, x2)|| - x3, clipped at zero.  Shape (...,)."""
    z = np.asarray(z, dtype=float)
    d1 = np.hypot(z[..., 0], z[..., 1]) - z[..., 2]
    d2 = np.hypot(z[..., 3], z[..., 4]) - z[..., 5]
    return np.maximum(np.maximum(d1, d2), 0.0)


def in_q2(z: np.ndarray, tol: float) -> np.ndarray:
    return q2_violation(z) <= tol


def canonical_lift() -> LiftCertificate:
    """Certificate for the slice {A PSD : a11 = a22}."""
    return LiftCertificate(G0.copy(), _EMPTY_E.copy(), Provenance.CANONICAL)


def _canonical_preimage(a: SymMat3, tol: float) -> np.ndarray:
    """Preimage under G0 via the free-parameter interval.

    The split parameter u ranges over [lo, hi]; the midpoint maximizes
    the margin to both cone constraints.  Degenerate pivots (t +- a
    near zero) demand the matching numerator to vanish, which genuine
    PSD input guarantees, instead of dividing.
    """
    scale = max(1.0, a.norm())
    if abs(a.a11 - a.a22) > tol * scale:
        raise NotInSlice(
            f"a11 - a22 = {a.a11 - a.a22:.3e} exceeds tolerance"
        )
    t = 0.5 * (a.a11 + a.a22)
    aa, b, c, s = a.a12, a.a13, a.a23, a.a33
    tp, tm = t + aa, t - aa
    # A vanishing pivot demands a vanishing coupling, up to the slack a
    # tol-level PSD violation leaves in the 2x2 minor with s:
    # coupling^2 <= 2 (pivot + eps)(s + eps).
    eps = tol * scale

    def coupling_bound(pivot: float) -> float:
        return math.sqrt(
            2.0 * max(pivot + eps, 0.0) * max(s + eps, 0.0)
        ) + eps

    if tp > tol:
        lo = (b + c) ** 2 / tp
    else:
        if abs(b + c) > coupling_bound(tp):
            raise EmptyInterval(
                "zero pivot t + a with nonzero coupling b + c"
            )
        lo = 0.0
    if tm > tol:
        hi = 2.0 * s - (b - c) ** 2 / tm
    else:
        if abs(b - c) > coupling_bound(tm):
            raise EmptyInterval(
                "zero pivot t - a with nonzero coupling b - c"
            )
        hi = 2.0 * s
    if hi >= lo - tol:
        u = 0.5 * (lo + hi)
    else:
        # Tiny pivots amplify tol-level PSD noise through the division,
        # so a crossed interval is not yet proof of infeasibility.  Use
        # the u maximizing the smaller of the two linear cone margins
        # tp*u - (b+c)^2 and tm*(2s - u) - (b-c)^2; the membership check
        # at the end of preimage() delivers the verdict.
        if tp + tm > eps:
            u = ((b + c) ** 2 - (b - c) ** 2 + 2.0 * s * tm) / (tp + tm)
        else:
            u = s
        u = min(max(u, min(0.0, 2.0 * s)), max(0.0, 2.0 * s))
    x_rot = 0.5 * np.array([b + c, tp, u])
    y_rot = 0.5 * np.array([b - c, tm, 2.0 * s - u])
    return np.concatenate(
        [lorentz_from_rotated(x_rot), lorentz_from_rotated(y_rot)]
    )


def _face_preimage(cert: LiftCertificate, a: SymMat3, tol: float) -> np.ndarray:
    v = cert.face_range
    r = v.shape[1]
    scale = max(1.0, a.norm())
    m = a.mat
    compressed = v.T @ m @ v if r else np.zeros((0, 0))
    recon = v @ compressed @ v.T if r else np.zeros((3, 3))
    if np.linalg.norm(m - recon) > tol * scale:
        raise NotInSlice("matrix leaves the face of the certificate")
    z = np.zeros(6)
    if r == 2:
        z[0] = 0.5 * (compressed[1, 1] - compressed[0, 0])
        z[1] = compressed[0, 1]
        z[2] = 0.5 * (compressed[0, 0] + compressed[1, 1])
    elif r == 1:
        z[2] = compressed[0, 0]
    return z


def _soc_line_interval(p: np.ndarray, q: np.ndarray, tol: float):
    """The interval {tau : p + tau q in Q} for one Lorentz factor.

    Membership margin m(tau) = x3 - ||(x1, x2)|| is concave, so the
    feasible set is a closed interval.  Its endpoints are roots of the
    quadratic x3^2 - x1^2 - x2^2 or of x3 = 0; candidates are tested
    with a tol-relaxed margin.  Returns (lo, hi), possibly infinite,
    or None when empty.
    """
    def margin(tau: float) -> float:
        x = p + tau * q
        return x[2] - math.hypot(x[0], x[1])

    a2 = q[2] ** 2 - q[0] ** 2 - q[1] ** 2
    a1 = 2.0 * (p[2] * q[2] - p[0] * q[0] - p[1] * q[1])
    a0 = p[2] ** 2 - p[0] ** 2 - p[1] ** 2
    candidates: list[float] = []
    if abs(a2) > 1e-300:
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc >= 0.0:
            sq = math.sqrt(disc)
            candidates += [(-a1 - sq) / (2 * a2), (-a1 + sq) / (2 * a2)]
    elif abs(a1) > 1e-300:
        candidates.append(-a0 / a1)
    if abs(q[2]) > 1e-300:
        candidates.append(-p[2] / q[2])
    candidates.sort()
    probes = [-1e30] + candidates + [1e30]
    feas = []
    for i in range(len(probes) - 1):
        lo, hi = probes[i], probes[i + 1]
        mid = 0.5 * (lo + hi)
        if margin(mid) >= -tol:
            feas.append([lo, hi])
    for c in candidates:
        if margin(c) >= -tol and not any(
            lo <= c <= hi for lo, hi in feas
        ):
            feas.append([c, c])
    if not feas:
        return None
    # Concavity: the union of feasible pieces is one interval.
    lo = min(piece[0] for piece in feas)
    hi = max(piece[1] for piece in feas)
    lo = -math.inf if lo <= -1e30 else lo
    hi = math.inf if hi >= 1e30 else hi
    return lo, hi


def _generic_preimage(cert: LiftCertificate, a: SymMat3, tol: float) -> np.ndarray:
    """Self-contained preimage using only (G, E).

    Solves G z = svec(A) on ker E; a one-dimensional solution kernel is
    resolved by intersecting the per-factor cone intervals along the
    kernel line and taking the midpoint.
    """
    scale = max(1.0, a.norm())
    if cert.E.shape[0]:
        _, s, vt = np.linalg.svd(cert.E)
        rank_e = int(np.sum(s > 1e-10 * max(s[0], 1e-300)))
        z_basis = vt[rank_e:].T  # (6, p)
    else:
        z_basis = np.eye(6)
    if z_basis.shape[1] == 0:
        if a.norm() > tol * scale:
            raise NotInSlice("certificate has trivial feasible set")
        return np.zeros(6)
    gz = cert.G @ z_basis
    target = svec(a)
    sol, *_ = np.linalg.lstsq(gz, target, rcond=None)
    if np.linalg.norm(gz @ sol - target) > tol * scale:
        raise NotInSlice("matrix is outside the certificate's image span")
    u_, s_, vt_ = np.linalg.svd(gz)
    null = vt_[s_ <= 1e-10 * max(s_[0], 1e-300)] if len(s_) else vt_
    extra = vt_[len(s_):]
    null = np.vstack([null, extra]) if extra.size else null
    if null.shape[0] == 0:
        z = z_basis @ sol
        if q2_violation(z) > tol * max(1.0, np.linalg.norm(z)):
            raise EmptyInterval("unique solution leaves the cone")
        return z
    if null.shape[0] > 1:
        z = z_basis @ sol
        if q2_violation(z) > tol * max(1.0, np.linalg.norm(z)):
            raise EmptyInterval(
                "minimum-norm solution leaves the cone "
                "(multi-dimensional kernel)"
            )
        return z
    z0 = z_basis @ sol
    d = z_basis @ null[0]
    tol_line = tol * max(1.0, np.linalg.norm(z0))
    span1 = _soc_line_interval(z0[:3], d[:3], tol_line)
    span2 = _soc_line_interval(z0[3:], d[3:], tol_line)
    if span1 is None or span2 is None:
        raise EmptyInterval("a cone factor is infeasible along the kernel")
    lo = max(span1[0], span2[0])
    hi = min(span1[1], span2[1])
    if hi < lo:
        raise EmptyInterval(
            f"kernel interval [{lo:.6g}, {hi:.6g}] is empty: "
            "not PSD within tol"
        )
    if math.isinf(lo) and math.isinf(hi):
        tau = 0.0
    elif math.isinf(lo):
        tau = hi - max(1.0, abs(hi))
    elif math.isinf(hi):
        tau = lo + max(1.0, abs(lo))
    else:
        tau = 0.5 * (lo + hi)
    return z0 + tau * d


def preimage(cert: LiftCertificate, a: SymMat3, tol: float = 1e-9) -> np.ndarray:
    """A point z in Q^2 with E z = 0 and smat(G z) = A.

    Raises NotInSlice when A violates the certificate's slice
    equations, EmptyInterval when A is not PSD within tolerance.
    """
    if cert.provenance is Provenance.CANONICAL:
        z = _canonical_preimage(a, tol)
    elif (
        cert.provenance
        in (Provenance.CONGRUENCE_CONJUGATED, Provenance.SLICED_CONGRUENCE)
        and cert.conjugation is not None
    ):
        m = cert.conjugation
        transformed = SymMat3.from_array(m @ a.mat @ m.T, sym_tol=np.inf)
        z = _canonical_preimage(transformed, tol)
    elif cert.provenance is Provenance.FACE_EMBEDDING and (
        cert.face_range is not None
    ):
        z = _face_preimage(cert, a, tol)
    else:
        z = _generic_preimage(cert, a, tol)
    scale = max(1.0, a.norm())
    resid = np.linalg.norm(cert.G @ z - svec(a))
    if resid > tol * scale:
        raise NotInSlice(
            f"reconstruction residual {resid:.3e} exceeds tolerance"
        )
    if cert.E.shape[0] and np.linalg.norm(cert.E @ z) > tol * max(
        1.0, float(np.linalg.norm(z))
    ):
        raise NotInSlice("slice equations E z = 0 violated")
    if q2_violation(z) > tol * max(1.0, float(np.linalg.norm(z))):
        raise EmptyInterval("preimage point leaves the cone")
    return z


def lift_orthogonal_singular(b: SymMat3) -> LiftCertificate:
    """Certificate for S_B with B singular indefinite.

    Factor B = M^T D M with D = Diag(1, -1, 0); then S_B is the image
    of the canonical slice under X -> M^{-1} X M^{-T}.
    """
    sig = inertia(b)
    if sig.as_tuple() != (1, 1, 1):
        raise NotSingularIndefinite(
            f"inertia {sig.as_tuple()} is not (1, 1, 1)"
        )
    cf = congruence_factor(b)
    m = cf.M
    m_inv = np.linalg.inv(m)
    g = congruence_map(m_inv) @ G0
    return LiftCertificate(
        g, _EMPTY_E.copy(), Provenance.CONGRUENCE_CONJUGATED, conjugation=m
    )


def find_singular_complement(
    L: Subspace,
    witness: MaxRankWitness | None = None,
    seed: int = 0,
    zero_tol: float = 1e-10,
) -> SymMat3:
    """A unit-norm singular indefinite matrix orthogonal to L.

    Requires dim L <= 4 and a positive definite point in L; then every
    nonzero element of the complement is indefinite and the middle
    eigenvalue changes sign between C and -C, so bisection along a path
    in the complement finds a root of lambda_2.
    """
    if L.dim > 4:
        raise PreconditionViolated("the complement must have dimension >= 2")
    if witness is None:
        from .geometry import max_rank_element

        witness = max_rank_element(L, seed=seed)
    if witness.rank != 3:
        raise PreconditionViolated(
            "no positive definite point in the subspace; use the face path"
        )
    comp = orthogonal_complement(L)
    c_vec = comp.basis[0]

    def eig_at(vec: np.ndarray):
        return eigen_sym3(smat(vec)).lam

    lam = eig_at(c_vec)
    if abs(lam[1]) > zero_tol:
        if lam[1] < 0:
            c_vec = -c_vec
        cp_vec = comp.basis[1]

        def lam2(theta: float) -> float:
            return float(
                eig_at(math.cos(theta) * c_vec + math.sin(theta) * cp_vec)[1]
            )

        a, b_ang = 0.0, math.pi
        for _ in range(200):
            mid = 0.5 * (a + b_ang)
            if lam2(mid) > 0.0:
                a = mid
            else:
                b_ang = mid
        theta = 0.5 * (a + b_ang)
        # Newton polish on the middle eigenvalue.
        for _ in range(3):
            vec = math.cos(theta) * c_vec + math.sin(theta) * cp_vec
            eig = eigen_sym3(smat(vec))
            u2 = eig.U[:, 1]
            dmat = smat(
                -math.sin(theta) * c_vec + math.cos(theta) * cp_vec
            ).mat
            deriv = float(u2 @ dmat @ u2)
            if abs(deriv) < 1e-14:
                break
            theta -= float(eig.lam[1]) / deriv
        c_vec = math.cos(theta) * c_vec + math.sin(theta) * cp_vec
    c_vec = c_vec / np.linalg.norm(c_vec)
    lead = c_vec[np.argmax(np.abs(c_vec))]
    if lead < 0:
        c_vec = -c_vec
    b = smat(c_vec)
    lam = eigen_sym3(b).lam
    if abs(lam[1]) > zero_tol:
        raise PreconditionViolated(
            f"bisection failed to zero the middle eigenvalue: {lam[1]:.3e}"
        )
    if not (lam[0] < -1e-8 and lam[2] > 1e-8):
        raise IndefinitenessLost(
            f"root matrix has spectrum {lam}; the complement of a slice "
            "with interior points must be indefinite"
        )
    return b


def face_lift(
    L: Subspace,
    witness: MaxRankWitness,
    span_s: Subspace | None = None,
) -> LiftCertificate:
    """Certificate for a slice contained in a proper face.

    Rank-2 faces are copies of the 2x2 PSD cone, i.e. a single Lorentz
    cone, entering through (x1, x2, x3) -> [[x3-x1, x2], [x2, x3+x1]];
    rank-1 faces are rays; rank 0 is the origin.  E pins the unused
    cone coordinates and the membership in span(S).
    """
    if witness.rank >= 3:
        raise RankTooLarge("face embedding requires witness rank <= 2")
    r = witness.rank
    if r == 0:
        return LiftCertificate(
            np.zeros((6, 6)), np.eye(6), Provenance.FACE_EMBEDDING,
            face_range=np.zeros((3, 0)),
        )
    v = witness.range_basis[:, :r]
    if span_s is None:
        span_s = intersect(L, span_of_face(v))
    g = np.zeros((6, 6))
    if r == 2:
        h = [
            np.array([[-1.0, 0.0], [0.0, 1.0]]),
            np.array([[0.0, 1.0], [1.0, 0.0]]),
            np.eye(2),
        ]
        for j in range(3):
            g[:, j] = svec(SymMat3.from_array(v @ h[j] @ v.T, sym_tol=np.inf))
        pins = np.hstack([np.zeros((3, 3)), np.eye(3)])
    else:
        g[:, 2] = svec(
            SymMat3.from_array(np.outer(v[:, 0], v[:, 0]), sym_tol=np.inf)
        )
        pins = np.delete(np.eye(6), 2, axis=0)
    rows = [pins]
    for n_vec in orthogonal_complement(span_s).basis:
        row = n_vec @ g
        if np.linalg.norm(row) > 1e-13:
            rows.append(row[None, :])
    e = np.vstack(rows)
    return LiftCertificate(g, e, Provenance.FACE_EMBEDDING, face_range=v)


def lift_slice(
    L: Subspace,
    seed: int = 0,
    verify: bool = True,
    verify_counts: tuple[int, int] = (1000, 100),
    verify_tols: tuple[float, float] = (1e-8, 1e-7),
) -> LiftCertificate:
    """Synthesize (and by default verify) a certificate for PSD ∩ L."""
    desc = slice_dimension(L, seed=seed)
    verdict = classify_description(desc)
    if not verdict.socr:
        raise NotSocr(f"slice is not representable: {verdict.reason.value}")
    if desc.dim_S == 5:
        cert = lift_orthogonal_singular(verdict.witness_B)
    elif desc.witness.rank == 3:
        b = find_singular_complement(L, witness=desc.witness, seed=seed)
        base = lift_orthogonal_singular(b)
        rows = [n_vec @ base.G for n_vec in orthogonal_complement(L).basis]
        e = np.array(rows).reshape(-1, 6)
        cert = LiftCertificate(
            base.G, e, Provenance.SLICED_CONGRUENCE,
            conjugation=base.conjugation,
        )
    else:
        cert = face_lift(L, desc.witness, span_s=desc.span_S)
    if verify:
        from .verify import verify_backward, verify_forward

        rep_f = verify_forward(
            cert, L, count=verify_counts[0], seed=seed + 101,
            tol=verify_tols[0],
        )
        rep_b = verify_backward(
            cert, L, count=verify_counts[1], seed=seed + 202,
            tol=verify_tols[1],
        )
        if not (rep_f.passed and rep_b.passed):
            raise VerificationFailed(
                f"fresh certificate failed verification: forward "
                f"psd={rep_f.max_psd_violation:.2e} "
                f"sub={rep_f.max_subspace_residual:.2e}, backward "
                f"pre={rep_b.max_preimage_residual:.2e}, "
                f"{len(rep_f.failures) + len(rep_b.failures)} failures"
            )
    return cert
