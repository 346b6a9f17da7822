"""Two-sided sampling verification of lift certificates.

Forward: push cone samples through the certificate and check that the
images are PSD points of the claimed subspace.  Backward: draw slice
points from the alternating-projection sampler, which is independent of
the certificate machinery, and check that the preimage solver recovers
each of them inside the cone.  Using G itself to generate backward test
points would be circular; the sampler is the trust anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInterval, NotInSlice, SamplingExhausted
from .geometry import sample_slice_points
from .lifts import LiftCertificate, in_q2, preimage, q2_violation
from .linalg import Subspace, eigvals_batch, smat_batch, svec_batch

MAX_RECORDED_FAILURES = 16


@dataclass(frozen=True)
class VerificationReport:
    samples_forward: int = 0
    samples_backward: int = 0
    max_psd_violation: float = 0.0
    max_subspace_residual: float = 0.0
    max_preimage_residual: float = 0.0
    failures: list = field(default_factory=list)
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "samples_forward": self.samples_forward,
            "samples_backward": self.samples_backward,
            "max_psd_violation": self.max_psd_violation,
            "max_subspace_residual": self.max_subspace_residual,
            "max_preimage_residual": self.max_preimage_residual,
            "failures": self.failures[:MAX_RECORDED_FAILURES],
            "passed": self.passed,
        }


def sample_q2(seed: int, count: int) -> np.ndarray:
    """Deterministic cone samples, shape (count, 6).

    Each factor is (g1, g2, rho * (1 + |g3|)) with rho = ||(g1, g2)||,
    so membership holds exactly.  Every tenth sample is forced onto the
    cone boundary and sample 0 is the apex.  Drawing a longer list with
    the same seed extends the shorter one (prefix-stable stream).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 6))
    z = np.empty((count, 6))
    boundary = (np.arange(count) % 10) == 1
    for base in (0, 3):
        rho = np.hypot(g[:, base], g[:, base + 1])
        z[:, base] = g[:, base]
        z[:, base + 1] = g[:, base + 1]
        z[:, base + 2] = np.where(
            boundary, rho, rho * (1.0 + np.abs(g[:, base + 2]))
        )
    z[0] = 0.0
    return z


def _kernel_projector(e: np.ndarray) -> np.ndarray:
    if e.shape[0] == 0:
        return np.eye(6)
    _, s, vt = np.linalg.svd(e)
    rank = int(np.sum(s > 1e-10 * max(float(s[0]), 1e-300)))
    basis = vt[rank:]
    return basis.T @ basis


def verify_forward(
    cert: LiftCertificate,
    L: Subspace,
    count: int = 10_000,
    seed: int = 0,
    tol: float = 1e-9,
) -> VerificationReport:
    """Soundness: images of feasible cone points land in PSD ∩ L.

    Cone samples are projected onto ker E; projections that leave the
    cone are discarded and replaced by extending the sample stream.
    """
    proj = _kernel_projector(cert.E)
    z = np.zeros((0, 6))
    draw = count
    for _ in range(50):
        cand = sample_q2(seed, draw) @ proj.T
        keep = in_q2(cand, 1e-12 * np.maximum(
            1.0, np.linalg.norm(cand, axis=1)
        ))
        z = cand[keep][:count]
        if len(z) >= count:
            break
        draw *= 2
    x_vec = z @ cert.G.T
    x = smat_batch(x_vec)
    lam_min = eigvals_batch(x)[:, 0]
    psd_viol = np.maximum(-lam_min, 0.0)
    scale = np.maximum(1.0, np.linalg.norm(x_vec, axis=1))
    sub_resid = np.linalg.norm(
        x_vec - L.project_batch(x_vec), axis=1
    ) / scale
    bad = (psd_viol > tol) | (sub_resid > tol)
    failures = [
        {
            "z": z[i].tolist(),
            "psd_violation": float(psd_viol[i]),
            "subspace_residual": float(sub_resid[i]),
        }
        for i in np.nonzero(bad)[0][:MAX_RECORDED_FAILURES]
    ]
    return VerificationReport(
        samples_forward=len(z),
        max_psd_violation=float(np.max(psd_viol, initial=0.0)),
        max_subspace_residual=float(np.max(sub_resid, initial=0.0)),
        failures=failures,
        passed=not bool(np.any(bad)),
    )


def verify_backward(
    cert: LiftCertificate,
    L: Subspace,
    count: int = 1000,
    seed: int = 0,
    tol: float = 1e-7,
) -> VerificationReport:
    """Completeness: independently sampled slice points have preimages.

    Sampler exhaustion is a pass: it is the sampler's certificate that
    S = {0}, and the zero matrix is always covered.
    """
    try:
        points = sample_slice_points(L, count, seed=seed)
    except SamplingExhausted:
        return VerificationReport(samples_backward=0, passed=True)
    max_resid = 0.0
    failures = []
    for a, _ in points:
        entry = None
        try:
            z = preimage(cert, a, tol)
            resid = float(
                np.linalg.norm(cert.G @ z - svec_batch(a.mat))
                / max(1.0, a.norm())
            )
            cone_gap = float(q2_violation(z))
            max_resid = max(max_resid, resid)
            if resid > tol or cone_gap > tol * max(
                1.0, float(np.linalg.norm(z))
            ):
                entry = {
                    "matrix": a.mat.tolist(),
                    "residual": resid,
                    "cone_gap": cone_gap,
                }
        except (NotInSlice, EmptyInterval) as exc:
            entry = {"matrix": a.mat.tolist(), "error": str(exc)}
        if entry is not None and len(failures) < MAX_RECORDED_FAILURES:
            failures.append(entry)
        elif entry is not None:
            failures.append({})  # count overflow failures anonymously
    return VerificationReport(
        samples_backward=len(points),
        max_preimage_residual=max_resid,
        failures=failures,
        passed=not failures,
    )
