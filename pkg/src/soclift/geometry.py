"""Geometry of a slice S = (PSD cone) ∩ L.

The central object is the maximal-rank element of S.  Its range W pins
the minimal face of the cone containing the slice, the true linear hull
span(S) = L ∩ {X : X = PXP}, and hence dim(S).

The maximizer of lambda_min over the trace-one section of L is found by
projected supergradient ascent with random restarts, then polished by
ascent on the soft-min surrogate

    f_mu(A) = -mu * log sum_i exp(-lambda_i(A) / mu)

with mu driven to 1e-9.  The surrogate is smooth and concave, and its
maximizers approach the analytic center of the optimal face, so the
polished point exposes the full range W of the face rather than an
arbitrary boundary point.

A useful exact fact used for early exits: a PSD matrix with unit
Frobenius norm has trace >= 1, so if the projection of svec(I) onto L
has norm < 1 the slice is {0}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, SamplingExhausted
from .linalg import (
    SQRT2,
    Subspace,
    SymMat3,
    eigh_batch,
    intersect,
    orthonormal_basis,
    psd_project_batch,
    smat,
    smat_batch,
    span_of_face,
    svec,
    svec_batch,
)

RANK_TOL = 1e-7  # absolute, after trace normalization
SEARCH_RADIUS = 1e3  # non-attainment guard for the ascent


@dataclass(frozen=True)
class MaxRankWitness:
    """A maximal-rank point of S with its certified range."""

    A_star: SymMat3
    rank: int
    lambda_min_value: float
    range_basis: np.ndarray  # (3, rank), orthonormal columns


@dataclass(frozen=True)
class SliceDescription:
    L: Subspace
    span_S: Subspace
    dim_S: int
    witness: MaxRankWitness


def _mats_from_subspace(L: Subspace) -> np.ndarray:
    return smat_batch(L.basis)


class _SectionProblem:
    """max lambda_min(A) over {A in span(mats) : tr A = 1, ||A|| <= R}.

    `mats` is a (d, k, k) stack, orthonormal in the trace inner product,
    so coefficient vectors are Frobenius coordinates.
    """

    def __init__(self, mats: np.ndarray):
        self.mats = mats
        self.dim = mats.shape[0]
        self.k = mats.shape[1]
        self.tau = np.einsum("dii->d", mats)
        self.tau_norm = float(np.linalg.norm(self.tau))
        if self.tau_norm > 0:
            self.c0 = self.tau / self.tau_norm**2
            # Tangent directions of the trace-one section.
            eye = np.eye(self.dim)
            t_hat = self.tau / self.tau_norm
            self.Z = orthonormal_basis(
                eye - np.outer(eye @ t_hat, t_hat)
            ).basis  # (dim-1, dim)
        else:
            self.c0 = None
            self.Z = None

    def section_empty(self) -> bool:
        """True when no PSD point can exist: unit-norm PSD needs trace >= 1."""
        return self.tau_norm < 1.0 - 1e-9

    def coeffs(self, y: np.ndarray) -> np.ndarray:
        return self.c0 + y @ self.Z

    def matrices(self, y: np.ndarray) -> np.ndarray:
        return np.einsum("rd,dij->rij", self.coeffs(y), self.mats)

    def _clamp(self, y: np.ndarray) -> np.ndarray:
        # ||A||^2 = ||c0||^2 + ||y||^2 on the section.
        cap2 = SEARCH_RADIUS**2 - float(self.c0 @ self.c0)
        n2 = np.einsum("rd,rd->r", y, y)
        over = n2 > cap2
        if np.any(over):
            y = y.copy()
            y[over] *= np.sqrt(cap2 / n2[over])[:, None]
        return y

    def supergradient_phase(
        self, y: np.ndarray, iters: int, exit_level: float
    ) -> np.ndarray:
        """Diminishing-step supergradient ascent, batched over restarts."""
        for it in range(iters):
            lam, u = eigh_batch(self.matrices(y))
            if it % 20 == 0 and float(np.max(lam[:, 0])) > exit_level:
                break
            u0 = u[..., 0]
            grad_mat = u0[:, :, None] * u0[:, None, :]
            g = np.einsum("rij,dij->rd", grad_mat, self.mats) @ self.Z.T
            step = 0.5 / np.sqrt(it + 1.0)
            y = self._clamp(y + step * g)
        return y

    def _softmin(self, y: np.ndarray, mu: float):
        lam, u = eigh_batch(self.matrices(y))
        lam0 = lam[:, :1]
        expw = np.exp(-(lam - lam0) / mu)
        denom = expw.sum(axis=1, keepdims=True)
        f = lam0[:, 0] - mu * np.log(denom[:, 0])
        wgt = expw / denom
        grad_mat = np.einsum("rik,rk,rjk->rij", u, wgt, u)
        g = np.einsum("rij,dij->rd", grad_mat, self.mats) @ self.Z.T
        return f, g

    def polish_phase(self, y: np.ndarray, mu_last: float = 1e-9) -> np.ndarray:
        """Soft-min ascent with a geometric mu schedule and Armijo steps."""
        mu = 1e-2
        while mu >= mu_last * 0.999:
            for _ in range(40):
                f, g = self._softmin(y, mu)
                gn2 = np.einsum("rd,rd->r", g, g)
                active = gn2 > 1e-26
                if not np.any(active):
                    break
                t = np.full(len(y), 1.0)
                accepted = ~active
                y_new = y.copy()
                for _ in range(40):
                    trial = self._clamp(y + t[:, None] * g)
                    f_t, _ = self._softmin(trial, mu)
                    ok = ~accepted & (f_t >= f + 0.3 * t * gn2)
                    y_new[ok] = trial[ok]
                    accepted |= ok
                    if np.all(accepted):
                        break
                    t = np.where(accepted, t, t * 0.5)
                gain = float(np.max(self._softmin(y_new, mu)[0] - f))
                y = y_new
                if gain <= 1e-15 * max(1.0, abs(float(np.max(f)))):
                    break
            mu *= 0.1
        return y

    def solve(self, seed: int, restarts: int):
        """Returns (best lambda_min, best coeffs, mean coeffs of the top band,
        per-restart achieved lambda_min)."""
        rng = np.random.default_rng(seed)
        y = rng.standard_normal((restarts, self.dim - 1)) if self.dim > 1 \
            else np.zeros((restarts, 0))
        y = self.supergradient_phase(y, iters=150, exit_level=1e-4)
        lam = np.linalg.eigvalsh(self.matrices(y))[:, 0]
        if float(np.max(lam)) <= 1e-4:
            order = np.argsort(-lam)[: max(4, restarts // 4)]
            y = self.polish_phase(y[order])
            lam = np.linalg.eigvalsh(self.matrices(y))[:, 0]
        best = int(np.argmax(lam))
        v_star = float(lam[best])
        band = lam >= v_star - max(10 * abs(v_star), RANK_TOL)
        c_mean = self.coeffs(y[band]).mean(axis=0)
        return v_star, self.coeffs(y[[best]])[0], c_mean, lam


def _embed(coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Coefficients against svec basis rows -> svec vector."""
    return coeffs @ basis


def max_rank_element(
    L: Subspace,
    seed: int = 0,
    restarts: int = 16,
    rank_tol: float = RANK_TOL,
) -> MaxRankWitness:
    """Maximal-rank element of S = PSD ∩ L via facial reduction.

    Raises NumericalFailure when the ascent restarts tell an
    inconsistent story about the achievable rank.
    """
    if restarts < 1:
        restarts = 1
    zero = MaxRankWitness(SymMat3.zero(), 0, 0.0, np.zeros((3, 0)))
    if L.dim == 0:
        return zero
    problem = _SectionProblem(_mats_from_subspace(L))
    if problem.section_empty():
        return zero
    v_star, c_best, c_mean, _ = problem.solve(seed, restarts)
    if v_star > rank_tol:
        a_star = smat(_embed(c_best, L.basis))
        lam, u = np.linalg.eigh(a_star.mat)
        return MaxRankWitness(a_star, 3, v_star, u)
    if v_star < -rank_tol:
        return zero

    # Boundary regime: read the face range off the averaged maximizer,
    # then re-certify inside the face, shrinking if needed.
    a_bar = smat_batch(_embed(c_mean, L.basis))
    lam, u = np.linalg.eigh(a_bar)
    v_cols = u[:, lam > rank_tol]
    basis = L.basis
    while True:
        r = v_cols.shape[1]
        if r == 0:
            return zero
        face = span_of_face(v_cols)
        l_face = intersect(Subspace(basis), face)
        if l_face.dim == 0:
            raise NumericalFailure(
                "detected face does not meet the subspace"
            )
        mats_f = smat_batch(l_face.basis)
        restricted = np.einsum(
            "ki,dkl,lj->dij", v_cols, mats_f, v_cols
        )
        sub = _SectionProblem(restricted)
        if sub.section_empty():
            raise NumericalFailure(
                "face slice lost its trace-one section"
            )
        v_f, c_f, c_f_mean, _ = sub.solve(seed + 1, restarts)
        if v_f > rank_tol:
            a_star = smat(_embed(c_f, l_face.basis))
            return MaxRankWitness(
                a_star, r, float(np.linalg.eigvalsh(a_star.mat)[0]), v_cols
            )
        if v_f < -rank_tol:
            raise NumericalFailure(
                "face certification found no PSD point"
            )
        x_bar = np.einsum("d,dij->ij", c_f_mean, restricted)
        lam_f, u_f = np.linalg.eigh(x_bar)
        keep = lam_f > rank_tol
        if int(np.sum(keep)) >= r:
            raise NumericalFailure("face shrinking stalled")
        v_cols = v_cols @ u_f[:, keep]
        basis = l_face.basis


def slice_dimension(
    L: Subspace, seed: int = 0, restarts: int = 16
) -> SliceDescription:
    """True dimension of S and its linear hull.

    A full-rank witness means span(S) = L; otherwise span(S) is the
    intersection of L with the span of the face fixed by the witness
    range (slices of proper faces have dimension at most 3).
    """
    witness = max_rank_element(L, seed=seed, restarts=restarts)
    if witness.rank == 3:
        span_s = L
    elif witness.rank == 0:
        span_s = Subspace(np.zeros((0, 6)))
    else:
        span_s = intersect(L, span_of_face(witness.range_basis))
    return SliceDescription(L, span_s, span_s.dim, witness)


def sample_slice_points(
    L: Subspace,
    count: int,
    seed: int = 0,
    max_iters: int = 10_000,
    restarts_per_sample: int = 50,
):
    """Sample points of S by alternating projections (POCS).

    Each sample alternates PSD projection and projection onto L from a
    Gaussian start until successive iterates differ by <= 1e-12, then
    keeps the limit if it is a genuine nonzero point of S.  Collapsed
    limits (norm < 1e-8) consume one of the sample's 50 restarts.

    Returns a list of (SymMat3, residual) pairs; may be shorter than
    `count`.  Raises SamplingExhausted when every restart of every
    sample collapsed, which is the sampler's way of saying S = {0}.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    # (sample, restart) starts drawn up front: reproducible regardless
    # of scheduling or batching.
    starts = rng.standard_normal((count, restarts_per_sample, 6))
    results: dict[int, tuple[SymMat3, float]] = {}
    pending = np.arange(count)
    for attempt in range(restarts_per_sample):
        if len(pending) == 0:
            break
        x = L.project_batch(starts[pending, attempt])
        active = np.ones(len(pending), dtype=bool)
        for _ in range(max_iters):
            if not np.any(active):
                break
            x_new = x.copy()
            proj = psd_project_batch(smat_batch(x[active]))
            x_new[active] = L.project_batch(svec_batch(proj))
            moved = np.linalg.norm(x_new - x, axis=1)
            x = x_new
            norms = np.linalg.norm(x, axis=1)
            active &= (moved > 1e-12) & (norms > 1e-10)
        norms = np.linalg.norm(x, axis=1)
        lam_min = np.linalg.eigvalsh(smat_batch(x))[:, 0]
        dist_l = np.linalg.norm(x - L.project_batch(x), axis=1)
        good = (
            (norms >= 1e-8)
            & (lam_min >= -1e-8 * np.maximum(1.0, norms))
            & (dist_l <= 1e-8 * np.maximum(1.0, norms))
        )
        for idx, row, ok, res in zip(
            pending, x, good, np.maximum(-lam_min, dist_l)
        ):
            if ok and idx not in results:
                results[idx] = (smat(row), float(max(res, 0.0)))
        pending = np.array([i for i in pending if i not in results])
    if not results:
        raise SamplingExhausted(
            f"no nonzero slice point in {restarts_per_sample * count} "
            "restarts; consistent with S = {0}"
        )
    return [results[i] for i in sorted(results)]
