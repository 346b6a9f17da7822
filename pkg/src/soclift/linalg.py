"""Numerical primitives for 3x3 symmetric matrices.

Coordinates: a symmetric matrix is stored either as a SymMat3 (six named
entries) or as its svec image, the 6-vector

    (a11, a22, a33, sqrt(2)*a12, sqrt(2)*a13, sqrt(2)*a23),

chosen so that the dot product of svec images equals the trace inner
product tr(AB).  Subspaces of symmetric matrices are kept as orthonormal
bases in svec coordinates, which turns complements, projections and
intersections into plain Euclidean linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

SQRT2 = math.sqrt(2.0)

# Absolute floor under all relative zero/rank thresholds.
EPS_FLOOR = 1e-14

# Index pairs of the off-diagonal svec slots, in storage order.
_OFF = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class SymMat3:
    """A real symmetric 3x3 matrix with off-diagonals stored once."""

    a11: float
    a22: float
    a33: float
    a12: float = 0.0
    a13: float = 0.0
    a23: float = 0.0

    def __post_init__(self):
        # Keep fields as plain floats (numpy scalars break json and
        # leak into comparisons).
        for name in ("a11", "a22", "a33", "a12", "a13", "a23"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @staticmethod
    def from_array(arr, sym_tol: float | None = None) -> "SymMat3":
        """Build from a full 3x3 array, rejecting asymmetric input.

        The default tolerance is 1e-12 times the largest magnitude entry.
        """
        a = np.asarray(arr, dtype=float)
        if a.shape != (3, 3):
            raise InputError(f"expected a 3x3 array, got shape {a.shape}")
        scale = float(np.max(np.abs(a)))
        if sym_tol is None:
            sym_tol = 1e-12 * scale
        skew = float(np.max(np.abs(a - a.T)))
        if skew > max(sym_tol, EPS_FLOOR):
            raise InputError(
                f"matrix is not symmetric: max|a_ij - a_ji| = {skew:.3e}"
            )
        return SymMat3(
            a[0, 0], a[1, 1], a[2, 2],
            0.5 * (a[0, 1] + a[1, 0]),
            0.5 * (a[0, 2] + a[2, 0]),
            0.5 * (a[1, 2] + a[2, 1]),
        )

    @staticmethod
    def diag(d1: float, d2: float, d3: float) -> "SymMat3":
        return SymMat3(d1, d2, d3)

    @staticmethod
    def zero() -> "SymMat3":
        return SymMat3(0.0, 0.0, 0.0)

    @staticmethod
    def identity() -> "SymMat3":
        return SymMat3(1.0, 1.0, 1.0)

    @property
    def mat(self) -> np.ndarray:
        """Dense 3x3 ndarray."""
        return np.array([
            [self.a11, self.a12, self.a13],
            [self.a12, self.a22, self.a23],
            [self.a13, self.a23, self.a33],
        ])

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.mat))

    def trace(self) -> float:
        return self.a11 + self.a22 + self.a33

    def det(self) -> float:
        return (
            self.a11 * (self.a22 * self.a33 - self.a23 * self.a23)
            - self.a12 * (self.a12 * self.a33 - self.a23 * self.a13)
            + self.a13 * (self.a12 * self.a23 - self.a22 * self.a13)
        )

    def inner(self, other: "SymMat3") -> float:
        """Trace inner product tr(AB)."""
        return float(np.dot(svec(self), svec(other)))

    def __add__(self, other: "SymMat3") -> "SymMat3":
        return smat(svec(self) + svec(other))

    def __sub__(self, other: "SymMat3") -> "SymMat3":
        return smat(svec(self) - svec(other))

    def __mul__(self, c: float) -> "SymMat3":
        return smat(float(c) * svec(self))

    __rmul__ = __mul__


def svec(a: SymMat3) -> np.ndarray:
    """Isometric 6-vector coordinates of a symmetric matrix."""
    return np.array([
        a.a11, a.a22, a.a33,
        SQRT2 * a.a12, SQRT2 * a.a13, SQRT2 * a.a23,
    ])


def smat(v) -> SymMat3:
    """Inverse of svec."""
    v = np.asarray(v, dtype=float)
    if v.shape != (6,):
        raise InputError(f"expected a 6-vector, got shape {v.shape}")
    return SymMat3(
        v[0], v[1], v[2], v[3] / SQRT2, v[4] / SQRT2, v[5] / SQRT2
    )


def svec_batch(mats: np.ndarray) -> np.ndarray:
    """svec applied to an (..., 3, 3) stack of symmetric ndarrays."""
    m = np.asarray(mats, dtype=float)
    out = np.empty(m.shape[:-2] + (6,))
    out[..., 0] = m[..., 0, 0]
    out[..., 1] = m[..., 1, 1]
    out[..., 2] = m[..., 2, 2]
    for k, (i, j) in enumerate(_OFF):
        out[..., 3 + k] = SQRT2 * 0.5 * (m[..., i, j] + m[..., j, i])
    return out


def smat_batch(vecs: np.ndarray) -> np.ndarray:
    """Inverse of svec_batch: (..., 6) -> (..., 3, 3)."""
    v = np.asarray(vecs, dtype=float)
    out = np.empty(v.shape[:-1] + (3, 3))
    out[..., 0, 0] = v[..., 0]
    out[..., 1, 1] = v[..., 1]
    out[..., 2, 2] = v[..., 2]
    for k, (i, j) in enumerate(_OFF):
        out[..., i, j] = out[..., j, i] = v[..., 3 + k] / SQRT2
    return out


@dataclass(frozen=True)
class EigenTriple:
    """Sorted eigendecomposition: lam[0] <= lam[1] <= lam[2], U columns
    are the matching orthonormal eigenvectors."""

    lam: np.ndarray
    U: np.ndarray


def eigen_sym3(a: SymMat3, max_sweeps: int = 30) -> EigenTriple:
    """Eigendecomposition by cyclic Jacobi rotations.

    Jacobi is branch-simple and keeps full accuracy near repeated
    eigenvalues, which matters for root finding on the middle eigenvalue.
    Deterministic: identical input gives an identical result.
    """
    m = a.mat
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return EigenTriple(np.zeros(3), np.eye(3))
    v = np.eye(3)
    tiny = np.finfo(float).eps * scale
    for _ in range(max_sweeps):
        off = abs(m[0, 1]) + abs(m[0, 2]) + abs(m[1, 2])
        if off <= tiny:
            break
        for p, q in _OFF:
            apq = m[p, q]
            if abs(apq) <= 1e-3 * tiny:
                continue
            theta = 0.5 * (m[q, q] - m[p, p]) / apq
            t = math.copysign(1.0, theta) / (
                abs(theta) + math.sqrt(1.0 + theta * theta)
            )
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            # Rotate rows/columns p and q of m, and columns of v.
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            m = rot.T @ m @ rot
            m[p, q] = m[q, p] = 0.0
            v = v @ rot
    lam = np.diagonal(m).copy()
    order = np.argsort(lam, kind="stable")
    return EigenTriple(lam[order], v[:, order])


def eigvals_batch(mats: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of an (..., k, k) symmetric stack.

    Batch paths go through LAPACK; the Jacobi routine above is the
    reference implementation and the two are cross-checked in tests.
    """
    return np.linalg.eigvalsh(mats)


def eigh_batch(mats: np.ndarray):
    """Batched eigendecomposition (LAPACK-backed), ascending order."""
    return np.linalg.eigh(mats)


@dataclass(frozen=True)
class Inertia:
    """Counts of eigenvalues above, below and within zero_tol of zero."""

    n_plus: int
    n_minus: int
    n_zero: int
    zero_tol: float

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)


def default_zero_tol(a: SymMat3) -> float:
    return max(1e-9 * max(1.0, a.norm()), EPS_FLOOR)


def inertia(a: SymMat3, zero_tol: float | None = None) -> Inertia:
    """Signature of a symmetric matrix at the given zero threshold."""
    if zero_tol is None:
        zero_tol = default_zero_tol(a)
    if zero_tol <= 0:
        raise InputError("zero_tol must be positive")
    lam = eigen_sym3(a).lam
    n_plus = int(np.sum(lam > zero_tol))
    n_minus = int(np.sum(lam < -zero_tol))
    return Inertia(n_plus, n_minus, 3 - n_plus - n_minus, zero_tol)


@dataclass(frozen=True)
class CongruenceFactor:
    """Factorization B = M^T D M with M regular and D = Diag(+1/-1/0).

    D is ordered (+1 entries, -1 entries, 0 entries); the diagonal of D
    matches the inertia of the source matrix.
    """

    M: np.ndarray
    D: SymMat3

    def reconstruct(self) -> np.ndarray:
        return self.M.T @ self.D.mat @ self.M


def congruence_factor(
    b: SymMat3, zero_tol: float | None = None
) -> CongruenceFactor:
    """Factor B = M^T D M from the eigendecomposition.

    Rows of M are sqrt(|lam_i|) * u_i^T for eigenvalues treated as
    nonzero and plain u_i^T otherwise, ordered to put D's +1 block first,
    then the -1 block, then zeros.  The output is not unique; it is
    validated through the reconstruction residual.
    """
    if zero_tol is None:
        zero_tol = default_zero_tol(b)
    eig = eigen_sym3(b)
    signs = np.where(
        eig.lam > zero_tol, 1, np.where(eig.lam < -zero_tol, -1, 0)
    )
    block = np.where(signs == 1, 0, np.where(signs == -1, 1, 2))
    order = np.argsort(block, kind="stable")  # +1 block, -1 block, zeros
    rows = []
    diag = []
    for i in order:
        s = int(signs[i])
        w = math.sqrt(abs(eig.lam[i])) if s != 0 else 1.0
        rows.append(w * eig.U[:, i])
        diag.append(float(s))
    return CongruenceFactor(np.array(rows), SymMat3.diag(*diag))


def is_psd(a: SymMat3, tol: float = 0.0) -> bool:
    """True when the smallest eigenvalue is at least -tol."""
    if tol < 0:
        raise InputError("tol must be nonnegative")
    return float(eigen_sym3(a).lam[0]) >= -tol


def psd_project(a: SymMat3) -> SymMat3:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped)."""
    eig = eigen_sym3(a)
    lam = np.maximum(eig.lam, 0.0)
    return SymMat3.from_array((eig.U * lam) @ eig.U.T, sym_tol=np.inf)


def psd_project_batch(mats: np.ndarray) -> np.ndarray:
    """Batched PSD projection of an (..., 3, 3) symmetric stack."""
    lam, u = eigh_batch(mats)
    lam = np.maximum(lam, 0.0)
    return np.einsum("...ik,...k,...jk->...ij", u, lam, u)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace held as an orthonormal basis (rows of `basis`).

    Ambient dimension is 6 (svec coordinates of symmetric matrices)
    everywhere except the lineality-space helper, which reuses this type
    for coefficient space.
    """

    basis: np.ndarray  # (dim, ambient)
    orth_tol: float = 1e-12
    ambient: int = field(default=6)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto the subspace."""
        if self.dim == 0:
            return np.zeros(self.ambient)
        return self.basis.T @ (self.basis @ v)

    def project_batch(self, vecs: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros_like(vecs)
        return (vecs @ self.basis.T) @ self.basis

    def distance(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v: np.ndarray, tol: float) -> bool:
        return self.distance(v) <= tol

    def matrices(self) -> list[SymMat3]:
        """Basis as symmetric matrices (ambient 6 only)."""
        return [smat(row) for row in self.basis]


def _pivoted_gram_schmidt(
    rows: np.ndarray, rel_tol: float, against: np.ndarray | None = None
) -> np.ndarray:
    """Orthonormalize rows by pivoted modified Gram-Schmidt.

    Picks the largest residual first; a vector joins the basis only if
    its residual exceeds rel_tol relative to the largest input norm.
    Each accepted vector is re-orthogonalized once, which keeps the Gram
    matrix within ~1e-14 of the identity.
    """
    work = np.array(rows, dtype=float)
    if work.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    scale = float(np.max(np.linalg.norm(work, axis=1), initial=0.0))
    if scale == 0.0:
        return np.zeros((0, work.shape[1]))
    if against is not None and len(against):
        work = work - (work @ against.T) @ against
    basis: list[np.ndarray] = []
    for _ in range(work.shape[0]):
        norms = np.linalg.norm(work, axis=1)
        i = int(np.argmax(norms))
        if norms[i] <= rel_tol * scale:
            break
        q = work[i] / norms[i]
        for _ in range(2):  # re-orthogonalization pass
            if against is not None and len(against):
                q = q - against.T @ (against @ q)
            for b in basis:
                q = q - np.dot(q, b) * b
            nq = np.linalg.norm(q)
            if nq == 0.0:
                break
            q = q / nq
        basis.append(q)
        work = work - np.outer(work @ q, q)
    if not basis:
        return np.zeros((0, work.shape[1]))
    return np.array(basis)


def orthonormal_basis(vectors, rel_tol: float = 1e-10) -> Subspace:
    """Span of the given svec vectors as a Subspace.

    Rank is decided by a residual threshold relative to the largest
    input norm (absolute floor 1e-14).
    """
    rows = np.atleast_2d(np.asarray(vectors, dtype=float))
    if rows.size == 0:
        return Subspace(np.zeros((0, 6)))
    ambient = rows.shape[1]
    basis = _pivoted_gram_schmidt(rows, max(rel_tol, EPS_FLOOR))
    return Subspace(basis, ambient=ambient)


def orthogonal_complement(sub: Subspace) -> Subspace:
    """Orthogonal complement within the ambient space."""
    eye = np.eye(sub.ambient)
    comp = _pivoted_gram_schmidt(eye, 1e-10, against=sub.basis)
    if comp.shape[0] != sub.ambient - sub.dim:
        # The identity always completes an orthonormal set exactly.
        raise InputError("subspace basis is not orthonormal")
    return Subspace(comp, ambient=sub.ambient)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection: the complement of the sum of the complements."""
    ca = orthogonal_complement(a)
    cb = orthogonal_complement(b)
    both = np.vstack([ca.basis, cb.basis])
    return orthogonal_complement(orthonormal_basis(both))


def span_of_face(range_basis: np.ndarray) -> Subspace:
    """svec span of {X : X = P X P} for P the projector onto the given
    orthonormal columns (the linear hull of a face of the PSD cone)."""
    v = np.asarray(range_basis, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    r = v.shape[1]
    gens = []
    for i in range(r):
        gens.append(svec(SymMat3.from_array(np.outer(v[:, i], v[:, i]))))
        for j in range(i + 1, r):
            sym = np.outer(v[:, i], v[:, j]) + np.outer(v[:, j], v[:, i])
            gens.append(svec(SymMat3.from_array(sym / SQRT2)))
    if not gens:
        return Subspace(np.zeros((0, 6)))
    return orthonormal_basis(np.array(gens))


def congruence_map(m: np.ndarray) -> np.ndarray:
    """6x6 svec matrix of the linear map X -> M X M^T."""
    k = np.empty((6, 6))
    for j in range(6):
        e = np.zeros(6)
        e[j] = 1.0
        x = smat(e).mat
        k[:, j] = svec(SymMat3.from_array(m @ x @ m.T, sym_tol=np.inf))
    return k
