"""Dense symmetric linear algebra for small matrices.

Everything operates on plain ``numpy`` float64 arrays.  Symmetric inputs are
re-symmetrised on entry so that downstream code can rely on exact symmetry.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import DegenerateUpdate, DimensionMismatch, NoConvergence, NotPositiveDefinite

PIVOT_REL_TOL = 1e-14
SM_DENOM_TOL = 1e-14
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def sym_matrix(entries, atol=1e-12):
    """Return ``entries`` as a float64 symmetric matrix.

    Raises ``ValueError`` when the input is not square or visibly asymmetric.
    The result is exactly symmetric (upper and lower triangles averaged).
    """
    a = np.array(entries, dtype=np.float64, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if not np.allclose(a, a.T, rtol=0.0, atol=atol * scale):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class EigDecomposition:
    eigenvalues: np.ndarray  # nonincreasing
    eigenvectors: np.ndarray  # columns aligned with eigenvalues

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


def solve_spd(a, b):
    """Solve ``a x = b`` for symmetric positive definite ``a`` by Cholesky."""
    a = sym_matrix(a)
    b = np.asarray(b, dtype=np.float64)
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"rhs has length {b.shape[0]}, matrix is {n}x{n}")
    threshold = PIVOT_REL_TOL * np.trace(a) / n
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(chol) ** 2
    if np.trace(a) <= 0 or np.any(pivots <= threshold):
        raise NotPositiveDefinite(f"Cholesky pivot {pivots.min():.3e} below {threshold:.3e}")
    return sla.cho_solve((chol, True), b, check_finite=False)


def sherman_morrison_inverse_update(a_inv, v, scale=1.0):
    """Inverse of ``scale * A + v v^T`` given ``A^{-1}``.

    With ``B = A^{-1} / scale`` this is ``B - (B v)(B v)^T / (1 + v^T B v)``.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    b = np.asarray(a_inv, dtype=np.float64) / scale
    v = np.asarray(v, dtype=np.float64)
    if v.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"vector has length {v.shape[0]}, matrix is {b.shape[0]}x{b.shape[0]}")
    bv = b @ v
    denom = 1.0 + v @ bv
    if denom <= SM_DENOM_TOL:
        raise DegenerateUpdate(f"1 + v^T B v = {denom:.3e}")
    out = b - np.outer(bv, bv) / denom
    return 0.5 * (out + out.T)


def _jacobi_eig(a):
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    target = JACOBI_TOL * norm
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
    if off <= target:
        return np.diag(a).copy(), v
    raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-norm {off:.3e})")


def sym_eig(a, method="lapack"):
    """Symmetric eigendecomposition with eigenvalues sorted nonincreasing.

    ``method="jacobi"`` runs cyclic Jacobi rotations (fine for n up to ~100);
    ``"lapack"`` delegates to ``numpy.linalg.eigh`` and is the default because
    Gram matrices of section bases can reach a few thousand rows.
    """
    a = sym_matrix(a)
    if method == "jacobi":
        w, u = _jacobi_eig(a)
    elif method == "lapack":
        w, u = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, kind="stable")
    return EigDecomposition(w[order], u[:, order])
