"""Cyclic Jacobi diagonalization of small complex Hermitian matrices."""
from __future__ import annotations

import math

import numpy as np


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation removes the phase of the pivot ``a[p, q]`` and then applies
    the real symmetric Jacobi rotation to the resulting 2x2 block.

    Parameters
    ----------
    a : array_like
        Hermitian matrix, shape ``(n, n)``.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol`` times the full Frobenius norm.
    max_sweeps : int
        Upper bound on cyclic sweeps.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray, columns are the matching orthonormal eigenvectors
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v

    prev_off = math.inf
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        # rounding can leave a floor of a few ulps; stop once sweeps stop helping
        if off <= tol * scale or off >= prev_off:
            break
        prev_off = off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = (apq / mag).conjugate()
                theta = 0.5 * math.atan2(2.0 * mag, (a[q, q] - a[p, p]).real)
                c, s = math.cos(theta), math.sin(theta)
                # J = diag(1, ph) @ [[c, s], [-s, c]] on the (p, q) plane
                rot = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
