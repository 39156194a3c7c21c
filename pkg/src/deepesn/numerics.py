"""Dense linear algebra used by the reservoir, measures and readouts.

Matrices and vectors are plain float64 numpy arrays; :func:`as_matrix` and
:func:`as_vector` are the validation gate.  numpy is used for storage and
elementwise/BLAS products only: dominant-eigenvalue estimation, the
symmetric eigensolver and the least-squares solver are implemented here.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from .errors import ConvergenceError, DegenerateSystemError, DimensionError

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PINV_CUTOFF = 1e-12
SYMMETRY_ATOL = 1e-10
# residual margin so the eigenvalue error stays within tol for non-normal input
RITZ_SAFETY = 1e-2


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite, non-empty 2-D float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a finite, non-empty 1-D float64 array."""
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf")
    return x


def _square(a, name="matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def _check_iter_args(tol, max_iter):
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")


def start_vectors(n: int) -> np.ndarray:
    """Deterministic start block: all-ones and alternating +-1 columns."""
    ones = np.ones(n)
    alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return np.column_stack([ones, alt])


def _orthonormalize(z: np.ndarray) -> np.ndarray:
    """Two-pass Gram-Schmidt on the columns of ``z``.

    A column that collapses onto its predecessors is replaced by the first
    standard basis vector independent of them, so the block keeps full rank.
    """
    n, p = z.shape
    scale = max(float(np.max(np.abs(z))), 1.0)
    q = np.empty_like(z)
    basis = 0
    for j in range(p):
        v = z[:, j].copy()
        for _ in range(2):
            v -= q[:, :j] @ (q[:, :j].T @ v)
        nrm = float(np.linalg.norm(v))
        while nrm <= 1e-13 * scale:
            v = np.zeros(n)
            v[basis % n] = 1.0
            basis += 1
            for _ in range(2):
                v -= q[:, :j] @ (q[:, :j].T @ v)
            nrm = float(np.linalg.norm(v))
            scale = 1.0
        q[:, j] = v / nrm
    return q


def _dominant_ritz(b: np.ndarray) -> tuple[complex, np.ndarray]:
    """Largest-modulus eigenpair of a real 2x2 matrix, in closed form."""
    tr = b[0, 0] + b[1, 1]
    det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
    disc = 0.25 * tr * tr - det
    if disc >= 0.0:
        root = math.sqrt(disc)
        theta = complex(0.5 * tr + root if tr >= 0 else 0.5 * tr - root)
    else:
        theta = complex(0.5 * tr, math.sqrt(-disc))
    y1 = np.array([b[0, 1], theta - b[0, 0]], dtype=complex)
    y2 = np.array([theta - b[1, 1], b[1, 0]], dtype=complex)
    y = y1 if np.linalg.norm(y1) >= np.linalg.norm(y2) else y2
    nrm = np.linalg.norm(y)
    if nrm == 0.0:
        # b is a multiple of the identity: any vector is an eigenvector
        y = np.array([1.0, 0.0], dtype=complex)
    else:
        y = y / nrm
    return theta, y


def spectral_radius(a, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest eigenvalue modulus of a real square matrix.

    Two-column subspace iteration started from :func:`start_vectors`, with a
    Rayleigh-Ritz step on the 2x2 projection each iteration.  Tracking two
    directions lets a complex-conjugate dominant pair (the usual case for
    random reservoir matrices) resolve as the modulus of the projected pair
    instead of oscillating.

    Stops when the dominant Ritz pair ``(theta, u)`` has residual
    ``||A u - theta u|| <= RITZ_SAFETY * tol * |theta|`` for unit ``u``.
    For a non-normal matrix the eigenvalue error can exceed the residual by
    a modest factor, hence the safety margin.  The threshold never drops
    below ``64 eps ||A||_F``, the level rounding allows.

    Raises
    ------
    DimensionError
        If ``a`` is not square.
    ConvergenceError
        If ``max_iter`` iterations pass without convergence; ``estimate``
        holds the last value.
    """
    _check_iter_args(tol, max_iter)
    a = _square(a)
    n = a.shape[0]
    if n == 1:
        return abs(float(a[0, 0]))
    if not np.any(a):
        return 0.0

    q = _orthonormalize(start_vectors(n))
    floor = 64.0 * np.finfo(np.float64).eps * float(np.linalg.norm(a))
    est = 0.0
    for _ in range(max_iter):
        z = a @ q
        theta, y = _dominant_ritz(q.T @ z)
        est = abs(theta)
        resid = float(np.linalg.norm(z @ y - theta * (q @ y)))
        if resid <= max(RITZ_SAFETY * tol * est, floor):
            return est
        q = _orthonormalize(z)
    raise ConvergenceError(
        f"spectral_radius did not converge in {max_iter} iterations", estimate=est)


def _gram_power(a: np.ndarray, v: np.ndarray, tol: float, max_iter: int) -> float:
    """Dominant eigenvalue of a.T @ a by plain power iteration from ``v``."""
    v = v / np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = a.T @ (a @ v)
        lam = float(v @ w)
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        if float(np.linalg.norm(w - lam * v)) <= tol * lam:
            return lam
        v = w / nrm
    raise ConvergenceError(
        f"operator_norm_2 did not converge in {max_iter} iterations",
        estimate=math.sqrt(max(lam, 0.0)))


def operator_norm_2(a, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest singular value of ``a``.

    Power iteration on the symmetric PSD matrix ``a.T @ a`` (never formed),
    run from both deterministic start vectors; the larger estimate wins, which
    covers a start vector orthogonal to the top singular direction.
    Each run stops when the Rayleigh residual is below ``tol`` relative.
    """
    _check_iter_args(tol, max_iter)
    a = as_matrix(a)
    if not np.any(a):
        return 0.0
    starts = start_vectors(a.shape[1])
    lam = 0.0
    for j in range(starts.shape[1] if a.shape[1] > 1 else 1):
        lam = max(lam, _gram_power(a, starts[:, j], tol, max_iter))
    return math.sqrt(lam)


@numba.njit(cache=True)
def _jacobi(a, v, stop, max_sweeps):
    n = a.shape[0]
    eps = 2.220446049250313e-16
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > off:
                    off = abs(a[p, q])
        if off <= stop:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                app = a[p, p]
                aqq = a[q, q]
                # negligible against both diagonals: rotating changes nothing
                if abs(apq) <= 0.1 * eps * math.sqrt(abs(app) * abs(aqq)):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return -1


def symmetric_eigen(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Returns ``(eigenvalues, vectors)`` with eigenvalues sorted non-increasing
    and ``vectors[:, i]`` the unit eigenvector of ``eigenvalues[i]``.
    The input is symmetrized as ``(S + S.T) / 2``; sweeps continue until the
    largest off-diagonal entry is at most 1e-12 times the Frobenius norm.
    """
    s = _square(s)
    if np.max(np.abs(s - s.T)) > SYMMETRY_ATOL * max(1.0, float(np.max(np.abs(s)))):
        raise ValueError("matrix is not symmetric")
    a = np.ascontiguousarray(0.5 * (s + s.T))
    n = a.shape[0]
    v = np.eye(n)
    stop = JACOBI_REL_TOL * float(np.linalg.norm(a))
    sweeps = _jacobi(a, v, stop, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi eigensolver exceeded {JACOBI_MAX_SWEEPS} sweeps")
    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], v[:, order]


def gram(x: np.ndarray) -> np.ndarray:
    """Row Gram matrix ``x @ x.T``, exactly symmetric."""
    g = x @ x.T
    return np.triu(g) + np.triu(g, 1).T


def singular_values(x) -> np.ndarray:
    """Singular values of a wide matrix (rows <= cols), non-increasing.

    Square roots of the eigenvalues of ``x @ x.T``.  Eigenvalues below
    ``rows * eps * lambda_max`` are indistinguishable from rounding noise in
    the Gram matrix and are set to zero, so an exactly rank-deficient input
    reports exact zeros instead of ``sqrt(noise)``.
    """
    x = as_matrix(x)
    if x.shape[0] > x.shape[1]:
        raise DimensionError(
            f"singular_values expects rows <= cols, got shape {x.shape}")
    lam, _ = symmetric_eigen(gram(x))
    floor = x.shape[0] * np.finfo(np.float64).eps * max(lam[0], 0.0)
    lam = np.where(lam > floor, lam, 0.0)
    return np.sqrt(lam)


def least_squares_solve(x, y, ridge: float = 0.0) -> np.ndarray:
    """Weights ``W`` minimizing ``||W x - y||^2 + ridge ||W||^2``.

    ``x`` is features x samples, ``y`` is outputs x samples.  Solved through
    the eigendecomposition of ``x x^T + ridge I``; with ``ridge == 0``,
    eigenvalues below 1e-12 of the largest are discarded (pseudoinverse).

    Raises
    ------
    DimensionError
        Sample counts differ.
    DegenerateSystemError
        No eigenvalue survives the cutoff (e.g. ``x`` is all zeros).
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if x.shape[1] != y.shape[1]:
        raise DimensionError(
            f"x has {x.shape[1]} samples but y has {y.shape[1]}")
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    g = gram(x)
    if ridge > 0:
        g = g + ridge * np.eye(g.shape[0])
    lam, v = symmetric_eigen(g)
    lam_max = lam[0]
    if lam_max <= 0.0:
        raise DegenerateSystemError("Gram matrix has no positive eigenvalue")
    keep = lam > (PINV_CUTOFF * lam_max if ridge == 0 else 0.0)
    vk = v[:, keep]
    return ((y @ x.T) @ vk / lam[keep]) @ vk.T
