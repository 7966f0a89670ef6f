"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays. The Hermitian eigensolver is a
cyclic Jacobi method and the matrix exponential is a Taylor scaling-and-squaring
scheme; both are small enough to audit and accurate for the dimensions this
package works with (up to 1024).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD

DEFAULT_TOL = 1e-9
MAX_SWEEPS = 100
_OFF_TOL = 1e-14
_HERMITIAN_TOL = 1e-8
_SCALAR_MAX_DIM = 16


@dataclass(frozen=True)
class HermitianEigResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``result[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(ra * rb, ca * cb)


def kron_all(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = kron(out, op)
    return out


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pair schedule covering every (p, q) once per sweep in disjoint rounds."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(app: float, aqq: float, apq: complex) -> tuple[float, float, complex]:
    """Plane rotation (c, s) and phase zeroing the (p, q) entry of a Hermitian block."""
    r = abs(apq)
    phase = apq / r
    theta = (aqq - app) / (2.0 * r)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c, phase


def _jacobi_scalar(a: list, n: int, target: float, skip: float, max_sweeps: int):
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]

    sweeps = 0
    while _off_norm(np.array(a)) > target:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if abs(apq) <= skip:
                    continue
                c, s, phase = _rotation(a[p][p].real, a[q][q].real, apq)
                ph = phase.conjugate()
                g10 = -s * ph
                g11 = c * ph
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x + g10 * y
                    row[q] = s * x + g11 * y
                rp, rq = a[p], a[q]
                cg10, cg11 = g10.conjugate(), g11.conjugate()
                for k in range(n):
                    x, y = rp[k], rq[k]
                    rp[k] = c * x + cg10 * y
                    rq[k] = s * x + cg11 * y
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x + g10 * y
                    row[q] = s * x + g11 * y
                rp[q] = rq[p] = 0j
                rp[p] = complex(rp[p].real)
                rq[q] = complex(rq[q].real)
    return np.array(a, dtype=complex), np.array(v, dtype=complex)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pair schedule covering every (p, q) once per sweep in disjoint rounds."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_blocked(a: np.ndarray, n: int, target: float, skip: float, max_sweeps: int):
    v = np.eye(n, dtype=complex)
    rounds = _round_robin(n)
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            r = np.abs(apq)
            act = r > skip
            if not act.any():
                continue
            p, q, apq, r = p[act], q[act], apq[act], r[act]
            phase = apq / r
            theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            g = np.eye(n, dtype=complex)
            g[p, p] = c
            g[p, q] = s
            g[q, p] = -s * np.conj(phase)
            g[q, q] = c * np.conj(phase)
            a = dagger(g) @ a @ g
            v = v @ g
            a[p, q] = 0.0
            a[q, p] = 0.0
        a = 0.5 * (a + dagger(a))
    return a, v


def hermitian_eig(h, max_sweeps: int = MAX_SWEEPS) -> HermitianEigResult:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation is a phase on column q followed by a real plane rotation in
    (p, q). Small matrices run the classic row-cyclic sweep on Python scalars;
    larger ones use a round-robin ordering whose rounds touch disjoint index
    pairs, so a whole round is applied as one unitary.

    Eigenvalues come back ascending with matching eigenvector columns. Raises
    NotHermitian if ``h`` is not Hermitian to 1e-8 relative, and NoConvergence
    if the off-diagonal mass is still above 1e-14 * ||h||_F after
    ``max_sweeps`` sweeps.
    """
    h = _square(h)
    n = h.shape[0]
    norm = float(np.linalg.norm(h))
    if np.linalg.norm(h - dagger(h)) > _HERMITIAN_TOL * max(1.0, norm):
        raise NotHermitian("matrix is not Hermitian")

    a = 0.5 * (h + dagger(h))
    target = _OFF_TOL * norm
    # entries below this are left alone; together they cannot exceed target
    skip = target / n
    if n <= _SCALAR_MAX_DIM:
        a, v = _jacobi_scalar(a.tolist(), n, target, skip, max_sweeps)
    else:
        a, v = _jacobi_blocked(a, n, target, skip, max_sweeps)

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigResult(w[order], v[:, order])


def psd_sqrt(h, neg_tol: float = 1e-8) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are clamped to zero; anything more
    negative raises NotPSD. Eigenvalues below the eigensolver's rounding level
    (dimension * machine epsilon * largest eigenvalue) are also treated as
    zero, since their square roots would be pure noise.
    """
    w, q = hermitian_eig(h)
    if w.size and w[0] < -neg_tol:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -{neg_tol:g}")
    floor = w.size * np.finfo(float).eps * max(abs(w[-1]), abs(w[0]))
    root = np.sqrt(np.where(w > floor, w, 0.0))
    s = (q * root) @ dagger(q)
    return 0.5 * (s + dagger(s))


def kernel_basis(m, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical null space of ``m``.

    Candidates are the eigenvectors of ``m^H m``; a vector is kept when
    ``||m v|| <= tol * ||m||_F``, with the residual evaluated directly on ``m``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    gram = dagger(m) @ m
    _, q = hermitian_eig(0.5 * (gram + dagger(gram)))
    residuals = np.linalg.norm(m @ q, axis=0)
    keep = residuals <= tol * np.linalg.norm(m)
    return [q[:, k].copy() for k in np.flatnonzero(keep)]


def expm(m, t: float = 1.0) -> np.ndarray:
    """``exp(m * t)`` by scaling and squaring around a truncated Taylor series."""
    a = _square(m) * t
    n = a.shape[0]
    norm1 = np.abs(a).sum(axis=0).max()
    s = 0 if norm1 <= 0.5 else int(math.ceil(math.log2(norm1 / 0.5)))
    a = a / 2.0**s

    total = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ a / k
        total += term
        if np.abs(term).sum(axis=0).max() < 1e-16:
            break
    for _ in range(s):
        total = total @ total
    return total


def matexp_apply(m, v, t: float) -> np.ndarray:
    m = _square(m)
    v = np.asarray(v, dtype=complex)
    if v.shape != (m.shape[0],):
        raise DimensionMismatch(f"vector of length {v.shape} does not match {m.shape}")
    if t < 0:
        raise ValueError("t must be non-negative")
    return expm(m, t) @ v
