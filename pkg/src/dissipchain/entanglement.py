"""Pair reduced states, Wootters concurrence and sudden-birth detection."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .dynamics import Trajectory, check_density_matrix, is_uniform
from .errors import DimensionMismatch, GridTooCoarse, NotPSD, SiteOutOfRange
from .linalg import as_matrix, dagger, hermitian_eig, kron, psd_sqrt
from .model import SIGMA_Y, n_qubits

CLAMP = 1e-10
_YY = kron(SIGMA_Y, SIGMA_Y)


def normalize_pair(pair) -> tuple[int, int]:
    i, j = (int(x) for x in pair)
    if i == j:
        raise SiteOutOfRange(f"pair sites must differ, got {pair}")
    return (i, j) if i < j else (j, i)


def default_pairs(n: int) -> list[tuple[int, int]]:
    """All site pairs, nearest neighbours first: (1,2), (2,3), (1,3) for n = 3."""
    return sorted(combinations(range(1, n + 1), 2), key=lambda p: (p[1] - p[0], p[0]))


def partial_trace(rho, keep, n: int | None = None) -> np.ndarray:
    """Reduced state of the two sites in ``keep``; site ``keep[0]`` is the left factor."""
    rho = as_matrix(rho)
    if n is None:
        n = n_qubits(rho.shape[0])
    if rho.shape != (2**n, 2**n):
        raise DimensionMismatch(f"expected a {2**n}x{2**n} matrix, got {rho.shape}")
    i, j = (int(s) for s in keep)
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise SiteOutOfRange(f"cannot keep sites {keep} of {n}")
    kept = [i - 1, j - 1]
    rest = [s for s in range(n) if s not in kept]
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(kept + rest + [n + s for s in kept] + [n + s for s in rest])
    r = 2 ** len(rest)
    t = t.reshape(4, r, 4, r)
    return np.einsum("ajbj->ab", t)


def spin_flip(rho4) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y) in the computational basis."""
    return _YY @ np.conj(rho4) @ _YY


def wootters_lambdas(rho4) -> np.ndarray:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    rho rho~ is similar to sqrt(rho) rho~ sqrt(rho) = A A^H with
    A = sqrt(rho) sqrt(rho~), so the lambdas are the singular values of A.
    They are read off as the non-negative eigenvalues of the Hermitian
    matrix [[0, A], [A^H, 0]], which avoids taking square roots of
    eigenvalues near zero.
    """
    rho4 = check_density_matrix(rho4)
    if rho4.shape != (4, 4):
        raise DimensionMismatch(f"concurrence needs a 4x4 state, got {rho4.shape}")
    root = psd_sqrt(0.5 * (rho4 + dagger(rho4)), neg_tol=1e-7)
    # sqrt(rho~) = YY sqrt(rho)* YY; the trailing YY is unitary and drops out
    a = root @ _YY @ np.conj(root)
    zero = np.zeros((4, 4), dtype=complex)
    w = hermitian_eig(np.block([[zero, a], [dagger(a), zero]])).eigenvalues[::-1][:4]
    if w[-1] < -CLAMP:
        raise NotPSD(f"spin-flipped product has singular value estimate {w[-1]:.3e}")
    return np.clip(w, 0.0, None)


def concurrence(rho4) -> float:
    lam = wootters_lambdas(rho4)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


@dataclass(frozen=True, eq=False)
class ConcurrenceSeries:
    times: np.ndarray
    pairs: list[tuple[int, int]]
    values: np.ndarray  # (time, pair)

    def column(self, pair) -> np.ndarray:
        return self.values[:, self.pairs.index(normalize_pair(pair))]


def concurrence_series(traj: Trajectory, pairs: Sequence | None = None) -> ConcurrenceSeries:
    n = traj.spec.n_sites
    pairs = default_pairs(n) if pairs is None else [normalize_pair(p) for p in pairs]
    values = np.array([[concurrence(partial_trace(rho, p, n)) for p in pairs]
                       for rho in traj.density_matrices()])
    return ConcurrenceSeries(traj.times, pairs, values.reshape(len(traj), len(pairs)))


class Onset(str, enum.Enum):
    IMMEDIATE = "immediate"
    SUDDEN = "sudden"
    NEVER = "never"


@dataclass(frozen=True)
class BirthClass:
    onset: Onset
    time: float | None = None  # first grid time above tol, for SUDDEN

    def __str__(self) -> str:
        if self.onset is Onset.SUDDEN:
            return f"sudden(t*={self.time:g})"
        return self.onset.value


def sudden_birth(series: ConcurrenceSeries, pair, tol: float = 1e-6,
                 window: int = 5) -> BirthClass:
    """Classify when the concurrence of ``pair`` first exceeds ``tol``.

    IMMEDIATE when it does within the first ``window`` steps after t = 0,
    SUDDEN with the first crossing time when it only does later, NEVER if it
    stays at or below ``tol`` throughout.
    """
    times = np.asarray(series.times)
    if tol <= 0 or window < 1:
        raise GridTooCoarse("tol must be positive and window at least 1")
    if times.size < 2 * window or not is_uniform(times):
        raise GridTooCoarse(f"need a uniform grid with at least {2 * window} points")
    c = series.column(pair)
    above = np.flatnonzero(c > tol)
    if above.size == 0:
        return BirthClass(Onset.NEVER)
    if above[0] <= window:
        return BirthClass(Onset.IMMEDIATE)
    return BirthClass(Onset.SUDDEN, float(times[above[0]]))
