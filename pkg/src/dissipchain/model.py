"""Chain operators and the vectorized Liouvillian.

Sites and links are 1-based. Single-qubit basis order is (|e>, |g>), so the
all-ground state is the last basis vector. Density matrices are vectorized by
row stacking: ``rho[i, j] -> v[D*i + j]`` (0-based).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidChain, LinkOutOfRange, SiteOutOfRange
from .linalg import as_matrix, dagger, kron, kron_all


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


SIGMA_MINUS = _frozen([[0, 0], [1, 0]])
SIGMA_PLUS = _frozen([[0, 1], [0, 0]])
SIGMA_Y = _frozen(1j * (SIGMA_MINUS - SIGMA_PLUS))
SIGMA_Z = _frozen(SIGMA_PLUS @ SIGMA_MINUS - SIGMA_MINUS @ SIGMA_PLUS)
IDENTITY2 = _frozen(np.eye(2))

EXCITED = _frozen([1, 0])
GROUND = _frozen([0, 1])


class Boundary(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class ChainSpec:
    """Chain of ``n_sites`` qubits; link k joins sites k and k+1 (k = n joins n and 1)."""

    n_sites: int
    boundary: Boundary
    link_rates: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "link_rates", tuple(float(r) for r in self.link_rates))
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidChain(f"n_sites must be an integer >= 2, got {self.n_sites}")
        expected = self.n_sites - 1 if self.boundary is Boundary.OPEN else self.n_sites
        if len(self.link_rates) != expected:
            raise InvalidChain(
                f"{self.boundary.value} chain of {self.n_sites} sites needs {expected} rates, "
                f"got {len(self.link_rates)}"
            )
        if any(not math.isfinite(r) or r < 0 for r in self.link_rates):
            raise InvalidChain("link rates must be finite and non-negative")
        if not any(r > 0 for r in self.link_rates):
            raise InvalidChain("at least one link rate must be positive")

    @classmethod
    def open_three(cls, gamma: float) -> "ChainSpec":
        """Three sites, open ends, left/right asymmetry ``gamma`` and ``1 - gamma``."""
        if not 0.0 < gamma < 1.0:
            raise InvalidChain(f"gamma must lie in (0, 1), got {gamma}")
        return cls(3, Boundary.OPEN, (gamma, 1.0 - gamma))

    @classmethod
    def closed_three(cls, gamma: float, mu: float, nu: float) -> "ChainSpec":
        return cls(3, Boundary.CLOSED, (gamma, mu, nu))

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    @property
    def links(self) -> list[tuple[int, int]]:
        n = self.n_sites
        return [(k, k % n + 1) for k in range(1, len(self.link_rates) + 1)]


@lru_cache(maxsize=None)
def _lowering(site: int, n: int) -> np.ndarray:
    ops = [IDENTITY2] * n
    ops[site - 1] = SIGMA_MINUS
    return _frozen(kron_all(*ops))


def lowering_operator(site: int, n: int) -> np.ndarray:
    """sigma^- acting on ``site`` of an ``n``-qubit register."""
    if not 1 <= site <= n:
        raise SiteOutOfRange(f"site {site} outside 1..{n}")
    return _lowering(site, n)


def link_operator(link: int, spec: ChainSpec) -> np.ndarray:
    """Collective jump operator sigma^-_k + sigma^-_{k+1} of link ``k``."""
    if not 1 <= link <= len(spec.link_rates):
        raise LinkOutOfRange(f"link {link} outside 1..{len(spec.link_rates)}")
    i, j = spec.links[link - 1]
    return lowering_operator(i, spec.n_sites) + lowering_operator(j, spec.n_sites)


def dissipator(jump: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """Row-stacked superoperator of rho -> rate * (2 L rho L^H - {L^H L, rho})."""
    jump = as_matrix(jump)
    d = jump.shape[0]
    eye = np.eye(d, dtype=complex)
    ll = dagger(jump) @ jump
    return rate * (2.0 * kron(jump, jump.conj()) - kron(ll, eye) - kron(eye, ll.T))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    matrix: np.ndarray
    spec: ChainSpec

    @property
    def dim(self) -> int:
        return self.spec.dim

    @cached_property
    def jumps(self) -> list[np.ndarray]:
        return [link_operator(k, self.spec) for k in range(1, len(self.spec.link_rates) + 1)]

    def apply(self, v) -> np.ndarray:
        return self.matrix @ v


def liouvillian(spec: ChainSpec) -> Liouvillian:
    d = spec.dim
    m = np.zeros((d * d, d * d), dtype=complex)
    for k, rate in enumerate(spec.link_rates, start=1):
        if rate:
            m += dissipator(link_operator(k, spec), rate)
    m.setflags(write=False)
    return Liouvillian(m, spec)


def vectorize(rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    return rho.reshape(-1).copy()


def devectorize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    d = math.isqrt(v.size)
    if v.ndim != 1 or d * d != v.size or d == 0:
        raise DimensionMismatch(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


def trace_functional(d: int) -> np.ndarray:
    """Row vector w with w . vec(rho) = tr(rho)."""
    return np.eye(d, dtype=complex).reshape(-1)


def n_qubits(d: int) -> int:
    n = d.bit_length() - 1
    if d < 2 or 2**n != d:
        raise DimensionMismatch(f"dimension {d} is not a power of two")
    return n


@lru_cache(maxsize=None)
def _number_diagonal(n: int) -> np.ndarray:
    total = sum(np.diag(dagger(lowering_operator(i, n)) @ lowering_operator(i, n)).real
                for i in range(1, n + 1))
    total.setflags(write=False)
    return total


def total_excitation(rho) -> float:
    """Expected number of excited qubits, Re tr(rho * sum_i sigma^+_i sigma^-_i)."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    n = n_qubits(rho.shape[0])
    return float(np.dot(_number_diagonal(n), np.diag(rho).real))


def basis_ket(label: str) -> np.ndarray:
    """Computational basis ket for a string over {e, g}, e.g. ``"eeg"``."""
    label = label.strip().strip("|>⟩").lower()
    if not label or set(label) - {"e", "g"}:
        raise ValueError(f"basis label must be a non-empty string over 'e'/'g', got {label!r}")
    index = int(label.replace("e", "0").replace("g", "1"), 2)
    ket = np.zeros(2 ** len(label), dtype=complex)
    ket[index] = 1.0
    return ket


def basis_state(label: str) -> np.ndarray:
    ket = basis_ket(label)
    return np.outer(ket, ket.conj())


def basis_label(index: int, n: int) -> str:
    return format(index, f"0{n}b").replace("0", "e").replace("1", "g")


def pure_state(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    return np.outer(ket, ket.conj())


def product_state(*single_qubit_states) -> np.ndarray:
    """Tensor product of single-qubit density matrices, site 1 leftmost."""
    return kron_all(*single_qubit_states)
