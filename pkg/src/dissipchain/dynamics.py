"""Time evolution, steady states and uniqueness diagnostics."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidState, NoConvergence
from .linalg import DEFAULT_TOL, as_matrix, dagger, expm, hermitian_eig, kernel_basis, kron
from .model import Boundary, ChainSpec, Liouvillian, devectorize, total_excitation, vectorize

log = logging.getLogger(__name__)

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-7
STEADY_RESIDUAL = 1e-10
MAX_HORIZON = 2.0**20
F_CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class Physicality:
    trace_error: float
    hermiticity_defect: float
    min_eigenvalue: float

    def ok(self, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, eig_tol=POSITIVITY_TOL) -> bool:
        return (self.trace_error <= trace_tol and self.hermiticity_defect <= herm_tol
                and self.min_eigenvalue >= -eig_tol)


def physicality(rho) -> Physicality:
    rho = as_matrix(rho)
    herm = float(np.linalg.norm(rho - dagger(rho)))
    w = hermitian_eig(0.5 * (rho + dagger(rho))).eigenvalues
    return Physicality(abs(np.trace(rho) - 1.0), herm, float(w[0]))


def check_density_matrix(rho, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL,
                         eig_tol=POSITIVITY_TOL) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    if np.linalg.norm(rho - dagger(rho)) > herm_tol:
        raise InvalidState("density matrix is not Hermitian")
    diag = physicality(rho)
    if not diag.ok(trace_tol, herm_tol, eig_tol):
        raise InvalidState(
            f"not a density matrix: |tr-1|={diag.trace_error:.2e}, "
            f"min eigenvalue={diag.min_eigenvalue:.2e}"
        )
    return rho


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Vectorized states ``states[k] = vec(rho(times[k]))``."""

    times: np.ndarray
    states: np.ndarray
    spec: ChainSpec

    def __len__(self) -> int:
        return len(self.times)

    def rho(self, k: int) -> np.ndarray:
        return devectorize(self.states[k])

    def density_matrices(self):
        for k in range(len(self)):
            yield self.rho(k)


@dataclass(frozen=True, eq=False)
class SteadyStateReport:
    kernel_dimension: int
    steady_state: np.ndarray
    residual: float
    elapsed_T: float
    f_fit: float | None = None


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0.0:
        raise ValueError("times must be a non-empty 1-d grid starting at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    return times


def _initial_vector(gen: Liouvillian, rho0) -> np.ndarray:
    rho0 = as_matrix(rho0)
    if rho0.shape != (gen.dim, gen.dim):
        raise DimensionMismatch(f"state of shape {rho0.shape} does not match dimension {gen.dim}")
    return vectorize(check_density_matrix(rho0))


def is_uniform(times: np.ndarray) -> bool:
    if times.size < 3:
        return True
    steps = np.diff(times)
    return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))


def propagate(gen: Liouvillian, rho0, times: Sequence[float]) -> Trajectory:
    """Evolve ``rho0`` under the generator, sampling at ``times`` (starting at 0)."""
    times = _check_times(times)
    v = _initial_vector(gen, rho0)
    states = np.empty((times.size, v.size), dtype=complex)
    states[0] = v
    if times.size > 1 and is_uniform(times):
        step = expm(gen.matrix, times[1] - times[0])
        for k in range(1, times.size):
            v = step @ v
            states[k] = v
    else:
        for k in range(1, times.size):
            states[k] = expm(gen.matrix, times[k]) @ v
    states.setflags(write=False)
    return Trajectory(times, states, gen.spec)


def time_grid(t_max: float, dt: float) -> np.ndarray:
    steps = int(round(t_max / dt))
    return dt * np.arange(steps + 1)


def kernel_report(gen: Liouvillian, tol: float = DEFAULT_TOL) -> tuple[int, list[np.ndarray]]:
    basis = kernel_basis(gen.matrix, tol)
    return len(basis), basis


def fit_f(rho: np.ndarray, tol: float = F_CONSISTENCY_TOL) -> float | None:
    """Read f off a three-site steady state of the open-chain family.

    Returns None when the matrix does not have the expected pattern: equal
    populations f on |egg>, |geg>, |gge>, coherences -f, +f, -f between them,
    1 - 3f on |ggg> and nothing else.
    """
    if rho.shape != (8, 8):
        return None
    f = rho[3, 3].real
    pattern = np.zeros((8, 8), dtype=complex)
    idx = [3, 5, 6]
    signs = np.array([1.0, -1.0, 1.0])
    pattern[np.ix_(idx, idx)] = f * np.outer(signs, signs)
    pattern[7, 7] = 1.0 - 3.0 * f
    if np.abs(rho - pattern).max() > tol:
        return None
    return float(f)


def steady_state_from(gen: Liouvillian, rho0, *, kernel_dimension: int | None = None,
                      threshold: float = STEADY_RESIDUAL,
                      max_horizon: float = MAX_HORIZON) -> SteadyStateReport:
    """Long-time limit of the evolution started at ``rho0``.

    The horizon doubles from T = 1 until ``||M vec(rho(T))||_inf <= threshold``;
    NoConvergence is raised once T would exceed ``max_horizon``. The state is
    then evolved for one more doubling: transient amplitudes of order
    ``threshold`` are squared away, which matters for concurrence because it
    responds to the square root of vanishing populations.
    """
    v0 = _initial_vector(gen, rho0)
    horizon = 1.0
    step = expm(gen.matrix, horizon)
    while True:
        v = step @ v0
        residual = float(np.abs(gen.matrix @ v).max())
        if residual <= threshold:
            break
        if horizon * 2 > max_horizon:
            raise NoConvergence(
                f"residual {residual:.3e} above {threshold:g} at horizon T={horizon:g}"
            )
        horizon *= 2
        step = step @ step
    if horizon * 2 <= max_horizon:
        settled = step @ step @ v0
        settled_residual = float(np.abs(gen.matrix @ settled).max())
        if settled_residual <= threshold:
            v, residual, horizon = settled, settled_residual, horizon * 2

    rho = devectorize(v)
    rho = 0.5 * (rho + dagger(rho))
    check_density_matrix(rho, 1e-8, 1e-8, 1e-8)
    if kernel_dimension is None:
        kernel_dimension = kernel_report(gen)[0]

    f = None
    if gen.spec.n_sites == 3 and gen.spec.boundary is Boundary.OPEN:
        f = fit_f(rho)
        if f is None:
            log.info("steady state is outside the single-parameter family; no f reported")
    return SteadyStateReport(kernel_dimension, rho, residual, horizon, f)


def commutator_superoperator(op: np.ndarray) -> np.ndarray:
    """Row-stacked matrix of X -> X op - op X."""
    op = as_matrix(op)
    eye = np.eye(op.shape[0], dtype=complex)
    return kron(eye, op.T) - kron(op, eye)


def commutant_dimension(links: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> int:
    """Dimension of the space of operators commuting with every jump operator."""
    links = [as_matrix(op) for op in links]
    if not links:
        raise ValueError("need at least one operator")
    d = links[0].shape[0]
    if any(op.shape != (d, d) for op in links):
        raise DimensionMismatch("jump operators must be square and of equal dimension")
    stacked = np.vstack([commutator_superoperator(op) for op in links])
    return len(kernel_basis(stacked, tol))


def excitation_profile(traj: Trajectory) -> np.ndarray:
    return np.array([total_excitation(rho) for rho in traj.density_matrices()])
