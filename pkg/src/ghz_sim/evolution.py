"""Time-evolution engines.

Three engines plus the frame transform that links them:

* :func:`block_propagate` applies the closed-form 4x4 propagator for one
  sideband block (see the honesty note in its docstring);
* :func:`evolve_static` evolves under any time-independent Hermitian
  Hamiltonian by eigendecomposition, exp(-iHt) applied exactly;
* :func:`evolve_timedep` integrates the time-dependent lab-frame model with a
  fixed-step classical Runge-Kutta scheme (midpoint Hamiltonian evaluations);
  norm drift is never repaired by renormalization, it is the accuracy signal;
* :func:`to_interaction_picture` applies the diagonal free-evolution phases
  exp(+i H0 t) that map a lab-frame state into the interaction picture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, ConfigurationError, ModelError
from .fock_core import HilbertShape, QuantumState
from .hamiltonian import BlockParams, SystemParams

HERMITICITY_ATOL = 1e-9
NORM_DRIFT_LIMIT = 1e-6

# Permutation that swaps |g,m,n> <-> |e,m-1,n-1> and |e,m,n> <-> |g,m-1,n-1>.
# It commutes with the block Hamiltonian and extends the two printed
# closed-form columns to the remaining two initial states.
BLOCK_PERMUTATION = np.array(
    [[0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [1, 0, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class BlockState:
    """State restricted to one 4-state block, ordered
    (|g,m,n>, |e,m,n>, |g,m-1,n-1>, |e,m-1,n-1>)."""

    amplitudes: np.ndarray
    block: BlockParams

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (4,):
            raise ValueError("block state needs exactly 4 amplitudes")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class EvolutionResult:
    """Stored trajectory of one evolution run.

    ``truncation_leak[i]`` is the population in the top vibrational or top
    cavity level at ``times[i]`` (always 0 for block-space runs); ``norm_drift``
    is the largest deviation of any stored norm from 1.
    """

    times: np.ndarray
    states: tuple
    truncation_leak: np.ndarray
    model_tag: str
    norm_drift: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or len(times) != len(self.states):
            raise ValueError("times and states must have matching length")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "truncation_leak",
                           np.asarray(self.truncation_leak, dtype=float))

    @property
    def final_state(self):
        return self.states[-1]


def block_propagator(block: BlockParams, t: float) -> np.ndarray:
    """Closed-form 4x4 propagator of one sideband block at time t.

    Columns 2 and 3 (initial |g,m-1,n-1> and |e,m-1,n-1>) are the printed
    closed-form amplitudes built from sin/cos of (a t) and (mu t) with
    a = g_eff eta_c sqrt(mn) and mu = sqrt(a^2 + Omega^2); columns 0 and 1 are
    their images under BLOCK_PERMUTATION, which commutes with the block matrix.

    Consistency note: this closed form is the exact propagator of the block
    Hamiltonian with its sideband element *doubled* (coupling 2a), not of the
    4x4 produced by ``build_block_hamiltonian`` (coupling a). The two engines
    therefore disagree whenever a != 0; the ``validate`` suite measures the
    discrepancy instead of hiding it. At the tuned protocol point
    (mu t = p pi, a t = pi/4) this closed form reproduces the GHZ targets
    exactly, which is what the protocol layer is built on.
    """
    if t < 0:
        raise ValueError("propagation time must be >= 0")
    a, mu, omega = block.a, block.mu, block.Omega
    sa, ca = np.sin(a * t), np.cos(a * t)
    sm, cm = np.sin(mu * t), np.cos(mu * t)
    ratio_a = a / mu if mu > 0 else 0.0
    ratio_o = omega / mu if mu > 0 else 0.0

    u = np.zeros((4, 4), dtype=complex)
    # initial |g,m-1,n-1>
    u[2, 2] = ratio_a * sa * sm + ca * cm
    u[3, 2] = -1j * ratio_o * ca * sm
    u[0, 2] = -ratio_o * sa * sm
    u[1, 2] = 1j * (ratio_a * ca * sm - sa * cm)
    # initial |e,m-1,n-1>
    u[3, 3] = ca * cm - ratio_a * sa * sm
    u[2, 3] = -1j * ratio_o * ca * sm
    u[1, 3] = -ratio_o * sa * sm
    u[0, 3] = -1j * (ratio_a * ca * sm + sa * cm)
    # initial |g,m,n> and |e,m,n>: permutation images of columns 3 and 2
    u[:, 0] = BLOCK_PERMUTATION @ u[:, 3]
    u[:, 1] = BLOCK_PERMUTATION @ u[:, 2]
    return u


def block_propagate(initial: BlockState, t: float) -> BlockState:
    """Evolve a block state for time t with the closed-form propagator.

    General initial states evolve by linearity; the output norm equals the
    input norm to machine precision.
    """
    u = block_propagator(initial.block, t)
    return BlockState(u @ initial.amplitudes, initial.block)


def require_hermitian(h: np.ndarray, atol: float = HERMITICITY_ATOL):
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > atol:
        raise ModelError(f"Hamiltonian is not Hermitian: max |H - H†| = {dev:.3e}")


def _top_level_mask(shape: HilbertShape) -> np.ndarray:
    """Boolean mask of basis states sitting in the top vib or top cav level."""
    mask = np.zeros(shape.total_dim, dtype=bool)
    for s, m, n in shape.labels():
        if m == shape.vib_dim - 1 or n == shape.cav_dim - 1:
            mask[shape.index(s, m, n)] = True
    return mask


def truncation_leak(state: QuantumState) -> float:
    """Population in the top vibrational or top cavity Fock level."""
    return float(np.sum(state.populations()[_top_level_mask(state.shape)]))


def evolve_static(h: np.ndarray, initial: QuantumState,
                  times: Sequence[float]) -> EvolutionResult:
    """Evolve under a time-independent Hamiltonian: psi(t) = exp(-iHt) psi(0).

    Computed by eigendecomposition of H, so norms and energy are preserved to
    machine precision at every output time.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (initial.shape.total_dim,) * 2:
        raise ValueError(
            f"Hamiltonian shape {h.shape} does not match state dimension "
            f"{initial.shape.total_dim}")
    require_hermitian(h)
    evals, vecs = np.linalg.eigh(h)
    coeffs = vecs.conj().T @ initial.amplitudes

    mask = _top_level_mask(initial.shape)
    states, leaks = [], []
    drift = 0.0
    for t in times:
        amps = vecs @ (np.exp(-1j * evals * t) * coeffs)
        state = QuantumState(initial.shape, amps)
        states.append(state)
        leaks.append(float(np.sum(state.populations()[mask])))
        drift = max(drift, abs(state.norm() - 1.0))
    return EvolutionResult(np.asarray(times, dtype=float), states,
                           np.asarray(leaks), "static", norm_drift=drift)


def _rk4_segment(h_of_t: Callable[[float], np.ndarray], psi: np.ndarray,
                 t0: float, t1: float, dt: float) -> tuple[np.ndarray, float]:
    """March psi from t0 to t1 with uniform steps of at most dt.

    Classical 4th-order Runge-Kutta for i psi' = H(t) psi, with the midpoint
    Hamiltonian shared between the two interior stages. Returns the final
    amplitudes and the largest norm drift seen during the segment.
    """
    span = t1 - t0
    if span <= 0:
        return psi, 0.0
    n_steps = max(1, int(np.ceil(span / dt - 1e-12)))
    h = span / n_steps
    drift = 0.0
    h_t = h_of_t(t0)
    for step in range(n_steps):
        t = t0 + step * h
        h_mid = h_of_t(t + 0.5 * h)
        h_end = h_of_t(t + h)
        k1 = -1j * (h_t @ psi)
        k2 = -1j * (h_mid @ (psi + 0.5 * h * k1))
        k3 = -1j * (h_mid @ (psi + 0.5 * h * k2))
        k4 = -1j * (h_end @ (psi + h * k3))
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        h_t = h_end
        step_drift = abs(np.linalg.norm(psi) - 1.0)
        drift = max(drift, step_drift)
        if step_drift > NORM_DRIFT_LIMIT:
            raise AccuracyError(
                f"norm drift {step_drift:.3e} exceeded {NORM_DRIFT_LIMIT:.1e} "
                f"at t = {t + h:.6e}; reduce dt", drift=step_drift)
    return psi, drift


def evolve_timedep(h_of_t: Callable[[float], np.ndarray], initial: QuantumState,
                   t_end: float, dt: float, omega_max: float | None = None,
                   store_times: Sequence[float] | None = None) -> EvolutionResult:
    """Integrate i psi' = H(t) psi with a fixed-step 4th-order scheme.

    Parameters
    ----------
    dt : float
        Step-size cap. Each stored interval is subdivided uniformly so the
        actual step never exceeds dt and store times are hit exactly.
    omega_max : float, optional
        Largest frequency in the model; when given, enforces the resolution
        guard dt <= (1/50) (2 pi / omega_max).
    store_times : sequence, optional
        Strictly increasing times at which to record the state (default:
        just 0 and t_end). Must end at t_end.

    Norm drift above 1e-6 at any step raises :class:`AccuracyError`; no
    renormalization is ever applied.
    """
    if dt <= 0:
        raise ConfigurationError("dt must be > 0")
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if omega_max is not None and omega_max > 0:
        dt_max = (2.0 * np.pi / omega_max) / 50.0
        if dt > dt_max * (1 + 1e-12):
            raise ConfigurationError(
                f"dt = {dt:.3e} violates the resolution guard "
                f"dt <= (1/50)(2 pi / omega_max) = {dt_max:.3e}")

    if store_times is None:
        store_times = [0.0, t_end] if t_end > 0 else [0.0]
    store_times = list(store_times)
    if abs(store_times[-1] - t_end) > 1e-15 * max(1.0, abs(t_end)):
        raise ValueError("store_times must end at t_end")

    mask = _top_level_mask(initial.shape)
    psi = initial.amplitudes.copy()
    t_now = 0.0
    states, leaks = [], []
    drift = 0.0
    for t in store_times:
        psi, seg_drift = _rk4_segment(h_of_t, psi, t_now, t, dt)
        drift = max(drift, seg_drift)
        t_now = t
        state = QuantumState(initial.shape, psi)
        states.append(state)
        leaks.append(float(np.sum(state.populations()[mask])))
    return EvolutionResult(np.asarray(store_times, dtype=float), states,
                           np.asarray(leaks), "timedep", norm_drift=drift)


def to_interaction_picture(state: QuantumState, params: SystemParams,
                           t: float) -> QuantumState:
    """Apply U0†(t) = exp(+i H0 t), diagonal in the |s, m, n> basis.

    Each basis state picks up exp(+i [nu (m + 1/2) + omega_c n
    + (omega_0 / 2) (+1 for e, -1 for g)] t); populations are unchanged.
    """
    sh = state.shape
    energies = np.empty(sh.total_dim)
    for s, m, n in sh.labels():
        sign = 1.0 if s == "e" else -1.0
        energies[sh.index(s, m, n)] = (params.nu * (m + 0.5)
                                       + params.omega_c * n
                                       + 0.5 * params.omega_0 * sign)
    return QuantumState(sh, np.exp(1j * energies * t) * state.amplitudes)
