"""Protocol layer: coupling tuning, pulse schedule, GHZ targets and scoring.

The scheme drives the carrier and the red sideband simultaneously. For one
4-state block the joint dynamics closes after an interaction time t_p with
mu t_p = p pi, and choosing couplings so that a t_p = pi/4 (equivalently
mu / a = 4 p) turns each basis state of the block into a maximally entangled
three-party state of ion, phonon pair and photon pair.

Four model levels can execute the same schedule: the closed-form block
propagator, the full Lamb-Dicke Hamiltonian, the dressed RWA Hamiltonian and
the time-dependent lab-frame model (scored after transforming back into the
interaction picture). Reports carry fidelity against the scheduled target,
the population that escaped the 4-state block, and all significantly occupied
basis states.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, TruncationError
from .evolution import (block_propagator, evolve_static, evolve_timedep,
                        to_interaction_picture, truncation_leak)
from .fock_core import HilbertShape, QuantumState, basis_state
from .hamiltonian import (BlockParams, SystemParams, block_basis_labels,
                          build_ld_hamiltonian, build_rwa_hamiltonian,
                          lab_hamiltonian_source)

MODEL_TAGS = ("block_analytic", "ld_full", "rwa_full", "lab_frame")

TUNING_RTOL = 1e-9
POPULATION_FLOOR = 1e-6
TRUNCATION_LIMIT = 1e-4

Label = tuple[str, int, int]


def format_label(label: Label) -> str:
    s, m, n = label
    return f"{s},{m},{n}"


def parse_label(text: str) -> Label:
    parts = text.split(",")
    if len(parts) != 3 or parts[0] not in ("g", "e"):
        raise ValueError(f"bad state label {text!r}, expected e.g. 'g,0,0'")
    return (parts[0], int(parts[1]), int(parts[2]))


@dataclass(frozen=True)
class ProtocolSchedule:
    """One pulse of the protocol: index p, time t_p = p pi / mu, the tuned
    coupling and the target state the pulse should produce."""

    p: int
    t_p: float
    a_t_product: float
    tuned_g: float
    block: BlockParams
    target: QuantumState


@dataclass(frozen=True)
class FidelityReport:
    """Score of one protocol run at a single time."""

    fidelity: float
    block_leakage: float
    populations: dict[str, float]
    model_tag: str
    norm: float


def tune_coupling(Omega: float, eta_c: float, p: int = 1) -> float:
    """Coupling g that satisfies the GHZ condition mu / a = 4 p for m = n = 1.

    g = Omega / (eta_c sqrt(16 p^2 - 1)); for p = 1 this is
    Omega / (eta_c sqrt(15)).
    """
    if eta_c <= 0:
        raise ValueError("eta_c must be > 0 to tune the coupling")
    if p < 1:
        raise ValueError("pulse index p must be >= 1")
    return Omega / (eta_c * math.sqrt(16.0 * p * p - 1.0))


def flip(s: str) -> str:
    return "e" if s == "g" else "g"


def target_state(initial_label: Label, shape: HilbertShape, m: int = 1,
                 n: int = 1, p: int = 1) -> QuantumState:
    """Post-pulse target for a basis initial state of the (m, n) block.

    initial |s, m-1, n-1>  ->  (-1)^p / sqrt(2) (|s, m-1, n-1> - i |s', m, n>)
    initial |s, m, n>      ->  (-1)^p / sqrt(2) (|s, m, n> - i |s', m-1, n-1>)

    with s' the flipped ion state. For m = n = 1, p = 1 this is the four-state
    table |g,0,0> -> -(1/sqrt2)(|g,0,0> - i|e,1,1>) and its companions.
    """
    s, mm, nn = initial_label
    if (mm, nn) == (m, n):
        partner = (flip(s), m - 1, n - 1)
    elif (mm, nn) == (m - 1, n - 1):
        partner = (flip(s), m, n)
    else:
        raise ValueError(
            f"initial label {format_label(initial_label)} is not in the "
            f"(m={m}, n={n}) block")
    sign = -1.0 if p % 2 else 1.0
    amps = np.zeros(shape.total_dim, dtype=complex)
    amps[shape.index(*initial_label)] = sign / math.sqrt(2.0)
    amps[shape.index(*partner)] = sign * (-1j) / math.sqrt(2.0)
    return QuantumState(shape, amps)


def fidelity(psi: QuantumState, target: QuantumState) -> float:
    """|<target|psi>|^2; symmetric and insensitive to global phases."""
    if psi.shape != target.shape:
        raise ValueError("states live on different Hilbert shapes")
    return float(abs(np.vdot(target.amplitudes, psi.amplitudes)) ** 2)


def ghz_schedule(params: SystemParams, m: int = 1, n: int = 1, p: int = 1,
                 shape: HilbertShape | None = None,
                 tune: bool = False) -> ProtocolSchedule:
    """Build the GHZ pulse schedule for the (m, n) block.

    With ``tune`` the coupling is replaced so that the effective coupling
    g cos(phi) satisfies the condition a t_p = pi / 4; otherwise the params
    must already satisfy mu / a = 4 p (relative tolerance 1e-9).
    """
    if shape is None:
        shape = HilbertShape(vib_dim=m + 1, cav_dim=n + 1)
    if tune:
        g_eff = tune_coupling(params.Omega, params.eta_c, p) / math.sqrt(m * n)
        cos_phi = math.cos(params.phi)
        if abs(cos_phi) < 1e-12:
            raise ConfigurationError(
                "cannot tune the coupling: effective coupling g cos(phi) "
                f"vanishes at phi = {params.phi!r}")
        params = replace(params, g=g_eff / cos_phi)
    block = BlockParams.from_params(params, m, n)
    ratio = block.mu / block.a if block.a != 0.0 else math.inf
    if abs(ratio - 4.0 * p) > TUNING_RTOL * 4.0 * p:
        raise ConfigurationError(
            f"params are not tuned for a GHZ pulse with p={p}: mu/a = {ratio!r}, "
            f"required {4 * p}; retry with tune=True or adjust g")
    t_p = p * math.pi / block.mu
    target = target_state(("g", m - 1, n - 1), shape, m=m, n=n, p=p)
    return ProtocolSchedule(p=p, t_p=t_p, a_t_product=block.a * t_p,
                            tuned_g=params.g, block=block, target=target)


def _block_indices(shape: HilbertShape, block: BlockParams) -> list[int]:
    return [shape.index(*lbl) for lbl in block_basis_labels(block.m, block.n)]


def _default_lab_dt(source, omega_max: float, t_end: float) -> float:
    """Step size for a lab-frame run: inside the resolution guard and small
    enough that the accumulated RK4 norm drift (about t lambda^6 dt^5 / 144,
    lambda the spectral radius of H) stays an order of magnitude below the
    1e-6 drift limit."""
    guard = (2.0 * math.pi / omega_max) / 50.0
    dt = guard / 1.28
    if t_end > 0:
        lam = float(np.max(np.abs(np.linalg.eigvalsh(source(0.0)))))
        if lam > 0:
            dt = min(dt, (144.0 * 1e-7 / (t_end * lam ** 6)) ** 0.2)
    return dt


def _evolve_states(params: SystemParams, initial_label: Label, model: str,
                   schedule: ProtocolSchedule, shape: HilbertShape,
                   times: np.ndarray, dt: float | None) -> list[QuantumState]:
    """Evolve the initial basis state to each requested time under the model."""
    run_params = replace(params, g=schedule.tuned_g)
    initial = basis_state(shape, *initial_label)

    if model == "block_analytic":
        labels = block_basis_labels(schedule.block.m, schedule.block.n)
        if initial_label not in labels:
            raise ValueError(
                f"initial state {format_label(initial_label)} is outside the "
                "4-state block; use a full-space model")
        start = np.zeros(4, dtype=complex)
        start[labels.index(initial_label)] = 1.0
        idx = _block_indices(shape, schedule.block)
        states = []
        for t in times:
            amp4 = block_propagator(schedule.block, float(t)) @ start
            amps = np.zeros(shape.total_dim, dtype=complex)
            amps[idx] = amp4
            states.append(QuantumState(shape, amps))
        return states

    if model == "ld_full":
        h = build_ld_hamiltonian(run_params, shape)
        return list(evolve_static(h, initial, times).states)
    if model == "rwa_full":
        h = build_rwa_hamiltonian(run_params, shape)
        return list(evolve_static(h, initial, times).states)
    if model == "lab_frame":
        source = lab_hamiltonian_source(run_params, shape)
        omega_max = run_params.max_frequency()
        if dt is None:
            dt = _default_lab_dt(source, omega_max, float(times[-1]))
        result = evolve_timedep(source, initial, float(times[-1]), dt,
                                omega_max=omega_max, store_times=times)
        return [to_interaction_picture(state, run_params, float(t))
                for state, t in zip(result.states, result.times)]
    raise ValueError(f"unknown model {model!r}, expected one of {MODEL_TAGS}")


def _score(state: QuantumState, target: QuantumState, block: BlockParams,
           model: str) -> FidelityReport:
    pops = state.populations()
    populations = {}
    for lbl in state.shape.labels():
        value = float(pops[state.shape.index(*lbl)])
        if value > POPULATION_FLOOR:
            populations[format_label(lbl)] = value
    if model == "block_analytic":
        leakage = 0.0
    else:
        in_block = sum(pops[i] for i in _block_indices(state.shape, block))
        leakage = max(float(1.0 - in_block), 0.0)
    return FidelityReport(
        fidelity=fidelity(state, target),
        block_leakage=leakage,
        populations=populations,
        model_tag=model,
        norm=state.norm(),
    )


def _check_truncation(shape: HilbertShape, states: Sequence[QuantumState],
                      model: str):
    if model == "block_analytic":
        return
    worst = max(truncation_leak(s) for s in states)
    if worst > TRUNCATION_LIMIT:
        raise TruncationError(
            f"top-level population {worst:.3e} exceeds {TRUNCATION_LIMIT:.1e}; "
            f"rerun with shape at least "
            f"{shape.vib_dim + 2}x{shape.cav_dim + 2}")


def protocol_timeseries(params: SystemParams, initial_label: Label, model: str,
                        schedule: ProtocolSchedule, times: Sequence[float],
                        shape: HilbertShape | None = None,
                        dt: float | None = None
                        ) -> list[tuple[float, FidelityReport]]:
    """Run the protocol and score the state at every requested time."""
    if shape is None:
        shape = schedule.target.shape
    times = np.asarray(times, dtype=float)
    target = target_state(initial_label, shape, m=schedule.block.m,
                          n=schedule.block.n, p=schedule.p)
    states = _evolve_states(params, initial_label, model, schedule, shape,
                            times, dt)
    _check_truncation(shape, states, model)
    return [(float(t), _score(state, target, schedule.block, model))
            for t, state in zip(times, states)]


def run_protocol(params: SystemParams, initial_label: Label, model: str,
                 schedule: ProtocolSchedule, shape: HilbertShape | None = None,
                 dt: float | None = None, n_times: int = 101) -> FidelityReport:
    """Evolve the initial state to t_p under the chosen model and score it.

    The run is sampled on a uniform grid (n_times points) so the truncation
    diagnostic sees the whole trajectory, not just the endpoint.
    """
    times = np.linspace(0.0, schedule.t_p, n_times)
    series = protocol_timeseries(params, initial_label, model, schedule, times,
                                 shape=shape, dt=dt)
    return series[-1][1]


SWEEP_AXES = ("eta_c", "eta_L", "phi", "p", "vib_dim", "cav_dim", "dt")


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: float
    t_p: float
    tuned_g: float
    report: FidelityReport


def _sweep_one(params: SystemParams, axis: str, value, initial_label: Label,
               model: str, shape: HilbertShape, m: int, n: int, p: int,
               dt: float | None, tune: bool) -> SweepPoint:
    if axis in ("eta_c", "eta_L", "phi"):
        params = replace(params, **{axis: float(value)})
    elif axis == "p":
        p = int(value)
    elif axis == "vib_dim":
        shape = HilbertShape(vib_dim=int(value), cav_dim=shape.cav_dim)
    elif axis == "cav_dim":
        shape = HilbertShape(vib_dim=shape.vib_dim, cav_dim=int(value))
    elif axis == "dt":
        dt = float(value)
    schedule = ghz_schedule(params, m=m, n=n, p=p, shape=shape, tune=tune)
    report = run_protocol(params, initial_label, model, schedule, shape=shape,
                          dt=dt)
    return SweepPoint(axis=axis, value=float(value), t_p=schedule.t_p,
                      tuned_g=schedule.tuned_g, report=report)


def sweep(params: SystemParams, axis: str, values: Sequence, initial_label: Label,
          model: str, shape: HilbertShape | None = None, m: int = 1, n: int = 1,
          p: int = 1, dt: float | None = None, tune: bool = True,
          threads: int | None = None) -> list[SweepPoint]:
    """One protocol run per axis value, fanned out over worker threads.

    Each point re-derives its schedule (retuning the coupling by default, so
    e.g. a phi sweep with tuning compensates the effective coupling g cos phi).
    Results preserve the order of ``values``.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; valid axes: "
                         f"{', '.join(SWEEP_AXES)}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if shape is None:
        shape = HilbertShape(vib_dim=max(m + 1, 2), cav_dim=max(n + 1, 2))
    if threads is None:
        threads = os.cpu_count() or 1
    threads = max(1, min(threads, len(values)))

    def job(value):
        return _sweep_one(params, axis, value, initial_label, model, shape,
                          m, n, p, dt, tune)

    if threads == 1:
        return [job(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, values))
