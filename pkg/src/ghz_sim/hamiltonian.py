"""Hamiltonians for a trapped two-level ion coupled to its motion and a cavity mode.

Four levels of approximation are built here, all in units hbar = 1 with every
frequency an angular frequency in rad/s:

* lab frame: H0 + H_int with the full operator-valued laser phase
  exp(i eta_L (a† + a)) and standing-wave coupling sin(eta_c (a† + a) + phi),
  explicitly time dependent through the laser phase exp(-i omega_L t);
* interaction picture after the rotating-wave approximation (carrier resonant,
  red sideband resonant): time independent, carrier dressed by the diagonal
  operator O_0 and sideband by eta_c a† O_1;
* its Lamb-Dicke limit, keeping only the lowest order in eta_L and eta_c;
* the 4x4 block restriction to {|g,m,n>, |e,m,n>, |g,m-1,n-1>, |e,m-1,n-1>}.

Operator functions (exp, sin) of the quadrature eta (a† + a) are evaluated by
eigendecomposition of the Hermitian quadrature, which is exact within the
truncated space; no Taylor truncation is involved.

Standing-wave offset: when the trap centre sits a phase phi away from the node,
the lab-frame coupling keeps phi inside the sine, while every approximate model
replaces g by the effective coupling g cos(phi) (see :func:`effective_coupling`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .fock_core import HilbertShape, kron3, ladder_ops, pauli_ops

RESONANCE_RTOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the ion-cavity system (angular frequencies, rad/s).

    Attributes
    ----------
    Omega : float
        Ion-laser (carrier) coupling.
    g : float
        Ion-cavity coupling.
    eta_L, eta_c : float
        Lamb-Dicke parameters of the laser and cavity fields.
    nu : float
        Trap frequency.
    omega_0, omega_c, omega_L : float
        Ion transition, cavity and laser frequencies.
    phi : float
        Standing-wave node offset phase, radians.
    """

    Omega: float
    g: float
    eta_L: float
    eta_c: float
    nu: float
    omega_0: float
    omega_c: float
    omega_L: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("Omega", "g", "nu", "omega_0", "omega_c", "omega_L"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.eta_L < 0 or self.eta_c < 0:
            raise ValueError("Lamb-Dicke parameters must be >= 0")

    def carrier_resonant(self, rtol: float = RESONANCE_RTOL) -> bool:
        """Laser on the carrier: omega_L = omega_0."""
        scale = max(abs(self.omega_L), abs(self.omega_0), 1.0)
        return abs(self.omega_L - self.omega_0) <= rtol * scale

    def red_sideband_resonant(self, rtol: float = RESONANCE_RTOL) -> bool:
        """Cavity on the red sideband: omega_0 - omega_c = nu."""
        scale = max(abs(self.omega_0), abs(self.omega_c), abs(self.nu), 1.0)
        return abs((self.omega_0 - self.omega_c) - self.nu) <= rtol * scale

    def require_resonances(self):
        if not self.carrier_resonant():
            raise ConfigurationError(
                "carrier condition omega_L = omega_0 violated: "
                f"omega_L={self.omega_L!r}, omega_0={self.omega_0!r}"
            )
        if not self.red_sideband_resonant():
            raise ConfigurationError(
                "red-sideband condition omega_0 - omega_c = nu violated: "
                f"omega_0 - omega_c = {self.omega_0 - self.omega_c!r}, nu={self.nu!r}"
            )

    def max_frequency(self) -> float:
        return max(self.Omega, self.g, self.nu, self.omega_0, self.omega_c, self.omega_L)


def effective_coupling(g: float, phi: float) -> float:
    """Cavity coupling seen by an ion displaced phi from the standing-wave node."""
    return g * math.cos(phi)


@dataclass(frozen=True)
class BlockParams:
    """Derived couplings of one 4-state block.

    a = g_eff * eta_c * sqrt(m n) with g_eff = g cos(phi),
    mu = sqrt(a^2 + Omega^2).
    """

    m: int
    n: int
    Omega: float
    a: float
    mu: float

    @classmethod
    def from_params(cls, params: SystemParams, m: int, n: int) -> "BlockParams":
        if m < 1 or n < 1:
            raise ValueError("block indices m, n must be >= 1")
        # sqrt(m)*sqrt(n), not sqrt(m*n): matches the Kronecker-product float
        # path bit for bit, so the 4x4 equals the full-LD restriction exactly
        a = (effective_coupling(params.g, params.phi) * params.eta_c
             * (math.sqrt(m) * math.sqrt(n)))
        return cls(m=m, n=n, Omega=params.Omega, a=a, mu=math.hypot(a, params.Omega))


def _o_k_entry(k: int, eta: float, m: int) -> float:
    """Diagonal matrix element <m| O_k |m> of the dressing operator.

    Finite series exp(-eta^2/2) sum_{p=0}^{m} (-eta^2)^p m! / (p! (p+k)! (m-p)!);
    the (i eta)^(2p) factor of the operator series is (-eta^2)^p, so entries are real.
    """
    total = 0.0
    for p in range(m + 1):
        total += (
            (-(eta * eta)) ** p
            * math.factorial(m)
            / (math.factorial(p) * math.factorial(p + k) * math.factorial(m - p))
        )
    return math.exp(-(eta * eta) / 2.0) * total


def build_O_k(k: int, eta: float, dim: int) -> np.ndarray:
    """Diagonal dressing operator O_k on a vibrational space of ``dim`` levels."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return np.diag([_o_k_entry(k, eta, m) for m in range(dim)]).astype(complex)


def matrix_element_F_L(m: int, eta_L: float) -> float:
    """Carrier dressing F^L_{m,m} = <m| O_0(eta_L) |m>; tends to 1 as eta_L -> 0."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return _o_k_entry(0, eta_L, m)


def matrix_element_F_c(m: int, eta_c: float) -> float:
    """Sideband dressing F^c_{m,m-1} = <m| eta_c a† O_1(eta_c) |m-1> = eta_c sqrt(m) <m-1|O_1|m-1>.

    Tends to eta_c * sqrt(m) in the Lamb-Dicke limit. Requires m >= 1.
    """
    if m < 1:
        raise ValueError("F^c_{m,m-1} needs m >= 1")
    return eta_c * math.sqrt(m) * _o_k_entry(1, eta_c, m - 1)


def _quadrature_functions(eta_L: float, eta_c: float, phi: float,
                          dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(exp(i eta_L x), sin(eta_c x + phi)) of the vibrational quadrature x = a† + a,
    via eigendecomposition of the Hermitian quadrature."""
    lower, upper = ladder_ops(dim)
    x = lower + upper
    evals, vecs = np.linalg.eigh(x)
    exp_op = (vecs * np.exp(1j * eta_L * evals)) @ vecs.conj().T
    sin_op = (vecs * np.sin(eta_c * evals + phi)) @ vecs.conj().T
    return exp_op, sin_op


def lab_hamiltonian_source(params: SystemParams,
                           shape: HilbertShape) -> Callable[[float], np.ndarray]:
    """Time-dependent lab-frame Hamiltonian H(t) = H0 + H_int(t) as a callable.

    The static part (free evolution plus the cavity standing-wave term) and the
    laser coupling matrix are precomputed; per call only the scalar laser phase
    exp(-i omega_L t) is applied.
    """
    M, N = shape.vib_dim, shape.cav_dim
    a_low, a_up = ladder_ops(M)
    b_low, b_up = ladder_ops(N)
    sigma_z, sigma_p, sigma_m = pauli_ops()
    eye_i = np.eye(2, dtype=complex)
    eye_v = np.eye(M, dtype=complex)
    eye_c = np.eye(N, dtype=complex)

    h_free = (
        params.nu * kron3(eye_i, a_up @ a_low + 0.5 * eye_v, eye_c)
        + params.omega_c * kron3(eye_i, eye_v, b_up @ b_low)
        + 0.5 * params.omega_0 * kron3(sigma_z, eye_v, eye_c)
    )
    exp_op, sin_op = _quadrature_functions(params.eta_L, params.eta_c, params.phi, M)
    h_cavity = params.g * kron3(sigma_p + sigma_m, sin_op, b_up + b_low)
    laser_up = params.Omega * kron3(sigma_p, exp_op, eye_c)
    h_static = h_free + h_cavity

    def h_of_t(t: float) -> np.ndarray:
        phase = np.exp(-1j * params.omega_L * t)
        return h_static + phase * laser_up + np.conj(phase) * laser_up.conj().T

    return h_of_t


def build_lab_hamiltonian(params: SystemParams, shape: HilbertShape,
                          t: float) -> np.ndarray:
    """Full lab-frame Hamiltonian H0 + H_int at time t (Hermitian at every t)."""
    return lab_hamiltonian_source(params, shape)(t)


def build_rwa_hamiltonian(params: SystemParams, shape: HilbertShape) -> np.ndarray:
    """Interaction-picture Hamiltonian after the rotating-wave approximation.

    H = Omega (sigma_+ + sigma_-) O_0(eta_L)
        + g_eff [sigma_+ b (eta_c O_1(eta_c) a) + h.c.]

    so that <g,m,n|H|e,m,n> = Omega F^L_{m,m} and
    <g,m,n|H|e,m-1,n-1> = g_eff F^c_{m,m-1} sqrt(n). Time independent; requires
    the carrier and red-sideband resonance conditions.
    """
    params.require_resonances()
    M, N = shape.vib_dim, shape.cav_dim
    a_low, _ = ladder_ops(M)
    b_low, _ = ladder_ops(N)
    _, sigma_p, sigma_m = pauli_ops()
    eye_c = np.eye(N, dtype=complex)

    o0 = build_O_k(0, params.eta_L, M)
    o1 = build_O_k(1, params.eta_c, M)
    g_eff = effective_coupling(params.g, params.phi)

    carrier = params.Omega * kron3(sigma_p + sigma_m, o0, eye_c)
    sideband_up = g_eff * params.eta_c * kron3(sigma_p, o1 @ a_low, b_low)
    return carrier + sideband_up + sideband_up.conj().T


def build_ld_hamiltonian(params: SystemParams, shape: HilbertShape) -> np.ndarray:
    """Lamb-Dicke limit of the RWA Hamiltonian (lowest order in eta_L, eta_c).

    H = Omega (sigma_+ + sigma_-) + g_eff eta_c (sigma_+ a b + sigma_- a† b†),
    equal to :func:`build_rwa_hamiltonian` up to O(eta^2) corrections.
    """
    params.require_resonances()
    M, N = shape.vib_dim, shape.cav_dim
    a_low, a_up = ladder_ops(M)
    b_low, b_up = ladder_ops(N)
    _, sigma_p, sigma_m = pauli_ops()
    eye_v = np.eye(M, dtype=complex)
    eye_c = np.eye(N, dtype=complex)

    g_eff = effective_coupling(params.g, params.phi)
    return (
        params.Omega * kron3(sigma_p + sigma_m, eye_v, eye_c)
        + g_eff * params.eta_c * (kron3(sigma_p, a_low, b_low)
                                  + kron3(sigma_m, a_up, b_up))
    )


BLOCK_BASIS = ("g,m,n", "e,m,n", "g,m-1,n-1", "e,m-1,n-1")


def block_basis_labels(m: int, n: int) -> tuple[tuple[str, int, int], ...]:
    """Concrete (s, m, n) labels of the 4-state block, in block basis order."""
    return (("g", m, n), ("e", m, n), ("g", m - 1, n - 1), ("e", m - 1, n - 1))


def build_block_hamiltonian(params: SystemParams, m: int, n: int,
                            ld_limit: bool = True) -> tuple[np.ndarray, BlockParams]:
    """4x4 Hamiltonian on (|g,m,n>, |e,m,n>, |g,m-1,n-1>, |e,m-1,n-1>).

    With ``ld_limit`` the couplings are (Omega, Omega, a = g_eff eta_c sqrt(mn));
    without, the dressed values (Omega F^L_{m,m}, Omega F^L_{m-1,m-1},
    g_eff F^c_{m,m-1} sqrt(n)).
    """
    if m < 1 or n < 1:
        raise ValueError("block indices m, n must be >= 1")
    block = BlockParams.from_params(params, m, n)
    if ld_limit:
        carrier_up = carrier_dn = params.Omega
        sideband = block.a
    else:
        carrier_up = params.Omega * matrix_element_F_L(m, params.eta_L)
        carrier_dn = params.Omega * matrix_element_F_L(m - 1, params.eta_L)
        sideband = (effective_coupling(params.g, params.phi)
                    * matrix_element_F_c(m, params.eta_c) * math.sqrt(n))
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = h[1, 0] = carrier_up
    h[2, 3] = h[3, 2] = carrier_dn
    h[0, 3] = h[3, 0] = sideband
    return h, block
