import math

from ghz_sim.ghz_protocol import tune_coupling
from ghz_sim.hamiltonian import SystemParams


def scaled_params(Omega=8.95e6, eta_c=0.05, eta_L=0.05, g=None, phi=0.0,
                  nu_ratio=20.0, omega0_ratio=200.0):
    """Resonant parameter set with the scaled hierarchy nu = nu_ratio * Omega,
    omega_0 = omega0_ratio * nu; g defaults to the tuned p=1 value."""
    nu = nu_ratio * Omega
    omega_0 = omega0_ratio * nu
    if g is None:
        g = tune_coupling(Omega, eta_c, 1)
    return SystemParams(Omega=Omega, g=g, eta_L=eta_L, eta_c=eta_c, nu=nu,
                        omega_0=omega_0, omega_c=omega_0 - nu, omega_L=omega_0,
                        phi=phi)


def o_k_series(k: int, eta: float, m: int) -> float:
    """Independent brute-force evaluation of <m|O_k|m>: the finite series
    exp(-eta^2/2) sum_p (-eta^2)^p m! / (p! (p+k)! (m-p)!)."""
    total = 0.0
    for p in range(m + 1):
        total += ((-(eta ** 2)) ** p * math.factorial(m)
                  / (math.factorial(p) * math.factorial(p + k)
                     * math.factorial(m - p)))
    return math.exp(-(eta ** 2) / 2.0) * total
