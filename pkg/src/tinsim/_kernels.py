"""Compiled sequential update loops for the mode simulator.

The state-dependent substeps (intracavity force, amplitude-dependent
damping) make the recursion inherently sequential, so it is compiled once
with numba.  All randomness is pre-drawn outside; the kernel is pure
arithmetic and bit-deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def evolve_modes(
    a0,            # complex128[n_modes]      initial rotating amplitudes
    decay,         # complex128[n_modes]      exp((i*omega - gamma/2) dt)
    noise,         # complex128[n_modes, n]   pre-drawn OU increments
    coef,          # float64[n_modes]         2*G_k/kappa  (nu per metre)
    force_gain,    # float64[n_modes]         hbar*G_k*n_c0*dt/(m_k*omega_k)
    beta_step,     # float64[n_modes]         beta_nl_k * m_k*omega_k^2/2 * dt/2
    nu0,           # float64                  operating detuning
    nu_noise,      # float64[n]               classical detuning noise (or len 0)
    rp_on,         # bool                     apply the intracavity force
    x_out,         # float64[n_modes, n]      output displacements
):
    n_modes = a0.shape[0]
    n = x_out.shape[1]
    a = a0.copy()
    l_ref = 1.0 / (1.0 + nu0 * nu0)
    has_cl = nu_noise.shape[0] == n
    for i in range(n):
        nu = nu0
        if has_cl:
            nu += nu_noise[i]
        for k in range(n_modes):
            x_out[k, i] = a[k].real
            nu -= coef[k] * a[k].real
        if rp_on:
            # fluctuating part of the adiabatic force F = -hbar G n_c(nu);
            # da/dt includes -i F/(m omega), so the kick is
            # +i * hbar G n_c0 (|L|^2 - |L(nu0)|^2) * dt/(m omega)
            dl = 1.0 / (1.0 + nu * nu) - l_ref
            for k in range(n_modes):
                a[k] += 1j * (force_gain[k] * dl)
        for k in range(n_modes):
            if beta_step[k] != 0.0:
                energy = (a[k].real ** 2 + a[k].imag ** 2)
                a[k] *= np.exp(-beta_step[k] * energy)
            a[k] = a[k] * decay[k] + noise[k, i]
