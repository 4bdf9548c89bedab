#!/usr/bin/env python3
"""Stationary state and mixing of a driven two-level emitter.

We build the dynamics (H, L) of a laser-driven two-level atom with detuning
Delta, Rabi frequency Omega, emission rate alpha^2 and output phase theta:

    H = (1/2)(Delta sigma_z + Omega sigma_x),   L = alpha e^{i theta} |0><1|.

The script diagnoses ergodicity from the spectrum of the Heisenberg
generator W, compares the numerical stationary state against the closed
form

    rho_ss = (Omega/gamma) [[gamma/Omega - Omega, xi], [conj(xi), Omega]],
    gamma = alpha^4 + 4 Delta^2 + 2 Omega^2,  xi = 2 Delta + i alpha^2,

and shows the Heisenberg semigroup T_t contracting every observable onto
its stationary mean at the rate set by the spectral gap.
"""
import numpy as np

from qsysid import TwoLevelParams, semigroup_apply, stationary_state, two_level, two_level_reference

p = TwoLevelParams(alpha=1.0, delta=0.3, omega=1.1, theta=0.4)
D = two_level(p)
report = stationary_state(D)
ref = two_level_reference(p)

print("driven two-level system at", p)
print(f"  ergodic:              {report.ergodic}")
print(f"  zero eigenvalues of W: {report.zero_eigen_count}")
print(f"  spectral gap:         {report.spectral_gap:.6f}")
print(f"  min eig of rho_ss:    {report.min_stationary_eigenvalue:.6f}")
print(f"  |rho_ss - closed form|: {np.max(np.abs(report.stationary - ref.rho_ss)):.2e}")

X = np.array([[0.2, 0.7 - 0.1j], [0.7 + 0.1j, -0.5]])
mean = np.trace(report.stationary @ X)
print("\nsemigroup contraction of a test observable:")
print(f"  {'t*gap':>8}  {'|T_t(X) - <X>_ss id|':>22}")
for tg in (1, 5, 10, 25, 50):
    t = tg / report.spectral_gap
    dist = np.max(np.abs(semigroup_apply(D, t, X) - mean * np.eye(2)))
    print(f"  {tg:8.1f}  {dist:22.3e}")

print("\na non-ergodic example (pure decay, absorbing ground state):")
from qsysid import DynamicalParams

decay = stationary_state(DynamicalParams(np.zeros((2, 2)), [np.array([[0, 1], [0, 0]])]))
print(f"  ergodic: {decay.ergodic}  (min stationary eigenvalue {decay.min_stationary_eigenvalue:.1e})")
