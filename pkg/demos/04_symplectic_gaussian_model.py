#!/usr/bin/env python3
"""Symplectic structure of the identifiable subspace and coherent overlaps.

On identifiable directions the Markov covariance is a complex inner
product: its real part is the Fisher metric, its imaginary part a
symplectic form, and the complex structure J (with J^2 = -Id) rotates each
direction onto its conjugate quadrature.  A canonical basis
[q1, p1, q2, p2] makes the Gram matrix F + i Sigma with F diagonal and
Sigma in 2x2 blocks [[0, -1], [1, 0]] -- the data of a multimode Gaussian
model whose coherent states have overlaps

    <u|u'> = exp(-(1/8)(u-u')^T f (u-u') + i u^T Sigma u').

The script evaluates the canonical basis of the two-level model, checks
the normal form, and prints a few overlaps of the limit model.
"""
import numpy as np

from qsysid import (
    TwoLevelParams,
    coherent_overlap,
    complex_structure,
    symplectic_basis,
    two_level,
    two_level_reference,
    two_level_symplectic_basis,
    two_level_tangents,
)

p = TwoLevelParams(alpha=1.0, delta=0.2, omega=0.9, theta=0.5)
D = two_level(p)
basis = two_level_symplectic_basis(p)
ref = two_level_reference(p)

model = symplectic_basis(D, basis, "metric")
print("canonical basis Gram data (metric convention):")
print("  F diagonal:", np.array2string(np.diagonal(model.f), precision=6))
print("  closed form:", np.array2string(ref.symplectic_f, precision=6))
print("  Sigma:")
for row in model.sigma:
    print("    " + "  ".join(f"{x:+8.5f}" for x in row))
print(f"  block products F_q F_p: {model.f[0,0]*model.f[1,1]:.8f}, {model.f[2,2]*model.f[3,3]:.8f}")

d_alpha = two_level_tangents(p).physical[2]
J_alpha = complex_structure(D, d_alpha)
print("\nJ pairs the coupling direction with its conjugate quadrature;")
print(f"  ||J(J(dD)) + dD|| = {(complex_structure(D, J_alpha) + d_alpha).norm():.2e}")

limit = symplectic_basis(D, basis, "four_x")  # overlap scale
print("\ncoherent overlaps of the Gaussian limit model (four_x scale):")
u0 = np.zeros(4)
for u in ([1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0], [0, 0, 2, 0]):
    z = coherent_overlap(limit, np.array(u, float), u0)
    print(f"  <{u}|0> = {z:+.6f}   |.| = {abs(z):.6f}")
