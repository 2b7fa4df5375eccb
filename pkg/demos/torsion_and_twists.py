"""
Torsion of finite complexes, twists and higher Euler characteristics
=====================================================================

A finite complex of matrices has Laplacians in each degree. For an exact
complex the alternating product of their determinants is 1. Twisting a
complex produces the higher torsion numbers, which have a closed binomial
form.
"""

import math

import numpy as np

from zetaforge import complexes

rng = np.random.default_rng(0)

# an exact complex R^1 -> R^2 -> R^1 built from random invertible changes of basis
U = [np.eye(n) + 0.3 * rng.standard_normal((n, n)) for n in (1, 2, 1)]
d0 = U[1] @ np.array([[1.0], [0.0]]) @ np.linalg.inv(U[0])
d1 = U[2] @ np.array([[0.0, 1.0]]) @ np.linalg.inv(U[1])
C = complexes.GradedComplex([d0, d1])
spec, betti = complexes.laplacian_spectra(C)
print("Betti numbers:", betti)
print("alternating determinant product:", complexes.det_virtual(spec))
print("torsion tau_1:", complexes.tau1(spec))

# higher torsion: choose spectra with tau_0 = tau_1 = 1 and compare the
# closed form of tau_2 with tau_1 of the twisted complex
ell = [0.3, -0.2, 0.5, 0.1]
# solve tau_1 = 0 for ell[1], then tau_0 = 0 for ell[0] (log scale)
ell[1] = (2 * ell[2] - 3 * ell[3])
ell[0] = ell[1] - ell[2] + ell[3]
spec = complexes.VirtualSpectra.from_lists({p: [math.exp(x)] for p, x in enumerate(ell)})
closed = complexes.tau_r(spec, 2)
twisted = complexes.tau1(complexes.twist(spec))
print(f"\ntau_2 closed form = {closed:.15f}, tau_1 of the twist = {twisted:.15f}")

# higher Euler characteristics: the circle has chi_0 = 0, the first nonzero is chi_1
for name, b in (("circle", [1, 1]), ("torus", [1, 2, 1]), ("sphere", [1, 0, 1])):
    r, value = complexes.chi_gen(b)
    print(f"{name:7s} Betti {b}: chi_gen = {value} in degree r = {r}")

# chi_gen is multiplicative under products, with degrees adding
b = complexes.betti_product([1, 1], [1, 2, 1])
print("circle x torus:", b, complexes.chi_gen(b))
