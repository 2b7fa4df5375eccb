"""
Selberg and Ruelle zeta functions of a Schottky group
=====================================================

Two hyperbolic generators produce a free group. Its primitive closed
geodesics come from cyclically reduced words up to rotation. Their lengths
feed the Euler products of the Selberg and Ruelle zeta functions.
"""

import math

from zetaforge import geodesics, gzeta

G = geodesics.FuchsianGroup([[[7, 12], [4, 7]], [[3, 2], [4, 3]]])
spec = geodesics.schottky_lengths(G, 14.0)
lengths = spec.lengths()
print(f"{len(lengths)} primitive classes with length <= 14")
print("shortest lengths:", [round(float(x), 6) for x in lengths[:6]])
print("generator lengths from traces:", geodesics.length_from_trace(14), geodesics.length_from_trace(6))

# class counts grow exponentially; the slope bounds the convergence abscissa
print("estimated abscissa of convergence:", round(gzeta.estimate_abscissa(spec), 3))

# the double Euler product and the logarithmic class sum agree
for s in (2.0, 3.0, 2.5 + 1j):
    a = gzeta.log_selberg_Z(spec, s)
    b = gzeta.log_selberg_Z(spec, s, form="class_sum")
    R, diff = gzeta.ruelle_R(spec, s)
    print(f"s = {s}: log Z product {a:.12f}, class sum {b:.12f};  R = {R:.12f}, |R - Z(s)/Z(s+1)| = {diff:.1e}")
