"""
Dual theta functions, their poles and contour representations
==============================================================

The theta series sum_n Q(n) exp(-tau n) continues meromorphically through a
differential operator applied to a geometric series. This script compares
closed forms with series, locates the poles numerically and recovers a finite
theta sum from a contour integral.
"""

import math

import numpy as np

from zetaforge import specfun, theta

Q = specfun.PolyQ([0, 1], "odd")
for tau in (0.5, 1.0, 2.0):
    print(f"tau = {tau}: closed {theta.theta_dual(Q, tau):.15f}  series {theta.theta_dual_series(Q, tau):.15f}")

# poles of the linear kernel are double and sit on the imaginary axis
fits = theta.theta_dual_poles(Q, (-1, 1, -7, 7))
for f in fits:
    print(f"pole at {round(f.center.imag / math.pi, 6) + 0.0:+.6f} pi i, order {f.order}")

# the SL(2) kernel has poles only at even multiples of pi i
fits = theta.theta_dual_poles(specfun.PolyQ([0, 2], "odd"), (-1, 1, -7, 7), kernel=(0.5, 1))
report = theta.pole_report(fits, math.pi, 2, (-1, 1, -7, 7))
print("SL(2) poles at", [f"{round(f.center.imag / math.pi, 3) + 0.0:+.3f} pi i" for f in fits])
print("expected poles not found:", [f"{c.imag / math.pi:+.0f} pi i" for c in report["missing_claimed"]])

# finite part of the digamma difference equals a tanh
for t in (0.5, 1.0, 2.0):
    lhs, rhs = theta.finite_part_identity(Q, t)
    print(f"t = {t}: digamma side {lhs:.12f}   tanh side {rhs:.12f}")

# a finite spectrum recovered by contour integration
a = np.array([0.0, 0.4, 1.3, 1.3, 2.7])
tau = 0.8
print(f"\ncontour theta {theta.contour_theta(a, tau):.15f}  direct sum {np.exp(-tau * a).sum():.15f}")
rep = theta.f_identity(2.0, 1, [0.5, 1.0])
print("f(0) =", rep["f0"], " max |f(tau) + f(-tau) + 2 n0| =", rep["max_sum_err"])
