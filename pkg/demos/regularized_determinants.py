"""
Zeta-regularized determinants
=============================

The product 1 * 2 * 3 * ... diverges, but its zeta-regularized value is
sqrt(2 pi). This script computes it, then checks two classical facts about
determinants of the form det(D + lambda).
"""

import math

from zetaforge import detreg, divisor, specfun

# Hurwitz zeta derivative at s = 0 reproduces log Gamma (Lerch's formula)
for a in (0.25, 0.5, 1.0, 2.5):
    lhs = specfun.hurwitz_zeta_sderiv0(a).real
    rhs = math.lgamma(a) - 0.5 * math.log(2 * math.pi)
    print(f"a = {a:4}:  d/ds zeta(0, a) = {lhs:.15f}   log Gamma(a) - log sqrt(2 pi) = {rhs:.15f}")

# the regularized product of the naturals
d = divisor.naturals()
print("\ndet(naturals)        =", detreg.det_reg(d))
print("sqrt(2 pi)           =", math.sqrt(2 * math.pi))

# shifting the spectrum: det(N + lambda) = sqrt(2 pi) / Gamma(1 + lambda)
for lam in (0.5, 1.0, 3.0):
    v = detreg.char_fn(d, lam)
    print(f"det(N + {lam}) = {v:.15f}   sqrt(2 pi)/Gamma(1 + lam) = {math.sqrt(2 * math.pi) / math.gamma(1 + lam):.15f}")

# for the squares the Fredholm product prod(1 + 1/n^2) = sinh(pi)/pi equals
# the quotient of regularized determinants det(A + 1)/det(A)
fred, quotient, diff = detreg.fredholm_vs_raySinger(divisor.naturals(2.0))
print(f"\nFredholm product     = {fred:.15f}")
print(f"det(A + 1)/det(A)    = {quotient:.15f}")
print(f"sinh(pi)/pi          = {math.sinh(math.pi) / math.pi:.15f}")
