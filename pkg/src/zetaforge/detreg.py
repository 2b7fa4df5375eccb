"""Zeta-regularized determinants of spectral divisors.

Tails are reduced exactly to Hurwitz zeta values: for points b_n = a + d*n
(n >= n0) with multiplicity Q(b_n) = sum_k q_k b_n^k,

    sum_n Q(b_n) b_n^(-p s) = sum_k q_k d^(k - p s) zeta_H(p s - k, a/d + n0).

Characteristic functions det(D + lambda) shift the tail exactly (power 1) or
use the binomial expansion in lambda (other powers).
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, HypothesisError, PoleError
from .specfun import digamma, hurwitz_zeta, hurwitz_zeta_deriv

POLE_TOL = 1e-10
BINOMIAL_TOL = 1e-17


def _check_symbolic(d):
    if "materialized_cutoff" in d.meta:
        raise ConvergenceError(
            "divisor carries a materialized (truncated) tail; a symbolic tail is required")


def _tail_coeffs(tail, lam=0):
    """Coefficients of the multiplicity polynomial in the shifted variable x + lam."""
    if lam == 0:
        return [float(c) for c in tail.poly.coeffs]
    if isinstance(lam, complex) and lam.imag != 0:
        cs = [complex(c) for c in tail.poly.coeffs]
        out = [0j] * len(cs)
        for k, c in enumerate(cs):
            for j in range(k + 1):
                out[j] += c * math.comb(k, j) * (-lam) ** (k - j)
        return out
    return [float(c) for c in tail.poly.shifted(Fraction(float(lam.real if isinstance(lam, complex) else lam))).coeffs]


def _tail_beta(tail, lam=0):
    return (tail.offset + lam) / tail.step + tail.start


def _tail_pole_check(tail, s):
    p = tail.power
    for k in range(len(tail.poly.coeffs)):
        if tail.poly.coeffs[k] != 0 and abs(p * s - k - 1) < POLE_TOL:
            raise PoleError(f"tail zeta has a pole at s = {(k + 1) / p}", location=(k + 1) / p)


def tail_zeta(tail, s, lam=0, deriv=False):
    """Zeta function (or its s-derivative) of one tail, optionally shifted by lam (power 1 only)."""
    s = complex(s)
    _tail_pole_check(tail, s)
    p, d = tail.power, tail.step
    beta = _tail_beta(tail, lam)
    coeffs = _tail_coeffs(tail, lam)
    logd = math.log(d)
    total = []
    for k, q in enumerate(coeffs):
        if q == 0:
            continue
        u = p * s - k
        dk = cmath.exp((k - p * s) * logd)
        if deriv:
            total.append(q * dk * (-p * logd * hurwitz_zeta(u, beta) + p * hurwitz_zeta_deriv(u, beta)))
        else:
            total.append(q * dk * hurwitz_zeta(u, beta))
    return complex(math.fsum(t.real for t in total), math.fsum(t.imag for t in total))


def tail_zeta_laurent(tail, s0):
    """(residue, constant term) of a tail's zeta function at s0 (residue 0 if regular)."""
    p, d = tail.power, tail.step
    beta = _tail_beta(tail)
    residue, const = 0.0, 0j
    logd = math.log(d)
    for k, q in enumerate(tail.poly.coeffs):
        q = float(q)
        if q == 0:
            continue
        u = p * s0 - k
        if abs(u - 1) < POLE_TOL:
            residue += q / (p * d)
            const += -(q / d) * (digamma(beta) + logd)
        else:
            const += q * d ** (k - p * s0) * hurwitz_zeta(u, beta)
    return residue, const


def zeta_of_divisor(d, s, laurent=False):
    """Analytic continuation of sum m_k lambda_k^(-s) over the divisor (kernel excluded).

    With ``laurent=True`` a pole is not an error: the pair (residue, constant
    term) is returned instead.
    """
    _check_symbolic(d)
    s = complex(s)
    fin = sum(m * cmath.exp(-s * math.log(lam)) for lam, m in d.finite)
    if laurent:
        res, const = 0.0, complex(fin)
        for t in d.tails:
            r, c = tail_zeta_laurent(t, s)
            res += r
            const += c
        return res, const
    return fin + sum(tail_zeta(t, s) for t in d.tails)


def zeta_deriv_of_divisor(d, s):
    """s-derivative of :func:`zeta_of_divisor`."""
    _check_symbolic(d)
    s = complex(s)
    fin = sum(-m * math.log(lam) * cmath.exp(-s * math.log(lam)) for lam, m in d.finite)
    return fin + sum(tail_zeta(t, s, deriv=True) for t in d.tails)


def log_det_reg(d):
    """log det'(D) = -zeta'(0) (kernel excluded)."""
    return -zeta_deriv_of_divisor(d, 0.0).real


def det_reg(d):
    """Regularized determinant exp(-zeta'(0)) with kernel excluded."""
    return math.exp(log_det_reg(d))


# -- characteristic functions -------------------------------------------------

def _binomial_tail_logdet(tail, lam):
    """-zeta'(0) of the points tail^power + lam via the binomial expansion in lam."""
    # zeta_{+lam}(s) = sum_j binom(-s, j) lam^j Z(s + j); at s = 0 only the
    # linear coefficient of binom(-s, j) survives unless Z has a pole at j.
    total = [tail_zeta(tail, 0.0, deriv=True)]
    first = tail.first_point
    j = 1
    harmonic = 0.0
    while True:
        beta1 = (-1) ** j / j
        beta2 = (-1) ** j * harmonic / j
        res, const = tail_zeta_laurent(tail, float(j))
        term = lam**j * (beta1 * const + beta2 * res)
        total.append(term)
        if abs(lam / first) ** j < BINOMIAL_TOL and j > 2:
            break
        harmonic += 1.0 / j
        j += 1
        if j > 2000:
            raise ConvergenceError("binomial expansion did not converge")
    zp = complex(math.fsum(t.real for t in total), math.fsum(t.imag for t in total))
    return -zp


def log_char_fn(d, lam):
    """log det(D + lambda) (kernel included as eigenvalue 0); -inf at a zero."""
    _check_symbolic(d)
    lam = complex(lam)
    # move tail points into the finite part until the shifted tails are comfortably positive
    work = d
    for _ in range(100000):
        bad = False
        for t in work.tails:
            if t.power == 1 and (t.first_point + lam).real < t.step:
                bad = True
            if t.power != 1 and t.first_point < 2 * abs(lam):
                bad = True
        if not bad:
            break
        work = work.peel(1)
    else:
        raise ConvergenceError("could not move the tail into the supported region")
    terms = []
    points = list(work.finite) + ([(0.0, work.kernel)] if work.kernel else [])
    for x, m in points:
        z = x + lam
        if z == 0:
            return complex(-math.inf, 0.0)
        terms.append(m * cmath.log(z))
    for t in work.tails:
        if t.power == 1:
            terms.append(-tail_zeta(t, 0.0, lam=lam, deriv=True))
        else:
            terms.append(_binomial_tail_logdet(t, lam))
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def char_fn(d, lam):
    """det(D + lambda), entire in lambda with zeros of order m_k at -lambda_k."""
    val = log_char_fn(d, lam)
    if val.real == -math.inf:
        return 0.0 if not isinstance(lam, complex) else 0j
    out = cmath.exp(val)
    if not isinstance(lam, complex):
        return out.real
    return out


# -- heat expansions and large-lambda asymptotics -----------------------------

@dataclass(frozen=True)
class HeatExpansion:
    """Small-t expansion tr exp(-tD) ~ sum c_alpha t^alpha as (alpha, c_alpha) pairs."""

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple(sorted((float(a), float(c)) for a, c in self.terms))
        if any(terms[i][0] == terms[i + 1][0] for i in range(len(terms) - 1)):
            raise DomainError("exponents must be distinct")
        object.__setattr__(self, "terms", terms)

    def __call__(self, t):
        return sum(c * t**a for a, c in self.terms)


def heat_expansion(d, order=4):
    """Heat expansion of a divisor up to t^order.

    Singular terms come from the poles of Gamma(s) zeta_d(s): a tail term q_k x^k
    gives Gamma(w) q_k/(p step) t^(-w) with w = (k+1)/p, and the Gamma poles give
    zeta_d(-j) (-1)^j / j! t^j. Zero modes contribute to the constant term.
    """
    coeffs = {}
    for t in d.tails:
        for k, q in enumerate(t.poly.coeffs):
            if q == 0:
                continue
            w = (k + 1) / t.power
            coeffs[-w] = coeffs.get(-w, 0.0) + special.gamma(w) * float(q) / (t.power * t.step)
    for j in range(order + 1):
        res, const = zeta_of_divisor(d, -j, laurent=True)
        if res != 0:
            raise DomainError("coincident poles are not supported in heat_expansion")
        val = const.real * (-1) ** j / math.factorial(j)
        if j == 0:
            val += d.kernel
        coeffs[float(j)] = coeffs.get(float(j), 0.0) + val
    return HeatExpansion(tuple(coeffs.items()))


def char_fn_asymptotics(h, lam):
    """Large-lambda asymptotic value of -log det(D + lambda) from a heat expansion.

    Convention: exponents alpha = -k with k = 0, 1, 2, ... enter as
    -c_alpha (log lambda - H_k) (-lambda)^k / k! with H_k the k-th harmonic
    number; all other exponents give c_alpha Gamma(alpha) lambda^(-alpha).
    """
    total = 0.0
    for alpha, c in h.terms:
        if alpha <= 0 and alpha == int(alpha):
            k = int(-alpha)
            hk = sum(1.0 / j for j in range(1, k + 1))
            total -= c * (math.log(lam) - hk) * (-lam) ** k / math.factorial(k)
        else:
            total += c * special.gamma(alpha) * lam ** (-alpha)
    return total


# -- Fredholm determinants ----------------------------------------------------

@dataclass(frozen=True)
class FredholmResult:
    value: complex
    abs_error: float
    method: str


def fredholm_det(eigs, tail_abs_sum=0.0):
    """prod (1 + mu_k) over a finite eigenvalue list with a bound for omitted eigenvalues.

    ``tail_abs_sum`` bounds sum |mu| over eigenvalues not listed; the omitted
    factor then lies within exp(tail_abs_sum) - 1 of 1. When every |mu| < 1 the
    product is cross-checked against exp(sum_n (-1)^(n+1)/n tr T^n).
    """
    mu = np.asarray(list(eigs), dtype=complex)
    if tail_abs_sum < 0 or not math.isfinite(tail_abs_sum):
        raise ConvergenceError("tail bound is not finite")
    logs = np.log1p(mu) if mu.size else np.zeros(0)
    if mu.size and np.any(1 + mu == 0):
        return FredholmResult(0j, 0.0, "product")
    value = complex(np.exp(math.fsum(logs.real) + 1j * math.fsum(logs.imag)))
    if mu.size and np.max(np.abs(mu)) < 1:
        # exponential series form: sum_n (-1)^(n+1)/n tr T^n
        acc = 0j
        powk = mu.copy()
        for n in range(1, 2000):
            term = (-1) ** (n + 1) / n * powk.sum()
            acc += term
            if abs(term) < 1e-18 * max(1.0, abs(acc)):
                break
            powk = powk * mu
        alt = cmath.exp(acc)
        if abs(alt - value) > 1e-9 * max(1.0, abs(value)):
            raise ConvergenceError("product and exponential-series forms disagree")
    err = abs(value) * math.expm1(tail_abs_sum)
    if err >= abs(value) and tail_abs_sum > 0:
        raise ConvergenceError("tail bound too large for a meaningful product")
    return FredholmResult(value, err, "product")


def _tail_fredholm_log(tail, head=1000):
    """log prod (1 + 1/x) over a tail: explicit head plus convergent zeta series for the rest."""
    idx = np.arange(tail.start, tail.start + head)
    base = tail.offset + tail.step * idx
    pts = base**tail.power
    mult = np.array([float(tail.poly(Fraction(float(b)))) for b in base])
    head_log = math.fsum(mult * np.log1p(1.0 / pts))
    rest = type(tail)(tail.offset, tail.step, tail.start + head, tail.poly, tail.power)
    # log(1 + 1/x) = sum_k (-1)^(k+1) x^(-k) / k, summed against the tail multiplicities
    acc = []
    k = 1
    while True:
        zk = tail_zeta(rest, float(k)).real
        term = (-1) ** (k + 1) * zk / k
        acc.append(term)
        if abs(term) < 1e-18 or k > 200:
            break
        k += 1
    return head_log + math.fsum(acc)


def fredholm_vs_raySinger(d):
    """Compare det_Fr(1 + D^-1) with det(D + 1)/det(D).

    Returns (lhs, rhs, |lhs - rhs|). The Fredholm side multiplies the head of
    each tail explicitly and sums the remainder through convergent zeta values
    at positive integers; the right side uses the continuation at s = 0.
    """
    _check_symbolic(d)
    if d.kernel:
        raise HypothesisError("operator has a kernel; D^-1 is not defined")
    for t in d.tails:
        deg = t.poly.degree or 0
        if not t.power > deg + 1:
            raise HypothesisError(
                "D^(eps-1) is not trace class: tail growth must exceed degree + 1")
    log_lhs = math.fsum(m * math.log1p(1.0 / lam) for lam, m in d.finite)
    log_lhs += sum(_tail_fredholm_log(t) for t in d.tails)
    lhs = math.exp(log_lhs)
    rhs = char_fn(d, 1.0) / det_reg(d)
    return lhs, rhs, abs(lhs - rhs)


__all__ = [
    "zeta_of_divisor", "zeta_deriv_of_divisor", "det_reg", "log_det_reg", "char_fn",
    "log_char_fn", "HeatExpansion", "heat_expansion", "char_fn_asymptotics",
    "fredholm_det", "FredholmResult", "fredholm_vs_raySinger",
]
