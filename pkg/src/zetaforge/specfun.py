"""Special-function substrate.

Hurwitz zeta with analytic continuation (Euler-Maclaurin), its s-derivative,
digamma and log-gamma wrappers, exact Bernoulli numbers, and the exact
polynomial type :class:`PolyQ` used for multiplicity polynomials.
"""

import cmath
import math
import warnings
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import DomainError, PoleError, ValidationError

# Euler-Maclaurin defaults: shift M and number of Bernoulli corrections.
EM_SHIFT = 30
EM_ORDER = 25
POLE_EPS = 1e-12
MAX_DIFFOP_DEGREE = 32
# Hurwitz's Fourier series is used for Re(s) at or below this abscissa.
FOURIER_ABSCISSA = -7.0
FOURIER_TERMS = 400


@lru_cache(maxsize=None)
def bernoulli_table(n):
    """Exact Bernoulli numbers B_0..B_n as a tuple of Fractions (B_1 = -1/2)."""
    table = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * table[k]
        table.append(-acc / (m + 1))
    return tuple(table)


def bernoulli_poly(n, x):
    """Bernoulli polynomial B_n(x); exact when x is a Fraction or int."""
    b = bernoulli_table(n)
    return sum(math.comb(n, k) * b[k] * x ** (n - k) for k in range(n + 1))


def _fsum_complex(terms):
    re = math.fsum(t.real for t in terms)
    im = math.fsum(t.imag for t in terms)
    return complex(re, im)


@lru_cache(maxsize=None)
def _em_coefficients(order):
    b = bernoulli_table(2 * order)
    return tuple(float(b[2 * k] / math.factorial(2 * k)) for k in range(1, order + 1))


def _choose_shift(s, a, order, shift):
    """Smallest shift making the Euler-Maclaurin remainder negligible.

    For Re(s) < 1/2 the direct sum cancels against the integral term, so the
    shift is kept as small as the asymptotic series allows. Otherwise the
    default shift is a floor.
    """
    if shift is not None:
        return shift
    coeff = _em_coefficients(order)
    m = 0 if s.real < 0.5 else EM_SHIFT
    while True:
        x = abs(m + a)
        if x > 0:
            # size of the last retained correction relative to the leading term
            poch = 1.0
            for i in range(2 * order - 1):
                poch *= abs(s + i) / x
            last = abs(coeff[-1]) * poch
            if last * abs(s - 1) < 1e-17 or _terminates(s, order):
                return m
        m += 1 if m < 64 else 16
        if m > 10000:
            return m


def _terminates(s, order):
    """True when s is a nonpositive integer whose Pochhammer series ends early."""
    return s.imag == 0 and s.real <= 0 and s.real == int(s.real) and -s.real < 2 * order - 1


def _check_args(s, a, pole_eps):
    s = complex(s)
    a = complex(a)
    if a.real <= 0:
        raise DomainError(f"Hurwitz parameter must have Re(a) > 0, got {a}")
    if abs(s - 1) < pole_eps:
        raise PoleError("Hurwitz zeta has a pole at s = 1", location=1.0)
    return s, a


def _is_nonpos_int(s):
    return s.imag == 0 and s.real <= 0 and s.real == int(s.real)


def _use_fourier(s, a):
    """Hurwitz's Fourier series is used far left of the critical strip for real a."""
    return s.real <= FOURIER_ABSCISSA and a.imag == 0 and a.real < 1 - s.real


def _fourier_parts(s, a):
    """Trigonometric sums for Hurwitz's formula at sigma = 1 - s, a reduced into (0, 1]."""
    sigma = 1 - s
    n = np.arange(1, FOURIER_TERMS + 1, dtype=float)
    logn = np.log(n)
    npow = np.exp(-sigma * logn)
    cs = np.cos(2 * np.pi * n * a)
    sn = np.sin(2 * np.pi * n * a)
    C = complex(np.sum(cs * npow))
    S = complex(np.sum(sn * npow))
    dC = complex(-np.sum(logn * cs * npow))
    dS = complex(-np.sum(logn * sn * npow))
    G = 2 * cmath.exp(special.loggamma(sigma) - sigma * math.log(2 * math.pi))
    return sigma, G, C, S, dC, dS


def _reduce_real_a(s, a):
    """Write zeta(s, a) = zeta(s, a0) + correction with a0 in (0, 1]."""
    j = math.ceil(a.real) - 1
    a0 = a.real - j
    return a0, [a0 + i for i in range(j)]


def _hurwitz_fourier(s, a):
    a0, extra = _reduce_real_a(s, a)
    sigma, G, C, S, _, _ = _fourier_parts(s, a0)
    c, sn = cmath.cos(math.pi * sigma / 2), cmath.sin(math.pi * sigma / 2)
    terms = [G * (c * C + sn * S)]
    terms += [-cmath.exp(-s * math.log(x)) for x in extra]
    return _fsum_complex(terms)


def _hurwitz_fourier_deriv(s, a):
    a0, extra = _reduce_real_a(s, a)
    sigma, G, C, S, dC, dS = _fourier_parts(s, a0)
    c, sn = cmath.cos(math.pi * sigma / 2), cmath.sin(math.pi * sigma / 2)
    dG = G * (complex(special.psi(sigma)) - math.log(2 * math.pi))
    h = math.pi / 2
    dsigma = dG * (c * C + sn * S) + G * (-h * sn * C + h * c * S + c * dC + sn * dS)
    terms = [-dsigma]
    terms += [math.log(x) * cmath.exp(-s * math.log(x)) for x in extra]
    return _fsum_complex(terms)


def _use_hermite(s, a):
    """Hermite's integral covers the strip between the Fourier region and s = -1/2."""
    return FOURIER_ABSCISSA < s.real < -0.5 and abs(s.imag) <= 10 and a.imag == 0


def _hermite_integral(s, a, deriv):
    """2 * int_0^T sin(s theta) (a^2+t^2)^(-s/2) / (e^{2 pi t} - 1) dt, or its s-derivative."""

    def f(t, part):
        if t == 0.0:
            return 0.0
        th = math.atan2(t, a)
        r = 0.5 * math.log(a * a + t * t)
        w = cmath.exp(-s * r) / math.expm1(2 * math.pi * t)
        if deriv:
            v = (th * cmath.cos(s * th) - r * cmath.sin(s * th)) * w
        else:
            v = cmath.sin(s * th) * w
        return v.real if part == 0 else v.imag

    upper = 12.0 + abs(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(f, 0, upper, args=(0,), epsabs=1e-300, epsrel=1e-13, limit=200)[0]
        im = integrate.quad(f, 0, upper, args=(1,), epsabs=1e-300, epsrel=1e-13, limit=200)[0]
    return 2 * complex(re, im)


def _hurwitz_hermite(s, a):
    a = a.real
    la = math.log(a)
    terms = [0.5 * cmath.exp(-s * la), a * cmath.exp(-s * la) / (s - 1),
             _hermite_integral(s, a, False)]
    return _fsum_complex(terms)


def _hurwitz_hermite_deriv(s, a):
    a = a.real
    la = math.log(a)
    xs = cmath.exp(-s * la)
    terms = [-0.5 * la * xs, a * xs * (-la / (s - 1) - 1 / (s - 1) ** 2),
             _hermite_integral(s, a, True)]
    return _fsum_complex(terms)


def hurwitz_zeta(s, a, shift=None, order=EM_ORDER, pole_eps=POLE_EPS):
    """Analytic continuation of sum_{n>=0} (n+a)^(-s).

    Euler-Maclaurin summation after ``shift`` explicit terms with ``order``
    Bernoulli corrections. At nonpositive integers with real a the exact
    Bernoulli polynomial value is used. For real a the Euler-Maclaurin form
    cancels catastrophically left of the critical line, so Hermite's integral
    is used for -7 < Re s < -1/2 and Hurwitz's Fourier series for Re s <= -7.
    Returns a Python complex.
    """
    s, a = _check_args(s, a, pole_eps)
    if shift is None and _is_nonpos_int(s) and a.imag == 0:
        k = -int(s.real)
        return complex(float(-bernoulli_poly(k + 1, Fraction(a.real)) / (k + 1)))
    if shift is None and _use_fourier(s, a):
        return _hurwitz_fourier(s, a)
    if shift is None and _use_hermite(s, a):
        return _hurwitz_hermite(s, a)
    m = _choose_shift(s, a, order, shift)
    terms = [cmath.exp(-s * cmath.log(n + a)) for n in range(m)]
    x = m + a
    logx = cmath.log(x)
    xs = cmath.exp(-s * logx)
    terms.append(x * xs / (s - 1))
    terms.append(0.5 * xs)
    coeff = _em_coefficients(order)
    poch = s
    xpow = xs / x
    for k in range(1, order + 1):
        if poch == 0:
            break
        terms.append(coeff[k - 1] * poch * xpow)
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        xpow /= x * x
    return _fsum_complex(terms)


def hurwitz_zeta_deriv(s, a, shift=None, order=EM_ORDER, pole_eps=POLE_EPS):
    """d/ds of the Hurwitz zeta function via term-wise differentiated Euler-Maclaurin.

    Uses the differentiated Fourier series in the same region as :func:`hurwitz_zeta`.
    """
    s, a = _check_args(s, a, pole_eps)
    if shift is None and _use_fourier(s, a):
        return _hurwitz_fourier_deriv(s, a)
    if shift is None and _use_hermite(s, a):
        return _hurwitz_hermite_deriv(s, a)
    m = _choose_shift(s, a, order, shift)
    if _terminates(s, order):
        # the derivative series does not terminate; the shift must make it converge
        m = max(m, _choose_shift(s + 0.5j, a, order, None))
    terms = []
    for n in range(m):
        lg = cmath.log(n + a)
        terms.append(-lg * cmath.exp(-s * lg))
    x = m + a
    logx = cmath.log(x)
    xs = cmath.exp(-s * logx)
    terms.append(x * xs * (-logx / (s - 1) - 1 / (s - 1) ** 2))
    terms.append(-0.5 * logx * xs)
    coeff = _em_coefficients(order)
    xpow = xs / x
    for k in range(1, order + 1):
        # Pochhammer (s)_{2k-1} and its derivative by the product rule
        factors = [s + i for i in range(2 * k - 1)]
        poch = 1.0 + 0j
        for f in factors:
            poch *= f
        dpoch = 0j
        for i in range(len(factors)):
            p = 1.0 + 0j
            for j, f in enumerate(factors):
                if j != i:
                    p *= f
            dpoch += p
        terms.append(coeff[k - 1] * (dpoch - logx * poch) * xpow)
        xpow /= x * x
    return _fsum_complex(terms)


def hurwitz_zeta_sderiv0(a, **kwargs):
    """The s-derivative of zeta(s, a) at s = 0, equal to log Gamma(a) - log(2 pi)/2."""
    return hurwitz_zeta_deriv(0.0, a, **kwargs)


def hurwitz_laurent_at_one(a):
    """Laurent data (residue, constant term) of zeta(s, a) at s = 1: (1, -psi(a))."""
    return 1.0, -digamma(a)


def digamma(x):
    """Digamma function for real or complex x (scipy), with a pole check."""
    xc = complex(x)
    if xc.imag == 0 and xc.real <= 0 and xc.real == math.floor(xc.real):
        raise PoleError(f"digamma has a pole at {xc.real}", location=xc.real)
    if isinstance(x, complex) or xc.imag != 0:
        return complex(special.psi(xc))
    return float(special.psi(xc.real))


def loggamma(x):
    """Principal branch of log Gamma (scipy)."""
    if isinstance(x, complex):
        return complex(special.loggamma(x))
    return float(special.loggamma(x))


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(c)


class PolyQ:
    """Polynomial with exact rational coefficients (ascending degree) and a parity flag."""

    __slots__ = ("coeffs", "parity")

    def __init__(self, coeffs, parity="none"):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if parity not in ("even", "odd", "none"):
            raise ValidationError(f"unknown parity {parity!r}")
        bad = 0 if parity == "odd" else 1 if parity == "even" else None
        if bad is not None and any(c != 0 for c in cs[bad::2]):
            raise ValidationError(f"coefficients {cs} are not of parity {parity}")
        self.coeffs = tuple(cs)
        self.parity = parity

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c], "even" if k % 2 == 0 else "odd")

    @property
    def degree(self):
        """Index of the last nonzero coefficient, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def __call__(self, x):
        acc = 0
        if isinstance(x, (int, Fraction)):
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def __eq__(self, other):
        return isinstance(other, PolyQ) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"PolyQ({[str(c) for c in self.coeffs]}, parity={self.parity!r})"

    def _combine_parity(self, other, op):
        if op == "mul":
            if self.parity == "none" or other.parity == "none":
                return "none"
            return "even" if self.parity == other.parity else "odd"
        return self.parity if self.parity == other.parity else "none"

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return PolyQ([x + y for x, y in zip(a, b)], self._combine_parity(other, "add"))

    def __neg__(self):
        return PolyQ([-c for c in self.coeffs], self.parity)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolyQ):
            return PolyQ([c * _as_fraction(other) for c in self.coeffs], self.parity)
        if not self.coeffs or not other.coeffs:
            return PolyQ([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return PolyQ(out, self._combine_parity(other, "mul"))

    __rmul__ = __mul__

    def derivative(self):
        flip = {"even": "odd", "odd": "even", "none": "none"}[self.parity]
        return PolyQ([k * c for k, c in enumerate(self.coeffs)][1:], flip)

    def antiderivative(self):
        """Primitive vanishing at 0."""
        flip = {"even": "odd", "odd": "even", "none": "none"}[self.parity]
        return PolyQ([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)], flip)

    def compose_affine(self, alpha, beta):
        """The polynomial x -> P(alpha*x + beta), exact; parity is dropped unless beta = 0."""
        alpha, beta = _as_fraction(alpha), _as_fraction(beta)
        out = [Fraction(0)] * max(len(self.coeffs), 1)
        for k, c in enumerate(self.coeffs):
            for j in range(k + 1):
                out[j] += c * math.comb(k, j) * alpha**j * beta ** (k - j)
        parity = self.parity if beta == 0 else "none"
        return PolyQ(out, parity)

    def shifted(self, lam):
        """The polynomial x -> P(x - lam) (exact for rational lam)."""
        return self.compose_affine(1, -_as_fraction(lam))

    def to_json(self):
        return [c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
                for c in self.coeffs]

    def float_coeffs(self):
        return np.array([float(c) for c in self.coeffs], dtype=float)


# -- exact kernel derivatives -------------------------------------------------

KERNELS = {
    # name: (b, d) for the geometric kernel sum_{n>=0} exp(-tau (b + d n))
    "even": (Fraction(2), Fraction(2)),  # 1/(e^{2 tau} - 1)
    "odd": (Fraction(1), Fraction(2)),  # 1/(e^{tau} - e^{-tau})
}


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _poly_add(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


@lru_cache(maxsize=None)
def _kernel_numerators(b, d, kmax):
    """Numerators N_k(y) with (-d/dtau)^k K = e^{-b tau} N_k(y) / (1-y)^{k+1}, y = e^{-d tau}."""
    nums = [[Fraction(1)]]
    for k in range(kmax):
        n = nums[-1]
        dn = [i * c for i, c in enumerate(n)][1:] or [Fraction(0)]
        one_minus_y = [Fraction(1), Fraction(-1)]
        y = [Fraction(0), Fraction(1)]
        term1 = _poly_mul([b * c for c in n], one_minus_y)
        term2 = _poly_mul(_poly_mul([d * c for c in dn], y), one_minus_y)
        term3 = _poly_mul([d * (k + 1) * c for c in n], y)
        nums.append(_poly_add(_poly_add(term1, term2), term3))
    return tuple(tuple(x) for x in nums)


@lru_cache(maxsize=None)
def diffop_numerator(coeffs, b, d):
    """Exact numerator T(y) with Q(-d/dtau) K = e^{-b tau} T(y) / (1-y)^{deg+1}."""
    deg = len(coeffs) - 1
    nums = _kernel_numerators(b, d, deg)
    total = [Fraction(0)]
    for k, q in enumerate(coeffs):
        if q == 0:
            continue
        pad = [Fraction(1)]
        for _ in range(deg - k):
            pad = _poly_mul(pad, [Fraction(1), Fraction(-1)])
        total = _poly_add(total, [q * c for c in _poly_mul(list(nums[k]), pad)])
    return tuple(total)


def _kernel_params(kernel):
    if isinstance(kernel, str):
        return KERNELS[kernel]
    b, d = kernel
    return _as_fraction(b), _as_fraction(d)


def poly_apply_diffop(Q, kernel, tau, max_degree=MAX_DIFFOP_DEGREE, pole_tol=1e-12):
    """Evaluate Q(-d/dtau) applied to a geometric kernel at complex tau.

    ``kernel`` is "even" (1/(e^{2 tau}-1)), "odd" (1/(e^tau - e^{-tau})) or a
    pair (b, d) meaning sum_{n>=0} e^{-tau(b + d n)} = e^{-b tau}/(1 - e^{-d tau}).
    Derivatives are exact rational functions of y = e^{-d tau}.
    """
    if Q.degree is None:
        return 0j
    if Q.degree > max_degree:
        raise DomainError(f"polynomial degree {Q.degree} exceeds max {max_degree}")
    b, d = _kernel_params(kernel)
    tau = complex(tau)
    num = diffop_numerator(Q.coeffs, b, d)
    e = Q.degree + 1
    y = cmath.exp(-float(d) * tau)
    if abs(1 - y) < pole_tol:
        raise PoleError(f"kernel pole at tau = {tau}", location=tau)
    fnum = [float(c) for c in num]
    if abs(y) <= 1:
        val = np.polyval(fnum[::-1], y) / (1 - y) ** e
        return complex(cmath.exp(-float(b) * tau) * val)
    # evaluate in w = 1/y to avoid overflow of powers of y
    w = 1 / y
    D = len(fnum) - 1
    val = np.polyval(fnum, w) / (w - 1) ** e
    return complex(cmath.exp(-tau * (float(b) + float(d) * (D - e))) * val)
