"""Geometric zeta functions and the dual-side factor at infinity.

Euler products run over primitive entries of a length spectrum, each weighted
by w = mult_weight * phi_trace * sigma_trace * class_weight. For a surface
det(1 - gamma^-1 | n) = 1 - e^{-l}, so

    log Z(s) = sum_c w sum_{N>=0} log(1 - e^{-(s+N) l_c})
             = -sum_c w sum_{k>=1} e^{-k s l_c} / (k (1 - e^{-k l_c})).
"""

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .detreg import char_fn, log_char_fn, zeta_of_divisor
from .divisor import make_dualP, shift
from .errors import ConvergenceError, DomainError, HypothesisError, ValidationError
from .specfun import PolyQ

SERIES_TOL = 1e-18


@dataclass
class EulerConfig:
    l_max: float = math.inf
    k_max: int = 500
    n_max: int = 500
    abscissa: float = None


@dataclass
class AssemblyParams:
    rho0: float = 0.5
    c_sigma: float = -0.25
    dim_phi: int = 1
    chi_quot: Fraction = Fraction(1)
    m: int = 1

    def __post_init__(self):
        if not self.rho0 > 0:
            raise DomainError("rho0 must be positive")

    @property
    def dual_exponent(self):
        """2 (-1)^m dim(phi) chi(X_Gamma)/chi(X^d)."""
        return 2 * (-1) ** self.m * self.dim_phi * float(self.chi_quot)


def _weight(e):
    return e.mult_weight * e.phi_trace * e.sigma_trace * e.class_weight


def _primitive(spec, cfg):
    return [e for e in spec.entries if e.multiplicity == 1 and e.length <= cfg.l_max]


def estimate_abscissa(spec):
    """Growth rate h of the primitive counting function, log N(L) ~ h L (0 if too few entries)."""
    ells = np.array(sorted(e.length for e in spec.entries if e.multiplicity == 1))
    if ells.size < 5:
        return 0.0
    counts = np.arange(1, ells.size + 1)
    slope = np.polyfit(ells, np.log(counts), 1)[0]
    return max(float(slope), 0.0)


def _check_abscissa(spec, s, cfg):
    a = cfg.abscissa if cfg.abscissa is not None else estimate_abscissa(spec)
    if not complex(s).real > a:
        raise DomainError(f"Re(s) = {complex(s).real} is not above the convergence abscissa {a}")


def _csum(terms):
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def log_selberg_Z(spec, s, cfg=None, form="product"):
    """log Z(s) by the double product ("product") or the class sum ("class_sum")."""
    cfg = cfg or EulerConfig()
    s = complex(s)
    _check_abscissa(spec, s, cfg)
    terms = []
    for e in _primitive(spec, cfg):
        w, ell = _weight(e), e.length
        if form == "product":
            for N in range(cfg.n_max + 1):
                x = cmath.exp(-(s + N) * ell)
                terms.append(w * cmath.log(1 - x))
                if abs(x) < SERIES_TOL:
                    break
            else:
                raise ConvergenceError("N-product truncated before convergence")
        elif form == "class_sum":
            for k in range(1, cfg.k_max + 1):
                x = cmath.exp(-k * s * ell)
                terms.append(-w * x / (k * (1 - math.exp(-k * ell))))
                if abs(x) < SERIES_TOL:
                    break
            else:
                raise ConvergenceError("power sum truncated before convergence")
        else:
            raise DomainError(f"unknown form {form!r}")
    return _csum(terms)


def selberg_Z(spec, s, cfg=None, form="product"):
    return cmath.exp(log_selberg_Z(spec, s, cfg, form))


def log_ruelle_R(spec, s, cfg=None):
    """log R(s) = sum_c w log(1 - e^{-s l_c})."""
    cfg = cfg or EulerConfig()
    s = complex(s)
    _check_abscissa(spec, s, cfg)
    return _csum([_weight(e) * cmath.log(1 - cmath.exp(-s * e.length)) for e in _primitive(spec, cfg)])


def ruelle_R(spec, s, cfg=None):
    """(R(s), |R(s) - Z(s)/Z(s+1)|) with R from its own product."""
    R = cmath.exp(log_ruelle_R(spec, s, cfg))
    ratio = cmath.exp(log_selberg_Z(spec, s, cfg) - log_selberg_Z(spec, complex(s) + 1, cfg))
    return R, abs(R - ratio)


def _elementary(values, l):
    """e_l(values) by brute-force expansion over l-subsets."""
    return sum((np.prod(c) for c in itertools.combinations(values, l)), 0j) if l else 1.0 + 0j


def ruelle_factorization(spec, s, n1_eigs, n2_eigs=None, cfg=None):
    """Compare R(s) with prod_{l,k} Z_{l,k}(s + l + 2k)^((-1)^(l+k)).

    ``n1_eigs[c]`` and ``n2_eigs[c]`` list, for the c-th primitive entry, the
    eigenvalues eps_i and delta_j with gamma^-1 acting on n1 by e^{-l} eps_i
    and on n2 by e^{-2l} delta_j. Each Z_{l,k} is evaluated as a class sum with
    exterior-power traces e_l(eps^p) e_k(delta^p) for the p-th power.
    Returns a dict with both sides and their difference.
    """
    cfg = cfg or EulerConfig()
    s = complex(s)
    prim = _primitive(spec, cfg)
    if n2_eigs is None:
        n2_eigs = [[] for _ in prim]
    if len(n1_eigs) != len(prim) or len(n2_eigs) != len(prim):
        raise ValidationError(f"grading data given for {len(n1_eigs)}/{len(n2_eigs)} classes, "
                              f"spectrum has {len(prim)} primitive classes")
    dims = {(len(a), len(b)) for a, b in zip(n1_eigs, n2_eigs)}
    if len(dims) > 1:
        raise ValidationError("grading dimensions differ between classes")
    d1, d2 = dims.pop() if dims else (0, 0)
    lhs = cmath.exp(log_ruelle_R(spec, s, cfg))
    log_rhs = []
    for l in range(d1 + 1):
        for k in range(d2 + 1):
            shift_s = s + l + 2 * k
            sign = (-1) ** (l + k)
            for e, eps, dl in zip(prim, n1_eigs, n2_eigs):
                w, ell = _weight(e), e.length
                eps, dl = np.asarray(eps, dtype=complex), np.asarray(dl, dtype=complex)
                for p in range(1, cfg.k_max + 1):
                    x = cmath.exp(-p * shift_s * ell)
                    trace = _elementary(eps**p, l) * _elementary(dl**p, k)
                    den = np.prod(1 - math.exp(-p * ell) * eps**p) * np.prod(1 - math.exp(-2 * p * ell) * dl**p)
                    log_rhs.append(-sign * w * x * trace / (p * den))
                    if abs(x) < SERIES_TOL:
                        break
    rhs = cmath.exp(_csum(log_rhs))
    return {"lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs), "dims": (d1, d2)}


# -- F/H integrals and zeta-hat ----------------------------------------------

def _fh_int(n, k, lam, kernel):
    if not n > k >= 1:
        raise HypothesisError(f"integral diverges unless n > k >= 1 (n={n}, k={k})")
    if not lam > 0:
        raise DomainError("lambda must be positive")

    def f(r):
        if r == 0.0:
            return (2 / math.pi) / lam**n if (kernel == "coth" and k == 1) else 0.0
        t = math.tanh(math.pi * r / 2)
        ker = t if kernel == "tanh" else 1 / t
        return r ** (2 * k - 1) * ker / (r * r + lam) ** n

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        a = integrate.quad(f, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        b = integrate.quad(f, 1, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    # the integrand is even, so the line integral is twice the half-line one
    return (-1) ** (n + 1) * math.gamma(n) * 2 * (a + b)


def F_int(n, k, lam):
    """(-1)^(n+1) Gamma(n) int_R r^(2k-1) tanh(pi r/2) / (r^2+lam)^n dr."""
    return _fh_int(n, k, lam, "tanh")


def H_int(n, k, lam):
    """(-1)^(n+1) Gamma(n) int_R r^(2k-1) coth(pi r/2) / (r^2+lam)^n dr."""
    return _fh_int(n, k, lam, "coth")


def zeta_hat(d, a, n):
    """(-1)^(n+1) Gamma(n) zeta_{d+a}(n)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    shifted = shift(d, a) if a else d
    val = zeta_of_divisor(shifted, n).real
    return (-1) ** (n + 1) * math.gamma(n) * val


# -- determinant assembly -----------------------------------------------------

def det_dual(d, s):
    """det(D + s) on a structured divisor (characteristic-function semantics)."""
    return char_fn(d, s)


def log_selberg_det_assembly(eig_divisor, dual_divisor, params, P, s):
    """log det(Delta + s^2 + c) + exponent * (log det(D + s) + P(s^2))."""
    spectral = log_char_fn(eig_divisor, s * s + params.c_sigma).real
    dual = log_char_fn(dual_divisor, s).real + float(P(s * s))
    return spectral + params.dual_exponent * dual


def selberg_det_assembly(eig_divisor, dual_divisor, params, P, s):
    """Z(rho0 + s) assembled from the spectral factor and the dual factor."""
    return math.exp(log_selberg_det_assembly(eig_divisor, dual_divisor, params, P, s))


def fit_even_polynomial(s_grid, values, degree):
    """Least-squares coefficients c_0..c_degree of sum c_j s^(2j) fitted to values."""
    s = np.asarray(s_grid, dtype=float)
    A = np.stack([s ** (2 * j) for j in range(degree + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(values, dtype=float), rcond=None)
    return coef


# -- polynomials of the odd-dimensional case ---------------------------------

def ptilde(P):
    """Rational part R of Ptilde(a) = 2 pi int_0^a P(iy) dy = pi R(a), for even P."""
    if P.parity != "even":
        raise ValidationError("P must be an even polynomial")
    out = [Fraction(0)] * (len(P.coeffs) + 1)
    for k, c in enumerate(P.coeffs):
        if k % 2 == 0 and c:
            out[k + 1] = 2 * c * (-1) ** (k // 2) / (k + 1)
    return PolyQ(out, "odd")


def q_poly(n, P_list):
    """Rational part of Q(s) = sum_{p<n} Ptilde_p(s+p) - Ptilde_p(n-1-s-p); Q = pi * result."""
    if len(P_list) != n:
        raise ValidationError(f"need {n} polynomials, got {len(P_list)}")
    total = PolyQ([])
    for p, P in enumerate(P_list):
        R = ptilde(P)
        total = total + R.compose_affine(1, p) - R.compose_affine(-1, n - 1 - p)
    return total


# -- the elementary factor E(m) ----------------------------------------------

def _factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass
class EMResult:
    m: int
    value: float
    log_value: float
    prime_exponents: dict
    exp_argument: Fraction
    trace: dict = field(default_factory=dict)


def em_constant(m):
    """E(m) = prod_{l=1}^{m-1} R_l(0)^(l (-1)^l) exp(N_m), all intermediates exact."""
    if not 1 <= m <= 12:
        raise DomainError("m must lie in 1..12")
    F = []
    for l in range(m):
        poly = PolyQ([math.comb(m - 1, l)])
        for k in range(m):
            if k != l:
                poly = poly * PolyQ([-(m - 2 * k - l) ** 2, 0, 1])
        F.append(poly)
    norm = m * F[0](m)
    Q = [PolyQ([0, 1]) * F[l] * Fraction(1, norm) for l in range(m)]
    b = [[Q[l].coeffs[2 * j - 1] if 2 * j - 1 < len(Q[l].coeffs) else Fraction(0) for j in range(1, m + 1)]
         for l in range(m)]
    c = [-Fraction(1, j) * sum(Fraction(1, 2 * r - 1) for r in range(1, j + 1)) for j in range(1, m + 1)]
    P = [PolyQ([0] + [b[l][j] * c[j] for j in range(m)]) for l in range(m)]
    N = 2 * sum((-1) ** l * P[l](Fraction((m - l) ** 2)) for l in range(m))
    R_factors = {}
    primes = {}
    for l in range(1, m):
        factors = []
        if (l + m) % 2 == 0:
            xs = [2 * n for n in range(math.ceil(m / 2), (m + l) // 2 + 1)]
        else:
            xs = [x for x in range(m, m + l + 1) if x % 2 == 1]
        for x in xs:
            base = x * x - (m - l) ** 2
            expo = Q[l](Fraction(x))
            factors.append((base, expo))
            for p, e in _factorize(base).items():
                primes[p] = primes.get(p, Fraction(0)) + e * expo * l * (-1) ** l
        R_factors[l] = factors
    primes = {p: e for p, e in sorted(primes.items()) if e != 0}
    log_value = math.fsum(float(e) * math.log(p) for p, e in primes.items()) + float(N)
    trace = {"F": F, "Q": Q, "b": b, "c": c, "P": P, "N": N, "R": R_factors}
    value = math.exp(log_value) if log_value < 709 else math.inf
    return EMResult(m, value, log_value, primes, N, trace)


# -- kernels P_n and g_a ------------------------------------------------------

def pn_poly(n):
    """P_0 = P_1 = 1, P_{k+1} = P_{k-1} + (2k - 1) x P_k."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    prev, cur = PolyQ([1]), PolyQ([1])
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, prev + PolyQ([0, 2 * k - 1]) * cur
    return cur


def g_integral(a, b, z):
    """int_0^inf t^(z-1) exp(-(a/t + b t)) dt by quadrature in u = log t."""
    if not (a > 0 and b > 0):
        raise DomainError("a and b must be positive")
    z = complex(z)
    if abs(z.real) > 10:
        raise DomainError("|Re z| must be at most 10")
    # the integrand in u peaks near u0 = log(sqrt(a/b)); integrate on a window around it
    u0 = 0.5 * math.log(a / b)
    c = math.sqrt(a * b)

    def f(u, part):
        v = cmath.exp(z * u - a * math.exp(-u) - b * math.exp(u))
        return v.real if part == 0 else v.imag

    lo, hi = u0 - 2.0, u0 + 2.0
    while a * math.exp(-lo) - abs(z.real) * abs(lo) < 60 + 2 * c:
        lo -= 1.0
    while b * math.exp(hi) - abs(z.real) * abs(hi) < 60 + 2 * c:
        hi += 1.0
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=400, points=[u0])
    re = integrate.quad(f, lo, hi, args=(0,), **opts)[0]
    im = integrate.quad(f, lo, hi, args=(1,), **opts)[0] if z.imag else 0.0
    return complex(re, im)


def g_sym(c, z):
    """g_c(z) = g_integral(c, c, z)."""
    return g_integral(c, c, z)


# -- hyperbolic heat kernels and the factor at infinity ----------------------

DISCRETE_DEGREE = 0.5


def _principal_heat(t):
    """int_0^inf exp(-t (r^2 + 1/4)) r tanh(pi r) dr (Euler-Poincare normalization)."""
    # r tanh(pi r) = r - 2 r / (e^{2 pi r} + 1); the first part integrates in closed form
    corr = integrate.quad(lambda r: r * math.exp(-t * r * r) / (math.exp(2 * math.pi * r) + 1) if r < 50 else 0.0,
                          0, 50, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return math.exp(-t / 4) * (1 / (2 * t) - 2 * corr)


def hyperbolic_heat_diag(t, q=0):
    """Heat kernel on the diagonal of the hyperbolic plane for (0,q)-forms, q in {0, 1}.

    Normalized per unit of Euler-Poincare volume, so that the q = 0 kernel is
    1/(2t) - 1/6 + O(t). For q = 1 the principal series density is the same
    and the discrete series with Casimir 0 adds its formal degree 1/2.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if q not in (0, 1):
        raise DomainError("q must be 0 or 1")
    g0 = _principal_heat(t)
    return g0 if q == 0 else g0 + DISCRETE_DEGREE


def calibrate_heat(t_small=1e-3, ts=(0.5, 1.0, 2.0), tol=1e-2):
    """Check the small-t scaling of g^0 and the t-independence of g^1 - g^0."""
    scaled = 2 * t_small * hyperbolic_heat_diag(t_small, 0)
    if abs(scaled - 1) > tol:
        raise ConvergenceError(f"small-t calibration failed: 2 t g0 = {scaled}")
    diffs = [hyperbolic_heat_diag(t, 1) - hyperbolic_heat_diag(t, 0) for t in ts]
    return {"small_t_scaled": scaled, "differences": diffs}


def _mellin_log_det(trace, a_minus1, a0, split=1.0):
    """-zeta'(0) for a trace ~ a_{-1}/t + a_0 + O(t) that decays exponentially at infinity."""
    euler = np.euler_gamma

    def near(t):
        return (trace(t) - a_minus1 / t - a0) / t

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        i0 = integrate.quad(near, 0, split, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        i1 = integrate.quad(lambda t: trace(t) / t, split, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    # 1/Gamma(w) = w + gamma w^2 + ...; the split pieces give a_{-1} T^{w-1}/(w-1) and a_0 T^w / w
    T = split
    zp = i0 + i1 + euler * a0 + a0 * math.log(T) - a_minus1 / T
    return -zp


def factor_infinity_check(s_grid=(1.0, 1.5, 2.0, 2.5, 3.0), params=None):
    """Compare the L2 side of the factor at infinity with s^2 + log det(P + s).

    The L2 determinant uses the Gamma-trace of the Laplacian with its L2
    kernel removed, so for m = 1 only the principal series enters:
    f(t) = -g0(t) exp(-t (s^2 - 1/4)), Mellin-regularized at t = 0 from its
    coefficients a_{-1} = -1/2 and a_0 = (s^2 - 1/4)/2 + 1/6. The report holds
    both logarithms and their ratio, which should not depend on s.
    """
    params = params or AssemblyParams()
    cal = calibrate_heat()
    dual = make_dualP()
    rows = []
    for s in s_grid:
        if not s > 0.5:
            raise DomainError("s must exceed 1/2")
        lam = s * s - 0.25

        def trace(t, lam=lam):
            return -hyperbolic_heat_diag(t, 0) * math.exp(-t * lam)

        a_m1 = -0.5
        a_0 = 0.5 * lam + 1.0 / 6.0
        # f = -sum_q q(-1)^q trace; the L2 product over q with exponent q(-1)^(q+1) is exp(-log det f)
        l2_log = -_mellin_log_det(trace, a_m1, a_0)
        dual_log = s * s + log_char_fn(dual, s).real
        rows.append({"s": s, "l2_log": l2_log, "dual_log": dual_log, "ratio": l2_log / dual_log})
    ratios = [r["ratio"] for r in rows]
    return {"rows": rows, "ratio": float(np.mean(ratios)), "spread": float(np.ptp(ratios)),
            "calibration": cal}
