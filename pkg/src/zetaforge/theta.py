"""Dual theta functions, pole fitting, and the contour identities of theta series.

The dual theta function of an odd polynomial Q is

    Theta_d(tau) = sum_{n>=1} Q(2n - 1) e^{-(2n-1) tau} = Q(-d/dtau) 1/(e^tau - e^-tau),

and for an even polynomial sum_{n>=1} Q(2n) e^{-2n tau} = Q(-d/dtau) 1/(e^{2 tau} - 1).
The right-hand sides are rational in e^{-tau} and give the continuation.
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError, PoleError, ValidationError
from .specfun import KERNELS, PolyQ, poly_apply_diffop

SERIES_TOL = 1e-17


@dataclass
class LaurentFit:
    center: complex
    order: int
    coefficients: list
    residual: float = 0.0


def _kernel_for(Q, kernel):
    if kernel is not None:
        return kernel
    if Q.parity == "odd":
        return "odd"
    if Q.parity == "even":
        return "even"
    raise ValidationError("polynomial has no parity; pass kernel explicitly")


def theta_dual(Q, tau, kernel=None):
    """Closed-form Theta_d(tau), continued to all tau off the poles."""
    return poly_apply_diffop(Q, _kernel_for(Q, kernel), tau)


def theta_dual_series(Q, tau, kernel=None):
    """The defining series sum_n Q(b + d n) e^{-tau (b + d n)}, Re tau > 0."""
    kernel = _kernel_for(Q, kernel)
    b, d = KERNELS[kernel] if isinstance(kernel, str) else kernel
    b, d = float(b), float(d)
    tau = complex(tau)
    if not tau.real > 0:
        raise DomainError("the series converges only for Re tau > 0")
    terms = []
    n = 0
    while True:
        x = b + d * n
        e = cmath.exp(-tau * x)
        term = Q(x) * e
        terms.append(term)
        if abs(e) * (1 + abs(Q(x))) < SERIES_TOL and n > 5:
            break
        n += 1
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def sl2_dual_theta(tau):
    """sum_j (2j + 1) e^{-tau (j + 1/2)} via the diffop closed form."""
    return poly_apply_diffop(PolyQ([0, 2], "odd"), (0.5, 1), tau)


def sl2_dual_theta_closed(tau):
    """cosh(tau/2) / (2 sinh(tau/2)^2)."""
    tau = complex(tau)
    sh = cmath.sinh(tau / 2)
    if abs(sh) < 1e-14:
        raise PoleError(f"pole at tau = {tau}", location=tau)
    return cmath.cosh(tau / 2) / (2 * sh * sh)


# -- pole location and Laurent fitting ---------------------------------------

def _safe_eval(f, tau):
    try:
        return f(tau)
    except PoleError:
        return complex(math.inf)


def _refine_pole(f, z0, radius, modes=32, iters=8, tol=1e-14):
    """Pole center from Taylor coefficients of 1/f on a circle, or None if 1/f has no zero.

    If 1/f = C (z - c)^k (1 + ...) then b_{k-1}/b_k = k (z0 - c) + O((z0 - c)^2).
    """
    theta = 2 * np.pi * np.arange(modes) / modes
    z = complex(z0)
    for _ in range(iters):
        pts = z + radius * np.exp(1j * theta)
        vals = np.array([_safe_eval(f, p) for p in pts])
        if not np.all(np.isfinite(vals)) or np.any(vals == 0):
            return None
        inv = 1 / vals
        # zeros of 1/f inside the circle, by the winding number
        phase = np.unwrap(np.angle(np.append(inv, inv[0])))
        k = int(round((phase[-1] - phase[0]) / (2 * np.pi)))
        c = np.fft.fft(inv) / modes
        if k <= 0:
            return None
        dz = c[k - 1] * radius / (k * c[k])
        if abs(dz) > radius:
            return None
        z -= dz
        if abs(dz) < tol:
            break
    return z


def laurent_fit(f, center, radius, modes=64, tol=1e-6):
    """Laurent coefficients of f at center from FFTs on a circle; principal part first."""
    theta = 2 * np.pi * np.arange(modes) / modes
    pts = center + radius * np.exp(1j * theta)
    vals = np.array([f(p) for p in pts])
    c = np.fft.fft(vals) / modes
    # c[k] = a_k r^k for k >= 0, c[modes - k] = a_{-k} r^{-k}
    half = modes // 2
    neg = np.array([c[modes - k] * radius**k for k in range(1, half)])
    pos = np.array([c[k] / radius**k for k in range(half)])
    scale = max(np.max(np.abs(vals)), 1.0)
    significant = [k for k in range(1, half) if abs(neg[k - 1]) / radius**k > 1e-9 * scale]
    order = max(significant) if significant else 0
    principal = [complex(neg[k - 1]) for k in range(order, 0, -1)]
    # residual on a smaller circle
    check = center + 0.6 * radius * np.exp(1j * (theta[::4] + 0.1))
    recon = np.array([sum(principal[order - k] * (z - center) ** (-k) for k in range(1, order + 1))
                      + sum(pos[k] * (z - center) ** k for k in range(half)) for z in check])
    true = np.array([f(z) for z in check])
    resid = float(np.max(np.abs(recon - true)) / max(np.max(np.abs(true)), 1.0))
    if resid > tol:
        raise ConvergenceError(f"Laurent fit at {center} has residual {resid:.3g}")
    return LaurentFit(complex(center), order, principal, resid)


def locate_poles(f, region, grid=(41, 81), merge=1e-6):
    """Poles of f inside region = (re_min, re_max, im_min, im_max) from |f| maxima plus Newton."""
    re0, re1, im0, im1 = region
    if not (re1 > re0 and im1 > im0):
        raise DomainError("region must be a nondegenerate rectangle")
    xs = np.linspace(re0, re1, grid[0])
    ys = np.linspace(im0, im1, grid[1])
    # nudge the grid off exact pole locations
    X, Y = np.meshgrid(xs + 1e-3 * (re1 - re0) / grid[0], ys + 1.7e-3 * (im1 - im0) / grid[1])
    mag = np.vectorize(lambda x, y: abs(_safe_eval(f, complex(x, y))))(X, Y)
    logm = np.log(np.where(np.isfinite(mag), mag, 1e300) + 1e-300)
    found = []
    for i in range(1, logm.shape[0] - 1):
        for j in range(1, logm.shape[1] - 1):
            win = logm[i - 1:i + 2, j - 1:j + 2]
            if logm[i, j] < win.max() or logm[i, j] < np.median(logm) + 3:
                continue
            step = max(xs[1] - xs[0], ys[1] - ys[0])
            z = _refine_pole(f, complex(X[i, j], Y[i, j]), step)
            if z is None or not (re0 <= z.real <= re1 and im0 <= z.imag <= im1):
                continue
            if all(abs(z - w) > merge for w in found):
                found.append(z)
    return sorted(found, key=lambda z: (round(z.imag, 6), round(z.real, 6)))


def theta_dual_poles(Q, region, kernel=None, radius=0.3):
    """Located poles of Theta_d in region with fitted orders and principal parts."""
    f = lambda t: theta_dual(Q, t, kernel)  # noqa: E731
    centers = locate_poles(f, region)
    fits = []
    for c in centers:
        others = [abs(c - w) for w in centers if w != c]
        r = min([radius] + [0.4 * d for d in others])
        fits.append(laurent_fit(f, c, r))
    return fits


def pole_report(fits, claimed_period, claimed_order, region):
    """Compare fitted poles with a claimed set {i period k} of one order inside region."""
    re0, re1, im0, im1 = region
    rows = []
    for fit in fits:
        k = fit.center.imag / claimed_period
        on_set = abs(fit.center.real) < 1e-8 and abs(k - round(k)) < 1e-8
        rows.append({"center": fit.center, "order": fit.order,
                     "on_claimed_set": on_set, "order_matches": fit.order == claimed_order})
    missing = []
    if re0 <= 0 <= re1:
        for k in range(math.ceil(im0 / claimed_period), math.floor(im1 / claimed_period) + 1):
            c = 1j * claimed_period * k
            if all(abs(c - f.center) > 1e-6 for f in fits):
                missing.append(c)
    bad = missing or not all(r["on_claimed_set"] and r["order_matches"] for r in rows)
    return {"poles": rows, "missing_claimed": missing, "discrepancy": bool(bad)}


# -- finite parts and the contour representation ------------------------------

def finite_part_identity(Q, t):
    """(lhs, rhs) with lhs = Q(-it) [psi((1+it)/2) - psi((1-it)/2)]/2 and rhs = (pi/2) i Q(-it) tanh(pi t/2)."""
    if Q.parity != "odd":
        raise ValidationError("Q must be odd")
    if not t > 0:
        raise DomainError("t must be positive")
    q = complex(Q(complex(0, -t)))
    lhs = q * 0.5 * (special.psi(complex(0.5, t / 2)) - special.psi(complex(0.5, -t / 2)))
    rhs = 0.5j * math.pi * q * math.tanh(math.pi * t / 2)
    return complex(lhs), complex(rhs)


def _segment_integral(g, z0, z1, points=None):
    """int_{z0}^{z1} g(z) dz along the straight segment."""
    dz = z1 - z0

    def part(s, k):
        v = g(z0 + s * dz) * dz
        return v.real if k == 0 else v.imag

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if points:
        opts["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(part, 0, 1, args=(0,), **opts)[0]
        im = integrate.quad(part, 0, 1, args=(1,), **opts)[0]
    return complex(re, im)


def contour_theta(a_list, tau, width=1.0, height=None, extra=None):
    """sum_j e^{-tau a_j} from n0 + (1/2 pi i) oint e^{i tau z}(F'/F - 2 n0/z) dz, F = prod(a_j^2 + z^2).

    The contour is the counterclockwise rectangle [-width, width] x [0, height];
    it passes through the origin, where the bracket is regular. ``extra`` is an
    optional polynomial P, adding P(z^2) z to the bracket (an entire term that
    must not change the result).
    """
    a = np.asarray(a_list, dtype=float)
    if np.any(a < 0):
        raise DomainError("spectral values must be nonnegative")
    if not tau > 0:
        raise DomainError("tau must be positive")
    n0 = int(np.sum(a == 0))
    pos = a[a > 0]
    height = float(pos.max() + 1.0) if height is None and pos.size else (height or 1.0)
    if np.any(np.abs(pos - height) < 1e-9):
        raise DomainError("a spectral value lies on the contour")

    def g(z):
        br = complex(np.sum(2 * z / (pos**2 + z * z))) if pos.size else 0j
        if extra is not None:
            br += complex(extra(z * z)) * z
        return cmath.exp(1j * tau * z) * br

    corners = [complex(-width, 0), complex(width, 0), complex(width, height), complex(-width, height)]
    total = 0j
    for k in range(4):
        z0, z1 = corners[k], corners[(k + 1) % 4]
        pts = None
        if k in (1, 3):
            # vertical sides pass at distance width from the poles i a_j
            pts = sorted({float(x / height) for x in pos if 0 < x < height}) or None
        total += _segment_integral(g, z0, z1, pts)
    return float(n0 + (total / (2j * math.pi)).real)


# -- the f-identity -----------------------------------------------------------

def _f_positive(a, n0, tau):
    """-(2 n0 / pi) Re int_0^inf e^{i tau a} e^{-tau y} / (a + i y) dy for tau >= 0."""
    if n0 == 0:
        return 0.0
    if tau == 0:
        val = integrate.quad(lambda y: a / (a * a + y * y), 0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
    else:
        c, s = math.cos(tau * a), math.sin(tau * a)
        val = integrate.quad(lambda y: math.exp(-tau * y) * (a * c + y * s) / (a * a + y * y),
                             0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return -(2 * n0 / math.pi) * val


def f_prime(a, n0, tau):
    """(2 n0 / pi) sin(a tau) / tau."""
    return 2 * n0 / math.pi * (a if tau == 0 else math.sin(a * tau) / tau)


def f_identity(a, n0, tau_grid, t_large=200.0):
    """f on both sides of 0 and the checks f' = (2 n0/pi) sin(a tau)/tau, f(tau) + f(-tau) = -2 n0, f(inf) = 0.

    For tau > 0 f comes from its half-line integral; f(0) is the limit of the
    same integral (-n0); f(-tau) = f(0) - int_0^tau f'.
    """
    if not a > 0:
        raise DomainError("a must be positive")
    f0 = _f_positive(a, n0, 0.0)
    rows = []
    for tau in tau_grid:
        tau = float(tau)
        if not tau > 0:
            raise DomainError("tau grid must be positive")
        fp = _f_positive(a, n0, tau)
        integral = integrate.quad(lambda x: f_prime(a, n0, x), 0, tau, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        fm = f0 - integral
        rows.append({"tau": tau, "f_plus": fp, "f_minus": fm, "sum": fp + fm,
                     "deriv_err": abs((fp - f0) - integral)})
    f_inf = _f_positive(a, n0, t_large)
    return {"f0": f0, "rows": rows,
            "max_deriv_err": max((r["deriv_err"] for r in rows), default=0.0),
            "max_sum_err": max((abs(r["sum"] + 2 * n0) for r in rows), default=0.0),
            "f_large": f_inf}


def residue_prediction(spec, entry):
    """-(1/2 pi) l w / (mu (1 - e^{-l})) for an entry of a surface length spectrum."""
    if entry not in spec.entries:
        raise ValidationError("entry is not part of the spectrum")
    w = entry.mult_weight * entry.phi_trace * entry.sigma_trace * entry.class_weight
    ell = entry.length
    return complex(-(1 / (2 * math.pi)) * ell * w / (entry.multiplicity * (1 - math.exp(-ell))))
