"""Torsion, twists, higher torsion and higher Euler characteristics.

Per-degree spectra are signed multisets of positive reals. A twisted complex
E' has E'_j = sum_{k>=0} (-1)^k E_{j-k}; iterating it gives E^(r). Only
determinants matter for torsion, so degrees at or beyond a stored horizon are
kept implicitly when their determinants are known to equal 1.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisError, ValidationError

KERNEL_TOL = 1e-10
DET_TOL = 1e-9
SNAP_RTOL = 1e-10


def signed_multiset(values=(), sign=1):
    c = Counter()
    for v in values:
        if not v > 0:
            raise DomainError(f"spectral values must be positive, got {v}")
        c[float(v)] += sign
    return c


def _snap(arrays, rtol=SNAP_RTOL):
    """Replace values within rtol of an earlier value by that value.

    Eigenvalues shared by neighbouring Laplacians come out of different
    matrices and differ in the last bits; snapping lets them cancel exactly.
    """
    reps = []
    out = []
    for arr in arrays:
        snapped = []
        for x in arr:
            i = np.searchsorted(reps, x)
            near = [reps[j] for j in (i - 1, i) if 0 <= j < len(reps) and abs(reps[j] - x) <= rtol * x]
            if near:
                snapped.append(near[0])
            else:
                reps.insert(i, float(x))
                snapped.append(float(x))
        out.append(snapped)
    return out


def _clean(counter):
    return Counter({k: m for k, m in counter.items() if m != 0})


def log_det_multiset(ms):
    return math.fsum(m * math.log(x) for x, m in ms.items())


@dataclass
class VirtualSpectra:
    """Signed eigenvalue multisets per degree.

    ``horizon`` is None when every nonempty degree is stored. Otherwise degrees
    >= horizon are not stored; ``pseudofinite`` then records whether each of
    them has determinant 1.
    """

    degrees: dict = field(default_factory=dict)
    horizon: int = None
    pseudofinite: bool = True

    def __post_init__(self):
        self.degrees = {j: _clean(Counter(ms)) for j, ms in self.degrees.items()}
        self.degrees = {j: ms for j, ms in sorted(self.degrees.items()) if ms}
        if any(j < 0 for j in self.degrees):
            raise DomainError("degrees must be nonnegative")
        if self.horizon is not None and any(j >= self.horizon for j in self.degrees):
            raise DomainError("stored degree beyond the horizon")

    @classmethod
    def from_lists(cls, lists):
        """Build from {degree: list of eigenvalues} or a list indexed by degree (all positive signs)."""
        items = lists.items() if isinstance(lists, dict) else enumerate(lists)
        return cls({j: signed_multiset(v) for j, v in items})

    @property
    def top(self):
        """Number of degrees to consider: the horizon, or one past the top stored degree."""
        if self.horizon is not None:
            return self.horizon
        return max(self.degrees) + 1 if self.degrees else 0

    def log_dets(self):
        """log det'(E_j) for j < top."""
        return [log_det_multiset(self.degrees.get(j, Counter())) for j in range(self.top)]

    def is_empty(self):
        return not self.degrees and self.horizon is None


def laplacian_spectra(C, kernel_tol=KERNEL_TOL):
    """Positive Laplace spectra per degree plus kernel dimensions (Betti numbers)."""
    ds = C.differentials
    dims = C.dims
    degrees = {}
    kernels = []
    for p, n in enumerate(dims):
        lap = np.zeros((n, n))
        if p < len(ds):
            lap += ds[p].T @ ds[p]
        if p >= 1:
            lap += ds[p - 1] @ ds[p - 1].T
        ev = np.linalg.eigvalsh(lap) if n else np.zeros(0)
        pos = ev[ev > kernel_tol]
        kernels.append(int(n - pos.size))
        degrees[p] = pos
    snapped = _snap([degrees[p] for p in range(len(dims))])
    return VirtualSpectra({p: signed_multiset(v) for p, v in enumerate(snapped)}), kernels


class GradedComplex:
    """Finite cochain complex of real matrices d_p: E_p -> E_{p+1}."""

    def __init__(self, differentials, dims=None, tol=1e-12):
        ds = [np.atleast_2d(np.asarray(d, dtype=float)) for d in differentials]
        if dims is None:
            dims = [ds[0].shape[1]] + [d.shape[0] for d in ds] if ds else []
        dims = list(dims)
        for p, d in enumerate(ds):
            if d.shape != (dims[p + 1], dims[p]):
                raise ValidationError(f"differential {p} has shape {d.shape}, expected {(dims[p + 1], dims[p])}")
        for p in range(len(ds) - 1):
            prod = ds[p + 1] @ ds[p]
            scale = 1.0 + np.linalg.norm(ds[p + 1]) * np.linalg.norm(ds[p])
            if np.linalg.norm(prod) > tol * scale:
                raise ValidationError(f"chain condition fails at degree {p}")
        self.differentials = ds
        self.dims = dims

    @classmethod
    def from_json(cls, obj):
        return cls([np.array(m, dtype=float) for m in obj])


def tau1(spec):
    """prod_p det'(Delta_p)^(p (-1)^p)."""
    if spec.horizon is not None and not spec.pseudofinite:
        raise HypothesisError("spectra are not pseudofinite")
    return math.exp(math.fsum(p * (-1) ** p * ld for p, ld in enumerate(spec.log_dets())))


def log_det_virtual(spec):
    if spec.horizon is not None and not spec.pseudofinite:
        raise HypothesisError("spectra are not pseudofinite")
    return math.fsum((-1) ** k * ld for k, ld in enumerate(spec.log_dets()))


def det_virtual(spec):
    """prod_k det'(E_k)^((-1)^k) over a pseudofinite virtual complex."""
    return math.exp(log_det_virtual(spec))


def twist(spec, tol=DET_TOL):
    """The twisted virtual complex E'_j = sum_{k>=0} (-1)^k E_{j-k}.

    Degrees below the old horizon (or top degree) are computed exactly. Beyond
    it every E'_j equals +-(sum_i (-1)^i E_i): if that multiset is empty the
    result has finite support, if its determinant is 1 the result is
    pseudofinite, otherwise it is flagged as not pseudofinite.
    """
    if spec.is_empty():
        return VirtualSpectra({})
    top = spec.top
    out = {}
    for j in range(top):
        acc = Counter()
        for k in range(j + 1):
            src = spec.degrees.get(j - k, Counter())
            for x, m in src.items():
                acc[x] += (-1) ** k * m
        out[j] = acc
    alternating = Counter()
    for i in range(top):
        for x, m in spec.degrees.get(i, Counter()).items():
            alternating[x] += (-1) ** i * m
    alternating = _clean(alternating)
    if spec.horizon is None and not alternating:
        return VirtualSpectra(out)
    logdet = math.fsum((-1) ** i * ld for i, ld in enumerate(spec.log_dets()))
    pseudo = spec.pseudofinite and abs(logdet) < tol
    return VirtualSpectra(out, horizon=top, pseudofinite=pseudo)


def iterated_twist(spec, r):
    for _ in range(r):
        spec = twist(spec)
    return spec


def _log_tau_closed(spec, r):
    return math.fsum((-1) ** (p + r - 1) * math.comb(p, r) * ld for p, ld in enumerate(spec.log_dets()))


def tau_r(spec, r, tol=DET_TOL):
    """Closed form prod_p det'(E_p)^((-1)^(p+r-1) C(p, r)), after checking tau_0..tau_{r-1} = 1."""
    if spec.horizon is not None and not spec.pseudofinite:
        raise HypothesisError("spectra are not pseudofinite")
    for q in range(r):
        val = _log_tau_closed(spec, q)
        if abs(val) > tol:
            raise HypothesisError(f"tau_{q} = {math.exp(val)} is not 1")
    return math.exp(_log_tau_closed(spec, r))


def tau2_hodge_check(hodge):
    """(lhs, rhs) for the Hodge-graded second torsion.

    lhs = prod_p (prod_q det'(Delta_pq)^(q (-1)^q))^(p (-1)^p) and
    rhs = tau_2(total)^(-1/2) with Delta_n = sum_{p+q=n} Delta_pq. The closed
    form of tau_2 is used without the tau_0 = tau_1 = 1 check.
    """
    log_lhs = 0.0
    total = {}
    for (p, q), values in hodge.items():
        ms = values if isinstance(values, Counter) else signed_multiset(values)
        log_lhs += p * (-1) ** p * q * (-1) ** q * log_det_multiset(ms)
        total.setdefault(p + q, Counter()).update(ms)
    spec = VirtualSpectra(total)
    log_rhs = -0.5 * _log_tau_closed(spec, 2) if total else 0.0
    return math.exp(log_lhs), math.exp(log_rhs)


# -- Euler characteristics ----------------------------------------------------

def chi_r(b, r):
    """(-1)^r sum_j C(j, r) (-1)^j b_j."""
    return (-1) ** r * sum(math.comb(j, r) * (-1) ** j * bj for j, bj in enumerate(b))


def chi_gen(b):
    """(r, chi_r) for the least r with chi_r != 0; (None, 0) if all vanish."""
    for r in range(len(b) + 1):
        v = chi_r(b, r)
        if v != 0:
            return r, v
    return None, 0


def betti_product(b1, b2):
    """Kunneth Betti numbers of a product."""
    out = [0] * (len(b1) + len(b2) - 1)
    for i, x in enumerate(b1):
        for j, y in enumerate(b2):
            out[i + j] += x * y
    return out


def betti_twist(b, length=None):
    """Virtual Betti numbers of the twist: b'_j = sum_{k>=0} (-1)^k b_{j-k}."""
    length = len(b) if length is None else length
    return [sum((-1) ** k * b[j - k] for k in range(j + 1) if j - k < len(b)) for j in range(length)]


# -- abelian Lie algebra cohomology -------------------------------------------

def _rank(m, tol=1e-9):
    if m.size == 0:
        return 0
    return int(np.linalg.matrix_rank(m, tol=tol * max(1.0, np.linalg.norm(m))))


def chevalley_eilenberg_differentials(actions):
    """Matrices of d: Hom(wedge^q a, V) -> Hom(wedge^(q+1) a, V) for commuting actions."""
    acts = [np.asarray(a, dtype=complex) for a in actions]
    r = len(acts)
    n = acts[0].shape[0] if acts else 0
    subsets = [list(itertools.combinations(range(r), q)) for q in range(r + 1)]
    index = [{s: i for i, s in enumerate(ss)} for ss in subsets]
    mats = []
    for q in range(r):
        src, dst = subsets[q], subsets[q + 1]
        D = np.zeros((len(dst) * n, len(src) * n), dtype=complex)
        for J in dst:
            row = index[q + 1][J]
            for l, jl in enumerate(J):
                I = J[:l] + J[l + 1:]
                col = index[q][I]
                D[row * n:(row + 1) * n, col * n:(col + 1) * n] += (-1) ** l * acts[jl]
        mats.append(D)
    return mats, [len(s) * n for s in subsets]


def abelian_lie_cohomology_dims(actions, upto=None):
    """dim H^p(a, V) for an abelian Lie algebra acting by commuting matrices."""
    acts = [np.asarray(a, dtype=complex) for a in actions]
    for a, b in itertools.combinations(acts, 2):
        if np.linalg.norm(a @ b - b @ a) > 1e-10:
            raise DomainError("actions do not commute")
    mats, dims = chevalley_eilenberg_differentials(acts)
    r = len(acts)
    upto = r if upto is None else min(upto, r)
    ranks = [_rank(m) for m in mats]
    out = []
    for q in range(upto + 1):
        out_rank = ranks[q] if q < len(ranks) else 0
        in_rank = ranks[q - 1] if q >= 1 else 0
        out.append(dims[q] - out_rank - in_rank)
    return out


def joint_kernel_dim(actions):
    acts = [np.asarray(a, dtype=complex) for a in actions]
    if not acts:
        return 0
    stacked = np.vstack(acts)
    return acts[0].shape[1] - _rank(stacked)


# -- binomial identity --------------------------------------------------------

def _binom(n, k):
    return math.comb(n, k) if 0 <= k <= n else 0


def A_identity(i, r, rp):
    """(sum_{j<=r'} C(i+j, r) C(r', j) (-1)^j, (-1)^r' C(i, r-r'))."""
    lhs = sum(_binom(i + j, r) * _binom(rp, j) * (-1) ** j for j in range(rp + 1))
    rhs = (-1) ** rp * _binom(i, r - rp)
    return lhs, rhs
