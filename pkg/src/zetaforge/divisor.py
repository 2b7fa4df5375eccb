"""Spectral divisors: eigenvalue multisets with structured polynomial tails.

A divisor is a finite list of (eigenvalue, multiplicity) pairs, a number of
zero eigenvalues kept separately, and any number of arithmetic-progression
tails. A tail has points ``(offset + step*n)**power`` for ``n >= start`` with
multiplicity ``poly(offset + step*n)``.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, ValidationError
from .specfun import PolyQ

CHECK_POINTS = 100
MATERIALIZE_CUTOFF = 10**6


@dataclass(frozen=True)
class PolyTail:
    offset: float
    step: float
    start: int
    poly: PolyQ
    power: float = 1.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError(f"tail step must be positive, got {self.step}")
        if self.start < 0:
            raise ValidationError(f"tail start index must be >= 0, got {self.start}")
        if self.offset + self.step * self.start <= 0:
            raise ValidationError("first tail point must be positive")
        if self.power <= 0:
            raise ValidationError("tail power must be positive")
        for n in range(self.start, self.start + CHECK_POINTS):
            m = self.mult_at(n)
            if m < 0:
                raise ValidationError(
                    f"negative multiplicity {m} at tail point {self.base(n)}")

    def base(self, n):
        """Base point offset + step*n (before the power map)."""
        return self.offset + self.step * n

    def point(self, n):
        b = self.base(n)
        return b if self.power == 1 else b**self.power

    def mult_at(self, n):
        """Exact multiplicity at index n, rounded to the nearest integer after a check."""
        x = Fraction(self.offset) + Fraction(self.step) * n
        v = self.poly(x)
        r = round(v)
        if abs(v - r) > 1e-9 * max(1, abs(r)):
            raise ValidationError(f"non-integer multiplicity {float(v)} at tail point {float(x)}")
        return int(r)

    @property
    def first_point(self):
        return self.point(self.start)

    def drop_first(self):
        """The tail without its first point."""
        return PolyTail(self.offset, self.step, self.start + 1, self.poly, self.power)

    def key(self):
        return (self.offset, self.step, self.start, self.power, self.poly.coeffs)

    def to_json(self):
        out = {"offset": self.offset, "step": self.step, "start": self.start,
               "poly": self.poly.to_json(), "parity": self.poly.parity}
        if self.power != 1:
            out["power"] = self.power
        return out

    @classmethod
    def from_json(cls, obj):
        try:
            poly = PolyQ(obj["poly"], obj.get("parity", "none"))
            return cls(float(obj["offset"]), float(obj["step"]), int(obj["start"]), poly,
                       float(obj.get("power", 1.0)))
        except KeyError as exc:
            raise ValidationError(f"tail is missing field {exc}") from None


@dataclass(frozen=True)
class SpectralDivisor:
    finite: tuple = ()
    tails: tuple = ()
    kernel: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        fin = tuple((float(lam), int(m)) for lam, m in self.finite)
        for lam, m in fin:
            if not lam > 0:
                raise ValidationError(f"finite eigenvalues must be positive, got {lam}")
            if m <= 0:
                raise ValidationError(f"multiplicities must be positive, got {m}")
        if any(fin[i][0] >= fin[i + 1][0] for i in range(len(fin) - 1)):
            raise ValidationError("finite part must be strictly increasing")
        if self.kernel < 0:
            raise ValidationError("kernel multiplicity must be nonnegative")
        top = fin[-1][0] if fin else 0.0
        for t in self.tails:
            if t.first_point <= top:
                raise ValidationError("tail points must exceed every finite eigenvalue")
        object.__setattr__(self, "finite", fin)
        object.__setattr__(self, "tails", tuple(sorted(self.tails, key=PolyTail.key)))

    @property
    def tail(self):
        """The single tail, or None (error if there are several)."""
        if len(self.tails) > 1:
            raise DomainError("divisor has several tails")
        return self.tails[0] if self.tails else None

    @property
    def is_finite(self):
        return not self.tails

    def min_eigenvalue(self):
        cands = [lam for lam, _ in self.finite[:1]] + [t.first_point for t in self.tails]
        return min(cands) if cands else math.inf

    def points(self, count):
        """The first ``count`` eigenvalues (with multiplicity pairs) in increasing order."""
        out = list(self.finite)
        for t in self.tails:
            out += [(t.point(n), t.mult_at(n)) for n in range(t.start, t.start + count)]
        return sorted(out)[:count]

    def peel(self, n_points=1, below=None):
        """Move tail points into the finite part.

        Moves the first ``n_points`` of each tail, or, with ``below`` given, every
        tail point with value <= below.
        """
        fin = dict(self.finite)
        tails = []
        for t in self.tails:
            k = 0
            while (below is None and k < n_points) or (below is not None and t.first_point <= below):
                m = t.mult_at(t.start)
                if m:
                    fin[t.first_point] = fin.get(t.first_point, 0) + m
                t = t.drop_first()
                k += 1
            tails.append(t)
        return SpectralDivisor(tuple(sorted(fin.items())), tuple(tails), self.kernel, dict(self.meta))

    def materialize(self, cutoff=MATERIALIZE_CUTOFF):
        """Finite divisor with every tail truncated to ``cutoff`` points (recorded in meta)."""
        fin = dict(self.finite)
        for t in self.tails:
            for n in range(t.start, t.start + cutoff):
                m = t.mult_at(n) if n < t.start + CHECK_POINTS else int(round(float(t.poly(t.base(n)))))
                if m:
                    p = t.point(n)
                    fin[p] = fin.get(p, 0) + m
        meta = dict(self.meta)
        meta["materialized_cutoff"] = cutoff
        return SpectralDivisor(tuple(sorted(fin.items())), (), self.kernel, meta)

    def to_json(self):
        out = {"finite": [[lam, m] for lam, m in self.finite], "kernel": self.kernel}
        if len(self.tails) == 1:
            out["tail"] = self.tails[0].to_json()
        elif self.tails:
            out["tail"] = [t.to_json() for t in self.tails]
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ValidationError("divisor JSON must be an object")
        tail = obj.get("tail")
        if tail is None:
            tails = ()
        elif isinstance(tail, list):
            tails = tuple(PolyTail.from_json(t) for t in tail)
        else:
            tails = (PolyTail.from_json(tail),)
        finite = obj.get("finite", [])
        if any(not isinstance(p, list) or len(p) != 2 for p in finite):
            raise ValidationError("finite entries must be [lambda, mult] pairs")
        return cls(tuple((float(a), int(b)) for a, b in finite), tails, int(obj.get("kernel", 0)))


def dumps(d):
    return json.dumps(d.to_json(), sort_keys=True)


def loads(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return SpectralDivisor.from_json(obj)


def load_divisor(path):
    with open(path) as fh:
        return loads(fh.read())


def save_divisor(d, path):
    with open(path, "w") as fh:
        fh.write(dumps(d))


# -- constructors -------------------------------------------------------------

def from_eigenvalues(values):
    """Finite divisor from a list of eigenvalues; exact zeros go to the kernel."""
    counts = {}
    kernel = 0
    for v in values:
        v = float(v)
        if v == 0:
            kernel += 1
        elif v < 0:
            raise DomainError(f"negative eigenvalue {v}")
        else:
            counts[v] = counts.get(v, 0) + 1
    return SpectralDivisor(tuple(sorted(counts.items())), (), kernel)


def naturals(power=1.0):
    """Points n**power for n >= 1, multiplicity 1."""
    return SpectralDivisor((), (PolyTail(0.0, 1.0, 1, PolyQ([1], "even"), float(power)),))


def make_Dj(j):
    """Points 2n+1 (n >= 0) with multiplicity (2n+1)**j."""
    if not 0 <= j <= 32:
        raise DomainError("j must lie in 0..32")
    return SpectralDivisor((), (PolyTail(1.0, 2.0, 0, PolyQ.monomial(j)),))


def make_Ej(j):
    """Points 2n (n >= 1) with multiplicity (2n)**j."""
    if not 0 <= j <= 32:
        raise DomainError("j must lie in 0..32")
    return SpectralDivisor((), (PolyTail(0.0, 2.0, 1, PolyQ.monomial(j)),))


def make_Dsigma(Q):
    """Even Q: points 2n with multiplicity Q(2n); odd Q: points 2n-1 with Q(2n-1); n >= 1."""
    if Q.parity == "even":
        offset = 0.0
    elif Q.parity == "odd":
        offset = -1.0
    else:
        raise DomainError("make_Dsigma needs a polynomial with declared parity")
    try:
        tail = PolyTail(offset, 2.0, 1, Q)
    except ValidationError as exc:
        raise DomainError(f"negative or non-integer multiplicity: {exc}") from None
    return SpectralDivisor((), (tail,))


def make_dualP():
    """Points j + 1/2 (j >= 0) with multiplicity 2j+1."""
    return SpectralDivisor((), (PolyTail(0.5, 1.0, 0, PolyQ([0, 2], "odd")),))


# -- combinators --------------------------------------------------------------

def _add_finite(pairs):
    acc = {}
    for lam, m in pairs:
        acc[lam] = acc.get(lam, 0) + m
    return tuple(sorted(acc.items()))


def shift(d, lam):
    """Eigenvalue-wise shift by a real ``lam``; eigenvalues landing on 0 join the kernel."""
    lam = float(lam)
    if lam < 0 and -lam > d.min_eigenvalue():
        raise DomainError(f"shift by {lam} makes eigenvalues negative")
    if lam < 0 and d.kernel:
        raise DomainError("shifting a kernel below zero")
    fin = []
    kernel = 0
    if d.kernel and lam > 0:
        fin.append((lam, d.kernel))
    elif d.kernel:
        kernel = d.kernel
    for x, m in d.finite:
        y = x + lam
        if y == 0:
            kernel += m
        else:
            fin.append((y, m))
    tails = []
    meta = dict(d.meta)
    for t in d.tails:
        if t.power != 1:
            mat = SpectralDivisor((), (t,)).materialize()
            fin += [(x + lam, m) for x, m in mat.finite]
            meta["materialized_cutoff"] = MATERIALIZE_CUTOFF
            continue
        if t.first_point + lam == 0:
            kernel += t.mult_at(t.start)
            t = t.drop_first()
        tails.append(PolyTail(t.offset + lam, t.step, t.start, t.poly.shifted(lam)))
    return SpectralDivisor(_add_finite(fin), tuple(tails), kernel, meta)


def scale(d, c):
    """Eigenvalue-wise scaling by c > 0."""
    c = float(c)
    if not c > 0:
        raise DomainError("scale factor must be positive")
    fin = tuple((x * c, m) for x, m in d.finite)
    tails = []
    for t in d.tails:
        r = c if t.power == 1 else c ** (1.0 / t.power)
        tails.append(PolyTail(t.offset * r, t.step * r, t.start,
                              t.poly.compose_affine(Fraction(1) / Fraction(r), 0), t.power))
    return SpectralDivisor(fin, tuple(tails), d.kernel, dict(d.meta))


def direct_sum(d1, d2):
    """Multiset union of two divisors."""
    top = max([x for x, _ in d1.finite[-1:] + d2.finite[-1:]], default=0.0)
    parts = []
    for d in (d1, d2):
        parts.append(SpectralDivisor(d.finite, d.tails, d.kernel).peel(below=top) if d.tails else d)
    fin = _add_finite(parts[0].finite + parts[1].finite)
    merged = {}
    for t in parts[0].tails + parts[1].tails:
        k = (t.offset, t.step, t.start, t.power)
        merged[k] = merged[k] + t.poly if k in merged else t.poly
    tails = tuple(PolyTail(o, st, n0, poly, pw) for (o, st, n0, pw), poly in merged.items())
    meta = {**d1.meta, **d2.meta}
    return SpectralDivisor(fin, tails, d1.kernel + d2.kernel, meta)
