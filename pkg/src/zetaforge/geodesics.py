"""Length spectra of closed geodesics.

Conjugacy classes of a free group on generators g_0..g_{r-1} are cyclically
reduced words up to rotation. Letters 0..r-1 stand for the generators and
r..2r-1 for their inverses. A class has length 2 arccosh(|tr|/2) and is
primitive when its word is not a proper power.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, DomainError, ValidationError

WORD_BUDGET = 2_000_000
MAX_WORD_LENGTH = 40
TRACE_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumEntry:
    length: float
    primitive_length: float
    mult_weight: float = 1.0
    sigma_trace: float = 1.0
    phi_trace: float = 1.0
    class_weight: int = 1

    @property
    def multiplicity(self):
        """Generic multiplicity length / primitive_length (an integer)."""
        return int(round(self.length / self.primitive_length))


def _check_entry(e, where):
    if not (e.length > 0 and e.primitive_length > 0):
        raise ValidationError(f"{where}: lengths must be positive")
    ratio = e.length / e.primitive_length
    if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-9:
        raise ValidationError(f"{where}: length/primitive_length = {ratio} is not a positive integer")
    if int(e.class_weight) != e.class_weight:
        raise ValidationError(f"{where}.class_weight: must be an integer")


@dataclass
class LengthSpectrum:
    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, e in enumerate(self.entries):
            _check_entry(e, f"entries[{i}]")
        self.entries = sorted(self.entries, key=lambda e: (e.length, e.primitive_length))

    def __len__(self):
        return len(self.entries)

    def lengths(self):
        return np.array([e.length for e in self.entries])

    def primitive(self):
        """Entries with length equal to primitive length."""
        return [e for e in self.entries if e.multiplicity == 1]

    def systole(self):
        return self.entries[0].length if self.entries else math.inf

    def to_json(self):
        return {"entries": [asdict(e) for e in self.entries], "meta": self.meta}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, list):
            obj = {"entries": obj}
        if not isinstance(obj, dict) or "entries" not in obj:
            raise ValidationError("length spectrum must be an object with an 'entries' list")
        if not isinstance(obj["entries"], list):
            raise ValidationError("entries: must be a list")
        allowed = set(SpectrumEntry.__dataclass_fields__)
        entries = []
        for i, raw in enumerate(obj["entries"]):
            where = f"entries[{i}]"
            if not isinstance(raw, dict):
                raise ValidationError(f"{where}: must be an object")
            extra = set(raw) - allowed
            if extra:
                raise ValidationError(f"{where}: unknown fields {sorted(extra)}")
            for key in ("length", "primitive_length"):
                if key not in raw:
                    raise ValidationError(f"{where}.{key}: missing")
            for key, val in raw.items():
                if isinstance(val, bool) or not isinstance(val, (int, float)):
                    raise ValidationError(f"{where}.{key}: must be a number")
            entries.append(SpectrumEntry(**raw))
        return cls(entries, dict(obj.get("meta", {})))


def save_spectrum(spec, path):
    with open(path, "w") as fh:
        json.dump(spec.to_json(), fh, sort_keys=True, indent=1)


def load_spectrum(path):
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return LengthSpectrum.from_json(obj)


# -- groups and words ---------------------------------------------------------

def _exact(x):
    """Fraction for integral or rational-looking entries, else None."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    return None


class FuchsianGroup:
    """Hyperbolic generators in SL(2, R), stored exactly when rational."""

    def __init__(self, generators, relator=None):
        gens = []
        for i, g in enumerate(generators):
            m = [[g[0][0], g[0][1]], [g[1][0], g[1][1]]]
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            if abs(float(det) - 1) > 1e-9:
                raise DomainError(f"generator {i} has determinant {float(det)}, expected 1")
            tr = abs(float(m[0][0] + m[1][1]))
            if tr <= 2:
                raise DomainError(f"generator {i} is not hyperbolic (|tr| = {tr})")
            gens.append(m)
        self.rank = len(gens)
        ex = [[[_exact(x) for x in row] for row in m] for m in gens]
        self.exact = all(x is not None for m in ex for row in m for x in row)
        if self.exact:
            mats = ex
            inv = [[[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]] for m in mats]
        else:
            mats = [np.array(m, dtype=float) for m in gens]
            inv = [np.array([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]) for m in mats]
            mats = [[list(r) for r in m] for m in mats]
            inv = [[list(r) for r in m] for m in inv]
        self.letters = mats + inv
        self.relator = list(relator) if relator else []

    @classmethod
    def from_json(cls, obj):
        gens = obj["generators"] if isinstance(obj, dict) else obj
        rel = obj.get("relator") if isinstance(obj, dict) else None
        conv = [[[_parse_number(x) for x in row] for row in g] for g in gens]
        return cls(conv, rel)

    def inverse_letter(self, x):
        return (x + self.rank) % (2 * self.rank)

    def matrix(self, word):
        m = [[1, 0], [0, 1]] if self.exact else [[1.0, 0.0], [0.0, 1.0]]
        for x in word:
            m = _mul(m, self.letters[x])
        return m


def _parse_number(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return x
    return float(x)


def _mul(a, b):
    return [[a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]]]


def _trace(m):
    return abs(float(m[0][0] + m[1][1]))


def length_from_trace(tr):
    if tr <= 2:
        raise DomainError(f"non-hyperbolic element with |tr| = {tr}")
    return 2 * math.acosh(tr / 2)


def minimal_rotation(word):
    """Lexicographically least rotation of a word (tuple)."""
    n = len(word)
    return min(tuple(word[i:] + word[:i]) for i in range(n))


def primitive_root(word):
    """(root, k) with word = root^k and k maximal."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and tuple(word[:p]) * (n // p) == tuple(word):
            return tuple(word[:p]), n // p
    return tuple(word), 1


def cyclic_classes(rank, n):
    """Canonical cyclically reduced words of length n (minimal rotations)."""
    inv = lambda x: (x + rank) % (2 * rank)
    out = []

    def extend(word):
        if len(word) == n:
            if word[-1] != inv(word[0]) and minimal_rotation(word) == tuple(word):
                out.append(tuple(word))
            return
        for x in range(2 * rank):
            if word and x == inv(word[-1]):
                continue
            # canonical words start with their least letter
            if word and x < word[0]:
                continue
            word.append(x)
            extend(word)
            word.pop()

    extend([])
    return out


def _enumerate(G, L_max, max_word_length, budget):
    """Canonical classes with length <= L_max as (word, length) pairs."""
    found = []
    count = 0
    for n in range(1, max_word_length + 1):
        words = cyclic_classes(G.rank, n)
        count += len(words)
        if count > budget:
            raise ConvergenceError(f"word budget {budget} exceeded at word length {n}")
        level_min = math.inf
        for w in words:
            ell = length_from_trace(_trace(G.matrix(w)))
            level_min = min(level_min, ell)
            if ell <= L_max + 1e-12:
                found.append((w, ell))
        if level_min > L_max:
            return found
    raise ConvergenceError(f"lengths still below L_max at word length {max_word_length}")


def _entries(G, found):
    entries = []
    for w, ell in found:
        root, k = primitive_root(w)
        ell0 = ell if k == 1 else length_from_trace(_trace(G.matrix(root)))
        entries.append(SpectrumEntry(ell, ell0))
    return entries


def schottky_lengths(G, L_max, max_word_length=MAX_WORD_LENGTH, budget=WORD_BUDGET):
    """One entry per conjugacy class of the free group with length <= L_max.

    Word lengths are increased until every cyclically reduced word of the
    current length is longer than L_max; for Schottky groups lengths grow
    with word length so this stops the enumeration.
    """
    found = _enumerate(G, L_max, max_word_length, budget)
    meta = {"source": "schottky", "L_max": L_max, "exact": G.exact, "classes": len(found)}
    return LengthSpectrum(_entries(G, found), meta)


def _reduced_words(rank, depth):
    inv = lambda x: (x + rank) % (2 * rank)
    words = [()]
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for x in range(2 * rank):
                if w and x == inv(w[-1]):
                    continue
                nxt.append(w + (x,))
        words += nxt
        frontier = nxt
    return words


def _as_float(m):
    return np.array([[float(m[0][0]), float(m[0][1])], [float(m[1][0]), float(m[1][1])]])


def surface_group_lengths(G, L_max, conj_depth=4, word_length=4, budget=WORD_BUDGET):
    """HEURISTIC length spectrum for a one-relator group.

    Cyclically reduced words up to ``word_length`` letters are enumerated (the
    relator makes lengths non-monotone in word length, so the bound is fixed).
    Classes are merged when traces agree to 1e-9 and a conjugator of word
    length <= conj_depth maps one matrix to the other up to sign. Elements
    with |tr| <= 2 (consequences of the relator) are dropped.
    """
    warnings = []
    found = []
    for n in range(1, word_length + 1):
        words = cyclic_classes(G.rank, n)
        if len(found) + len(words) > budget:
            raise ConvergenceError(f"word budget {budget} exceeded at word length {n}")
        for w in words:
            tr = _trace(G.matrix(w))
            if tr <= 2 + TRACE_TOL:
                warnings.append(f"dropped word {list(w)} with |tr| = {tr:.12g}")
                continue
            ell = length_from_trace(tr)
            if ell <= L_max + 1e-12:
                found.append((w, ell, tr))
    conj = np.array([_as_float(G.matrix(c)) for c in _reduced_words(G.rank, conj_depth)])
    conj_inv = np.linalg.inv(conj)
    kept = []
    for w, ell, tr in sorted(found, key=lambda x: (x[1], len(x[0]), x[0])):
        m = _as_float(G.matrix(w))
        m = m * np.sign(m[0, 0] + m[1, 1])  # PSL: fix the sign by the trace
        tol = TRACE_TOL * max(1.0, tr)
        candidates = [k for k in kept if abs(k[2] - tr) <= tol]
        merged = None
        if candidates:
            moved = conj @ m @ conj_inv
            for kw, kell, ktr, km in candidates:
                # filter on one entry, then confirm on the whole matrix
                hits = np.nonzero(np.abs(moved[:, 0, 0] - km[0, 0]) < tol)[0]
                if hits.size and np.abs(moved[hits] - km).max(axis=(1, 2)).min() < tol:
                    merged = kw
                    break
        if merged is None:
            kept.append((w, ell, tr, m))
        else:
            warnings.append(f"merged word {list(w)} into {list(merged)}")
    entries = []
    for w, ell, tr, _ in kept:
        root, k = primitive_root(w)
        ell0 = ell if k == 1 else length_from_trace(_trace(G.matrix(root)))
        entries.append(SpectrumEntry(ell, ell0))
    meta = {"source": "surface", "label": "HEURISTIC", "L_max": L_max, "word_length": word_length,
            "conj_depth": conj_depth, "warnings": warnings}
    return LengthSpectrum(entries, meta)


def octagon_group():
    """Genus-2 surface group of the regular octagon, in SL(2, R).

    Relator a0 a1^-1 a2 a3^-1 a0^-1 a1 a2^-1 a3 (letters 4..7 are inverses).
    """
    alpha = 1 + math.sqrt(2)
    beta = math.sqrt(alpha**2 - 1)
    cayley = np.array([[1, -1j], [1, 1j]])
    cinv = np.linalg.inv(cayley)
    gens = []
    for k in range(4):
        e = np.exp(1j * k * math.pi / 4)
        disk = np.array([[alpha, beta * e], [beta * np.conj(e), alpha]])
        gens.append((cinv @ disk @ cayley).real.tolist())
    relator = [0, 5, 2, 7, 4, 1, 6, 3]
    return FuchsianGroup(gens, relator)
