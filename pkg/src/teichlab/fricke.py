"""SL(2,R) representation engine.

Words in the free group on a, b are strings over {a, A, b, B} with capitals
denoting inverses.  Traces of words are computed two ways: numerically from
explicit matrices, and symbolically from the trace coordinates
(x, y, z) = (Tr A, Tr B, Tr AB) by recursive trace-identity reduction
    Tr(UV) + Tr(UV^{-1}) = Tr(U) Tr(V).
The symbolic route keeps integer inputs exact (all operations are ring
operations), which the Markoff bridge relies on.

Geodesic lengths use the normalization 2 cosh(l/2) = |Tr|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_INV = str.maketrans("aAbB", "AaBb")
_LETTER_TRACE = {"a": "x", "A": "x", "b": "y", "B": "y"}


class WordError(ValueError):
    pass


def invert_word(w: str) -> str:
    return w[::-1].translate(_INV)


def reduce_word(w: str) -> str:
    """Freely reduce: cancel adjacent inverse pairs."""
    out: list[str] = []
    for ch in w:
        if ch not in "aAbB":
            raise WordError("bad letter %r" % ch)
        if out and out[-1] == ch.translate(_INV):
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def concat_reduced(u: str, v: str) -> str:
    """Concatenate two reduced words, cancelling at the join."""
    i = len(u)
    j = 0
    while i > 0 and j < len(v) and u[i - 1] == v[j].translate(_INV):
        i -= 1
        j += 1
    return u[:i] + v[j:]


def cyclic_reduce(w: str) -> str:
    w = reduce_word(w)
    while len(w) >= 2 and w[0] == w[-1].translate(_INV):
        w = w[1:-1]
    return w


_ORD = {"a": 0, "b": 1, "A": 2, "B": 3}


def _wkey(w: str):
    return tuple(_ORD[c] for c in w)


def canonical_cyclic(w: str) -> str:
    """Canonical form of the unoriented conjugacy class of w.

    Minimum over all rotations of the cyclic reduction of w and of its
    inverse, under the letter order a < b < A < B (positive words first).
    Two words name the same unoriented closed curve iff their canonical
    forms coincide.
    """
    w = cyclic_reduce(w)
    if not w:
        return ""
    best = None
    best_key = None
    for u in (w, invert_word(w)):
        for i in range(len(u)):
            r = u[i:] + u[:i]
            k = _wkey(r)
            if best is None or k < best_key:
                best, best_key = r, k
    return best


def _n_caps(w: str) -> int:
    return sum(1 for c in w if c in "AB")


@dataclass(frozen=True)
class Mat2:
    """Unimodular 2x2 real matrix."""

    a: float
    b: float
    c: float
    d: float

    def det(self):
        return self.a * self.d - self.b * self.c

    def check_unimodular(self, tol=1e-12):
        if abs(self.det() - 1.0) > tol * max(1.0, abs(self.a * self.d), abs(self.b * self.c)):
            raise ValueError("matrix not unimodular: det=%r" % self.det())

    def trace(self):
        return self.a + self.d

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inv(self) -> "Mat2":
        # det = 1
        return Mat2(self.d, -self.b, -self.c, self.a)


IDENT = Mat2(1.0, 0.0, 0.0, 1.0)


def trace_word_numeric(A: Mat2, B: Mat2, w: str) -> float:
    """Trace of the matrix product spelled by w (capitals = inverses)."""
    mats = {"a": A, "A": A.inv(), "b": B, "B": B.inv()}
    m = IDENT
    for ch in reduce_word(w):
        m = m @ mats[ch]
    return m.trace()


@dataclass(frozen=True)
class FrickeTriple:
    """Trace coordinates (Tr A, Tr B, Tr AB) of a rank-2 representation."""

    x: float
    y: float
    z: float

    @property
    def kappa(self):
        """Commutator trace x^2 + y^2 + z^2 - xyz - 2 (boundary invariant)."""
        x, y, z = self.x, self.y, self.z
        return x * x + y * y + z * z - x * y * z - 2

    def astuple(self):
        return (self.x, self.y, self.z)


def _rotations(w: str):
    for i in range(len(w)):
        yield w[i:] + w[:i]


def _tr(w: str, x, y, z, memo: dict):
    """Trace polynomial value of the cyclically reduced word w."""
    key = canonical_cyclic(w)
    v = memo.get(key)
    if v is not None:
        return v
    # work on the representative with the fewest inverse letters so that
    # rule 1 strictly reduces their count (termination)
    w = key
    iw = invert_word(w)
    if _n_caps(iw) < _n_caps(w):
        w = iw
    n = len(w)
    if n == 0:
        memo[key] = 2
        return 2
    if n == 1:
        v = x if w in "aA" else y
        memo[key] = v
        return v
    if n == 2 and w in ("ab", "ba"):
        memo[key] = z
        return z
    # rule 1: an inverse letter somewhere -- rotate it to the end:
    #   Tr(P g^-1) = Tr(g) Tr(P) - Tr(P g)
    rot = None
    for r in _rotations(w):
        if r[-1] in "AB":
            rot = r
            break
    if rot is not None:
        g = rot[-1].translate(_INV)
        P = rot[:-1]
        tg = x if g == "a" else y
        v = tg * _tr(cyclic_reduce(P), x, y, z, memo) \
            - _tr(cyclic_reduce(concat_reduced(P, g)), x, y, z, memo)
        memo[key] = v
        return v
    # positive word. rule 2: a doubled letter -- rotate "gg" to the end:
    #   Tr(P g g) = Tr(g) Tr(P g) - Tr(P)
    rot = None
    for r in _rotations(w):
        if r[-1] == r[-2]:
            rot = r
            break
    if rot is not None:
        g = rot[-1]
        P = rot[:-2]
        tg = x if g == "a" else y
        v = tg * _tr(cyclic_reduce(P + g), x, y, z, memo) \
            - _tr(cyclic_reduce(P), x, y, z, memo)
        memo[key] = v
        return v
    # alternating positive word (ab)^k: Chebyshev-style recursion in z
    if n % 2 != 0:
        raise WordError("unreachable word form %r" % w)
    k = n // 2
    t0, t1 = 2, z
    for _ in range(k - 1):
        t0, t1 = t1, z * t1 - t0
    memo[key] = t1
    return t1


def trace_word_fricke(t: FrickeTriple | tuple, w: str, max_len: int = 10_000):
    """Trace of the word w at trace coordinates t, by trace-identity reduction.

    Exact for integer coordinates (the trace polynomial has integer
    coefficients).  Memoized per call on canonical cyclic subwords.
    """
    if isinstance(t, FrickeTriple):
        x, y, z = t.x, t.y, t.z
    else:
        x, y, z = t
    w = cyclic_reduce(w)
    if len(w) > max_len:
        raise WordError("word length %d exceeds cap %d" % (len(w), max_len))
    return _tr(w, x, y, z, {})


def length_trace(tr: float) -> float:
    """Geodesic length from trace: l = 2 arccosh(|tr|/2)."""
    a = abs(tr) / 2.0
    if a < 1.0:
        raise ValueError("|trace| = %g < 2: elliptic/parabolic, no geodesic length" % abs(tr))
    if a > 1e15:
        return 2.0 * (math.log(a) + math.log(2.0))
    return 2.0 * math.acosh(a)


def trace_of_length(ell: float) -> float:
    """Inverse of length_trace on trace >= 2: returns 2 cosh(l/2)."""
    if ell < 0:
        raise ValueError("length must be >= 0")
    return 2.0 * math.cosh(ell / 2.0)


def length_from_log_trace(log_tr: float) -> float:
    """l = 2 arccosh(e^{log_tr}/2) given log |trace|, stable for huge traces."""
    if log_tr > 40.0:
        return 2.0 * log_tr  # relative error < e^{-80}
    tr = math.exp(log_tr)
    if tr < 2.0:
        raise ValueError("trace below 2")
    return 2.0 * math.acosh(tr / 2.0)


def resolve_intersection(l1: float, l2: float, l3: float, eps: int) -> float:
    """Length of the curve resolved at one self-intersection.

    gamma = gamma1 gamma2 crossing once, gamma3 = gamma1 gamma2^{-1}:
    l = 2 Arccosh(2 cosh(l1/2) cosh(l2/2) + eps cosh(l3/2)), eps in {+1,-1}.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    arg = 2.0 * math.cosh(l1 / 2.0) * math.cosh(l2 / 2.0) + eps * math.cosh(l3 / 2.0)
    if arg < 1.0:
        raise ValueError("arccosh argument %g < 1: wrong sign for this configuration" % arg)
    return 2.0 * math.acosh(arg)


_EPS_CACHE: dict[tuple[str, str], int] = {}


def resolve_intersection_word(t: FrickeTriple, w1: str, w2: str) -> tuple[float, int]:
    """Resolve gamma = w1 w2 at its crossing, determining eps numerically.

    The sign is fixed once per (w1, w2) pair by comparison against the word
    engine at a fixed generic representation, then cached.
    """
    ck = (w1, w2)
    w = concat_reduced(reduce_word(w1), reduce_word(w2))
    w3 = concat_reduced(reduce_word(w1), invert_word(reduce_word(w2)))
    eps = _EPS_CACHE.get(ck)
    if eps is None:
        probe = FrickeTriple(2.9, 3.3, 4.1)
        t1 = trace_word_fricke(probe, w1)
        t2 = trace_word_fricke(probe, w2)
        t3 = trace_word_fricke(probe, w3)
        tg = trace_word_fricke(probe, w)
        best = None
        for e in (1, -1):
            # predicted |trace| of gamma: 4 c1 c2 + 2 eps c3 with c_i = |t_i|/2
            pred = abs(t1) * abs(t2) + e * abs(t3)
            err = abs(pred - abs(tg))
            if best is None or err < best[0]:
                best = (err, e)
        eps = best[1]
        _EPS_CACHE[ck] = eps
    l1 = length_trace(trace_word_fricke(t, w1))
    l2 = length_trace(trace_word_fricke(t, w2))
    l3 = length_trace(trace_word_fricke(t, w3))
    return resolve_intersection(l1, l2, l3, eps), eps


def rep_from_fricke(t: FrickeTriple, allow_parabolic: bool = False) -> tuple[Mat2, Mat2]:
    """A realizing pair (A, B) in the fixed normal form: A diagonal, B with a
    unit corner entry (B_21 = 1).

    Requires |x| > 2 (A hyperbolic) and an irreducible solution; otherwise
    raises naming the failed discriminant.
    """
    x, y, z = t.x, t.y, t.z
    disc = x * x - 4.0
    if disc <= 0:
        if abs(disc) < 1e-12 and allow_parabolic:
            return _rep_parabolic(x, y, z)
        raise ValueError(
            "cannot realize with A diagonal: discriminant x^2 - 4 = %g <= 0" % disc)
    lam = (x + math.sqrt(disc)) / 2.0
    A = Mat2(lam, 0.0, 0.0, 1.0 / lam)
    # B = [[p, q], [1, s]],  p + s = y,  lam p + s / lam = z
    p = (z - y / lam) / (lam - 1.0 / lam)
    s = y - p
    q = p * s - 1.0
    if abs(q) < 1e-12:
        raise ValueError(
            "reducible configuration: ps - 1 = %g vanishes (kappa = %g)" % (q, t.kappa))
    B = Mat2(p, q, 1.0, s)
    return A, B


def _rep_parabolic(x, y, z):
    e = 1.0 if x >= 0 else -1.0
    # A = [[e, 1], [0, e]]; B = [[p, q], [r, s]] with r = e(z - e y) forced
    r = e * (z - e * y)
    if abs(r) < 1e-12:
        raise ValueError("parabolic normal form degenerate: corner entry 0")
    p = y / 2.0
    s = y - p
    q = (p * s - 1.0) / r
    return Mat2(e, 1.0, 0.0, e), Mat2(p, q, r, s)
