"""Orbit counting on the once-punctured (or one-holed) torus.

Counts mapping-class-group orbits of curves by length, computes the Thurston
unit-ball area B(X), twist-cone counts, and length-ball volumes with their
Weil-Petersson Monte Carlo averages.

The mapping class group acts on trace coordinates through the four generator
substitutions (twists along the two basis curves and their inverses); on
triples these are the polynomial maps

    T:  (x,y,z) -> (x, z, xz - y)        T^-1: (x,y,z) -> (x, xy - z, y)
    U:  (x,y,z) -> (z, y, yz - x)        U^-1: (x,y,z) -> (xy - z, y, x)

which preserve the boundary invariant kappa exactly.  Orbit searches run on
triples (fast path, nodes deduplicated exactly for integer data) and are
cross-validated against a direct word-orbit enumeration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import farey
from .fricke import (FrickeTriple, canonical_cyclic, cyclic_reduce,
                     length_trace, reduce_word, trace_word_fricke)
from .fn_surface import S11, SurfacePoint, fricke_triple, surface_from_triple


def _triple(X) -> tuple:
    if isinstance(X, FrickeTriple):
        return (X.x, X.y, X.z)
    return tuple(X)


def farey_trace(X, slope: tuple[int, int]):
    """Trace of the simple curve of slope (p,q) by Stern-Brocot descent.

    Falls back to multiprecision when the float recursion overflows.
    """
    t = _triple(X)
    v = farey.slope_trace(t, slope)
    if isinstance(v, float) and not math.isfinite(v):
        import mpmath
        tv = tuple(mpmath.mpf(c) for c in t)
        v = farey.slope_trace(tv, slope)
    return v


# ---------------------------------------------------------------------------
# simple-curve counting


def simple_slopes(X, L: float):
    """All slopes with geodesic length <= L at X, with their traces.

    Farey-tree search from the minimal triangle, pruned where traces exceed
    2 cosh(L/2); outward trace monotonicity is asserted on every edge.
    """
    x, y, z = (abs(v) for v in _triple(X))
    bound = 2.0 * math.cosh(L / 2.0)
    # descend to the minimal triangle: basis (sa, sb), vertices sa, sb, sa+sb
    sa, sb = (1, 0), (0, 1)
    ta, tb, tab = x, y, z
    for _ in range(10_000):
        cur_max = max(ta, tb, tab)
        if tab == cur_max:
            # flip the sum vertex to sa - sb; rebase as (sa-sb, sb), sum sa
            new = abs(ta * tb - tab)
            if new >= cur_max * (1.0 - 1e-12):
                break
            sa, sb, ta, tb, tab = \
                (sa[0] - sb[0], sa[1] - sb[1]), sb, new, tb, ta
        elif ta == cur_max:
            # flip vertex sa to sa + 2sb; rebase as (sb, sa+sb)
            new = abs(tb * tab - ta)
            if new >= cur_max * (1.0 - 1e-12):
                break
            sa, sb, ta, tb, tab = sb, (sa[0] + sb[0], sa[1] + sb[1]), tb, tab, new
        else:
            new = abs(ta * tab - tb)
            if new >= cur_max * (1.0 - 1e-12):
                break
            sa, sb, ta, tb, tab = sa, (sa[0] + sb[0], sa[1] + sb[1]), ta, tab, new
    else:
        raise RuntimeError("minimal-triangle descent did not terminate")

    ssum = (sa[0] + sb[0], sa[1] + sb[1])
    sdif = (sa[0] - sb[0], sa[1] - sb[1])
    tdif = ta * tb - tab
    verts = [(farey.normalize_slope(*sa), ta), (farey.normalize_slope(*sb), tb),
             (farey.normalize_slope(*ssum), tab),
             (farey.normalize_slope(*sdif), tdif)]
    out = {}
    for s, t in verts:
        if t <= bound:
            out[s] = t
    # frontier edges (u, tu, v, tv, opposite trace); every later neighbor
    # across an edge (u,v) is the sum u+v, so seed with the four edges of
    # the minimal triangle and its mirror across (sa, sb)
    edges = [(ssum, tab, sa, ta, tb),
             (ssum, tab, sb, tb, ta),
             (sdif, tdif, sa, ta, tb),
             (sdif, tdif, (-sb[0], -sb[1]), tb, ta)]
    while edges:
        u, tu, v, tv, topp = edges.pop()
        w = (u[0] + v[0], u[1] + v[1])
        tw = tu * tv - topp
        assert tw >= topp * (1.0 - 1e-9) - 1e-9, \
            "trace monotonicity violated at slope %r" % (w,)
        if tw > bound:
            continue
        out[farey.normalize_slope(*w)] = tw
        edges.append((w, tw, u, tu, tv))
        edges.append((w, tw, v, tv, tu))
    return sorted(out.items())


def count_simple(X, L: float) -> int:
    """Number of simple closed geodesics of length <= L at X."""
    return len(simple_slopes(X, L))


# ---------------------------------------------------------------------------
# mapping-class generators: word substitutions, slope matrices, triple maps

_AUTOS = {
    "T": str.maketrans({"b": "ba", "B": "AB"}),
    "t": str.maketrans({"b": "bA", "B": "aB"}),
    "U": str.maketrans({"a": "ab", "A": "BA"}),
    "u": str.maketrans({"a": "aB", "A": "bA"}),
}
_GEN_MATS = {
    "T": (1, 1, 0, 1), "t": (1, -1, 0, 1),
    "U": (1, 0, 1, 1), "u": (1, 0, -1, 1),
}
_TRIPLE_MAPS = {
    "T": lambda x, y, z: (x, z, x * z - y),
    "t": lambda x, y, z: (x, x * y - z, y),
    "U": lambda x, y, z: (z, y, y * z - x),
    "u": lambda x, y, z: (x * y - z, y, x),
}
GENS = "TtUu"


def apply_auto(w: str, g: str) -> str:
    return reduce_word(w.translate(_AUTOS[g]))


def _mat_mul(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


def _mat_key(m):
    """Canonical representative in PSL(2,Z): fix the sign of the first
    nonzero entry (the elliptic involution acts trivially on curves)."""
    for v in m:
        if v != 0:
            return m if v > 0 else tuple(-e for e in m)
    raise ValueError("zero matrix")


_STAB_CACHE: dict[str, int] = {}


def curve_symmetry_order(gamma: str, radius: int = 8) -> int:
    """|Sym(gamma) & Gamma|: order of the mapping-class stabilizer of the
    unoriented class of gamma, found by ball search in the generators.

    Finite for non-simple, non-peripheral classes (the finite subgroups of
    the group have order <= 3, so a modest radius suffices); returns 1 for
    simple classes by convention (their stabilizer contains the infinite
    twist subgroup, which is exactly the redundancy quotiented out by the
    slope parametrization).
    """
    key = canonical_cyclic(gamma)
    if key in _STAB_CACHE:
        return _STAB_CACHE[key]
    if simple_power(gamma):
        _STAB_CACHE[key] = 1
        return 1
    ident = (1, 0, 0, 1)
    seen = {ident: key}
    frontier = [(ident, key)]
    stab = {ident}
    for _ in range(radius):
        nxt = []
        for (m, w) in frontier:
            for g in GENS:
                # applying g to the image word is left composition, so the
                # matrix product is taken in the same order
                m2 = _mat_key(_mat_mul(_GEN_MATS[g], m))
                if m2 in seen:
                    continue
                w2 = canonical_cyclic(apply_auto(w, g))
                seen[m2] = w2
                nxt.append((m2, w2))
                if w2 == key:
                    stab.add(m2)
        frontier = nxt
    order = len(stab)
    for m in stab:
        if m != ident and abs(m[0] + m[3]) >= 2:
            # a parabolic or hyperbolic stabilizer element: Sym is infinite
            # (gamma is a decorated simple class); 0 is the sentinel
            order = 0
            break
    _STAB_CACHE[key] = order
    return order


def point_symmetry_order(X, radius: int = 6, tol: float = 1e-9) -> int:
    """|Aut(X)|: mapping classes in a generator ball fixing the triple."""
    root = _triple(X)
    ident = (1, 0, 0, 1)
    seen = {ident}
    frontier = [(ident, root)]
    aut = 1
    scale = max(abs(v) for v in root)
    for _ in range(radius):
        nxt = []
        for (m, t) in frontier:
            for g in GENS:
                m2 = _mat_key(_mat_mul(m, _GEN_MATS[g]))
                if m2 in seen:
                    continue
                seen.add(m2)
                t2 = _TRIPLE_MAPS[g](*t)
                nxt.append((m2, t2))
                if max(abs(a - b) for a, b in zip(t2, root)) <= tol * scale:
                    aut += 1
        frontier = nxt
    return aut


# ---------------------------------------------------------------------------
# word classification


def word_abelianization(w: str) -> tuple[int, int]:
    w = reduce_word(w)
    return (w.count("a") - w.count("A"), w.count("b") - w.count("B"))


def is_peripheral_word(w: str) -> bool:
    w = cyclic_reduce(w)
    if word_abelianization(w) != (0, 0) or len(w) % 4 != 0 or not w:
        return False
    k = len(w) // 4
    return canonical_cyclic(w) == canonical_cyclic("abAB" * k)


def is_simple_word(w: str) -> bool:
    """True iff w is conjugate (up to inversion) to a primitive slope word."""
    return simple_power(w) == 1


def simple_power(w: str) -> int:
    """k > 0 if w is conjugate to the k-th power of a slope word, else 0."""
    p, q = word_abelianization(w)
    if (p, q) == (0, 0):
        return 0
    k = math.gcd(p, q)
    base = farey.slope_word(p // k, q // k)
    if canonical_cyclic(w) == canonical_cyclic(base * k):
        return k
    return 0


# ---------------------------------------------------------------------------
# orbit BFS over triples


def _is_integral(t) -> bool:
    return all(isinstance(v, int) or (isinstance(v, float) and v.is_integer()
                                      and abs(v) < 2**52) for v in t)


def _key_of(t, integral: bool):
    if integral:
        return (int(t[0]), int(t[1]), int(t[2]))
    # double rounding absorbs path-dependent low-bit differences of the
    # high-precision node values while staying injective on distinct nodes
    key = (float(t[0]), float(t[1]), float(t[2]))
    if all(math.isfinite(v) for v in key):
        return key
    import mpmath
    return tuple(mpmath.nstr(v, 9) for v in t)


def _length_int_trace(tr: int) -> float:
    tr = abs(tr)
    if tr < 2:
        raise ArithmeticError("non-hyperbolic trace %d along the orbit" % tr)
    if tr > 10 ** 15:
        # 2 arccosh(t/2) = 2 log t - 2 log 2 + O(t^-2); math.log is exact
        # for arbitrarily large ints
        return 2.0 * (math.log(tr) - math.log(2.0))
    return 2.0 * math.acosh(tr / 2.0)


class _PlanCell:
    """Operand recorder: running trace_word_fricke on three of these captures
    the trace-identity reduction of a fixed word as a straight-line program
    (the reduction branches only on the word, never on the values)."""

    __slots__ = ("plan", "idx")

    def __init__(self, plan, idx):
        self.plan = plan
        self.idx = idx

    def _emit(self, op, other):
        plan = self.plan
        if not isinstance(other, _PlanCell):
            kkey = ("k", int(other))
            ki = plan["cache"].get(kkey)
            if ki is None:
                ki = len(plan["instrs"])
                plan["instrs"].append(("k", int(other), 0))
                plan["cache"][kkey] = ki
            ob = ki
        else:
            ob = other.idx
        key = (op, self.idx, ob)
        hit = plan["cache"].get(key)
        if hit is not None:
            return _PlanCell(plan, hit)
        idx = len(plan["instrs"])
        plan["instrs"].append((op, self.idx, ob))
        plan["cache"][key] = idx
        return _PlanCell(plan, idx)

    def __mul__(self, other):
        return self._emit("*", other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self._emit("-", other)


_TRACE_PLANS: dict = {}


def _trace_plan(gamma: str):
    """(instrs, out_idx) evaluating tr(gamma) from registers x, y, z."""
    plan = _TRACE_PLANS.get(gamma)
    if plan is None:
        rec = {"instrs": [("in", i, 0) for i in range(3)], "cache": {}}
        cells = tuple(_PlanCell(rec, i) for i in range(3))
        out = trace_word_fricke(cells, gamma)
        if not isinstance(out, _PlanCell):
            rec["instrs"].append(("k", int(out), 0))
            out_idx = len(rec["instrs"]) - 1
        else:
            out_idx = out.idx
        plan = (tuple(rec["instrs"]), out_idx)
        _TRACE_PLANS[gamma] = plan
    return plan


def _plan_eval_float(plan, x, y, z):
    """(value, certified absolute error) of the plan in doubles.

    Forward error analysis per instruction; the caller rejects the result
    when the bound is not tiny relative to the value (the polynomial can
    cancel through deg * log10(coordinate) digits)."""
    eps = 2.3e-16
    instrs, out = plan
    vals = [0.0] * len(instrs)
    errs = [0.0] * len(instrs)
    ins = (x, y, z)
    for i, (op, a, b) in enumerate(instrs):
        if op == "in":
            vals[i] = ins[a]
            errs[i] = eps * abs(ins[a])
        elif op == "k":
            vals[i] = float(a)
        elif op == "*":
            v = vals[a] * vals[b]
            vals[i] = v
            errs[i] = abs(vals[a]) * errs[b] + abs(vals[b]) * errs[a] \
                + eps * abs(v)
        else:
            v = vals[a] - vals[b]
            vals[i] = v
            errs[i] = errs[a] + errs[b] + eps * abs(v)
    return vals[out], errs[out]


def _plan_eval(plan, x, y, z):
    """Evaluate the plan in whatever arithmetic the inputs carry."""
    instrs, out = plan
    vals = [None] * len(instrs)
    ins = (x, y, z)
    for i, (op, a, b) in enumerate(instrs):
        if op == "in":
            vals[i] = ins[a]
        elif op == "k":
            vals[i] = a
        elif op == "*":
            vals[i] = vals[a] * vals[b]
        else:
            vals[i] = vals[a] - vals[b]
    return vals[out]


def _node_length(t, gamma: str, integral: bool) -> float:
    """l_gamma at a triple node, immune to the catastrophic cancellation of
    float trace polynomials at large coordinates: exact big-int arithmetic
    for integral data, float matrix products while the tracked error bound
    is negligible, multiprecision otherwise."""
    if integral:
        return _length_int_trace(trace_word_fricke(t, gamma))
    plan = _trace_plan(gamma)
    fx, fy, fz = (float(v) for v in t)
    if all(math.isfinite(v) for v in (fx, fy, fz)):
        tr, err = _plan_eval_float(plan, fx, fy, fz)
        if math.isfinite(tr) and math.isfinite(err):
            tr = abs(tr)
            if tr > 2.0 + 1e-6 and err < 1e-8 * tr:
                return 2.0 * math.acosh(tr / 2.0)
    import mpmath
    # the trace polynomial has degree <= len(gamma) in the coordinates, so
    # the working precision must absorb that many orders of cancellation
    m = max(abs(v) for v in t)
    fm = max(abs(fx), abs(fy), abs(fz))
    if math.isfinite(fm):
        digits = max(0, int(math.log10(fm + 1.0)) + 1)
    else:
        digits = int(mpmath.log10(m + 1)) + 1
    dps = 50 + len(gamma) * digits
    with mpmath.workdps(dps):
        tm = tuple(mpmath.mpf(v) if isinstance(v, float) else v for v in t)
        tr = abs(_plan_eval(plan, *tm))
        if tr < 2:
            if tr > 2 - mpmath.mpf("1e-9"):
                return 0.0
            raise ArithmeticError(
                "non-hyperbolic trace %s for %r along the orbit"
                % (mpmath.nstr(tr, 8), gamma))
        ftr = float(tr)
        if math.isfinite(ftr):
            # acosh(T/2) = log T up to O(T^-2) once T is this large
            return 2.0 * math.acosh(ftr / 2.0) if ftr < 1e15 \
                else 2.0 * math.log(ftr)
        return float(2 * mpmath.log(tr))


def _orbit_bfs(X, gamma: str, L: float, prune_c: float = 3.0,
               debug_validate: bool = True, max_nodes: int = 5_000_000):
    """BFS over the triple orbit of X; returns (lengths <= L, node count,
    pruned count, validation violations).

    Nodes are expanded while l_gamma <= prune_c * L and counted when
    l_gamma <= L.  With debug_validate every pruned node is expanded one
    extra level and any child re-entering the counting range is a violation
    (the caller must treat violations > 0 as a hard failure).
    """
    root = _triple(X)
    integral = _is_integral(root)
    old_dps = None
    if integral:
        root = tuple(int(v) for v in root)
    else:
        import mpmath
        # node coordinates must stay accurate through the trace cancellation
        # at the pruning frontier, which digs ~deg * log10(coord) digits
        need = 60 + int(0.25 * len(gamma) * prune_c * L)
        old_dps = mpmath.mp.dps
        mpmath.mp.dps = max(mpmath.mp.dps, need)
        root = tuple(mpmath.mpf(float(v)) for v in root)
    try:
        kappa0 = root[0] ** 2 + root[1] ** 2 + root[2] ** 2 \
            - root[0] * root[1] * root[2] - 2
        seen = {_key_of(root, integral)}
        frontier = [root]
        counted = []
        nodes = 0
        pruned_nodes = []
        cL = prune_c * L
        while frontier:
            if nodes > max_nodes:
                raise ArithmeticError(
                    "orbit search exceeded %d nodes: gamma=%r may be "
                    "non-filling (unbounded twist families stay below the "
                    "pruning threshold)" % (max_nodes, gamma))
            nxt = []
            for node in frontier:
                lv = _node_length(node, gamma, integral)
                if lv <= L:
                    counted.append(float(lv))
                nodes += 1
                if lv > cL:
                    pruned_nodes.append(node)
                    continue
                if not integral:
                    k = node[0] ** 2 + node[1] ** 2 + node[2] ** 2 \
                        - node[0] * node[1] * node[2] - 2
                    if abs(k - kappa0) > 1e-7 * max(1.0, abs(kappa0)):
                        raise ArithmeticError("kappa drifted along the orbit")
                for g in GENS:
                    child = _TRIPLE_MAPS[g](*node)
                    ck = _key_of(child, integral)
                    if ck not in seen:
                        seen.add(ck)
                        nxt.append(child)
            frontier = nxt
        violations = 0
        if debug_validate and pruned_nodes:
            ekeys = set()
            for node in pruned_nodes:
                for g in GENS:
                    child = _TRIPLE_MAPS[g](*node)
                    ck = _key_of(child, integral)
                    if ck not in seen and ck not in ekeys:
                        ekeys.add(ck)
                        if _node_length(child, gamma, integral) <= L:
                            violations += 1
        return counted, nodes, len(pruned_nodes), violations
    finally:
        if old_dps is not None:
            import mpmath
            mpmath.mp.dps = old_dps


# ---------------------------------------------------------------------------
# word-orbit oracle


def _mp_rep(t):
    """Multiprecision realizing matrices for (x, y, z) and their inverses,
    A diagonal; words in the orbit BFS get long, so traces are computed as
    matrix products (linear cost) rather than by polynomial reduction."""
    import mpmath
    x, y, z = (mpmath.mpf(v) if isinstance(v, int) else mpmath.mpf(float(v))
               for v in _triple(t))
    if abs(x) <= 2:
        raise ValueError("first coordinate trace %s not hyperbolic" % x)
    lam = (x + mpmath.sqrt(x * x - 4)) / 2
    p = (z - y / lam) / (lam - 1 / lam)
    s = y - p
    q = p * s - 1
    if q == 0:
        raise ValueError("reducible configuration: cannot realize matrices")
    one = mpmath.mpf(1)
    return {
        "a": (lam, 0 * one, 0 * one, 1 / lam),
        "A": (1 / lam, 0 * one, 0 * one, lam),
        "b": (p, q, one, s),
        "B": (s, -q, -one, p),
    }


def _word_trace_mp(mats, w):
    m = None
    for ch in w:
        g = mats[ch]
        m = g if m is None else _mat_mul(m, g)
    return abs(m[0] + m[3])


def _word_orbit_lengths(X, gamma: str, L: float, prune_c: float = 3.0,
                        max_nodes: int = 2_000_000):
    """BFS over canonical conjugacy classes under the generator
    substitutions; returns (lengths <= L, node count, pruned count,
    validation violations).  Counts curves directly with no bookkeeping,
    so it also handles classes with infinite symmetry.
    """
    import mpmath
    old_dps = mpmath.mp.dps
    mpmath.mp.dps = max(old_dps, 60 + int(0.5 * prune_c * L))
    mats = _mp_rep(X)
    root = canonical_cyclic(gamma)

    def ell(w):
        tr = _word_trace_mp(mats, w)
        if tr < 2:
            if tr > 2 - mpmath.mpf("1e-9"):
                return 0.0
            raise ArithmeticError(
                "non-hyperbolic trace %s for %r along the word orbit"
                % (mpmath.nstr(tr, 8), w))
        return float(2 * mpmath.acosh(tr / 2))

    counted = []
    lr = ell(root)
    if lr <= L:
        counted.append(lr)
    seen = {root}
    frontier = [root]
    nodes = 1
    pruned_words = []
    cL = prune_c * L
    while frontier:
        if nodes > max_nodes:
            raise ArithmeticError(
                "word-orbit search exceeded %d classes" % max_nodes)
        nxt = []
        for w in frontier:
            if ell(w) > cL:
                pruned_words.append(w)
                continue
            for g in GENS:
                w2 = canonical_cyclic(apply_auto(w, g))
                if w2 in seen:
                    continue
                seen.add(w2)
                nodes += 1
                nxt.append(w2)
                lw = ell(w2)
                if lw <= L:
                    counted.append(lw)
        frontier = nxt
    violations = 0
    for w in pruned_words:
        for g in GENS:
            w2 = canonical_cyclic(apply_auto(w, g))
            if w2 not in seen:
                seen.add(w2)
                if ell(w2) <= L:
                    violations += 1
    mpmath.mp.dps = old_dps
    return counted, nodes, len(pruned_words), violations


def count_orbit_word_bruteforce(X, gamma: str, L: float,
                                prune_c: float = 3.0) -> int:
    """Direct curve count used to validate the triple engine."""
    lengths, _, _, violations = _word_orbit_lengths(X, gamma, L, prune_c)
    if violations:
        raise ArithmeticError("pruning validation failed in word-orbit count")
    return len(lengths)


# ---------------------------------------------------------------------------
# count report


@dataclass
class CountReport:
    schema: str
    X: tuple
    gamma: str
    L_grid: list[float]
    counts: list[int]
    normalized: list[float]
    a1: int
    a3: int
    sym_order: int
    aut_order: int
    orbit_nodes: int
    pruned: int
    prune_constant: float
    prune_violations: int
    B: float | None = None
    fitted_constant: float | None = None
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "CountReport":
        d = json.loads(s)
        d["X"] = tuple(d["X"])
        return cls(**d)


def count_orbit_word(X, gamma: str, L: float, prune_c: float = 3.0,
                     grid: list[float] | None = None,
                     compute_B: bool = False,
                     debug_validate: bool = True) -> CountReport:
    """Count curves in the mapping-class orbit of gamma with length <= L.

    Simple gamma routes through the slope count (the orbit of a simple
    curve is all simple curves).  Otherwise the triple-orbit BFS counts
    orbit nodes and converts to a curve count A1 via the exact relation
    #elements = #nodes * |Aut(X)| = #curves * |Sym(gamma)|; A3 = sym * A1.
    """
    gamma = cyclic_reduce(gamma)
    if is_peripheral_word(gamma) or not gamma:
        raise ValueError("gamma is peripheral; its orbit is not counted")
    t = _triple(X)
    if grid is None:
        grid = [L / 2.0, 0.75 * L, L]
    grid = sorted(set(float(g) for g in grid if 0 < g <= L)) or [L]
    if grid[-1] != L:
        grid.append(L)
    sym = curve_symmetry_order(gamma)
    k = simple_power(gamma)
    if k:
        # orbit of the k-th power of a simple curve = k-th powers of all
        # simple curves; length scales by k
        counts = [count_simple(t, g / k) for g in grid]
        a1 = counts[-1]
        report = CountReport(
            schema="ORB1", X=t, gamma=gamma, L_grid=grid, counts=counts,
            normalized=[c / g ** 2 for c, g in zip(counts, grid)],
            a1=a1, a3=a1, sym_order=1, aut_order=point_symmetry_order(t),
            orbit_nodes=a1, pruned=0, prune_constant=prune_c,
            prune_violations=0,
            metadata={"engine": "simple-slope", "kappa": _kappa(t),
                      "simple_power": k})
    elif sym == 0:
        # infinite symmetry (gamma is simple with decoration, e.g. a power
        # times a boundary conjugate): the node bookkeeping breaks down, so
        # count curves directly over conjugacy classes
        lengths, nodes, pruned, violations = _word_orbit_lengths(
            t, gamma, L, prune_c)
        if violations:
            raise ArithmeticError(
                "pruning validation failed: %d class(es) beyond the pruned "
                "frontier re-entered the counting range" % violations)
        arr = np.sort(np.array(lengths))
        counts = [int(np.searchsorted(arr, g, side="right")) for g in grid]
        a1 = counts[-1]
        report = CountReport(
            schema="ORB1", X=t, gamma=gamma, L_grid=grid, counts=counts,
            normalized=[c / g ** 2 for c, g in zip(counts, grid)],
            a1=a1, a3=a1, sym_order=0, aut_order=point_symmetry_order(t),
            orbit_nodes=nodes, pruned=pruned, prune_constant=prune_c,
            prune_violations=violations,
            metadata={"engine": "word-orbit", "kappa": _kappa(t),
                      "note": "Sym(gamma) infinite; a3 reported equal to a1"})
    else:
        aut = point_symmetry_order(t)
        lengths, nodes, pruned, violations = _orbit_bfs(
            t, gamma, L, prune_c, debug_validate)
        if violations:
            raise ArithmeticError(
                "pruning validation failed: %d node(s) beyond the pruned "
                "frontier re-entered the counting range; rerun with a larger "
                "prune constant" % violations)
        arr = np.sort(np.array(lengths))
        counts = []
        for g in grid:
            a2 = int(np.searchsorted(arr, g, side="right"))
            a1g = a2 * aut / sym
            if abs(a1g - round(a1g)) > 1e-6:
                raise ArithmeticError(
                    "node count %d not divisible by sym/aut bookkeeping "
                    "(aut=%d sym=%d)" % (a2, aut, sym))
            counts.append(int(round(a1g)))
        a1 = counts[-1]
        report = CountReport(
            schema="ORB1", X=t, gamma=gamma, L_grid=grid, counts=counts,
            normalized=[c / g ** 2 for c, g in zip(counts, grid)],
            a1=a1, a3=sym * a1, sym_order=sym, aut_order=aut,
            orbit_nodes=nodes, pruned=pruned, prune_constant=prune_c,
            prune_violations=violations,
            metadata={"engine": "triple-orbit", "kappa": _kappa(t)})
    if compute_B:
        report.B = thurston_ball_B(t, 1e-6)
        report.fitted_constant = report.a1 / (L * L * report.B)
    return report


def _kappa(t) -> float:
    x, y, z = t
    return float(x * x + y * y + z * z - x * y * z - 2)


# ---------------------------------------------------------------------------
# Thurston unit-ball area


def _adaptive_simpson(f, a, b, tol, fa, fm, fb, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    left = (m - a) / 6.0 * (fa + 4 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4 * frm + fb)
    if depth <= 0:
        raise ArithmeticError(
            "sector integral not converged (achieved %g)" % abs(left + right - whole))
    if abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    # halved tolerance floored at integrand noise level, else the recursion
    # chases roundoff to the depth limit
    sub = max(tol / 2, 1e-14)
    return (_adaptive_simpson(f, a, m, sub, fa, flm, fm, depth - 1)
            + _adaptive_simpson(f, m, b, sub, fm, frm, fb, depth - 1))


def thurston_ball_B(X, tol: float = 1e-6) -> float:
    """Area of the unit length ball {lam in ML ~ R^2 : l_lam(X) <= 1}.

    B = (1/2) Integral_0^pi r(theta)^2 dtheta with r = 1 / (homogeneous
    length of the unit direction), matching the normalization where lattice
    points mod +-1 are the integral multicurves.
    """
    t = _triple(X)

    def f(theta):
        rate = farey.direction_length_rate(t, math.cos(theta), math.sin(theta))
        return 0.5 / (rate * rate)

    a, b = 0.0, math.pi
    m = 0.5 * (a + b)
    return _adaptive_simpson(f, a, b, tol, f(a), f(m), f(b), 40)


def integral_multicurve_count(X, L: float) -> int:
    """#{integral multicurves k*slope with length <= L} = sum floor(L/l_s);
    grows like B(X) * L^2."""
    total = 0
    for (_, tr) in simple_slopes(X, L):
        ls = length_trace(tr)
        total += int(L / ls)
    return total


# ---------------------------------------------------------------------------
# cone counts


def _complete_slope(p: int, q: int) -> tuple[int, int]:
    """A slope (u,v) with p*v - q*u = 1."""
    if q == 0:
        return (0, 1)
    v = pow(p % q, -1, q) if q > 1 else 0
    u = (p * v - 1) // q
    return (u, v)


def cone_count(X, m: int, L: float, l1: float | None = None) -> int:
    """Orbit points g.X with coordinate-curve length <= L and twist in the
    cone m*l <= tau <= (m+1)*l.

    Each simple slope s with l_s(X) <= L carries the one-parameter twist
    family of re-markings (l_s, tau0 + k l_s); the Fenchel-Nielsen data is
    recovered from the re-marked Fricke triple through the calibrated chart
    inverse, and the cone selects the k's landing in it.
    """
    t = _triple(X)
    if l1 is None:
        k = _kappa(t)
        if k > -2.0 + 1e-9:
            raise ValueError("kappa=%g > -2: not a torus point" % k)
        l1 = 2.0 * math.acosh(max(1.0, -k / 2.0))
    import mpmath
    tm = tuple(mpmath.mpf(v) for v in t)
    memo = {}
    total = 0
    seen_nodes = set()
    with mpmath.workdps(80):
        for (s, _) in simple_slopes(t, L):
            sp = _complete_slope(*s)
            # twist-reduce the completion: sp + k*s all complete s, and the
            # cone total is invariant under the choice, so take the one with
            # the smallest trace to keep the chart inversion well scaled
            tr2 = abs(farey.slope_trace(tm, sp, memo))
            for step in (1, -1):
                while True:
                    cand = (sp[0] + step * s[0], sp[1] + step * s[1])
                    trc = abs(farey.slope_trace(tm, cand, memo))
                    if trc < tr2:
                        sp, tr2 = cand, trc
                    else:
                        break
            t1 = abs(farey.slope_trace(tm, s, memo))
            t3 = abs(farey.slope_trace(tm, (s[0] + sp[0], s[1] + sp[1]), memo))
            ell = 2 * mpmath.acosh(t1 / 2)
            if l1 == 0.0:
                half = mpmath.coth(ell / 2)
            else:
                half = mpmath.sqrt(2 * mpmath.cosh(mpmath.mpf(l1) / 2)
                                   + 2 * mpmath.cosh(ell)) / (2 * mpmath.sinh(ell / 2))
            c = tr2 / (2 * half)
            tau0 = 2 * mpmath.acosh(c) if c > 1 else mpmath.mpf(0)
            # the trace pair (t2, t3) only determines tau0 up to sign
            zp = 2 * half * mpmath.cosh((ell + tau0) / 2)
            zn = 2 * half * mpmath.cosh((ell - tau0) / 2)
            if abs(zn - t3) < abs(zp - t3):
                tau0 = -tau0
            f = float(mpmath.frac(tau0 / ell))
            node_key = (round(float(ell), 9), round(f, 9))
            if node_key in seen_nodes:
                continue
            seen_nodes.add(node_key)
            # integers k with m <= tau0/l + k <= m + 1
            klo = math.ceil(m - f - 1e-12)
            khi = math.floor(m + 1 - f + 1e-12)
            total += max(0, khi - klo + 1)
    return total


# ---------------------------------------------------------------------------
# ball volume and Weil-Petersson average

SYSTOLE_TOP = 1.93  # the maximal systole of a cusped torus is 2 arccosh(3/2)


def _mp_fricke_triple(l1: float, ell, tau, extra_dps: int = 0):
    """Trace coordinates from (ell, tau) in multiprecision.

    Near the reducible locus the trace of a word is sensitive to the triple
    far beyond double precision (the polynomial cancels through ~deg *
    log10(coord) digits), so the chart itself must be evaluated at the
    precision the downstream trace needs.
    """
    import mpmath
    dps = 60 + extra_dps
    with mpmath.workdps(dps):
        ell = mpmath.mpf(ell)
        tau = mpmath.mpf(tau)
        x = 2 * mpmath.cosh(ell / 2)
        if l1 == 0.0:
            m = mpmath.coth(ell / 2)
        else:
            m = mpmath.sqrt(2 * mpmath.cosh(mpmath.mpf(l1) / 2)
                            + 2 * mpmath.cosh(ell)) / (2 * mpmath.sinh(ell / 2))
        y = 2 * m * mpmath.cosh(tau / 2)
        z = 2 * m * mpmath.cosh((ell + tau) / 2)
        return (x, y, z)


def _gamma_length_fn(gamma: str, l1: float):
    deg = len(gamma)

    def f(ell, tau):
        # precision to survive the trace cancellation at these coordinates
        extra = int(0.25 * deg * (abs(ell) + abs(tau))) + 20
        t = _mp_fricke_triple(l1, ell, tau, extra_dps=extra)
        return _node_length(t, gamma, False)
    return f


def _twist_lipschitz(gamma: str) -> float:
    """Certified Lipschitz constant of tau -> l_gamma: the twist derivative
    is a sum of cosines over the crossings with the twist curve, one for
    each letter of the transverse generator (with margin)."""
    nb = gamma.count("b") + gamma.count("B")
    return 2.0 + 2.0 * max(1, nb)


def _tau_measure(f, ell, L, K, tol=None, budget=400_000):
    """Lebesgue measure of {tau : f(ell, tau) <= L}.

    The sublevel set of a non-simple curve along the twist line is a union
    of intervals (length is convex along twists only for simple curves), so
    the measure is computed by certified interval subdivision: with
    |df/dtau| <= K, a block is fully inside when the endpoint average plus
    K h/4 stays under L and fully outside when it minus K h/4 exceeds L.
    Blocks smaller than tol fall back to the midpoint rule, which only
    happens along threshold crossings and near-threshold plateaus.
    """
    if tol is None:
        tol = 1e-3 * max(1.0, ell)
    evals = [0]

    def g(tau):
        evals[0] += 1
        if evals[0] > budget:
            raise ArithmeticError(
                "twist measure exceeded %d evaluations at ell=%g" % (budget, ell))
        return f(ell, float(tau))

    def rec(a, b, fa, fb, depth):
        h = b - a
        m = 0.5 * (a + b)
        fm = g(m)
        hi_bound = max((fa + fm) / 2.0, (fm + fb) / 2.0) + K * h / 4.0
        if hi_bound <= L:
            return h
        lo_bound = min((fa + fm) / 2.0, (fm + fb) / 2.0) - K * h / 4.0
        if lo_bound > L:
            return 0.0
        if h < tol or depth <= 0:
            return h if fm <= L else 0.0
        return rec(a, m, fa, fm, depth - 1) + rec(m, b, fm, fb, depth - 1)

    def block(a, b):
        return rec(a, b, g(a), g(b), 60)

    T = max(4.0 * ell, 8.0)
    total = block(-T, T)
    empty_shells = 0
    for _ in range(40):
        s_hi = block(T, 2.0 * T)
        s_lo = block(-2.0 * T, -T)
        total += s_hi + s_lo
        empty_shells = empty_shells + 1 if s_hi == 0.0 and s_lo == 0.0 else 0
        T *= 2.0
        if empty_shells >= 2:
            return total
    raise ArithmeticError("twist sublevel set unbounded: gamma not filling")


def require_filling(gamma: str):
    gamma = cyclic_reduce(gamma)
    if is_peripheral_word(gamma):
        raise ValueError("gamma=%r is peripheral: length ball has infinite volume"
                         % gamma)
    p, q = word_abelianization(gamma)
    if (p, q) != (0, 0):
        g = math.gcd(p, q)
        base = farey.slope_word(p // g, q // g)
        if canonical_cyclic(gamma) == canonical_cyclic(base * g):
            raise ValueError(
                "gamma=%r is a power of a simple curve: not filling" % gamma)
    if curve_symmetry_order(gamma) == 0:
        raise ValueError(
            "gamma=%r has an infinite twist stabilizer: not filling" % gamma)
    return gamma


def ball_length_region_volume(gamma: str, L: float, l1: float = 0.0,
                              grid_n: int = 200) -> float:
    """FN-area of {(l,tau) : l_gamma <= L} divided by |Sym(gamma)|, i.e.
    the volume of a Sym-fundamental region of the length ball."""
    gamma = require_filling(gamma)
    f = _gamma_length_fn(gamma, l1)
    K = _twist_lipschitz(gamma)

    def w(e):
        return _tau_measure(f, e, L, K)

    # coarse bracket in ell: widths vanish for very short and very long ell
    ell = None
    for k in range(-12, 8):
        cand = 2.0 ** k
        if w(cand) > 0.0:
            ell = cand
            break
    if ell is None:
        return 0.0
    ell_lo = ell
    while ell_lo > 1e-8 and w(ell_lo * 0.5) > 0.0:
        ell_lo *= 0.5
    ell_hi = ell
    while ell_hi < 64 * L:
        if w(ell_hi * 2.0) == 0.0:
            break
        ell_hi *= 2.0
    else:
        raise ArithmeticError("length region unbounded in ell: gamma not filling")
    # refine the support endpoints by bisection
    lo_a, lo_b = ell_lo * 0.5, ell_lo
    for _ in range(20):
        m = 0.5 * (lo_a + lo_b)
        if w(m) == 0.0:
            lo_a = m
        else:
            lo_b = m
    hi_a, hi_b = ell_hi, ell_hi * 2.0
    for _ in range(20):
        m = 0.5 * (hi_a + hi_b)
        if w(m) == 0.0:
            hi_b = m
        else:
            hi_a = m
    ell_min, ell_max = lo_b, hi_a

    xs = np.linspace(ell_min, ell_max, grid_n)
    ws = np.array([w(float(e)) for e in xs])
    trapezoid = getattr(np, "trapezoid", np.trapz)
    area = float(trapezoid(ws, xs))
    return area / curve_symmetry_order(gamma)


def _mc_orbit_count(t, gamma, L, prune_c):
    lengths, _, _, violations = _orbit_bfs(t, gamma, L, prune_c,
                                           debug_validate=True)
    if violations:
        raise ArithmeticError("pruning validation failed in MC sampling")
    return len(lengths)


def ball_volume_and_average(gamma: str, L: float, mc_samples: int = 2000,
                            seed: int = 0, l1: float = 0.0,
                            grid_n: int = 200, prune_c: float = 1.5,
                            workers: int = 1):
    """(vol, avg, stderr): the FN-area of a Sym(gamma)-fundamental region of
    the length ball {l_gamma <= L}, and the Monte Carlo estimate of
    Integral over moduli of s_X(L, gamma) dX, which the unfolding identity
    makes equal; the contract is agreement within 3 standard errors.

    Moduli fundamental domain: coordinate curve is the shortest simple
    curve, twist in [0, l); samples are drawn with density proportional to
    l on the wedge below the maximal systole, each from its own
    counter-based RNG stream keyed by (seed, sample index) so the result is
    independent of worker scheduling.
    """
    if mc_samples < 1000:
        raise ValueError("mc_samples must be >= 1000")
    gamma = require_filling(gamma)
    vol = ball_length_region_volume(gamma, L, l1=l1, grid_n=grid_n)
    sym = curve_symmetry_order(gamma)

    idx = list(range(mc_samples))
    if workers > 1:
        from ._util import parallel_map
        vals = parallel_map(_mc_sample_value,
                            [(i, seed, gamma, L, l1, sym, prune_c) for i in idx],
                            workers)
    else:
        vals = [_mc_sample_value((i, seed, gamma, L, l1, sym, prune_c))
                for i in idx]
    vals = np.array(vals, dtype=float)
    region_area = SYSTOLE_TOP ** 2 / 2.0
    avg = region_area * float(np.mean(vals))
    stderr = region_area * float(np.std(vals, ddof=1)) / math.sqrt(mc_samples)
    return vol, avg, stderr


def _mc_sample_value(args):
    i, seed, gamma, L, l1, sym, prune_c = args
    rng = np.random.Generator(np.random.Philox(key=[seed, i]))
    u1, u2, u3 = rng.random(3)
    ell = SYSTOLE_TOP * max(u1, u2)  # density ~ ell on (0, top]
    tau = u3 * ell
    X = SurfacePoint(S11, (l1,), ell, tau)
    t = fricke_triple(X)
    # fundamental domain: the coordinate curve must be the systole
    xbound = 2.0 * math.cosh(ell / 2.0)
    shortest = min(tr for (_, tr) in simple_slopes(t, ell + 1e-6))
    if shortest < xbound * (1.0 - 1e-12):
        return 0.0
    a2 = _mc_orbit_count((t.x, t.y, t.z), gamma, L, prune_c)
    return a2 / sym
