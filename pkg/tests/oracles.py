"""Independent brute-force oracles for the test suite.

These deliberately avoid the library's own algorithms: membership and
predicate oracles enumerate, delta is computed through an exact integer-lift
model, and module structure is read off by counting elements.
"""

from itertools import product
from math import comb

import numpy as np


# -- monoid oracles -----------------------------------------------------------------


def enum_monoid(gens, units, bound, rank):
    """All monoid elements reachable with generator coefficients <= bound
    (units stepped in both directions), within a coordinate box."""
    box = bound * 4
    seen = {(0,) * rank}
    frontier = [(0,) * rank]
    steps = [tuple(g) for g in gens]
    steps += [tuple(-x for x in u) for u in units]
    steps += [tuple(u) for u in units]
    for _ in range(bound):
        nxt = []
        for v in frontier:
            for g in steps:
                w = tuple(a + b for a, b in zip(v, g))
                if w not in seen and all(abs(c) <= box for c in w):
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def oracle_member(pres, v, bound=12):
    """Exhaustive membership: nonneg combos of generators modulo units."""
    rank = pres.ambient_rank
    units = list(pres.unit_lattice)

    def unit_reachable(r):
        if not any(r):
            return True
        if not units:
            return False
        reach = {(0,) * rank}
        frontier = [(0,) * rank]
        for _ in range(bound * 2):
            nxt = []
            for x in frontier:
                for u in units:
                    for s in (1, -1):
                        w = tuple(a + s * b for a, b in zip(x, u))
                        if w not in reach and all(abs(c) <= bound * 6 for c in w):
                            reach.add(w)
                            nxt.append(w)
            if tuple(r) in reach:
                return True
            frontier = nxt
        return tuple(r) in reach

    gens = list(pres.generators)
    for coeffs in product(range(bound + 1), repeat=len(gens)):
        w = [0] * rank
        for c, g in zip(coeffs, gens):
            for i in range(rank):
                w[i] += c * g[i]
        if unit_reachable(tuple(a - b for a, b in zip(v, w))):
            return True
    return False


def oracle_exact(h, bound=12):
    """(h^gp)^{-1}(dst) == src on the box of the source group."""
    src_gp = h.src.groupify()
    for coeffs in product(range(-bound, bound + 1), repeat=len(src_gp)):
        v = [0] * h.src.ambient_rank
        for c, b in zip(coeffs, src_gp):
            for i in range(len(v)):
                v[i] += c * b[i]
        img = h.apply(tuple(v))
        if oracle_member(h.dst, img, bound) and not oracle_member(h.src, tuple(v), bound):
            return False
    return True


def oracle_integral(h, bound=4):
    """The equational criterion by full enumeration."""
    src = sorted(enum_monoid(h.src.generators, h.src.unit_lattice, bound,
                             h.src.ambient_rank))
    dst = sorted(enum_monoid(h.dst.generators, h.dst.unit_lattice, bound,
                             h.dst.ambient_rank))
    dst_set = set(dst)
    for m1 in src:
        for n1 in dst:
            lhs = tuple(a + b for a, b in zip(h.apply(m1), n1))
            for m2 in src:
                n2 = tuple(a - b for a, b in zip(lhs, h.apply(m2)))
                if n2 not in dst_set or m1 == m2:
                    continue
                found = False
                for m3 in src:
                    n = tuple(a - b for a, b in zip(n1, h.apply(m3)))
                    if n not in dst_set:
                        continue
                    m4 = tuple(a + b - c for a, b, c in zip(m1, m3, m2))
                    if m4 not in set(src):
                        continue
                    if tuple(a - b for a, b in zip(n2, h.apply(m4))) == n:
                        found = True
                        break
                if not found:
                    return False
    return True


# -- integer-lift delta oracle ---------------------------------------------------------


class IntPoly:
    """Exact Z[x1..xk] polynomials truncated at a total-degree cap: the
    integer lift used to cross-check delta over Z/p^n."""

    def __init__(self, cap, terms=None):
        self.cap = cap
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, cap, c):
        return cls(cap, {(): c} if c else {})

    @classmethod
    def var(cls, cap, nvars, i):
        key = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(cap, {key: 1})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
            if not out[k]:
                del out[k]
        return IntPoly(self.cap, out)

    def __neg__(self):
        return IntPoly(self.cap, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(self.cap, {k: c * other for k, c in self.terms.items()
                                      if c * other})
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2)) if k1 else k2
                if not k1:
                    k = k2
                if not k2:
                    k = k1
                if k and sum(k) > self.cap:
                    continue
                out[k] = out.get(k, 0) + c1 * c2
                if not out[k]:
                    del out[k]
        return IntPoly(self.cap, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = IntPoly.const(self.cap, 1)
        for _ in range(e):
            out = out * self
        return out

    def subst(self, images):
        """Substitute variable i -> images[i] (IntPoly)."""
        out = IntPoly.const(self.cap, 0)
        for k, c in self.terms.items():
            term = IntPoly.const(self.cap, c)
            for i, e in enumerate(k):
                for _ in range(e):
                    term = term * images[i]
            out = out + term
        return out

    def divide_int(self, d):
        return IntPoly(self.cap, {k: c // d for k, c in self.terms.items() if c // d or c % d})

    def reduce_mod(self, m):
        return {k: c % m for k, c in self.terms.items() if c % m}


def delta_int_oracle(f, phi_images, nvars, cap, p):
    """delta(f) = (phi(f) - f^p)/p computed exactly over Z."""
    phif = f.subst(phi_images)
    num = phif - f ** p
    for c in num.terms.values():
        assert c % p == 0, "Frobenius congruence violated in the oracle"
    return IntPoly(cap, {k: c // p for k, c in num.terms.items()})


# -- module structure oracle -------------------------------------------------------------


def brute_subquotient(D, S, B, R, p, n, dim):
    """Element-order histogram of {x : Dx in span S}/(span B + span R)."""
    pn = p ** n
    Dm = np.array(D, dtype=int).reshape(-1, dim) if D else np.zeros((0, dim), dtype=int)
    Sm = (np.array(S, dtype=int).reshape(Dm.shape[0], -1)
          if (S and Dm.shape[0]) else np.zeros((Dm.shape[0], 0), dtype=int))
    sspan = {tuple([0] * Dm.shape[0])}
    if Sm.shape[1]:
        for w in product(range(pn), repeat=Sm.shape[1]):
            sspan.add(tuple(np.mod(Sm @ np.array(w), pn)))
    ker = []
    for v in product(range(pn), repeat=dim):
        img = tuple(np.mod(Dm @ np.array(v), pn)) if Dm.shape[0] else ()
        if not Dm.shape[0] or img in sspan:
            ker.append(v)
    denom = {tuple([0] * dim)}
    cols = []
    if B:
        cols.extend(np.array(B, dtype=int).reshape(dim, -1).T.tolist())
    if R:
        cols.extend(np.array(R, dtype=int).reshape(dim, -1).T.tolist())
    if cols:
        Cm = np.array(cols).T
        for w in product(range(pn), repeat=Cm.shape[1]):
            denom.add(tuple(np.mod(Cm @ np.array(w), pn)))
    seen = set()
    reps = []
    for v in ker:
        cls = min(tuple(np.mod(np.array(v) - np.array(i), pn)) for i in denom)
        if cls not in seen:
            seen.add(cls)
            reps.append(np.array(v))
    hist = {}
    for v in reps:
        for j in range(n + 1):
            if tuple(np.mod((p ** j) * v, pn)) in denom:
                hist[j] = hist.get(j, 0) + 1
                break
    return len(reps), hist


def exps_to_hist(exps, p, n):
    hist = {}
    for tupl in product(*[range(p ** e) for e in exps]) if exps else [()]:
        o = 0
        for x, e in zip(tupl, exps):
            if x:
                v = 0
                y = x
                while y % p == 0:
                    y //= p
                    v += 1
                o = max(o, e - v)
        hist[o] = hist.get(o, 0) + 1
    return hist


def qbracket_int(a, p_unused, t_cap):
    """[a]_q = 1 + q + ... + q^{a-1} expanded in t = q - 1 over Z, truncated."""
    out = {}
    for i in range(a):
        for j in range(0, t_cap + 1):
            out[j] = out.get(j, 0) + comb(i, j)
    return {k: v for k, v in out.items() if v}
