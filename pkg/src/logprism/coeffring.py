"""Truncated monoid algebras over Z/p^n with precision tracking.

A ring here is (Z/p^n)[L + N^V] cut down to a finite window, where L is a
finitely generated submonoid of a lattice (the "lattice block", used for
non-free carrier monoids) and V is a list of named free generators
(polynomial variables, delta-tower variables, divided-power symbols).

A monomial is a pair (lattice point, exponent tuple).  Truncation is driven
by one or more grading functionals with caps: a term whose grading exceeds a
cap is dropped (that is the documented meaning of the window).  Box bounds on
invertible directions are hard walls instead: overflowing them raises, since
dropping there would be silently wrong rather than "zero beyond the window".

Elements carry
  * precision: valid modulo p^precision (lowered by division by p),
  * window:    effective cap per grading functional (lowered by division by
               a monomial),
  * lossy:     True when some term was dropped by the cap during the
               computation that produced the element.
"""

from math import comb, gcd

from .errors import (NotDivisible, RingMismatch, UnsupportedDivisor,
                     WindowNotStable)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(p):
    if p < 2:
        return False
    for q in _SMALL_PRIMES:
        if p == q:
            return True
        if p % q == 0:
            return False
    d = 49
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class CoeffRing:
    """The coefficient ring Z/p^n."""

    __slots__ = ("p", "n", "pn")

    def __init__(self, p, n):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if n < 1:
            raise ValueError("precision exponent must be >= 1")
        self.p = p
        self.n = n
        self.pn = p ** n

    def __eq__(self, other):
        return isinstance(other, CoeffRing) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"Z/{self.p}^{self.n}"

    def delta_c(self, c, prec):
        """Coefficient delta via the canonical lift: (c - c^p)/p.

        Returns (value, new_precision).  Exact for the honest ring elements
        0 and 1 (full precision only); a coefficient known mod p^k determines
        its delta only mod p^(k-1), including residues 0 and 1.
        """
        c = c % (self.p ** prec)
        if c in (0, 1) and prec >= self.n:
            return 0, prec
        val = (c - c ** self.p) // self.p
        return val % (self.p ** max(prec - 1, 0)), max(prec - 1, 0)

    def val(self, c):
        """p-adic valuation of the residue c (n for zero)."""
        c %= self.pn
        if c == 0:
            return self.n
        v = 0
        while c % self.p == 0:
            c //= self.p
            v += 1
        return v

    def inv_unit(self, c):
        return pow(c, -1, self.pn)


class Var:
    """A named free generator of the carrier."""

    __slots__ = ("name", "weight", "lo", "hi", "divided")

    def __init__(self, name, weight=1, lo=0, hi=None, divided=False):
        if divided and lo != 0:
            raise ValueError("divided-power symbols cannot be invertible")
        self.name = name
        self.weight = weight
        self.lo = lo
        self.hi = hi
        self.divided = divided

    def clone(self, **kw):
        args = dict(name=self.name, weight=self.weight, lo=self.lo,
                    hi=self.hi, divided=self.divided)
        args.update(kw)
        return Var(**args)

    def __repr__(self):
        return f"Var({self.name})"


class Cap:
    """A grading functional with a bound: sum(lat_w . lat) + sum(var_w . exps) <= bound."""

    __slots__ = ("lat_w", "var_w", "bound")

    def __init__(self, lat_w, var_w, bound):
        self.lat_w = tuple(lat_w)
        self.var_w = tuple(var_w)
        self.bound = bound

    def grade(self, lat, exps):
        g = 0
        for w, c in zip(self.lat_w, lat):
            if w:
                g += w * c
        for w, e in zip(self.var_w, exps):
            if w:
                g += w * e
        return g


class TruncRing:
    """Descriptor of a truncated monoid algebra over Z/p^n."""

    def __init__(self, coeff, variables=(), lat_rank=0, lat_weights=(),
                 lat_boxes=None, lat_monoid=None, degree_cap=None, caps=None,
                 kill=(), delta_depth=0, label=""):
        self.coeff = coeff
        self.vars = tuple(variables)
        self.vindex = {v.name: i for i, v in enumerate(self.vars)}
        if len(self.vindex) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.lat_rank = lat_rank
        self.lat_weights = tuple(lat_weights) if lat_weights else (1,) * lat_rank
        self.lat_boxes = tuple(lat_boxes) if lat_boxes is not None else (None,) * lat_rank
        self.lat_monoid = lat_monoid
        self.kill = tuple(tuple(k) for k in kill)
        self.delta_depth = delta_depth
        self.label = label
        if caps is not None:
            self.caps = tuple(caps)
        else:
            bound = degree_cap if degree_cap is not None else 0
            self.caps = (Cap(self.lat_weights, tuple(v.weight for v in self.vars), bound),)
        self.full_window = tuple(c.bound for c in self.caps)
        for i, v in enumerate(self.vars):
            if v.lo < 0:
                if any(c.var_w[i] for c in self.caps):
                    raise ValueError(f"invertible variable {v.name} must have weight 0")
                if v.hi is None:
                    raise ValueError(f"invertible variable {v.name} needs a box bound")
        self._rewrites = {}
        self._kill_cache = {}

    # -- construction helpers -------------------------------------------------

    def set_rewrite(self, name, threshold, replacement):
        """Declare var^threshold -> replacement (used by q-PD envelopes)."""
        if replacement.ring is not self:
            raise RingMismatch("rewrite replacement must live in this ring")
        self._rewrites[self.vindex[name]] = (threshold, replacement)

    def zero_mono(self):
        return ((0,) * self.lat_rank, (0,) * len(self.vars))

    def zero(self):
        return RingElem(self, {}, self.coeff.n, self.full_window)

    def one(self):
        return self.const(1)

    def const(self, c):
        c %= self.coeff.pn
        terms = {self.zero_mono(): c} if c else {}
        return RingElem(self, terms, self.coeff.n, self.full_window)

    def var(self, name, e=1, c=1):
        exps = [0] * len(self.vars)
        exps[self.vindex[name]] = e
        return self.mono(exps=exps, c=c)

    def lat(self, point, c=1):
        return self.mono(lat=point, c=c)

    def mono(self, lat=None, exps=None, c=1):
        lat = tuple(lat) if lat is not None else (0,) * self.lat_rank
        exps = tuple(exps) if exps is not None else (0,) * len(self.vars)
        if len(lat) != self.lat_rank or len(exps) != len(self.vars):
            raise ValueError("monomial shape mismatch")
        c %= self.coeff.pn
        if not c:
            return self.zero()
        return RingElem(self, {(lat, exps): c}, self.coeff.n, self.full_window)

    def from_terms(self, terms, precision=None, window=None, lossy=False):
        precision = self.coeff.n if precision is None else precision
        window = self.full_window if window is None else tuple(window)
        out = {}
        mod = self.coeff.p ** precision
        for key, c in terms.items():
            c %= mod
            if c:
                out[key] = c
        return RingElem(self, out, precision, window, lossy)

    # -- window predicates -----------------------------------------------------

    def grade(self, key):
        lat, exps = key
        return tuple(c.grade(lat, exps) for c in self.caps)

    def _is_killed(self, lat):
        if not self.kill:
            return False
        cached = self._kill_cache.get(lat)
        if cached is not None:
            return cached
        dead = False
        for k in self.kill:
            diff = tuple(a - b for a, b in zip(lat, k))
            verdict = self.lat_monoid.contains(diff) if self.lat_monoid is not None else None
            if verdict:
                dead = True
                break
        self._kill_cache[lat] = dead
        return dead

    def check_boxes(self, key):
        lat, exps = key
        for c, box in zip(lat, self.lat_boxes):
            if box is not None and abs(c) > box:
                raise WindowNotStable(f"lattice coordinate {c} exceeds box {box} in {self.label}")
        for v, e in zip(self.vars, exps):
            if e < v.lo:
                raise WindowNotStable(f"exponent of {v.name} below range")
            if v.hi is not None and not v.divided and e > v.hi:
                raise WindowNotStable(f"exponent of {v.name} exceeds box {v.hi}")

    def in_window(self, key, window):
        """True if the term is kept; False if it is to be dropped (cap or
        divided-power cap or kill ideal).  Box violations inside the caps
        raise: there dropping would be silently wrong."""
        lat, exps = key
        for c, w in zip(self.caps, window):
            if c.grade(lat, exps) > w:
                return False
        for v, e in zip(self.vars, exps):
            if v.divided and v.hi is not None and e > v.hi:
                return False
        self.check_boxes(key)
        if self.kill and self._is_killed(lat):
            return False
        return True

    # -- window basis -----------------------------------------------------------

    def _var_exp_range(self, i, window, tower_limit, var_ranges):
        v = self.vars[i]
        lo, hi = v.lo, v.hi
        if i in self._rewrites:
            thr = self._rewrites[i][0] - 1
            hi = thr if hi is None else min(hi, thr)
        if var_ranges and v.name in var_ranges:
            rlo, rhi = var_ranges[v.name]
            lo = max(lo, rlo)
            hi = rhi if hi is None else min(hi, rhi)
        if tower_limit and v.name in tower_limit:
            lim = tower_limit[v.name]
            hi = lim if hi is None else min(hi, lim)
        for cap, w in zip(self.caps, window):
            if cap.var_w[i] > 0:
                by_cap = w // cap.var_w[i] if w >= 0 else -1
                hi = by_cap if hi is None else min(hi, by_cap)
        if hi is None:
            raise ValueError(f"variable {v.name} has no finite window")
        return lo, hi

    def window_basis(self, window=None, tower_limit=None, var_ranges=None,
                     lat_shrink=0):
        """All monomial keys inside the window, sorted. tower_limit optionally
        restricts named variables to exponent <= limit[name]; var_ranges maps
        names to hard (lo, hi) overrides; lat_shrink tightens lattice boxes."""
        window = self.full_window if window is None else tuple(window)
        if self.lat_rank:
            if self.lat_monoid is None:
                raise ValueError("lattice block without monoid presentation")
            constraints = [(c.lat_w, w) for c, w in zip(self.caps, window)]
            boxes = tuple(None if b is None else max(b - lat_shrink, 0)
                          for b in self.lat_boxes)
            pts = self.lat_monoid.points_within(constraints, boxes)
        else:
            pts = [()]
        keys = []
        nv = len(self.vars)
        ranges = [self._var_exp_range(i, window, tower_limit, var_ranges)
                  for i in range(nv)]

        def rec(i, exps):
            if i == nv:
                e = tuple(exps)
                for lat in pts:
                    key = (lat, e)
                    ok = all(c.grade(lat, e) <= w for c, w in zip(self.caps, window))
                    if ok and self.kill and self._is_killed(lat):
                        ok = False
                    if ok:
                        keys.append(key)
                return
            lo, hi = ranges[i]
            for e in range(lo, hi + 1):
                exps[i] = e
                rec(i + 1, exps)
            exps[i] = 0

        rec(0, [0] * nv)
        keys.sort()
        return keys

    def with_vars(self, new_vars, cap_weights=None, label=None):
        """A new ring with extra free generators appended.

        cap_weights, when given, lists for each cap the weight tuple of the
        new variables; by default the declared Var.weight counts toward every
        cap that already grades some variable or lattice direction, and 0
        toward the rest.
        """
        new_vars = tuple(new_vars)
        caps2 = []
        for ci, cap in enumerate(self.caps):
            if cap_weights is not None:
                extra = tuple(cap_weights[ci])
            else:
                active = any(cap.var_w) or any(cap.lat_w) or not (self.vars or self.lat_rank)
                extra = tuple(v.weight if active else 0 for v in new_vars)
            caps2.append(Cap(cap.lat_w, cap.var_w + extra, cap.bound))
        out = TruncRing(self.coeff, self.vars + new_vars, lat_rank=self.lat_rank,
                        lat_weights=self.lat_weights, lat_boxes=self.lat_boxes,
                        lat_monoid=self.lat_monoid, caps=caps2, kill=self.kill,
                        delta_depth=self.delta_depth, label=label or self.label)
        for idx, (thr, repl) in self._rewrites.items():
            out._rewrites[idx] = (thr, transport(repl, out))
        return out

    def widened(self, extra, label=None):
        """Same ring with every cap bound raised by `extra` (probe windows)."""
        caps2 = [Cap(c.lat_w, c.var_w, c.bound + extra) for c in self.caps]
        out = TruncRing(self.coeff, self.vars, lat_rank=self.lat_rank,
                        lat_weights=self.lat_weights,
                        lat_boxes=tuple(None if b is None else b + extra
                                        for b in self.lat_boxes),
                        lat_monoid=self.lat_monoid, caps=caps2, kill=self.kill,
                        delta_depth=self.delta_depth,
                        label=label or self.label + "+")
        for idx, (thr, repl) in self._rewrites.items():
            out._rewrites[idx] = (thr, transport(repl, out))
        return out

    def without_var(self, name, label=None):
        """A new ring with one generator removed (it must be re-defined by the
        caller through a substitution map)."""
        idx = self.vindex[name]
        vars2 = self.vars[:idx] + self.vars[idx + 1:]
        caps2 = [Cap(c.lat_w, c.var_w[:idx] + c.var_w[idx + 1:], c.bound) for c in self.caps]
        out = TruncRing(self.coeff, vars2, lat_rank=self.lat_rank,
                        lat_weights=self.lat_weights, lat_boxes=self.lat_boxes,
                        lat_monoid=self.lat_monoid, caps=caps2, kill=self.kill,
                        delta_depth=self.delta_depth, label=label or self.label)
        for vidx, (thr, repl) in self._rewrites.items():
            if vidx != idx:
                out._rewrites[out.vindex[self.vars[vidx].name]] = (thr, transport(repl, out))
        return out

    def __repr__(self):
        return f"TruncRing({self.label or 'anon'}, {self.coeff!r}, vars={[v.name for v in self.vars]})"


class RingElem:
    """A finite formal sum of monomial terms, valid mod p^precision on its window."""

    __slots__ = ("ring", "terms", "precision", "window", "lossy")

    def __init__(self, ring, terms, precision, window, lossy=False):
        self.ring = ring
        self.terms = terms
        self.precision = precision
        self.window = tuple(window)
        self.lossy = lossy

    # -- basics -----------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def copy(self, **kw):
        args = dict(terms=dict(self.terms), precision=self.precision,
                    window=self.window, lossy=self.lossy)
        args.update(kw)
        return RingElem(self.ring, args.pop("terms"), args.pop("precision"),
                        args.pop("window"), args.pop("lossy"))

    def constant_coeff(self):
        return self.terms.get(self.ring.zero_mono(), 0)

    def _norm(self, precision, window, lossy):
        mod = self.ring.coeff.p ** precision
        out = {}
        dropped = lossy
        for key, c in self.terms.items():
            c %= mod
            if not c:
                continue
            if self.ring.in_window(key, window):
                out[key] = c
            else:
                dropped = True
        return RingElem(self.ring, out, precision, window, dropped)

    def at_precision(self, prec):
        if prec >= self.precision:
            return self
        return self._norm(prec, self.window, self.lossy)

    # -- comparison ---------------------------------------------------------------

    def same(self, other):
        """Equality at the shared precision and window."""
        if isinstance(other, int):
            other = self.ring.const(other)
        if self.ring is not other.ring:
            raise RingMismatch("comparison across rings")
        prec = min(self.precision, other.precision)
        window = tuple(min(a, b) for a, b in zip(self.window, other.window))
        a = self._norm(prec, window, False)
        b = other._norm(prec, window, False)
        return a.terms == b.terms

    def __eq__(self, other):
        if isinstance(other, (int, RingElem)):
            try:
                return self.same(other)
            except RingMismatch:
                return NotImplemented
        return NotImplemented

    __hash__ = None

    # -- arithmetic -----------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.const(other)
        if not isinstance(other, RingElem):
            raise TypeError(f"cannot combine RingElem with {type(other)!r}")
        if other.ring is not self.ring:
            raise RingMismatch(f"{self.ring.label} vs {other.ring.label}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        prec = min(self.precision, other.precision)
        window = tuple(min(a, b) for a, b in zip(self.window, other.window))
        mod = self.ring.coeff.p ** prec
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = (out.get(key, 0) + c) % mod
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return RingElem(self.ring, out, prec, window,
                        self.lossy or other.lossy)._norm(prec, window, self.lossy or other.lossy)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.coeff.p ** self.precision
        return RingElem(self.ring, {k: (-c) % mod for k, c in self.terms.items()},
                        self.precision, self.window, self.lossy)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def scale(self, c):
        mod = self.ring.coeff.p ** self.precision
        c %= mod
        out = {}
        for key, v in self.terms.items():
            s = v * c % mod
            if s:
                out[key] = s
        return RingElem(self.ring, out, self.precision, self.window, self.lossy)

    def _mul_keys(self, k1, k2):
        """Combine two monomial keys; returns (key, extra_coeff) before rewrites."""
        lat = tuple(a + b for a, b in zip(k1[0], k2[0]))
        exps = tuple(a + b for a, b in zip(k1[1], k2[1]))
        extra = 1
        for i, v in enumerate(self.ring.vars):
            if v.divided and k1[1][i] and k2[1][i]:
                extra *= comb(k1[1][i] + k2[1][i], k1[1][i])
        return (lat, exps), extra

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        ring = self.ring
        prec = min(self.precision, other.precision)
        window = tuple(min(a, b) for a, b in zip(self.window, other.window))
        mod = ring.coeff.p ** prec
        out = {}
        lossy = self.lossy or other.lossy
        work = []
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key, extra = self._mul_keys(k1, k2)
                c = c1 * c2 * extra % mod
                if c:
                    work.append((key, c))
        # rewrite normalization (q-PD style monomial relations)
        rewrites = ring._rewrites
        while work:
            key, c = work.pop()
            hit = None
            for idx, (thr, repl) in rewrites.items():
                if key[1][idx] >= thr:
                    hit = (idx, thr, repl)
                    break
            if hit is None:
                if ring.in_window(key, window):
                    s = (out.get(key, 0) + c) % mod
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
                else:
                    lossy = True
                continue
            idx, thr, repl = hit
            exps = list(key[1])
            exps[idx] -= thr
            base = (key[0], tuple(exps))
            for rk, rc in repl.terms.items():
                nk, extra = RingElem._mul_keys(self, base, rk)
                nc = c * rc * extra % mod
                if nc:
                    work.append((nk, nc))
            prec_r = min(prec, repl.precision)
            if prec_r < prec:
                prec = prec_r
                mod = ring.coeff.p ** prec
        return RingElem(ring, out, prec, window, lossy)._norm(prec, window, lossy)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e):
        if e < 0:
            return self.invert() ** (-e)
        result = self.ring.one().at_precision(self.precision).copy(window=self.window)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- units ------------------------------------------------------------------------

    def _nilpotent_term(self, key, c):
        """True if c * key is topologically nilpotent: positive grading under
        some finitely capped functional, or p | c."""
        if c % self.ring.coeff.p == 0:
            return True
        lat, exps = key
        for cap in self.ring.caps:
            if cap.grade(lat, exps) > 0:
                return True
        return False

    def is_unit(self):
        try:
            self._unit_split()
            return True
        except (NotDivisible, UnsupportedDivisor):
            return False

    def _unit_split(self):
        """Write self = monomial * (unit constant + nilpotent); returns
        (key, const, tail elem).  Raises if not a unit shape."""
        if not self.terms:
            raise NotDivisible("zero is not a unit")
        ring = self.ring
        zero_key = ring.zero_mono()
        if zero_key in self.terms:
            c0 = self.terms[zero_key]
            if c0 % ring.coeff.p:
                tail = {k: c for k, c in self.terms.items() if k != zero_key}
                for k, c in tail.items():
                    if not self._nilpotent_term(k, c):
                        raise UnsupportedDivisor("non-nilpotent tail")
                return zero_key, c0, RingElem(ring, tail, self.precision, self.window, self.lossy)
        # single invertible monomial (possibly with unit-monomial factor)
        if len(self.terms) == 1:
            (key, c), = self.terms.items()
            if c % ring.coeff.p:
                neg = (tuple(-x for x in key[0]), tuple(-e for e in key[1]))
                try:
                    ring.check_boxes(neg)
                except WindowNotStable:
                    raise UnsupportedDivisor("monomial not invertible in window")
                for v, e in zip(ring.vars, neg[1]):
                    if e < v.lo:
                        raise UnsupportedDivisor(f"{v.name} not invertible")
                if ring.lat_rank and ring.lat_monoid is not None:
                    if not ring.lat_monoid.contains(neg[0]):
                        raise UnsupportedDivisor("lattice point not invertible in carrier")
                return key, c, ring.zero().at_precision(self.precision)
        # monomial * unit: factor the minimal-grading term's key
        items = sorted(self.terms.items(), key=lambda kv: (self.ring.grade(kv[0]), kv[0]))
        key0 = items[0][0]
        if key0 != zero_key:
            shifted = self.divide_mono(key0)
            k, c, tail = shifted._unit_split()
            if k != zero_key:
                raise UnsupportedDivisor("not a unit")
            return key0, c, tail
        raise UnsupportedDivisor("constant term not a unit")

    def invert(self):
        key, c0, tail = self._unit_split()
        ring = self.ring
        cinv = pow(c0, -1, ring.coeff.p ** self.precision)
        # (c0 + t)^-1 = c0^-1 * sum (-t/c0)^k, truncated
        acc = ring.one().at_precision(self.precision).copy(window=self.window)
        if not tail.is_zero():
            x = tail.scale(-cinv)
            term = ring.one().at_precision(self.precision).copy(window=self.window)
            guard = sum(w for w in ring.full_window) + ring.coeff.n + 2
            for _ in range(guard):
                term = term * x
                if term.is_zero():
                    break
                acc = acc + term
            else:
                raise UnsupportedDivisor("tail did not vanish; not nilpotent in window")
        acc = acc.scale(cinv)
        if key != ring.zero_mono():
            neg = (tuple(-x for x in key[0]), tuple(-e for e in key[1]))
            acc = acc * RingElem(ring, {neg: 1}, self.precision, self.window)
        return acc

    # -- division ----------------------------------------------------------------------

    def divide_mono(self, key, coeff=1):
        """Divide by coeff * monomial(key); all terms must be divisible."""
        ring = self.ring
        if coeff % ring.coeff.p == 0:
            raise UnsupportedDivisor("monomial division with non-unit coefficient")
        cinv = pow(coeff, -1, ring.coeff.p ** self.precision)
        out = {}
        for k, c in self.terms.items():
            lat = tuple(a - b for a, b in zip(k[0], key[0]))
            exps = tuple(a - b for a, b in zip(k[1], key[1]))
            for i, (v, e) in enumerate(zip(ring.vars, exps)):
                if e < v.lo:
                    raise NotDivisible(f"term not divisible ({v.name})")
                if v.divided and key[1][i]:
                    raise UnsupportedDivisor("division by divided-power symbols unsupported")
            if ring.lat_rank and ring.lat_monoid is not None and any(key[0]):
                verdict = ring.lat_monoid.contains(lat)
                if verdict is False or verdict is None:
                    raise NotDivisible("lattice part not divisible")
            out[(lat, exps)] = c * cinv % (ring.coeff.p ** self.precision)
        shift = tuple(c.grade(key[0], key[1]) for c in ring.caps)
        window = tuple(w - s for w, s in zip(self.window, shift))
        return RingElem(ring, out, self.precision, window, self.lossy)

    def divide_p(self, k=1):
        """Divide by p^k; precision drops by k."""
        ring = self.ring
        p = ring.coeff.p
        if self.precision - k < 0:
            raise NotDivisible("no precision left to divide by p")
        out = {}
        for key, c in self.terms.items():
            if c % (p ** k):
                raise NotDivisible("coefficient not divisible by p^%d" % k)
            out[key] = c // (p ** k)
        return RingElem(ring, out, self.precision - k, self.window, self.lossy)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for key in sorted(self.terms):
                c = self.terms[key]
                lat, exps = key
                factors = []
                for i, x in enumerate(lat):
                    if x:
                        factors.append(f"L{i}^{x}" if x != 1 else f"L{i}")
                for v, e in zip(self.ring.vars, exps):
                    if e:
                        nm = f"g{'' if not v.divided else ''}[{v.name}]" if v.divided else v.name
                        factors.append(f"{nm}^{e}" if e != 1 else nm)
                body_part = "*".join(factors) if factors else "1"
                parts.append(f"{c}*{body_part}" if (c != 1 or not factors) else body_part)
            body = " + ".join(parts)
        return f"<{body} (prec {self.precision})>"


def transport(elem, dst, var_images=None, lat_map=None, divided_images=None):
    """Carry an element into another ring by matching generator names.

    var_images may redefine named generators as arbitrary elements of dst
    (used when a generator was eliminated); lat_map is an integer matrix
    applied to lattice points (default: identity, requiring equal ranks);
    divided_images maps a divided symbol to a function index -> element
    (gamma_e of the image, which is not the e-th power of gamma_1's image).
    """
    src = elem.ring
    var_images = var_images or {}
    divided_images = divided_images or {}
    window = tuple(dst.full_window)
    out = dst.zero().at_precision(elem.precision)
    for (lat, exps), c in elem.terms.items():
        if lat_map is not None:
            lat2 = tuple(sum(lat_map[i][j] * lat[j] for j in range(len(lat)))
                         for i in range(dst.lat_rank))
        else:
            if len(lat) != dst.lat_rank and any(lat):
                raise RingMismatch("lattice rank changed without a map")
            lat2 = lat if len(lat) == dst.lat_rank else (0,) * dst.lat_rank
        term = dst.mono(lat=lat2, c=c).at_precision(elem.precision)
        for v, e in zip(src.vars, exps):
            if not e:
                continue
            if v.name in divided_images:
                term = term * divided_images[v.name](e)
            elif v.name in var_images:
                term = term * (var_images[v.name] ** e)
            elif v.name in dst.vindex:
                nv = dst.vars[dst.vindex[v.name]]
                if nv.divided != v.divided:
                    raise RingMismatch(f"generator kind changed for {v.name}")
                term = term * RingElem(dst, {((0,) * dst.lat_rank,
                                              tuple(e if k == dst.vindex[v.name] else 0
                                                    for k in range(len(dst.vars)))): 1},
                                       elem.precision, window)
            else:
                raise RingMismatch(f"no image for generator {v.name}")
        out = out + term
    if elem.lossy:
        out = out.copy(lossy=True)
    return out


# -- public ring operations (spec surface) -------------------------------------------


def ring_arith(a, b, op):
    """Dispatch add/mul/neg with ring checks (spec surface; operators work too)."""
    if op == "neg":
        return -a
    if not isinstance(b, RingElem) or b.ring is not a.ring:
        raise RingMismatch("mismatched ring descriptors")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def divide_exact(a, b, declared=False):
    """Exact division a / b for declared nonzerodivisors.

    Supported divisors: single monomials with unit coefficient (shifts the
    representable window), constants u * p^k (costs k precision digits),
    window units (inverted by geometric series), and, with declared=True,
    arbitrary certified nonzerodivisors (solved by Smith normal form on the
    window basis; p-valuations used in the solve cost precision).
    """
    ring = a.ring
    if b.ring is not ring:
        raise RingMismatch("mismatched ring descriptors")
    if a.is_zero():
        return a
    if b.is_zero():
        raise UnsupportedDivisor("division by zero")
    if len(b.terms) == 1:
        (key, c), = b.terms.items()
        p = ring.coeff.p
        v = 0
        cc = c
        while cc % p == 0:
            cc //= p
            v += 1
        out = a
        if any(key[0]) or any(key[1]):
            out = out.divide_mono(key, 1)
        if v:
            out = out.divide_p(v)
        return out.scale(pow(cc, -1, ring.coeff.p ** out.precision))
    if b.is_unit():
        return a * b.invert()
    if declared:
        return _divide_by_solve(a, b)
    raise UnsupportedDivisor("divisor is not in the declared nonzerodivisor set")


def _divide_by_solve(a, b):
    """Solve c * b = a on the window basis via SNF over Z/p^n."""
    ring = a.ring
    prec = min(a.precision, b.precision)
    window = tuple(min(x, y) for x, y in zip(a.window, b.window))
    basis = ring.window_basis(window)
    index = {k: i for i, k in enumerate(basis)}
    m = len(basis)
    mat = [[0] * m for _ in range(m)]
    for j, key in enumerate(basis):
        col = RingElem(ring, {key: 1}, prec, window) * b
        for k, c in col.terms.items():
            if k in index:
                mat[index[k]][j] = c
    vec = [0] * m
    for k, c in a.at_precision(prec).terms.items():
        if k not in index:
            raise NotDivisible("dividend outside window basis")
        vec[index[k]] = c
    sol, lost = solve_mod(mat, vec, ring.coeff.p, prec)
    if sol is None:
        raise NotDivisible("dividend not in the divisor ideal at this precision")
    out = {}
    for i, c in enumerate(sol):
        if c % (ring.coeff.p ** (prec - lost)):
            out[basis[i]] = c % (ring.coeff.p ** (prec - lost))
    return RingElem(ring, out, prec - lost, window, a.lossy or b.lossy)


# -- Smith normal form over Z/p^n ------------------------------------------------------


def smith_normal_form(mat, p, n):
    """Smith normal form over Z/p^n.

    Returns (diag, row_ops, col_ops) with row_ops * mat * col_ops = diag(diag)
    mod p^n, the transforms invertible over Z/p^n, diagonal entries p^k with
    non-decreasing valuations (zeros last).
    """
    from . import modlin
    res = modlin.snf(mat, p, n, want_rows=True, want_cols=True)
    rows = res["rows"].tolist() if res["rows"] is not None else []
    cols = res["cols"].tolist() if res["cols"] is not None else []
    return res["diag"], rows, cols


def solve_mod(mat, vec, p, n):
    """Solve mat @ x = vec over Z/p^n; returns (x or None, precision digits lost)."""
    import numpy as np

    from . import modlin
    rhs = np.array(vec, dtype=np.int64).reshape(-1, 1)
    sols, losses = modlin.solve_many(mat, rhs, p, n)
    if sols[0] is None:
        return None, 0
    return [int(x) for x in sols[0]], losses[0]


def kernel_mod(mat, p, n):
    """Generators of {x : mat @ x = 0 mod p^n} as (vector, annihilator exponent)."""
    from . import modlin
    return [([int(x) for x in g], v) for g, v in modlin.kernel(mat, p, n)]
