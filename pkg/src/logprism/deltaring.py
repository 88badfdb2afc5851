"""delta-ring structures on truncated rings.

phi(x) = x^p + p*delta(x) is computed from delta on generators through the
sum/product laws; no division by p happens anywhere except in the coefficient
delta (canonical-lift convention, one precision digit per division).
"""

from math import comb

from .coeffring import RingElem, Var, transport
from .errors import DepthExhausted, NotARootTower, UnsupportedDivisor

DISTINGUISHED = "distinguished"
RANK1 = "rank1"
NEITHER = "neither"
UNKNOWN = "unknown"


class DeltaRing:
    """A truncated ring with delta given on generators.

    delta_gen maps variable names to ring elements (None marks the truncated
    edge of a symbolic tower: applying delta there raises DepthExhausted).
    lat_dlog, when given, is a function v -> dlog of the carrier-lattice
    monomial at v, so that delta(x_v) = x_v^p * lat_dlog(v); omitted means the
    carrier monoid has rank 1 (delta vanishes on it).
    """

    def __init__(self, ring, delta_gen=None, lat_dlog=None):
        self.ring = ring
        self.delta_gen = dict(delta_gen or {})
        self.lat_dlog = lat_dlog
        self._dmono = {}
        self._pmono = {}

    def clone_onto(self, ring, extra_delta=None, lat_dlog=None):
        """Same delta data transported onto an extended ring."""
        dg = {}
        for name, val in self.delta_gen.items():
            if name in ring.vindex:
                dg[name] = transport(val, ring) if val is not None else None
        if extra_delta:
            dg.update(extra_delta)
        return DeltaRing(ring, dg, lat_dlog if lat_dlog is not None else self.lat_dlog)

    # -- delta/phi on monomials ----------------------------------------------------

    def _delta_var(self, i, name):
        if name not in self.delta_gen:
            raise DepthExhausted(f"delta undefined on generator {name}")
        val = self.delta_gen[name]
        if val is None:
            raise DepthExhausted(f"delta tower truncated at {name}")
        return val

    def _mono_elem(self, key, prec=None):
        r = self.ring
        return RingElem(r, {key: 1}, prec if prec is not None else r.coeff.n, r.full_window)

    def _product_rule(self, da, a, db, b):
        p = self.ring.coeff.p
        return da * (b ** p) + (a ** p) * db + p * (da * db)

    def delta_mono(self, key):
        """delta of a coefficient-1 monomial."""
        cached = self._dmono.get(key)
        if cached is not None:
            return cached
        r = self.ring
        lat, exps = key
        if not any(lat) and not any(exps):
            out = r.zero()
        elif any(lat) and any(exps):
            a = (lat, (0,) * len(exps))
            b = ((0,) * len(lat), exps)
            out = self._product_rule(self.delta_mono(a), self._mono_elem(a),
                                     self.delta_mono(b), self._mono_elem(b))
        elif any(lat):
            if self.lat_dlog is None:
                out = r.zero()
            else:
                plat = tuple(r.coeff.p * c for c in lat)
                xp = r.from_terms({(plat, (0,) * len(exps)): 1})
                out = xp * self.lat_dlog(lat)
        else:
            i = next(j for j, e in enumerate(exps) if e)
            e = exps[i]
            v = r.vars[i]
            if v.divided:
                raise DepthExhausted(f"delta undefined on divided symbol {v.name}")
            single = ((0,) * len(lat), tuple(1 if j == i else 0 for j in range(len(exps))))
            if e == 1:
                out = self._delta_var(i, v.name)
            elif e > 1:
                rest = (lat, tuple(exps[j] - (1 if j == i else 0) for j in range(len(exps))))
                out = self._product_rule(self.delta_mono(single), self._mono_elem(single),
                                         self.delta_mono(rest), self._mono_elem(rest))
            else:
                # delta(u^-1) = -delta(u) * u^-p / phi(u)
                inv = ((0,) * len(lat), tuple(-1 if j == i else 0 for j in range(len(exps))))
                if e == -1:
                    du = self._delta_var(i, v.name)
                    u = self._mono_elem(single)
                    out = -(du * self._mono_elem(inv) ** r.coeff.p) * self.phi(u).invert()
                else:
                    rest = (lat, tuple(exps[j] + (1 if j == i else 0) for j in range(len(exps))))
                    out = self._product_rule(self.delta_mono(inv), self._mono_elem(inv),
                                             self.delta_mono(rest), self._mono_elem(rest))
        self._dmono[key] = out
        return out

    def phi_mono(self, key):
        cached = self._pmono.get(key)
        if cached is not None:
            return cached
        r = self.ring
        p = r.coeff.p
        lat, exps = key
        out = r.one()
        if any(lat):
            plat = tuple(p * c for c in lat)
            out = r.from_terms({(plat, (0,) * len(exps)): 1})
            if self.lat_dlog is not None:
                out = out * (r.one() + p * self.lat_dlog(lat))
        for i, e in enumerate(exps):
            if not e:
                continue
            v = r.vars[i]
            single = ((0,) * r.lat_rank, tuple(1 if j == i else 0 for j in range(len(exps))))
            base = self._mono_elem(single)
            pv = base ** p + p * self._delta_var(i, v.name)
            out = out * (pv ** e if e > 0 else pv.invert() ** (-e))
        self._pmono[key] = out
        return out

    # -- delta/phi on elements ---------------------------------------------------------

    def delta(self, f):
        r = self.ring
        p = r.coeff.p
        items = sorted(f.terms.items())
        if not items:
            return r.zero().at_precision(f.precision)
        acc = None
        partial = None
        for key, c in items:
            term = RingElem(r, {key: c}, f.precision, f.window)
            dc, prec_c = r.coeff.delta_c(c, f.precision)
            dmono = self.delta_mono(key)
            xp = self._mono_elem(key, f.precision) ** p
            dterm = (pow(c, p, r.coeff.pn) * dmono).at_precision(
                min(f.precision, dmono.precision))
            if dc:
                dc_el = RingElem(r, {r.zero_mono(): dc}, prec_c, f.window)
                dterm = dc_el * xp + dterm + p * (dc_el * dmono)
            elif prec_c < f.precision:
                dterm = dterm.at_precision(prec_c)
            if acc is None:
                acc, partial = dterm, term
                continue
            # delta(partial + term) correction
            corr = None
            pa, ta = partial, term
            pow_a = [partial]
            pow_b = [term]
            for _ in range(p - 2):
                pow_a.append(pow_a[-1] * partial)
                pow_b.append(pow_b[-1] * term)
            for i in range(1, p):
                piece = (comb(p, i) // p) * (pow_a[i - 1] * pow_b[p - i - 1])
                corr = piece if corr is None else corr + piece
            acc = acc + dterm - corr
            partial = partial + term
        return acc.copy(window=tuple(min(a, b) for a, b in zip(acc.window, f.window)))

    def phi(self, f):
        r = self.ring
        out = r.zero().at_precision(f.precision)
        for key, c in sorted(f.terms.items()):
            out = out + (c * self.phi_mono(key)).at_precision(f.precision)
        return out.copy(window=tuple(min(a, b) for a, b in zip(out.window, f.window)))

    # -- classification -----------------------------------------------------------------

    def element_class(self, a):
        d = self.delta(a)
        if d.is_zero():
            return RANK1
        try:
            if d.is_unit():
                return DISTINGUISHED
            return NEITHER
        except UnsupportedDivisor:
            return UNKNOWN

    def rank1_by_roots(self, a, roots):
        """Certify delta(a) = 0 mod p^(len(roots)-1) from a p-power root tower
        roots[0] = a, roots[i]^p = roots[i-1]."""
        if not roots or not roots[0].same(a):
            raise NotARootTower("roots[0] must equal a")
        p = self.ring.coeff.p
        for i in range(1, len(roots)):
            if not (roots[i] ** p).same(roots[i - 1]):
                raise NotARootTower(f"roots[{i}]^p != roots[{i-1}]")
        depth = len(roots) - 1
        d = self.delta(a)
        k = min(depth, d.precision)
        return all(c % p ** k == 0 for c in d.terms.values())


# -- length-2 Witt vectors -------------------------------------------------------------


class W2Elem:
    """(w0, w1) with the length-2 Witt vector ring laws."""

    __slots__ = ("w0", "w1")

    def __init__(self, w0, w1):
        self.w0 = w0
        self.w1 = w1

    def __add__(self, other):
        p = self.w0.ring.coeff.p
        corr = None
        for i in range(1, p):
            piece = (comb(p, i) // p) * (self.w0 ** i) * (other.w0 ** (p - i))
            corr = piece if corr is None else corr + piece
        w1 = self.w1 + other.w1 - corr
        return W2Elem(self.w0 + other.w0, w1)

    def __mul__(self, other):
        p = self.w0.ring.coeff.p
        w1 = (self.w0 ** p) * other.w1 + (other.w0 ** p) * self.w1 + p * self.w1 * other.w1
        return W2Elem(self.w0 * other.w0, w1)

    def same(self, other):
        return self.w0.same(other.w0) and self.w1.same(other.w1)

    def __repr__(self):
        return f"W2({self.w0!r}, {self.w1!r})"


def w2_section(dring, x):
    """w(x) = (x, delta(x)); a ring homomorphism exactly when the delta axioms hold."""
    return W2Elem(x, dring.delta(x))


def inject_delta_fault(base, name, offset=None):
    """A deliberately broken delta: the value on the single generator `name`
    is shifted by `offset`, while every composite monomial keeps the lawful
    value extended from the unshifted generator.  Used to exercise fault
    detection: re-extending the shifted value would just give another valid
    delta-structure on a free carrier, which no axiom check can (or should)
    catch."""
    offset = base.ring.one() if offset is None else offset
    idx = base.ring.vindex[name]
    single = ((0,) * base.ring.lat_rank,
              tuple(1 if j == idx else 0 for j in range(len(base.ring.vars))))

    class _Faulty(DeltaRing):
        def delta_mono(self, key):
            val = base.delta_mono(key)
            if key == single:
                return val + offset
            return val

    return _Faulty(base.ring, dict(base.delta_gen), base.lat_dlog)


def free_delta_adjoin(dring, name, depth, weight=1):
    """Adjoin a free delta-tower: name, d1(name), ..., d<depth>(name).

    delta(d<depth>(name)) is left undefined (DepthExhausted past the edge).
    Returns the new DeltaRing; old elements transport by coeffring.transport.
    """
    if depth > dring.ring.delta_depth and dring.ring.delta_depth:
        raise DepthExhausted(f"depth {depth} exceeds ring delta_depth {dring.ring.delta_depth}")
    names = [name] + [f"d{i}({name})" for i in range(1, depth + 1)]
    new_vars = [Var(nm, weight=weight) for nm in names]
    ring2 = dring.ring.with_vars(new_vars)
    out = dring.clone_onto(ring2)
    for i, nm in enumerate(names):
        if i + 1 < len(names):
            out.delta_gen[nm] = ring2.var(names[i + 1])
        else:
            out.delta_gen[nm] = None
    return out
