"""delta-log structures: a prelog monoid M -> A with a companion dlog map.

Axioms checked throughout:
  (1) dlog(e) = 0
  (2) alpha(m)^p dlog(m) = delta(alpha(m))
  (3) dlog(m m') = dlog(m) + dlog(m') + p dlog(m) dlog(m')

dlog extends to the group (and to any submonoid of it) through
  dlog(m'/m) = (dlog(m') - dlog(m)) / (1 + p dlog(m)),
which is the unit-group law in the coordinate u = 1 + p dlog.
"""

import random

from . import intlin
from .coeffring import Cap, RingElem, TruncRing, Var, transport
from .deltaring import DeltaRing
from .errors import (NotALogRing, TruncationLoss, UnsupportedUnits,
                     WindowNotStable)
from .monoids import MonoidPresentation

UNSET = object()


def twist_add(ring, a, b):
    p = ring.coeff.p
    return a + b + p * (a * b)


def twist_neg(ring, a):
    p = ring.coeff.p
    return -(a * (ring.one() + p * a).invert())


class DeltaLogRing:
    """A DeltaRing with a prelog monoid, alpha on generators, dlog on generators."""

    def __init__(self, base, monoid, alpha, dlog, log_strict=False):
        self.base = base
        self.monoid = monoid
        self.alpha = list(alpha)
        self.dlog = list(dlog)
        if len(self.alpha) != len(monoid.generators) or len(self.dlog) != len(monoid.generators):
            raise ValueError("alpha/dlog must match the generator list")
        self.log_strict = log_strict
        self._point_cache = {}

    @property
    def ring(self):
        return self.base.ring

    def delta(self, x):
        return self.base.delta(x)

    def phi(self, x):
        return self.base.phi(x)

    # -- extension of alpha/dlog to monoid points ---------------------------------

    def _decompose(self, v):
        """Some integer decomposition of v over the prelog generators."""
        gens = self.monoid.generators
        if not gens:
            if any(v):
                raise ValueError(f"{v} is not in the trivial monoid group")
            return []
        mat = [[gens[j][i] for j in range(len(gens))] for i in range(self.monoid.ambient_rank)]
        sol = intlin.solve_int(mat, list(v))
        if sol is None:
            raise ValueError(f"{v} is not in the prelog monoid group")
        return sol

    def dlog_point(self, v):
        v = tuple(v)
        cached = self._point_cache.get(("dlog", v))
        if cached is not None:
            return cached
        out = self.ring.zero()
        for c, d in zip(self._decompose(v), self.dlog):
            if c == 0:
                continue
            piece = d
            if c < 0:
                piece = twist_neg(self.ring, piece)
                c = -c
            for _ in range(c):
                out = twist_add(self.ring, out, piece)
        self._point_cache[("dlog", v)] = out
        return out

    def alpha_point(self, v):
        v = tuple(v)
        cached = self._point_cache.get(("alpha", v))
        if cached is not None:
            return cached
        out = self.ring.one()
        for c, a in zip(self._decompose(v), self.alpha):
            if c == 0:
                continue
            out = out * (a ** c if c > 0 else a.invert() ** (-c))
        self._point_cache[("alpha", v)] = out
        return out


def validate_deltalog(L, trials=50, seed=0, word_bound=2):
    """Check the three axioms on generators, presentation relations, and
    random monoid words.  Reports the first counterexample; window overflow
    is reported (not failed)."""
    rng = random.Random(seed)
    ring = L.ring
    p = ring.coeff.p
    gens = L.monoid.generators
    report = {"passed": True, "counterexample": None, "truncation": [], "checks": 0}

    def fail(kind, data):
        report["passed"] = False
        report["counterexample"] = (kind, data)

    # axiom 1: dlog(e) = 0 through the point extension
    try:
        if not L.dlog_point((0,) * L.monoid.ambient_rank).is_zero():
            fail("dlog(e) != 0", ())
        report["checks"] += 1
    except TruncationLoss as exc:
        report["truncation"].append(str(exc))
    # axiom 2 on generators
    for g, a, d in zip(gens, L.alpha, L.dlog):
        report["checks"] += 1
        lhs = (a ** p) * d
        rhs = L.delta(a)
        if not lhs.same(rhs):
            if lhs.lossy or rhs.lossy:
                report["truncation"].append(f"axiom 2 window-limited at {g}")
            else:
                fail("alpha^p dlog != delta(alpha)", g)
                return report
    # alpha multiplicative over the presentation's relations
    mat = [[gens[j][i] for j in range(len(gens))] for i in range(L.monoid.ambient_rank)]
    for rel in intlin.kernel_int(mat) if gens else []:
        report["checks"] += 1
        lhs = ring.one()
        rhs = ring.one()
        for c, a in zip(rel, L.alpha):
            if c > 0:
                lhs = lhs * a ** c
            elif c < 0:
                rhs = rhs * a ** (-c)
        if not lhs.same(rhs):
            fail("alpha not multiplicative over relation", tuple(rel))
            return report
    # axiom 3 on generator pairs and random words
    def word():
        v = [0] * L.monoid.ambient_rank
        for g in gens:
            c = rng.randint(0, word_bound)
            for i in range(len(v)):
                v[i] += c * g[i]
        return tuple(v)

    pairs = [(g1, g2) for g1 in gens for g2 in gens]
    pairs += [(word(), word()) for _ in range(trials)]
    for u, v in pairs:
        report["checks"] += 1
        try:
            du, dv = L.dlog_point(u), L.dlog_point(v)
            duv = L.dlog_point(tuple(a + b for a, b in zip(u, v)))
            if not duv.same(du + dv + p * (du * dv)):
                fail("product rule", (u, v))
                return report
            auv = L.alpha_point(tuple(a + b for a, b in zip(u, v)))
            if not auv.same(L.alpha_point(u) * L.alpha_point(v)):
                fail("alpha not multiplicative", (u, v))
                return report
        except (TruncationLoss, WindowNotStable) as exc:
            report["truncation"].append(str(exc))
    return report


def trivial_log_dlog(dring, units):
    """The unique delta-log structure on the units: dlog(u) = delta(u) / u^p."""
    for u in units:
        if not u.is_unit():
            raise UnsupportedUnits("trivial log structure needs unit elements")
    k = len(units)
    gens = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    monoid = MonoidPresentation(k, gens, unit_lattice=gens, name="A^x model")
    dlogs = [dring.delta(u) * (u.invert() ** dring.ring.coeff.p) for u in units]
    return DeltaLogRing(dring, monoid, list(units), dlogs)


def adjoin_monoid_dlog(dring, names, depth, weight=1, monoid=None, via_free_cover=False):
    """Adjoin a free log monoid N^names: for each x in names, a generator x with
    dlog(x) = y0(x) and the delta tower y0, y1 = delta(y0), ...

    phi(x) = x^p (1 + p y0(x)); matches the free one-generator presentation.
    Non-free monoids must be routed through their free cover (one generator
    per monoid generator); pass via_free_cover=True to acknowledge that the
    returned prelog is the cover, together with its surjection data.
    """
    if monoid is not None:
        mat = [[monoid.generators[j][i] for j in range(len(monoid.generators))]
               for i in range(monoid.ambient_rank)]
        free = not intlin.kernel_int(mat) and not monoid.unit_lattice
        if not free and not via_free_cover:
            raise UnsupportedUnits("non-free prelog monoid: route through the free cover")
        names = [f"m{i}" for i in range(len(monoid.generators))]
    new_vars = []
    for x in names:
        new_vars.append(Var(x, weight=weight))
        for i in range(depth + 1):
            new_vars.append(Var(f"y{i}({x})", weight=weight))
    ring2 = dring.ring.with_vars(new_vars)
    extra = {}
    for x in names:
        extra[x] = ring2.var(x) ** ring2.coeff.p * ring2.var(f"y0({x})")
        for i in range(depth + 1):
            extra[f"y{i}({x})"] = ring2.var(f"y{i+1}({x})") if i < depth else None
    base2 = dring.clone_onto(ring2, extra_delta=extra)
    k = len(names)
    gens = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    prelog = MonoidPresentation(k, gens,
                                facets=[tuple(1 if j == i else 0 for j in range(k))
                                        for i in range(k)],
                                name="N^{%s}" % ",".join(names))
    alpha = [ring2.var(x) for x in names]
    dlog = [ring2.var(f"y0({x})") for x in names]
    return DeltaLogRing(base2, prelog, alpha, dlog)


def extend_to_group(L, target, box=4):
    """Extend the delta-log structure to a submonoid M <= target <= M^gp.

    target is a MonoidPresentation in the same ambient lattice as L.monoid.
    Ring generators that need inverting (alpha of a negative direction) are
    re-declared invertible with a symmetric exponent box; everything else is
    transported unchanged.  The output prelog monoid is `target`.
    """
    ring = L.ring
    # find which alpha-generators must be inverted
    need_inv = set()
    for g in target.generators:
        for c, a in zip(L._decompose(g), L.alpha):
            if c < 0 and not _is_abstract_unit(a):
                key = _single_var_key(a)
                if key is None:
                    raise TruncationLoss(
                        "alpha generator is neither a unit nor a variable; cannot localize")
                need_inv.add(key)
    if need_inv:
        new_vars = []
        for v in ring.vars:
            if v.name in need_inv:
                new_vars.append(v.clone(lo=-box, hi=box, weight=0))
            else:
                new_vars.append(v)
        caps2 = []
        for cap in ring.caps:
            var_w = tuple(0 if ring.vars[i].name in need_inv else w
                          for i, w in enumerate(cap.var_w))
            caps2.append(Cap(cap.lat_w, var_w, cap.bound))
        ring2 = TruncRing(ring.coeff, new_vars, lat_rank=ring.lat_rank,
                          lat_weights=ring.lat_weights, lat_boxes=ring.lat_boxes,
                          lat_monoid=ring.lat_monoid, caps=caps2, kill=ring.kill,
                          delta_depth=ring.delta_depth, label=ring.label + "[loc]")
        base2 = L.base.clone_onto(ring2)
        alpha2 = [transport(a, ring2) for a in L.alpha]
        dlog2 = [transport(d, ring2) for d in L.dlog]
        L2 = DeltaLogRing(base2, L.monoid, alpha2, dlog2, L.log_strict)
    else:
        L2 = L
    alpha_t = [L2.alpha_point(g) for g in target.generators]
    dlog_t = [L2.dlog_point(g) for g in target.generators]
    return DeltaLogRing(L2.base, target, alpha_t, dlog_t, L.log_strict)


def _is_abstract_unit(a):
    try:
        return a.is_unit()
    except Exception:
        return False


def _single_var_key(a):
    if len(a.terms) != 1:
        return None
    (key, c), = a.terms.items()
    if any(key[0]) or c % a.ring.coeff.p == 0:
        return None
    nz = [i for i, e in enumerate(key[1]) if e]
    if len(nz) != 1 or key[1][nz[0]] != 1:
        return None
    return a.ring.vars[nz[0]].name


def induced_phi_M(L, witness_box=3):
    """Frobenius-lift data on the prelog monoid: m -> (p*m, 1 + p*dlog(m)).

    Verifies alpha(phi_M(m)) = phi(alpha(m)) at element level for every
    generator.  Membership of the unit factor in the declared unit subgroup is
    searched within a small exponent box; with log_strict set, a missing
    witness raises NotALogRing.
    """
    ring = L.ring
    p = ring.coeff.p
    out = []
    for g, a, d in zip(L.monoid.generators, L.alpha, L.dlog):
        factor = ring.one() + p * d
        lhs = L.alpha_point(tuple(p * c for c in g)) * factor
        rhs = L.phi(a)
        if not lhs.same(rhs):
            raise NotALogRing(f"alpha . phi_M != phi . alpha at {g}")
        witness = _unit_witness(L, factor, witness_box)
        if witness is None and L.log_strict:
            raise NotALogRing(f"unit factor at {g} not representable in the declared units")
        out.append({"generator": g, "image": tuple(p * c for c in g),
                    "unit_factor": factor, "unit_witness": witness})
    return out


def _unit_witness(L, factor, box):
    units = list(L.monoid.unit_lattice)
    if not units:
        return [] if factor.same(L.ring.one()) else None

    def rec(i, acc):
        if i == len(units):
            try:
                if L.alpha_point(tuple(acc)).same(factor):
                    return []
            except Exception:
                return None
            return None
        for c in range(-box, box + 1):
            nxt = [a + c * u for a, u in zip(acc, units[i])]
            sub = rec(i + 1, nxt)
            if sub is not None:
                return [c] + sub
        return None

    return rec(0, [0] * L.monoid.ambient_rank)


def add_units_pushout(L, unit_gens, relation_box=2):
    """Push out the prelog monoid along newly declared ring units.

    The new monoid is M + Z^r where r is the rank of the subgroup generated
    by the units (multiplicative relations among them are detected within a
    small exponent box and collapsed); dlog takes the trivial-log values on
    the new directions.
    """
    for u in unit_gens:
        if not u.is_unit():
            raise UnsupportedUnits("pushout requires ring units")
    if not unit_gens:
        return L
    ring = L.ring
    k = len(unit_gens)
    # collapse only inverse pairs and duplicates among the declared units;
    # p-power torsion of 1 + pA in the window is a truncation artifact, not a
    # monoid relation, and stays in the kernel of alpha
    relations = []

    def products(exps):
        out = ring.one()
        for e, u in zip(exps, unit_gens):
            out = out * (u ** e if e >= 0 else u.invert() ** (-e))
        return out

    for i in range(k):
        for j in range(i + 1, k):
            if (unit_gens[i] * unit_gens[j]).same(ring.one()):
                relations.append([1 if t in (i, j) else 0 for t in range(k)])
            elif unit_gens[i].same(unit_gens[j]):
                relations.append([1 if t == i else (-1 if t == j else 0) for t in range(k)])
    rel_basis = intlin.hnf_rows(relations) if relations else []
    # complement: quotient Z^k by the relation lattice (torsion-free in our catalog)
    kernel_dirs = [list(r) for r in rel_basis]
    if kernel_dirs:
        d, umat, vmat = intlin.snf_int([[kernel_dirs[j][i] for j in range(len(kernel_dirs))]
                                        for i in range(k)])
        free_idx = [i for i in range(k) if i >= len(d) or d[i] == 0]
        if any(di not in (0, 1) for di in d):
            raise UnsupportedUnits("unit relations with torsion are unsupported")
        proj = [umat[i] for i in free_idx]
    else:
        proj = [[1 if j == i else 0 for j in range(k)] for i in range(k)]
    r = len(proj)
    # new unit elements: sections of the projection proj : Z^k -> Z^r
    new_units = []
    for j in range(r):
        target = [1 if i == j else 0 for i in range(r)]
        sec = intlin.solve_int([list(row) for row in proj], target)
        if sec is None:
            raise UnsupportedUnits("no section for unit quotient")
        new_units.append(products(sec))
    amb = L.monoid.ambient_rank
    gens2 = [tuple(list(g) + [0] * r) for g in L.monoid.generators]
    gens2 += [tuple([0] * amb + [1 if j == i else 0 for j in range(r)]) for i in range(r)]
    gens2 += [tuple([0] * amb + [-1 if j == i else 0 for j in range(r)]) for i in range(r)]
    units2 = [tuple(list(u) + [0] * r) for u in L.monoid.unit_lattice]
    units2 += [tuple([0] * amb + [1 if j == i else 0 for j in range(r)]) for i in range(r)]
    monoid2 = MonoidPresentation(amb + r, gens2, unit_lattice=units2,
                                 name=L.monoid.name + "+units")
    p = ring.coeff.p
    alpha2 = list(L.alpha) + new_units + [u.invert() for u in new_units]
    dlog_new = [L.base.delta(u) * (u.invert() ** p) for u in new_units]
    dlog2 = list(L.dlog) + dlog_new + [twist_neg(ring, d) for d in dlog_new]
    return DeltaLogRing(L.base, monoid2, alpha2, dlog2, L.log_strict)
