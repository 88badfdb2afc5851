"""Prisms, q-PD structure, and envelopes at truncated precision.

Envelopes are realized by generator elimination: a kernel generator of the
shape (var - expr) is traded for a fresh generator y with d*y = var - expr,
the eliminated variable becoming the defined element expr + d*y.  The y-tower
is free (that is the windowed form of the flatness of envelopes for regular
sequences); divided-power and gamma-adjunctions use divided symbols and
monomial rewrites respectively.
"""

from math import comb

import numpy as np

from . import modlin, monoids
from .coeffring import (CoeffRing, RingElem, TruncRing, Var, divide_exact,
                        transport)
from .deltalog import DeltaLogRing, adjoin_monoid_dlog, extend_to_group
from .deltaring import DISTINGUISHED, DeltaRing
from .errors import (BadEisenstein, NotDivisible, NotRegular, TruncationLoss,
                     UnsupportedDivisor)
from .homalg import RingHom, mult_matrix_of
from .monoids import MonoidPresentation


class PrismTriple:
    """An oriented prelog prism: a delta-log ring with a distinguished d."""

    def __init__(self, log, d, report=None, name=""):
        self.log = log
        self.d = d
        self.report = report
        self.name = name

    @property
    def ring(self):
        return self.log.ring

    def __repr__(self):
        return f"PrismTriple({self.name})"


class QPDTriple:
    """A delta-log ring over the q-base with a q-PD ideal."""

    def __init__(self, log, ideal_gens, name=""):
        self.log = log
        self.ideal_gens = list(ideal_gens)
        self.name = name


class EnvelopeResult:
    """Output of an envelope construction.

    ring: the enveloping DeltaLogRing; hom: the map from the input carrier;
    adjoined: names of the new generators with their defining data; window:
    the effective caps of the output ring.
    """

    def __init__(self, log, hom, adjoined, certificates=None, name=""):
        self.log = log
        self.hom = hom
        self.adjoined = list(adjoined)
        self.certificates = certificates or {}
        self.name = name

    @property
    def ring(self):
        return self.log.ring

    @property
    def window(self):
        return self.log.ring.full_window


# -- prism validation -------------------------------------------------------------


def _mult_kernel(ring, d):
    p, n = ring.coeff.p, ring.coeff.n
    ranges, shrink = _safe_domain_ranges(ring, (d,))
    basis = ring.window_basis(var_ranges=ranges, lat_shrink=shrink)
    target = ring.window_basis()
    index = {k: i for i, k in enumerate(target)}
    m = mult_matrix(ring, d, basis, index)
    return basis, modlin.kernel(m, p, n)


def nonzerodivisor_certificate(ring, d, probe=True):
    """Classify the kernel of multiplication by d on the window.

    Over the truncated model genuine nonzerodivisors still have window junk
    in their kernel: forced p-torsion (p^val(d) kills it) and truncation
    artifacts.  Two structural fast paths avoid matrices: a unit constant
    part (kernel = forced torsion) and a unit leading coefficient in the
    monomial order (kernel confined to the window edge).  Otherwise the
    artifact test runs on a widened probe window (caps raised by n * deg(d)):
    the kernel there must live entirely beyond the original caps.
    Returns (ok, details).
    """
    p, n = ring.coeff.p, ring.coeff.n
    if not d.terms:
        return False, {"kernel_violations": ["zero divisor input"], "d_valuation": n}
    dval = min(ring.coeff.val(c) for c in d.terms.values())
    if len(d.terms) == 1 and not any(d.terms):
        # nonzero constant: kernel is exactly the forced p-torsion
        return True, {"kernel_violations": [], "d_valuation": dval,
                      "certificate": "constant"}
    if not ring.kill and not ring._rewrites:
        # tuple-lex is translation-invariant, so a unit leading coefficient
        # forces the kernel into the window edge (divided symbols excluded:
        # their product rule introduces non-unit binomial factors)
        lead = max(d.terms)
        divided_touch = any(e and ring.vars[i].divided
                            for i, e in enumerate(lead[1]))
        if d.terms[lead] % p and not divided_touch:
            return True, {"kernel_violations": [], "d_valuation": dval,
                          "certificate": "leading-term"}
    basis, kgens = _mult_kernel(ring, d)
    ddeg = [max((cap.grade(*k) for k in d.terms), default=0) for cap in ring.caps]
    suspicious = []
    for g, v in kgens:
        if not np.mod(g * (p ** dval), p ** n).any():
            continue
        suspicious.append(g)
    bad = []
    if suspicious and probe:
        wide = ring.widened(n * max(ddeg + [1]))
        d2 = transport(d, wide)
        wbasis, wk = _mult_kernel(wide, d2)
        for g, v in wk:
            if not np.mod(g * (p ** dval), p ** n).any():
                continue
            for i, c in enumerate(g):
                if c % (p ** n):
                    grades = wide.grade(wbasis[i])
                    if all(gr <= w for gr, w in zip(grades, ring.full_window)):
                        bad.append((wbasis[i], int(c)))
                        break
    elif suspicious:
        bad = [tuple(int(x) for x in g) for g in suspicious]
    return (not bad), {"kernel_violations": bad[:4], "d_valuation": dval,
                       "window_junk_rank": len(suspicious)}


def _safe_domain_ranges(ring, multipliers):
    """(lo, hi) ranges per box variable so that multiplying a domain monomial
    by any term of the multipliers cannot overflow a box."""
    ranges = {}
    for i, v in enumerate(ring.vars):
        if v.hi is None:
            continue
        spread = 0
        for f in multipliers:
            for key in f.terms:
                spread = max(spread, abs(key[1][i]))
        if spread:
            ranges[v.name] = (v.lo + spread if v.lo < 0 else v.lo, v.hi - spread)
    shrink = 0
    if ring.lat_rank:
        for f in multipliers:
            for key in f.terms:
                for c in key[0]:
                    shrink = max(shrink, abs(c))
    return ranges, shrink


def mult_matrix(ring, f, basis, index=None):
    return mult_matrix_of(ring, f, basis, index)


def p_membership_certificate(log, d):
    """Coefficients (a, b) with a*d + b*phi(d) = p on the window, or None.

    The witness is low degree in every catalog prism, so the solve escalates
    through growing probe windows instead of attacking the full basis.
    """
    ring = log.ring
    p, n = ring.coeff.p, ring.coeff.n
    phid = log.phi(d)
    ranges, shrink = _safe_domain_ranges(ring, (d, phid))
    for scale in (p, 2 * p, None):
        if scale is None:
            window = ring.full_window
            vr = dict(ranges)
        else:
            window = tuple(min(w, scale) for w in ring.full_window)
            vr = {v.name: (max(v.lo, -1), min(v.hi, 1) if v.hi is not None else 1)
                  for v in ring.vars if v.lo < 0}
            for k, rng in ranges.items():
                lo, hi = vr.get(k, rng)
                vr[k] = (max(lo, rng[0]), min(hi, rng[1]))
        domain = ring.window_basis(window=window, var_ranges=vr, lat_shrink=shrink)
        if len(domain) > 900:
            continue
        target_basis = ring.window_basis()
        index = {k: i for i, k in enumerate(target_basis)}
        big = np.concatenate([mult_matrix(ring, d, domain, index),
                              mult_matrix(ring, phid, domain, index)], axis=1)
        target = np.zeros((len(target_basis), 1), dtype=np.int64)
        target[index[ring.zero_mono()], 0] = p
        sols, _ = modlin.solve_many(big, target, p, n)
        if sols[0] is not None:
            half = len(domain)
            a = {domain[i]: int(c) for i, c in enumerate(sols[0][:half])
                 if c % ring.coeff.pn}
            b = {domain[i]: int(c) for i, c in enumerate(sols[0][half:])
                 if c % ring.coeff.pn}
            return (ring.from_terms(a), ring.from_terms(b))
    return None


def validate_prism(log, d):
    """Check the oriented prism axioms on the window; returns a report."""
    report = {"passed": True, "failures": []}
    ok, details = nonzerodivisor_certificate(log.ring, d)
    report["nonzerodivisor"] = details
    if not ok:
        report["passed"] = False
        report["failures"].append(("nonzerodivisor", details["kernel_violations"][:2]))
    cert = p_membership_certificate(log, d)
    if cert is None:
        report["passed"] = False
        report["failures"].append(("p_membership", None))
        report["p_in_ideal"] = None
    else:
        a, b = cert
        chk = a * d + b * log.phi(d)
        report["p_in_ideal"] = {"a": a, "b": b}
        if not chk.same(log.ring.const(log.ring.coeff.p)):
            report["passed"] = False
            report["failures"].append(("p_membership_check", None))
    cls = log.base.element_class(d)
    report["distinguished"] = cls
    if cls != DISTINGUISHED:
        report["passed"] = False
        report["failures"].append(("distinguished", cls))
    report["completeness"] = "modeled by truncation (degree caps, p-precision)"
    return report


# -- example prisms ---------------------------------------------------------------


def qbase_ring(p, n, cap, extra_vars=(), caps=None, delta_depth=2, label="qdr"):
    """Z/p^n[[q-1]] truncated at (q-1)^cap, delta(q) = 0."""
    ring = TruncRing(CoeffRing(p, n), (Var("t"),) + tuple(extra_vars),
                     degree_cap=cap, caps=caps, delta_depth=delta_depth, label=label)
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    return ring, dt


def q_of(ring):
    return ring.one() + ring.var("t")


def pq_of(ring):
    """[p]_q = 1 + q + ... + q^(p-1) expanded in t = q - 1."""
    p = ring.coeff.p
    out = ring.zero()
    for i in range(p):
        out = out + ring.var("t", e=i, c=comb(p, i + 1)) if i else out + ring.const(p)
    return out


def make_example(kind, p, n, cap=None, eisenstein=None, depth=2, box=3):
    """Catalog prisms: crystalline, breuil_kisin, qdr, universal_oriented."""
    if kind == "crystalline":
        ring = TruncRing(CoeffRing(p, n), [], degree_cap=0, label=f"crys({p},{n})")
        base = DeltaRing(ring)
        prelog = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
        log = DeltaLogRing(base, prelog, [ring.zero()], [ring.zero()])
        d = ring.const(p)
        return PrismTriple(log, d, validate_prism(log, d), name=f"crystalline({p},{n})")
    if kind == "breuil_kisin":
        cap = cap if cap is not None else 8
        ring = TruncRing(CoeffRing(p, n), [Var("u")], degree_cap=cap,
                         delta_depth=depth, label=f"bk({p},{n})")
        base = DeltaRing(ring, {"u": ring.zero()})
        ecoeffs = eisenstein if eisenstein is not None else [-p, 1]
        if ecoeffs[-1] != 1:
            raise BadEisenstein("E must be monic")
        if ecoeffs[0] % p or (ecoeffs[0] // p) % p == 0:
            raise BadEisenstein("constant term must be p * unit")
        if any(c % p for c in ecoeffs[:-1]):
            raise BadEisenstein("lower coefficients must be divisible by p")
        d = ring.zero()
        for i, c in enumerate(ecoeffs):
            d = d + ring.var("u", e=i, c=c) if i else d + ring.const(c)
        prelog = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
        log = DeltaLogRing(base, prelog, [ring.var("u")], [ring.zero()])
        return PrismTriple(log, d, validate_prism(log, d), name=f"breuil_kisin({p},{n})")
    if kind == "qdr":
        cap = cap if cap is not None else 2 * p
        ring, dt = qbase_ring(p, n, cap, delta_depth=depth)
        base = DeltaRing(ring, {"t": dt})
        prelog = MonoidPresentation(0, [], name="trivial")
        log = DeltaLogRing(base, prelog, [], [])
        d = pq_of(ring)
        return PrismTriple(log, d, validate_prism(log, d), name=f"qdr({p},{n})")
    if kind == "universal_oriented":
        names = ["d"] + [f"z{i}" for i in range(depth + 1)]
        vars_ = [Var("d", weight=1)]
        vars_ += [Var(f"z{i}", weight=0, lo=-box, hi=box) for i in range(depth + 1)]
        ring = TruncRing(CoeffRing(p, n), vars_, degree_cap=cap if cap is not None else 2 * p,
                         delta_depth=depth, label="univ")
        dg = {"d": ring.var("z0")}
        for i in range(depth + 1):
            dg[f"z{i}"] = ring.var(f"z{i+1}") if i < depth else None
        base = DeltaRing(ring, dg)
        prelog = MonoidPresentation(0, [], name="trivial")
        log = DeltaLogRing(base, prelog, [], [])
        d = ring.var("d")
        return PrismTriple(log, d, validate_prism(log, d), name="universal_oriented")
    raise ValueError(f"unknown example kind {kind!r}")


# -- q-PD gamma --------------------------------------------------------------------


def gamma(log, x, pq=None):
    """gamma(x) = phi(x)/[p]_q - delta(x); NotDivisible if phi(x) not in ([p]_q)."""
    ring = log.ring
    pq = pq if pq is not None else pq_of(ring)
    return divide_exact(log.phi(x), pq, declared=True) - log.delta(x)


# -- regularity certificates ---------------------------------------------------------


def regular_certificate(ring, gens):
    """Degree-bounded Koszul-style certificate: the annihilator of each
    generator on the window must be forced p-torsion or window-edge junk."""
    details = []
    ok = True
    for g in gens:
        good, det = nonzerodivisor_certificate(ring, g)
        details.append(det)
        ok = ok and good
    return ok, details


# -- envelopes -------------------------------------------------------------------------


def pd_envelope(log, gens, pd_cap):
    """Divided-power envelope: each generator variable x becomes a divided
    symbol g[x] with g[x]_i g[x]_j = C(i+j,i) g[x]_{i+j} and x = g[x]_1."""
    ring = log.ring
    if not gens:
        return EnvelopeResult(log, RingHom(ring, ring,
                                           {v.name: ring.var(v.name) for v in ring.vars},
                                           None, name="id"),
                              [], name="pd_envelope(trivial)")
    okreg, regdet = regular_certificate(ring, [ring.var(x) for x in gens])
    if not okreg:
        raise NotRegular(f"regularity certificate failed: {regdet}")
    ring2 = ring
    for x in gens:
        w = ring.vars[ring.vindex[x]].weight
        ring2 = ring2.without_var(x).with_vars(
            [Var(f"g[{x}]", weight=w, hi=pd_cap, divided=True)])
    var_images = {}
    for v in ring.vars:
        if v.name in gens:
            var_images[v.name] = ring2.var(f"g[{v.name}]")
        else:
            var_images[v.name] = ring2.var(v.name)
    hom = RingHom(ring, ring2, var_images,
                  [[1 if i == j else 0 for j in range(ring.lat_rank)]
                   for i in range(ring.lat_rank)] if ring.lat_rank else None,
                  name="pd")
    dg = {}
    for name, val in log.base.delta_gen.items():
        if name in gens:
            continue
        if val is not None and any(val.terms.get(k, 0) and k[1][ring.vindex[x]]
                                   for x in gens for k in val.terms):
            dg[name] = hom(val)
        else:
            dg[name] = hom(val) if val is not None else None
    base2 = DeltaRing(ring2, dg, log.base.lat_dlog)
    alpha2 = [hom(a) for a in log.alpha]
    dlog2 = [hom(d) for d in log.dlog]
    log2 = DeltaLogRing(base2, log.monoid, alpha2, dlog2, log.log_strict)
    adjoined = [{"name": f"g[{x}]", "relation": f"{x}^k = k! g[{x}]_k", "cap": pd_cap}
                for x in gens]
    return EnvelopeResult(log2, hom, adjoined,
                          certificates={"regular": regdet}, name="pd_envelope")


def qpd_envelope(log, gens, depth=1, pq=None):
    """q-divided-power envelope of kernel generators z (ring variables with
    delta available).

    Level 1 adjoins g1(z) = gamma(z) with the monomial rewrite
        z^p -> [p]_q g1 + ([p]_q - p) delta(z),
    i.e. phi(z) = [p]_q (g1 + delta(z)).  Level k >= 2 adjoins the pair
    (s_k = delta(g_k), g_{k+1} = gamma(g_k)) with the analogous rewrite on
    g_k^p.  delta at the top gamma-generator is the tower boundary.
    """
    ring = log.ring
    if not gens:
        return EnvelopeResult(log, RingHom(ring, ring,
                                           {v.name: ring.var(v.name) for v in ring.vars},
                                           None, name="id"),
                              [], name="qpd_envelope(trivial)")
    okreg, regdet = regular_certificate(ring, [ring.var(z) for z in gens])
    if not okreg:
        raise NotRegular(f"regularity certificate failed: {regdet}")
    p = ring.coeff.p
    new_vars = []
    gnames = {}
    for z in gens:
        w = ring.vars[ring.vindex[z]].weight
        names = [f"g{k}({z})" for k in range(1, depth + 1)]
        gnames[z] = names
        for k, nm in enumerate(names, start=1):
            new_vars.append(Var(nm, weight=w * (p ** k)))
            if k < depth:
                new_vars.append(Var(f"s{k}({z})", weight=w * (p ** (k + 1))))
    ring2 = ring.with_vars(new_vars)
    extra = {}
    for z in gens:
        names = gnames[z]
        for k, nm in enumerate(names, start=1):
            extra[nm] = ring2.var(f"s{k}({z})") if k < depth else None
            if k < depth:
                extra[f"s{k}({z})"] = None
    base2 = log.base.clone_onto(ring2, extra_delta=extra)
    alpha2 = [transport(a, ring2) for a in log.alpha]
    dlog2 = [transport(d, ring2) for d in log.dlog]
    log2 = DeltaLogRing(base2, log.monoid, alpha2, dlog2, log.log_strict)
    pq2 = pq_of(ring2) if pq is None else transport(pq, ring2)
    for z in gens:
        names = gnames[z]
        dz = base2.delta(ring2.var(z))
        ring2.set_rewrite(z, p, pq2 * ring2.var(names[0]) + (pq2 - p) * dz)
        for k in range(1, depth):
            s = ring2.var(f"s{k}({z})")
            ring2.set_rewrite(names[k - 1], p,
                              pq2 * ring2.var(names[k]) + (pq2 - p) * s)
    hom = RingHom(ring, ring2, {v.name: ring2.var(v.name) for v in ring.vars},
                  [[1 if i == j else 0 for j in range(ring.lat_rank)]
                   for i in range(ring.lat_rank)] if ring.lat_rank else None,
                  name="qpd")
    adjoined = []
    for z in gens:
        names = gnames[z]
        adjoined.append({"name": names[0], "kernel_gen": z,
                         "gamma": ring2.var(names[0]),
                         "relation": f"{z}^{p} -> [p]_q {names[0]} + ([p]_q - {p}) delta({z})"})
        for k in range(2, depth + 1):
            adjoined.append({"name": names[k - 1], "kernel_gen": names[k - 2],
                             "gamma": ring2.var(names[k - 1]),
                             "relation": f"{names[k-2]}^{p} -> [p]_q {names[k-1]}"
                                         f" + ([p]_q - {p}) s{k-1}({z})"})
    return EnvelopeResult(log2, hom, adjoined,
                          certificates={"regular": regdet}, name="qpd_envelope")


def qpd_certificates(env, ideal_gens, pq=None):
    """Post-hoc q-PD axioms on the adjoined generators: phi(gen) in ([p]_q)
    and gamma(gen) in the ideal."""
    log = env.log
    ring = log.ring
    p, n = ring.coeff.p, ring.coeff.n
    pq = pq_of(ring) if pq is None else pq
    basis = ring.window_basis()
    index = {k: i for i, k in enumerate(basis)}
    ideal_mat = np.concatenate([mult_matrix(ring, g, basis, index) for g in ideal_gens],
                               axis=1) \
        if ideal_gens else np.zeros((len(basis), 0), dtype=np.int64)
    report = {"passed": True, "items": []}
    for item in env.adjoined:
        z = item["kernel_gen"]
        gen = ring.var(z)
        try:
            divide_exact(log.phi(gen), pq, declared=True)
            phi_ok = True
        except (NotDivisible, UnsupportedDivisor):
            phi_ok = False
        gm = gamma(log, gen, pq)
        vec = np.zeros((len(basis), 1), dtype=np.int64)
        ok_vec = True
        for k, c in gm.terms.items():
            if k not in index:
                ok_vec = False
                break
            vec[index[k], 0] = c
        gamma_ok = False
        if ok_vec:
            sols, _ = modlin.solve_many(ideal_mat, vec, p, n)
            gamma_ok = sols[0] is not None
        report["items"].append({"gen": z, "phi_in_pq": phi_ok, "gamma_in_ideal": gamma_ok})
        report["passed"] = report["passed"] and phi_ok and gamma_ok
    return report


def prismatic_envelope_regular(log, d, gens, depth):
    """Prismatic envelope for a regular sequence of the shape var - expr.

    gens: list of (var_name, expr) with expr not involving var_name and the
    variable's delta-tower free.  The variable (and its tower, inferred from
    the delta chain) is eliminated: var = expr + d * y with y a fresh free
    delta-tower generator.
    """
    ring = log.ring
    if not gens:
        return EnvelopeResult(log, RingHom(ring, ring,
                                           {v.name: ring.var(v.name) for v in ring.vars},
                                           None, name="id"),
                              [], name="prismatic_envelope(trivial)")
    elems = [ring.var(v) - e for v, e in gens]
    okreg, regdet = regular_certificate(ring, elems)
    if not okreg:
        raise NotRegular(f"regularity certificate failed: {regdet}")
    # collect eliminated towers: follow the delta chain from each eliminated var
    elim = []
    for v, _ in gens:
        chain = [v]
        cur = v
        while True:
            val = log.base.delta_gen.get(cur)
            nxt = _single_var_name(ring, val)
            if nxt is None or nxt in chain:
                break
            chain.append(nxt)
            cur = nxt
        elim.append(chain)
    ring2 = ring
    for chain in elim:
        for nm in chain:
            ring2 = ring2.without_var(nm)
    new_vars = []
    ynames = []
    p = ring.coeff.p
    for (v, _), chain in zip(gens, elim):
        w = ring.vars[ring.vindex[v]].weight
        names = [f"y({v})"] + [f"d{i}(y({v}))" for i in range(1, depth + 1)]
        ynames.append(names)
        for i, nm in enumerate(names):
            new_vars.append(Var(nm, weight=w * (p ** i)))
    ring2 = ring2.with_vars(new_vars)
    extra = {}
    for names in ynames:
        for i, nm in enumerate(names):
            extra[nm] = ring2.var(names[i + 1]) if i + 1 < len(names) else None
    # base delta data for surviving generators
    dg = {}
    survivors = [v for v in ring.vars if all(v.name not in ch for ch in elim)]
    base2 = DeltaRing(ring2, {}, log.base.lat_dlog)
    d2 = transport(d, ring2)
    var_images = {}
    for (v, expr), names in zip(gens, ynames):
        var_images[v] = transport(expr, ring2) + d2 * ring2.var(names[0])
    for v in survivors:
        var_images[v.name] = ring2.var(v.name)
    hom = RingHom(ring, ring2, dict(var_images),
                  [[1 if i == j else 0 for j in range(ring.lat_rank)]
                   for i in range(ring.lat_rank)] if ring.lat_rank else None,
                  name="prism_env")
    # delta on survivors transports; on eliminated towers it is derived
    for v in survivors:
        val = log.base.delta_gen.get(v.name)
        dg[v.name] = hom(val) if val is not None else None
    dg.update(extra)
    base2.delta_gen = dg
    # extend the hom to eliminated tower variables: delta of the defining image
    flagged = []
    for (v, expr), chain, names in zip(gens, elim, ynames):
        img = var_images[v]
        for lvl, nm in enumerate(chain[1:], start=1):
            try:
                img = base2.delta(img)
            except Exception:
                flagged.append(nm)
                img = None
            if img is None:
                break
            var_images[nm] = img
    hom = RingHom(ring, ring2, var_images,
                  [[1 if i == j else 0 for j in range(ring.lat_rank)]
                   for i in range(ring.lat_rank)] if ring.lat_rank else None,
                  name="prism_env")
    alpha2 = [hom(a) for a in log.alpha]
    dlog2 = [hom(x) for x in log.dlog]
    log2 = DeltaLogRing(base2, log.monoid, alpha2, dlog2, log.log_strict)
    adjoined = [{"name": names[0], "relation": f"{d!r} * {names[0]} = {v} - expr",
                 "tower": names[1:], "depth_flag": flagged}
                for (v, _), names in zip(gens, ynames)]
    return EnvelopeResult(log2, hom, adjoined,
                          certificates={"regular": regdet, "depth_flagged": flagged},
                          name="prismatic_envelope_regular")


def _single_var_name(ring, elem):
    if elem is None or len(elem.terms) != 1:
        return None
    (key, c), = elem.terms.items()
    if any(key[0]) or c != 1:
        return None
    nz = [i for i, e in enumerate(key[1]) if e]
    if len(nz) != 1 or key[1][nz[0]] != 1:
        return None
    return ring.vars[nz[0]].name


def exactify_triple(log, ideal_gens, h):
    """Exactification of a triple along a monoid surjection h: M -> N.

    Returns (log', ideal_gens', mprime, hprime) with the prelog monoid
    replaced by M' = (h^gp)^{-1}(N) and alpha/dlog extended by the group
    formulas (the underlying ring is localized where needed).
    """
    mprime, hprime = monoids.exactify(h)
    log2 = extend_to_group(log, mprime)
    ideal2 = [transport(g, log2.ring) for g in ideal_gens]
    return log2, ideal2, mprime, hprime
