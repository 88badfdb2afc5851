"""Cech-Alexander builders at bounded cosimplicial degree.

Level n of the nerve carries coordinates x@0..x@n per chart generator; the
prismatic levels eliminate x@i (i >= 1) through y_i = (x@{i-1} - x@i)/d with
free delta-towers, and the delta-crystalline levels keep all towers free and
adjoin divided powers of the consecutive differences.  Faces and
degeneracies act by monotone index maps, which on the difference coordinates
are integer combinations, so no division ever happens in a structure map.

Tower variables are graded by p^level, which makes every structure map
weight-homogeneous and the window bases exactly stable.
"""

from math import comb

import numpy as np

from .coeffring import Cap, CoeffRing, RingElem, TruncRing, Var, transport
from .deltalog import DeltaLogRing
from .deltaring import DeltaRing
from .errors import DepthExhausted, ProbeFailure, WindowNotStable
from .homalg import CosimplicialAlgebra, RingHom
from .monoids import MonoidPresentation


class CechInstance:
    def __init__(self, base, levels, faces, degens, kind, meta):
        self.base = base
        self.levels = levels          # list of DeltaLogRing
        self.cosimplicial = CosimplicialAlgebra(levels, faces, degens)
        self.kind = kind
        self.meta = meta

    @property
    def n_max(self):
        return len(self.levels) - 1


def _tower_names(coord, depth):
    return [coord] + [f"d{k}({coord})" for k in range(1, depth + 1)]


def _level_ring_prismatic(base_triple, n, depth, cap, qcoord=False):
    """Level-n carrier for the prismatic nerve of one chart generator x:
    base ring generators + x@0 tower + y_1..y_n towers."""
    A = base_triple.ring
    p = A.coeff.p
    names = []
    weights = []
    for k, nm in enumerate(_tower_names("x@0", depth)):
        names.append(nm)
        weights.append(p ** k)
    for i in range(1, n + 1):
        for k, nm in enumerate(_tower_names(f"y@{i}", depth)):
            names.append(nm)
            weights.append(p ** k)
    new_vars = [Var(nm, weight=w) for nm, w in zip(names, weights)]
    caps = [Cap(c.lat_w, c.var_w + tuple(0 for _ in new_vars), c.bound)
            for c in A.caps]
    caps.append(Cap((0,) * A.lat_rank,
                    tuple(0 for _ in A.vars) + tuple(weights), cap))
    ring = TruncRing(A.coeff, A.vars + tuple(new_vars), lat_rank=A.lat_rank,
                     lat_weights=A.lat_weights, lat_boxes=A.lat_boxes,
                     lat_monoid=A.lat_monoid, caps=caps,
                     delta_depth=depth, label=f"C^{n}")
    dg = {}
    for name, val in base_triple.log.base.delta_gen.items():
        dg[name] = transport(val, ring) if val is not None else None
    for coord in ["x@0"] + [f"y@{i}" for i in range(1, n + 1)]:
        tn = _tower_names(coord, depth)
        for k, nm in enumerate(tn):
            dg[nm] = ring.var(tn[k + 1]) if k + 1 < len(tn) else None
    base = DeltaRing(ring, dg, base_triple.log.base.lat_dlog)
    alpha = [transport(a, ring) for a in base_triple.log.alpha]
    dlog = [transport(x, ring) for x in base_triple.log.dlog]
    return DeltaLogRing(base, base_triple.log.monoid, alpha, dlog)


def _coord_images_prismatic(level_log, d_elem, n, depth):
    """x@i and its delta-tower as elements of the level-n ring:
    x@i = x@0 - d * (y@1 + ... + y@i)."""
    ring = level_log.ring
    d2 = transport(d_elem, ring)
    out = {}
    for i in range(n + 1):
        cur = ring.var("x@0")
        for j in range(1, i + 1):
            cur = cur - d2 * ring.var(f"y@{j}")
        tower = [cur]
        for k in range(1, depth + 1):
            try:
                tower.append(level_log.base.delta(tower[-1]))
            except DepthExhausted:
                tower.append(None)
        out[i] = tower
    return out


def build_cech(base_triple, chart, n_max, depth, cap, log_coord=False):
    """Prismatic Cech-Alexander levels for a one-generator chart.

    chart: dict with "name" and "log" (True for the log-affine line: the
    coordinate carries dlog = 0 prelog data; False for the plain line).
    n_max <= 2.
    """
    if n_max > 2:
        raise ValueError("n_max is capped at 2")
    d_elem = base_triple.d
    levels = []
    coords = []
    for n in range(n_max + 1):
        lvl = _level_ring_prismatic(base_triple, n, depth, cap)
        if chart.get("log"):
            # the chart generator joins the prelog monoid with dlog = 0 (the
            # nerve of a rank-1 log coordinate)
            amb = lvl.monoid.ambient_rank
            gens = [tuple(list(g) + [0]) for g in lvl.monoid.generators] + \
                   [tuple([0] * amb + [1])]
            units = [tuple(list(u) + [0]) for u in lvl.monoid.unit_lattice]
            facets = None
            if lvl.monoid.facets is not None:
                facets = [tuple(list(f) + [0]) for f in lvl.monoid.facets] + \
                         [tuple([0] * amb + [1])]
            monoid = MonoidPresentation(amb + 1, gens, unit_lattice=units,
                                        facets=facets, name="M+N")
            alpha = list(lvl.alpha) + [lvl.ring.var("x@0")]
            dlog = list(lvl.dlog) + [lvl.ring.zero()]
            lvl = DeltaLogRing(lvl.base, monoid, alpha, dlog)
        levels.append(lvl)
        coords.append(_coord_images_prismatic(lvl, d_elem, n, depth))

    def base_images(src, dst):
        imgs = {}
        for v in base_triple.ring.vars:
            imgs[v.name] = dst.ring.var(v.name)
        return imgs

    def face_hom(nn, j):
        src, dst = levels[nn], levels[nn + 1]
        imgs = base_images(src, dst)
        # x@i -> x@(i if i<j else i+1); towers follow
        for i in range(nn + 1):
            tgt = i if i < j else i + 1
            tower = coords[nn + 1][tgt]
            for k, nm in enumerate(_tower_names(f"x@{i}", depth)):
                if i == 0 and tgt == 0:
                    imgs[nm] = dst.ring.var(nm)
                else:
                    if tower[k] is None:
                        raise WindowNotStable(f"face needs depth > {depth} at {nm}")
                    imgs[nm] = tower[k]
        # y@i = (x@{i-1} - x@i)/d -> telescoping integer combination
        for i in range(1, nn + 1):
            a = i - 1 if i - 1 < j else i
            b = i if i < j else i + 1
            comb_y = dst.ring.zero()
            for kk in range(a + 1, b + 1):
                comb_y = comb_y + dst.ring.var(f"y@{kk}")
            tower = [comb_y]
            for k in range(1, depth + 1):
                try:
                    tower.append(dst.base.delta(tower[-1]))
                except DepthExhausted:
                    tower.append(None)
            for k, nm in enumerate(_tower_names(f"y@{i}", depth)):
                if tower[k] is None:
                    raise WindowNotStable(f"face needs depth > {depth} at {nm}")
                imgs[nm] = tower[k]
        lat = [[1 if a == b else 0 for b in range(src.ring.lat_rank)]
               for a in range(dst.ring.lat_rank)] if src.ring.lat_rank else None
        return RingHom(src.ring, dst.ring, imgs, lat, name=f"d^{j}")

    def degen_hom(nn, j):
        src, dst = levels[nn], levels[nn - 1]
        imgs = base_images(src, dst)
        for i in range(nn + 1):
            tgt = i if i <= j else i - 1
            tower = coords[nn - 1][tgt]
            for k, nm in enumerate(_tower_names(f"x@{i}", depth)):
                if tgt == 0:
                    imgs[nm] = dst.ring.var(_tower_names("x@0", depth)[k])
                else:
                    if tower[k] is None:
                        raise WindowNotStable(f"degeneracy needs depth > {depth}")
                    imgs[nm] = tower[k]
        for i in range(1, nn + 1):
            a = i - 1 if i - 1 <= j else i - 2
            b = i if i <= j else i - 1
            comb_y = dst.ring.zero()
            for kk in range(a + 1, b + 1):
                comb_y = comb_y + dst.ring.var(f"y@{kk}")
            tower = [comb_y]
            for k in range(1, depth + 1):
                try:
                    tower.append(dst.base.delta(tower[-1]))
                except DepthExhausted:
                    tower.append(None)
            for k, nm in enumerate(_tower_names(f"y@{i}", depth)):
                if tower[k] is None:
                    raise WindowNotStable(f"degeneracy needs depth > {depth}")
                imgs[nm] = tower[k]
        lat = [[1 if a == b else 0 for b in range(src.ring.lat_rank)]
               for a in range(dst.ring.lat_rank)] if src.ring.lat_rank else None
        return RingHom(src.ring, dst.ring, imgs, lat, name=f"s^{j}")

    faces = {}
    degens = {}
    for nn in range(n_max):
        for j in range(nn + 2):
            faces[(nn, j)] = face_hom(nn, j)
    for nn in range(1, n_max + 1):
        for j in range(nn):
            degens[(nn, j)] = degen_hom(nn, j)
    return CechInstance(base_triple, levels, faces, degens, "prismatic",
                        {"depth": depth, "cap": cap, "chart": chart,
                         "n_max": n_max})


# -- delta-crystalline nerve --------------------------------------------------------


def _gamma_of_combo(ring, signed_names, k, divided_index):
    """gamma_k of a signed sum of divided-symbol generators, by the PD laws:
    gamma_k(sum e_i z_i) = sum over compositions prod e_i^{k_i} gamma_{k_i}(z_i)."""
    if k == 0:
        return ring.one()
    if not signed_names:
        return ring.zero()
    sign, name = signed_names[0]
    rest = signed_names[1:]
    out = ring.zero()
    idx = divided_index[name]
    cap = ring.vars[idx].hi
    for k1 in range(0, k + 1):
        if cap is not None and k1 > cap:
            continue
        exps = [0] * len(ring.vars)
        exps[idx] = k1
        term = RingElem(ring, {((0,) * ring.lat_rank, tuple(exps)):
                               (sign ** k1) % ring.coeff.pn or ring.coeff.pn},
                        ring.coeff.n, ring.full_window) \
            if (sign ** k1) % ring.coeff.pn else ring.zero()
        if k1 == 0:
            term = ring.one()
        tail = _gamma_of_combo(ring, rest, k - k1, divided_index)
        out = out + term * tail
    return out


def build_delta_crys_cech(base_triple, chart, n_max, depth, cap, pd_cap):
    """delta-log-crystalline nerve: all coordinate towers stay free, the
    consecutive differences carry divided powers z@i = x@{i-1} - x@i."""
    if n_max > 2:
        raise ValueError("n_max is capped at 2")
    A = base_triple.ring
    p = A.coeff.p
    levels = []
    div_idx = []
    for n in range(n_max + 1):
        names = []
        weights = []
        for i in range(n + 1):
            for k, nm in enumerate(_tower_names(f"x@{i}", depth)):
                names.append(nm)
                weights.append(p ** k)
        new_vars = [Var(nm, weight=w) for nm, w in zip(names, weights)]
        for i in range(1, n + 1):
            new_vars.append(Var(f"z@{i}", weight=1, hi=pd_cap, divided=True))
            names.append(f"z@{i}")
            weights.append(1)
        caps = [Cap(c.lat_w, c.var_w + tuple(0 for _ in new_vars), c.bound)
                for c in A.caps]
        caps.append(Cap((0,) * A.lat_rank,
                        tuple(0 for _ in A.vars) + tuple(weights), cap))
        ring = TruncRing(A.coeff, A.vars + tuple(new_vars), lat_rank=A.lat_rank,
                         lat_weights=A.lat_weights, lat_boxes=A.lat_boxes,
                         lat_monoid=A.lat_monoid, caps=caps,
                         delta_depth=depth, label=f"Ccrys^{n}")
        dg = {}
        for name, val in base_triple.log.base.delta_gen.items():
            dg[name] = transport(val, ring) if val is not None else None
        for i in range(n + 1):
            tn = _tower_names(f"x@{i}", depth)
            for k, nm in enumerate(tn):
                dg[nm] = ring.var(tn[k + 1]) if k + 1 < len(tn) else None
        base = DeltaRing(ring, dg, base_triple.log.base.lat_dlog)
        alpha = [transport(a, ring) for a in base_triple.log.alpha]
        dlog = [transport(x, ring) for x in base_triple.log.dlog]
        levels.append(DeltaLogRing(base, base_triple.log.monoid, alpha, dlog))
        div_idx.append({f"z@{i}": ring.vindex[f"z@{i}"] for i in range(1, n + 1)})

    def index_map_hom(nn, dst_n, imap, name):
        """The hom induced by the monotone map i -> imap[i] on coordinates."""
        src, dst = levels[nn], levels[dst_n]
        imgs = {}
        for v in base_triple.ring.vars:
            imgs[v.name] = dst.ring.var(v.name)
        for i in range(nn + 1):
            for k, nm in enumerate(_tower_names(f"x@{i}", depth)):
                imgs[nm] = dst.ring.var(_tower_names(f"x@{imap[i]}", depth)[k])
        div_images = {}
        for i in range(1, nn + 1):
            a, b = imap[i - 1], imap[i]
            signed = []
            lo, hi = min(a, b), max(a, b)
            sgn = 1 if a <= b else -1
            for kk in range(lo + 1, hi + 1):
                signed.append((sgn, f"z@{kk}"))
            div_images[f"z@{i}"] = (lambda sig: (lambda e: _gamma_of_combo(
                dst.ring, sig, e, div_idx[dst_n])))(list(signed))
        lat = [[1 if a == b else 0 for b in range(src.ring.lat_rank)]
               for a in range(dst.ring.lat_rank)] if src.ring.lat_rank else None
        return RingHom(src.ring, dst.ring, imgs, lat, name=name,
                       divided_images=div_images)

    faces = {}
    degens = {}
    for nn in range(n_max):
        for j in range(nn + 2):
            imap = {i: (i if i < j else i + 1) for i in range(nn + 1)}
            faces[(nn, j)] = index_map_hom(nn, nn + 1, imap, f"d^{j}")
    for nn in range(1, n_max + 1):
        for j in range(nn):
            imap = {i: (i if i <= j else i - 1) for i in range(nn + 1)}
            degens[(nn, j)] = index_map_hom(nn, nn - 1, imap, f"s^{j}")
    return CechInstance(base_triple, levels, faces, degens, "delta-crys",
                        {"depth": depth, "cap": cap, "pd_cap": pd_cap,
                         "chart": chart, "n_max": n_max})


def weakly_final_probe(inst, probe_log, gen_images, chart_images=None):
    """Map level 0 into a probe object extending the chart.

    gen_images: name -> element of the probe ring for the level-0 chart
    coordinates (x@0 and base generators); tower images are forced by the
    probe's delta.  Returns the RingHom and a commuting certificate.
    """
    src = inst.levels[0]
    dst = probe_log
    imgs = {}
    depth = inst.meta["depth"]
    for v in src.ring.vars:
        if v.name in gen_images:
            imgs[v.name] = gen_images[v.name]
    for coord in ["x@0"]:
        if coord not in imgs:
            raise ProbeFailure(f"no image for {coord}")
        tower = [imgs[coord]]
        for k in range(1, depth + 1):
            try:
                tower.append(dst.base.delta(tower[-1]))
            except DepthExhausted:
                raise ProbeFailure(f"probe depth exhausted at level {k} for {coord}")
        for k, nm in enumerate(_tower_names(coord, depth)):
            imgs[nm] = tower[k]
    missing = [v.name for v in src.ring.vars if v.name not in imgs]
    if missing:
        raise ProbeFailure(f"no admissible image for {missing[0]}")
    lat = [[1 if a == b else 0 for b in range(src.ring.lat_rank)]
           for a in range(dst.ring.lat_rank)] if src.ring.lat_rank else None
    hom = RingHom(src.ring, dst.ring, imgs, lat, name="probe")
    # certificate: delta-compatibility on the chart generator
    cert = {"delta_compatible": True}
    x = src.ring.var("x@0")
    lhs = hom(src.base.delta(x))
    rhs = dst.base.delta(hom(x))
    if not lhs.same(rhs):
        cert["delta_compatible"] = False
    return hom, cert
