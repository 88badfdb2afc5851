"""Cochain complexes and cosimplicial algebras over truncated rings.

Complexes carry explicit finite bases; modules may be presented with
relations (used for mod-f reductions).  All cohomology goes through Smith
normal form over Z/p^n.
"""

import numpy as np

from . import modlin
from .coeffring import RingElem, transport
from .errors import NotCommuting, NotDivisible, WindowNotStable


class RingHom:
    """A ring homomorphism determined on generators.

    var_images: name -> element of dst; lat_map: integer matrix sending source
    lattice points into the destination lattice (monomial images).
    """

    def __init__(self, src, dst, var_images=None, lat_map=None, name="",
                 divided_images=None):
        self.src = src
        self.dst = dst
        self.var_images = dict(var_images or {})
        self.lat_map = [list(r) for r in lat_map] if lat_map is not None else None
        self.divided_images = dict(divided_images or {})
        self.name = name

    def __call__(self, elem):
        return transport(elem, self.dst, var_images=self.var_images,
                         lat_map=self.lat_map, divided_images=self.divided_images)

    def on_key(self, key, precision=None):
        el = RingElem(self.src, {key: 1},
                      precision if precision is not None else self.src.coeff.n,
                      self.src.full_window)
        return self(el)

    def compose(self, inner):
        """self o inner (inner applied first)."""
        imgs = {}
        divs = {}
        for v in inner.src.vars:
            if v.name in inner.divided_images:
                divs[v.name] = (lambda f: (lambda e: self(f(e))))(
                    inner.divided_images[v.name])
                continue
            imgs[v.name] = self(inner.on_key(
                ((0,) * inner.src.lat_rank,
                 tuple(1 if u.name == v.name else 0 for u in inner.src.vars))))
        lat = None
        if inner.src.lat_rank:
            cols = []
            for i in range(inner.src.lat_rank):
                if inner.lat_map is not None:
                    v = [inner.lat_map[r][i] for r in range(len(inner.lat_map))]
                else:
                    v = [1 if r == i else 0 for r in range(inner.dst.lat_rank)]
                if self.lat_map is not None:
                    v = [sum(self.lat_map[r][k] * v[k] for k in range(len(v)))
                         for r in range(len(self.lat_map))]
                cols.append(v)
            lat = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))] \
                if cols else None
        return RingHom(inner.src, self.dst, imgs, lat,
                       name=f"{self.name}*{inner.name}", divided_images=divs)

    def agrees_with(self, other, test_points=()):
        """Equality on all generators (and optional extra lattice points)."""
        if self.src is not other.src or self.dst is not other.dst:
            return False
        for v in self.src.vars:
            exps_max = 2 if v.divided else 1
            for e in range(1, exps_max + 1):
                key = ((0,) * self.src.lat_rank,
                       tuple(e if u.name == v.name else 0 for u in self.src.vars))
                if not self.on_key(key).same(other.on_key(key)):
                    return False
        pts = list(test_points)
        if self.src.lat_rank and self.src.lat_monoid is not None:
            pts.extend(self.src.lat_monoid.generators)
        for pt in pts:
            key = (tuple(pt), (0,) * len(self.src.vars))
            if not self.on_key(key).same(other.on_key(key)):
                return False
        return True


def mult_matrix_of(ring, f, basis, index=None):
    """Matrix of multiplication by f on span(basis) (image terms outside the
    index are dropped as cap truncation)."""
    n = ring.coeff.n
    index = index if index is not None else {k: i for i, k in enumerate(basis)}
    m = np.zeros((len(index), len(basis)), dtype=np.int64)
    for j, key in enumerate(basis):
        img = RingElem(ring, {key: 1}, n, ring.full_window) * f
        for k, c in img.terms.items():
            if k in index:
                m[index[k], j] = c
    return m


def identity_hom(ring, name="id"):
    return RingHom(ring, ring,
                   {v.name: ring.var(v.name) for v in ring.vars},
                   [[1 if i == j else 0 for j in range(ring.lat_rank)]
                    for i in range(ring.lat_rank)] if ring.lat_rank else None,
                   name=name)


class CosimplicialAlgebra:
    """Levels 0..n_max with coface maps d^j : A^n -> A^{n+1} (j = 0..n+1) and
    codegeneracies s^j : A^n -> A^{n-1} (j = 0..n-1)."""

    def __init__(self, levels, faces, degens):
        self.levels = list(levels)
        self.faces = dict(faces)
        self.degens = dict(degens)

    @property
    def n_max(self):
        return len(self.levels) - 1

    def face(self, n, j):
        return self.faces[(n, j)]

    def degen(self, n, j):
        return self.degens[(n, j)]


def check_cosimplicial_identities(C, n_max=None, test_points=()):
    """Verify the coface/codegeneracy identities on generators up to n_max."""
    n_max = C.n_max if n_max is None else n_max
    failures = []
    checks = 0

    def agree(f, g, tag):
        nonlocal checks
        checks += 1
        if not f.agrees_with(g, test_points):
            failures.append(tag)

    for n in range(n_max - 1):
        for i in range(n + 2):
            for j in range(i + 1, n + 3):
                # d^j d^i = d^i d^{j-1} on A^n
                lhs = C.face(n + 1, j).compose(C.face(n, i))
                rhs = C.face(n + 1, i).compose(C.face(n, j - 1))
                agree(lhs, rhs, ("dd", n, i, j))
    for n in range(n_max):
        # s^j d^i identities on A^n (maps A^n -> A^n or A^{n+? })
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = C.degen(n + 1, j).compose(C.face(n, i))
                if i < j:
                    rhs = C.face(n - 1, i).compose(C.degen(n, j - 1)) if n >= 1 else None
                elif i in (j, j + 1):
                    lvl = C.levels[n]
                    rhs = identity_hom(lvl.ring if hasattr(lvl, "ring") else lvl)
                else:
                    rhs = C.face(n - 1, i - 1).compose(C.degen(n, j)) if n >= 1 else None
                if rhs is not None:
                    agree(lhs, rhs, ("sd", n, i, j))
    for n in range(2, n_max + 1):
        for i in range(n - 1):
            for j in range(i, n - 1):
                lhs = C.degen(n - 1, j).compose(C.degen(n, i))
                rhs = C.degen(n - 1, i).compose(C.degen(n, j + 1))
                agree(lhs, rhs, ("ss", n, i, j))
    return {"passed": not failures, "failures": failures, "checks": checks}


class CochainComplex:
    """Free (or presented) modules with boundary matrices over Z/p^n.

    modules: dict degree -> list of basis labels.
    diff:    dict degree -> numpy matrix (dim(deg+1) x dim(deg)).
    relations: optional dict degree -> numpy matrix of relation columns.
    """

    def __init__(self, coeff, modules, diff, relations=None, label=""):
        self.coeff = coeff
        self.modules = {d: list(b) for d, b in modules.items()}
        pn = coeff.pn
        self.diff = {d: modlin.as_array(m, pn) for d, m in diff.items()}
        self.relations = {d: modlin.as_array(m, pn)
                          for d, m in (relations or {}).items()}
        self.label = label

    def degrees(self):
        return sorted(self.modules)

    def dim(self, d):
        return len(self.modules.get(d, []))

    def d_matrix(self, d):
        if d in self.diff:
            return self.diff[d]
        return np.zeros((self.dim(d + 1), self.dim(d)), dtype=np.int64)

    def rel_matrix(self, d):
        if d in self.relations:
            return self.relations[d]
        return np.zeros((self.dim(d), 0), dtype=np.int64)

    def check_d2(self):
        pn = self.coeff.pn
        for d in self.degrees():
            if d + 2 in self.modules or (d + 1) in self.diff:
                prod = modlin.matmul(self.d_matrix(d + 1), self.d_matrix(d), pn)
                if prod.size and prod.any():
                    # allowed to be nonzero only inside the relation span
                    rel = self.rel_matrix(d + 2)
                    for j in range(prod.shape[1]):
                        if prod[:, j].any() and not modlin.in_span(
                                rel, prod[:, j], self.coeff.p, self.coeff.n):
                            return False, d
        return True, None

    def cohomology(self, i):
        """Subquotient report at degree i: summand exponents, reps, labels."""
        sq = modlin.Subquotient(self.dim(i), self.d_matrix(i),
                                self.rel_matrix(i + 1), self.d_matrix(i - 1),
                                self.rel_matrix(i), self.coeff.p, self.coeff.n)
        rep = sq.summary()
        rep["reps"] = sq.reps
        rep["labels"] = self.modules.get(i, [])
        rep["subq"] = sq
        return rep


def complex_from_ring(ring, bases, operators, labels, coeff=None, relations=None,
                      precision=None):
    """Cohomological Koszul-style complex from commuting operators on a ring window.

    bases: list of monomial keys (the degree-0 window); operators: list of
    functions elem -> elem; labels: exterior label names.  Degree i module:
    basis key x (i-subset of labels).
    """
    coeff = coeff or ring.coeff
    pn = coeff.pn
    prec = precision if precision is not None else coeff.n
    index = {k: i for i, k in enumerate(bases)}
    nops = len(operators)
    opmats = []
    for op in operators:
        m = np.zeros((len(bases), len(bases)), dtype=np.int64)
        for j, key in enumerate(bases):
            img = op(RingElem(ring, {key: 1}, prec, ring.full_window))
            for k, c in img.terms.items():
                if k not in index:
                    raise WindowNotStable(f"operator image leaves the window at {k}")
                m[index[k], j] = c % pn
        opmats.append(m)
    for a in range(nops):
        for b in range(a + 1, nops):
            lhs = modlin.matmul(opmats[a], opmats[b], pn)
            rhs = modlin.matmul(opmats[b], opmats[a], pn)
            if (lhs != rhs).any():
                raise NotCommuting(f"operators {labels[a]} and {labels[b]} do not commute")
    return koszul_from_matrices(coeff, bases, opmats, labels, relations=relations)


def koszul_from_matrices(coeff, bases, opmats, labels, relations=None):
    """Koszul complex of commuting operator matrices on a common window."""
    from itertools import combinations
    nops = len(opmats)
    dim0 = len(bases)
    modules = {}
    subsets = {}
    for i in range(nops + 1):
        subs = list(combinations(range(nops), i))
        subsets[i] = subs
        modules[i] = [(b, tuple(labels[s] for s in sub)) for sub in subs for b in bases]
    diff = {}
    rels = {}
    pn = coeff.pn
    for i in range(nops):
        rows = len(modules[i + 1])
        cols = len(modules[i])
        m = np.zeros((rows, cols), dtype=np.int64)
        for si, sub in enumerate(subsets[i]):
            for s in range(nops):
                if s in sub:
                    continue
                tgt = tuple(sorted(sub + (s,)))
                sign = (-1) ** sum(1 for t in sub if t < s)
                ti = subsets[i + 1].index(tgt)
                blk = opmats[s] * sign
                m[ti * dim0:(ti + 1) * dim0, si * dim0:(si + 1) * dim0] += blk
        diff[i] = np.mod(m, pn)
    if relations is not None:
        base_rel = modlin.as_array(relations, pn)
        for i in range(nops + 1):
            k = len(subsets[i])
            if base_rel.shape[1]:
                blocks = np.zeros((k * dim0, k * base_rel.shape[1]), dtype=np.int64)
                for t in range(k):
                    blocks[t * dim0:(t + 1) * dim0,
                           t * base_rel.shape[1]:(t + 1) * base_rel.shape[1]] = base_rel
                rels[i] = blocks
    return CochainComplex(coeff, modules, diff, relations=rels or None)


def koszul_complex(ring, bases, operators, labels, relations=None):
    """Spec surface: cohomological Koszul complex of commuting operators."""
    return complex_from_ring(ring, bases, operators, labels, relations=relations)


def associated_complex(cosimp, windows, coeff, tower_limits=None, precision=None,
                       normalized=False):
    """Cochain complex of a cosimplicial algebra on explicit window bases:
    d^n = sum_j (-1)^j face_j.  With normalized=True the complex is restricted
    to the intersection of the codegeneracy kernels (quasi-isomorphic to the
    unnormalized one)."""
    modules = {}
    bases = []
    for n, lvl in enumerate(cosimp.levels):
        ring = lvl.ring if hasattr(lvl, "ring") else lvl
        if windows is not None and windows[n] is not None:
            basis = list(windows[n])
        else:
            basis = ring.window_basis(tower_limit=(tower_limits or {}).get(n))
        bases.append(basis)
        modules[n] = basis
    diff = {}
    pn = coeff.pn

    def hom_matrix(f, src_basis, dst_basis):
        index = {k: i for i, k in enumerate(dst_basis)}
        m = np.zeros((len(dst_basis), len(src_basis)), dtype=np.int64)
        for col, key in enumerate(src_basis):
            img = f.on_key(key, precision)
            for k, c in img.terms.items():
                if k not in index:
                    raise WindowNotStable(f"map leaves the window at {k}")
                m[index[k], col] += c
        return np.mod(m, pn)

    for n in range(len(cosimp.levels) - 1):
        m = np.zeros((len(bases[n + 1]), len(bases[n])), dtype=np.int64)
        for j in range(n + 2):
            sign = 1 if j % 2 == 0 else -1
            m += sign * hom_matrix(cosimp.face(n, j), bases[n], bases[n + 1])
        diff[n] = np.mod(m, pn)
    cx = CochainComplex(coeff, modules, diff)
    ok, where = cx.check_d2()
    if not ok:
        raise WindowNotStable(f"d^2 != 0 at degree {where}")
    if not normalized:
        return cx
    # normalized subcomplex: intersection of the codegeneracy kernels
    p, n_prec = coeff.p, coeff.n
    kgens = {0: np.eye(len(bases[0]), dtype=np.int64)}
    for n in range(1, len(cosimp.levels)):
        mats = [hom_matrix(cosimp.degen(n, j), bases[n], bases[n - 1])
                for j in range(n)]
        stacked = np.concatenate(mats, axis=0) if mats else \
            np.zeros((0, len(bases[n])), dtype=np.int64)
        gens = [g for g, _ in modlin.kernel(stacked, p, n_prec) if g.any()]
        kgens[n] = (np.stack(gens, axis=1) if gens
                    else np.zeros((len(bases[n]), 0), dtype=np.int64))
    nmodules = {n: [f"n{n}.{i}" for i in range(kgens[n].shape[1])]
                for n in kgens}
    ndiff = {}
    for n in range(len(cosimp.levels) - 1):
        img = np.mod(diff[n] @ kgens[n], pn)
        if img.shape[1]:
            sols, _ = modlin.solve_many(kgens[n + 1], img, p, n_prec)
            if any(s is None for s in sols):
                raise WindowNotStable("normalized differential does not restrict")
            ndiff[n] = np.stack(sols, axis=1)
        else:
            ndiff[n] = np.zeros((kgens[n + 1].shape[1], 0), dtype=np.int64)
    return CochainComplex(coeff, nmodules, ndiff, label="normalized")


def mod_f_complex(cx, mult_mats):
    """The complex cx with relations f*X^i added (mult_mats: degree -> matrix)."""
    rels = {d: mult_mats[d] for d in mult_mats}
    merged = dict(cx.relations)
    for d, m in rels.items():
        if d in merged and merged[d].shape[1]:
            merged[d] = np.concatenate([merged[d], m], axis=1)
        else:
            merged[d] = m
    return CochainComplex(cx.coeff, cx.modules, cx.diff, relations=merged,
                          label=cx.label + "/f")


class BocksteinComplex:
    """(H^i(X/f), beta) with beta the connecting map of
    0 -> X/f --f--> X/f^2 -> X/f -> 0, computed on representatives."""

    def __init__(self, cx, mult_mats, degrees):
        self.base = cx
        self.coeff = cx.coeff
        self.mult = mult_mats
        self.degrees_list = list(degrees)
        self.h = {}
        self.beta = {}
        red = mod_f_complex(cx, mult_mats)
        self.reduced = red
        p, n = cx.coeff.p, cx.coeff.n
        for i in self.degrees_list:
            self.h[i] = red.cohomology(i)
        for i in self.degrees_list:
            if i + 1 not in self.h:
                continue
            reps = self.h[i]["reps"]
            cols = []
            for j in range(reps.shape[1]):
                x = reps[:, j]
                dx = np.mod(cx.d_matrix(i) @ x, cx.coeff.pn)
                sols, _ = modlin.solve_many(mult_mats[i + 1], dx.reshape(-1, 1), p, n)
                if sols[0] is None:
                    raise NotDivisible("boundary of a lift is not divisible by f")
                y = sols[0]
                cols.append(self.h[i + 1]["subq"].class_of(y))
            self.beta[i] = (np.stack(cols, axis=1) if cols
                            else np.zeros((len(self.h[i + 1]["exponents"]), 0),
                                          dtype=np.int64))

    def beta_squared_zero(self):
        pn = self.coeff.pn
        for i in self.degrees_list:
            if i + 1 in self.beta and i in self.beta:
                prod = np.mod(self.beta[i + 1] @ self.beta[i], pn)
                # entries must vanish modulo each target summand's exponent
                exps = self.h[i + 2]["exponents"] if i + 2 in self.h else []
                for r, e in enumerate(exps):
                    if prod.shape[0] > r and np.mod(prod[r], self.coeff.p ** e).any():
                        return False
        return True


def bockstein_complex(cx, mult_mats, degrees):
    return BocksteinComplex(cx, mult_mats, degrees)


class EtaComplex:
    """Chain-level decalage: (eta_f X)^i = {x in f^i X^i : dx in f^{i+1} X^{i+1}}.

    Generators are stored as ambient columns; the induced differential is
    expressed over the next level's generators.
    """

    def __init__(self, cx, mult_mat):
        self.base = cx
        p, n = cx.coeff.p, cx.coeff.n
        pn = cx.coeff.pn
        self.gens = {}
        self.diff = {}
        degs = cx.degrees()
        powers = {}
        dim_by_deg = {d: cx.dim(d) for d in degs}
        for d in degs:
            dim = dim_by_deg[d]
            mf = modlin.as_array(mult_mat, pn) if not isinstance(mult_mat, dict) \
                else modlin.as_array(mult_mat[d], pn)
            fi = np.eye(dim, dtype=np.int64)
            for _ in range(max(d, 0)):
                fi = np.mod(mf @ fi, pn)
            powers[d] = fi
        for d in degs:
            dim = dim_by_deg[d]
            if d + 1 in dim_by_deg:
                dmat = cx.d_matrix(d)
                fnext = powers[d + 1]
                top = np.mod(dmat @ powers[d], pn)
                stacked = np.concatenate([top, np.mod(-fnext, pn)], axis=1)
                kg = modlin.kernel(stacked, p, n)
                cols = []
                for g, v in kg:
                    w = g[:dim]
                    gen = np.mod(powers[d] @ w, pn)
                    if gen.any():
                        cols.append(gen)
                self.gens[d] = (np.stack(cols, axis=1) if cols
                                else np.zeros((dim, 0), dtype=np.int64))
            else:
                self.gens[d] = powers[d]
        for d in degs:
            if d + 1 not in self.gens:
                continue
            img = np.mod(cx.d_matrix(d) @ self.gens[d], pn)
            if img.shape[1]:
                sols, _ = modlin.solve_many(self.gens[d + 1], img, p, n)
                if any(s is None for s in sols):
                    raise NotDivisible("eta differential not expressible over generators")
                self.diff[d] = np.stack(sols, axis=1)
            else:
                self.diff[d] = np.zeros((self.gens[d + 1].shape[1], 0), dtype=np.int64)

    def contains(self, d, vec):
        return modlin.in_span(self.gens[d], vec, self.base.coeff.p, self.base.coeff.n)

    def factor(self, d, mat):
        """Express the columns of mat over the degree-d generators, or None."""
        p, n = self.base.coeff.p, self.base.coeff.n
        sols, _ = modlin.solve_many(self.gens[d], modlin.as_array(mat, self.base.coeff.pn),
                                    p, n)
        if any(s is None for s in sols):
            return None
        return np.stack(sols, axis=1) if sols else np.zeros(
            (self.gens[d].shape[1], 0), dtype=np.int64)


def eta_decalage(cx, mult_mat):
    return EtaComplex(cx, mult_mat)
