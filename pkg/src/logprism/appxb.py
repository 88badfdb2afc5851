"""The explicit cosimplicial algebras attached to an injective integral
monoid map M -> Q: levels k (x) Z[Q + G^n] with G the group quotient, the
projection onto the relative-Frobenius part, the homotopy to the identity,
and the relative-Frobenius quasi-isomorphism check.

Faces and degeneracies are monomial (lattice) maps, so the structural
identities are verified exactly as integer matrix identities; the projection
and homotopy are monomial-or-zero maps driven by membership tests.  Windowed
cohomology runs in nerve coordinates (a_0, ..., a_n) with sum fixed, where
every face inserts a zero and the boxes are exactly stable.
"""

from itertools import product

import numpy as np

from . import intlin, modlin, monoids
from .coeffring import CoeffRing
from .errors import WindowNotStable
from .homalg import CochainComplex
from .monoids import (MonoidMap, MonoidPresentation, frobenius_pushout,
                      saturate_units)


class AppxBData:
    def __init__(self, coeff, h, p, n_max, alpha_zero=False):
        """coeff: Z/p^n coefficients; h: M -> Q (injective, integral);
        alpha_zero: the prelog map M -> k kills the nonunit part (the only
        coefficient shape the catalog needs besides trivial M)."""
        self.coeff = coeff
        self.h = h
        self.p = p
        self.n_max = n_max
        self.alpha_zero = alpha_zero
        self.Q = h.dst
        self.kq = self.Q.ambient_rank
        # G = Q^gp / M^gp as a free lattice Z^r with projection matrix
        rel = [list(h.apply(b)) for b in h.src.groupify()]
        if rel:
            d, u, v = intlin.snf_int([[rel[j][i] for j in range(len(rel))]
                                      for i in range(self.kq)])
            tor = [x for x in d if x not in (0, 1)]
            if tor:
                raise WindowNotStable(f"G has torsion {tor}; quasi-isomorphism "
                                      "check requires a free quotient")
            free_idx = [i for i in range(self.kq) if i >= len(d) or d[i] == 0]
            self.proj = [u[i] for i in free_idx]
        else:
            self.proj = [[1 if j == i else 0 for j in range(self.kq)]
                         for i in range(self.kq)]
        self.r = len(self.proj)
        q1, relfrob = frobenius_pushout(h, p)
        self.q1 = q1
        self.relfrob = relfrob
        img_gens = [relfrob.apply(g) for g in q1.generators]
        img_units = [relfrob.apply(u) for u in q1.unit_lattice]
        self.q1_image = saturate_units(MonoidPresentation(
            self.kq, img_gens, unit_lattice=img_units, name="Q^(1) in Q"))
        gbar = [self.project(g) for g in img_gens]
        gbar_units = [self.project(u) for u in img_units]
        self.g1_image = saturate_units(MonoidPresentation(
            self.r, gbar, unit_lattice=gbar_units, name="Im(Q^(1) -> G)"))
        self.kill = [tuple(h.apply(g)) for g in h.src.generators] if alpha_zero else []

    # -- coordinates -----------------------------------------------------------

    def project(self, q):
        return tuple(sum(self.proj[i][j] * q[j] for j in range(self.kq))
                     for i in range(self.r))

    def level_rank(self, n):
        return self.kq + self.r * n

    def in_q1(self, q, bound=24):
        v = self.q1_image.contains(q, bound)
        if v is None:
            raise WindowNotStable(f"Q^(1) membership undecided at {q}")
        return v

    def in_g1(self, g, bound=24):
        v = self.g1_image.contains(g, bound)
        if v is None:
            raise WindowNotStable(f"Im(Q^(1) -> G) membership undecided at {g}")
        return v

    def killed(self, q):
        if not self.kill:
            return False
        for kv in self.kill:
            diff = tuple(a - b for a, b in zip(q, kv))
            if self.Q.contains(diff, 24):
                return True
        return False

    # -- structure maps as integer matrices -------------------------------------

    def face_matrix(self, n, j):
        """delta^n_j : Z^{kq + rn} -> Z^{kq + r(n+1)}."""
        src = self.level_rank(n)
        dst = self.level_rank(n + 1)
        m = [[0] * src for _ in range(dst)]
        for i in range(self.kq):
            m[i][i] = 1
        if j == 0:
            # new first slot = proj(q) - sum(g_i); old slots shift right
            for i in range(self.r):
                for jj in range(self.kq):
                    m[self.kq + i][jj] = self.proj[i][jj]
                for s in range(n):
                    m[self.kq + i][self.kq + s * self.r + i] = -1
            for s in range(n):
                for i in range(self.r):
                    m[self.kq + (s + 1) * self.r + i][self.kq + s * self.r + i] = 1
        else:
            # insert zero at slot j (1-indexed among n+1 slots)
            for s in range(n):
                tgt = s if s < j - 1 else s + 1
                for i in range(self.r):
                    m[self.kq + tgt * self.r + i][self.kq + s * self.r + i] = 1
        return m

    def degen_matrix(self, n, j):
        """sigma^n_j : Z^{kq + rn} -> Z^{kq + r(n-1)}; j = 0 drops the first
        slot, j >= 1 merges slots j, j+1."""
        src = self.level_rank(n)
        dst = self.level_rank(n - 1)
        m = [[0] * src for _ in range(dst)]
        for i in range(self.kq):
            m[i][i] = 1
        if j == 0:
            for s in range(1, n):
                for i in range(self.r):
                    m[self.kq + (s - 1) * self.r + i][self.kq + s * self.r + i] = 1
        else:
            for s in range(n):
                tgt = s if s < j else (j - 1 if s == j else s - 1)
                for i in range(self.r):
                    m[self.kq + tgt * self.r + i][self.kq + s * self.r + i] = 1
        return m


def build_appxb(coeff, h, p, n_max, alpha_zero=False):
    data = AppxBData(coeff, h, p, n_max, alpha_zero=alpha_zero)
    rep = check_appxb_identities(data)
    if not rep["passed"]:
        raise WindowNotStable(f"cosimplicial identities failed: {rep['failures'][:3]}")
    return data


def check_appxb_identities(data, n_max=None):
    """Verify the coface/codegeneracy identities as exact integer matrix
    identities (monomial maps need no window)."""
    n_max = data.n_max if n_max is None else n_max
    failures = []
    checks = 0

    def mm(a, b):
        return intlin.mat_mul(a, b)

    for n in range(n_max - 1):
        for i in range(n + 2):
            for j in range(i + 1, n + 3):
                checks += 1
                lhs = mm(data.face_matrix(n + 1, j), data.face_matrix(n, i))
                rhs = mm(data.face_matrix(n + 1, i), data.face_matrix(n, j - 1))
                if lhs != rhs:
                    failures.append(("dd", n, i, j))
    for n in range(n_max):
        for j in range(n + 1):
            for i in range(n + 2):
                checks += 1
                lhs = mm(data.degen_matrix(n + 1, j), data.face_matrix(n, i))
                if i < j:
                    rhs = mm(data.face_matrix(n - 1, i), data.degen_matrix(n, j - 1)) \
                        if n >= 1 else None
                elif i in (j, j + 1):
                    rhs = intlin.identity(data.level_rank(n))
                else:
                    rhs = mm(data.face_matrix(n - 1, i - 1), data.degen_matrix(n, j)) \
                        if n >= 1 else None
                if rhs is not None and lhs != rhs:
                    failures.append(("sd", n, i, j))
    for n in range(2, n_max + 1):
        for i in range(n - 1):
            for j in range(i, n - 1):
                checks += 1
                lhs = mm(data.degen_matrix(n - 1, j), data.degen_matrix(n, i))
                rhs = mm(data.degen_matrix(n - 1, i), data.degen_matrix(n, j + 1))
                if lhs != rhs:
                    failures.append(("ss", n, i, j))
    return {"passed": not failures, "failures": failures, "checks": checks}


# -- projection and homotopy (monomial-or-zero maps) ---------------------------------


def projection_pr(data, n):
    """pr^n : A^n -> B^n: keep the monomial when its Q-part is in Q^(1)."""

    def pr(point):
        q = tuple(point[:data.kq])
        if data.in_q1(q):
            return tuple(point)
        return None
    return pr


def homotopy_h(data, n):
    """Components h^n(alpha^n_j), j = 0..n+1, with alpha_j(i) = 0 iff i < j.

    j = 0 is pr^n, j = n+1 the identity, and for 0 < j <= n the monomial
    survives iff g_j ... g_n lies in the image of Q^(1) in G.
    """
    pr = projection_pr(data, n)

    def comp(j):
        def hmap(point):
            if j == 0:
                return pr(point)
            if j == n + 1:
                return tuple(point)
            tail = [0] * data.r
            for s in range(j - 1, n):
                for i in range(data.r):
                    tail[i] += point[data.kq + s * data.r + i]
            if data.in_g1(tuple(tail)):
                return tuple(point)
            return None
        return hmap
    return [comp(j) for j in range(n + 2)]


def _apply_matrix(m, point):
    return tuple(sum(m[i][j] * point[j] for j in range(len(point)))
                 for i in range(len(m)))


def _test_points(data, n, span=2):
    """Small but representative set of level-n monomials."""
    qs = data.Q.points_within([((1,) * data.kq, span + 1)],
                              boxes=(span + 1,) * data.kq)
    gs = list(product(range(-span, span + 1), repeat=data.r))
    pts = []
    for q in qs[: 6]:
        for combo in product(gs[:: max(1, len(gs) // 4)], repeat=n):
            point = tuple(q) + tuple(x for g in combo for x in g)
            pts.append(point)
    return pts[:200]


def verify_homotopy(data, n_max=None, span=2):
    """The cosimplicial homotopy identities relating h, faces, degeneracies,
    pr and id, checked on monomials; also the endpoint conditions."""
    n_max = data.n_max if n_max is None else n_max
    failures = []
    checks = 0

    def maps_equal(f, g, pts):
        for pt in pts:
            if f(pt) != g(pt):
                return pt
        return None

    for n in range(n_max):
        pts = _test_points(data, n, span)
        h_n = homotopy_h(data, n)
        h_n1 = homotopy_h(data, n + 1)
        for i in range(n + 2):
            fm = data.face_matrix(n, i)
            for j in range(n + 3):
                # alpha^{n+1}_j o d^i = alpha^n_{j'}
                jp = j if j <= i else j - 1
                checks += 1
                for pt in pts:
                    lhs = h_n1[j](_apply_matrix(fm, pt))
                    mid = h_n[jp](pt)
                    rhs = None if mid is None else _apply_matrix(fm, mid)
                    if lhs != rhs:
                        failures.append(("h-face", n, i, j, pt))
                        break
    for n in range(1, n_max + 1):
        pts = _test_points(data, n, span)
        h_n = homotopy_h(data, n)
        h_n1 = homotopy_h(data, n - 1)
        for i in range(n):
            sm = data.degen_matrix(n, i)
            for j in range(n + 1):
                jp = j if j <= i else j + 1
                checks += 1
                for pt in pts:
                    lhs = h_n1[j](_apply_matrix(sm, pt))
                    mid = h_n[jp](pt)
                    rhs = None if mid is None else _apply_matrix(sm, mid)
                    if lhs != rhs:
                        failures.append(("h-degen", n, i, j, pt))
                        break
    # endpoints and section property
    for n in range(n_max + 1):
        pts = _test_points(data, n, span)
        h_n = homotopy_h(data, n)
        pr = projection_pr(data, n)
        for pt in pts:
            checks += 1
            if h_n[0](pt) != pr(pt):
                failures.append(("endpoint-pr", n, pt))
                break
            if h_n[n + 1](pt) != tuple(pt):
                failures.append(("endpoint-id", n, pt))
                break
            # pr o incl = id on B^n
            if data.in_q1(tuple(pt[:data.kq])) and pr(pt) != tuple(pt):
                failures.append(("section", n, pt))
                break
    return {"passed": not failures, "failures": failures, "checks": checks}


def pr_linearity_check(data, n, span=2):
    """B^n-linearity of pr^n on monomial products (q', g') * (q, g) with
    q' in Q^(1); linear combinations follow by additivity of the definition."""
    pts = _test_points(data, n, span)
    pr = projection_pr(data, n)
    failures = []
    for pt in pts[:40]:
        for bq in data.q1_image.points_within([((1,) * data.kq, span + 2)],
                                              boxes=(span + 2,) * data.kq)[:6]:
            bpt = tuple(bq) + tuple(pt[data.kq:])
            prod = tuple(a + b for a, b in zip(pt, bpt))
            lhs = pr(prod)
            rhs = pr(pt)
            if rhs is not None:
                rhs = tuple(a + b for a, b in zip(rhs, bpt))
            if lhs != rhs:
                failures.append((pt, bpt))
    return {"passed": not failures, "failures": failures[:3]}


# -- nerve-coordinate cohomology ------------------------------------------------------


def _nerve_slice_complex(data, qbar, box, n_levels, sublattice=1):
    """Complex of the q-slice in nerve coordinates: level n has basis
    {(a_0..a_n) in (sublattice Z)^{r(n+1)}: sum a_i = qbar, |a_i| <= box};
    faces insert 0."""
    r = data.r
    levels = []
    for n in range(n_levels + 1):
        pts = []
        rng = [x for x in range(-box, box + 1) if all(c % sublattice == 0 for c in (x,))]
        for combo in product(rng, repeat=r * n):
            rest = list(combo)
            a0 = tuple(qbar[i] - sum(rest[s * r + i] for s in range(n))
                       for i in range(r))
            if all(abs(c) <= box and c % sublattice == 0 for c in a0):
                pts.append(tuple(a0) + tuple(rest))
        levels.append(sorted(pts))
    modules = {n: levels[n] for n in range(n_levels + 1)}
    diff = {}
    pn = data.coeff.pn
    for n in range(n_levels):
        index = {pt: i for i, pt in enumerate(levels[n + 1])}
        m = np.zeros((len(levels[n + 1]), len(levels[n])), dtype=np.int64)
        for col, pt in enumerate(levels[n]):
            # face j inserts a zero block at slot j (0-indexed among n+2 slots)
            for j in range(n + 2):
                sign = 1 if j % 2 == 0 else -1
                img = pt[:j * r] + (0,) * r + pt[j * r:]
                if img in index:
                    m[index[img], col] += sign
                else:
                    raise WindowNotStable("nerve window not stable")
        diff[n] = np.mod(m, pn)
    return CochainComplex(data.coeff, modules, diff)


def relfrob_qis(data, deg_cap, box, degree_max):
    """H^i tables of the associated complexes of A^{(1)} and A for
    i <= degree_max, sliced over the Q-window, with the induced map.

    Returns a report with per-degree summand tables for both sides and
    whether they agree."""
    cons = [((1,) * data.kq, deg_cap)]
    qpts = data.Q.points_within(cons, boxes=(deg_cap,) * data.kq)
    tables = {i: {"A": [], "A1": []} for i in range(degree_max + 1)}
    per_slice = []
    for q in qpts:
        if data.killed(q):
            continue
        qbar = data.project(q)
        cxA = _nerve_slice_complex(data, qbar, box, degree_max + 1, sublattice=1)
        in1 = data.in_q1(tuple(q))
        cx1 = _nerve_slice_complex(data, qbar, box, degree_max + 1,
                                   sublattice=data.p) if in1 else None
        row = {"q": tuple(q), "in_q1": in1}
        for i in range(degree_max + 1):
            for tag, cx in (("A", cxA), ("A1", cx1)):
                if cx is None:
                    continue
                if data.coeff.n == 1:
                    # F_p coefficients: dimensions from plain ranks
                    dim = cx.dim(i)
                    r_i = modlin.rank_modp(cx.d_matrix(i), data.p) \
                        if cx.dim(i + 1) else 0
                    r_prev = modlin.rank_modp(cx.d_matrix(i - 1), data.p) \
                        if cx.dim(i - 1) else 0
                    exps = [1] * (dim - r_i - r_prev)
                else:
                    exps = cx.cohomology(i)["exponents"]
                row[f"H{i}_{tag}"] = exps
                tables[i][tag].extend(exps)
        per_slice.append(row)
    report = {"passed": True, "tables": {}, "slices": per_slice,
              "window": {"deg_cap": deg_cap, "box": box}}
    for i in range(degree_max + 1):
        a = sorted(tables[i]["A"])
        a1 = sorted(tables[i]["A1"])
        report["tables"][i] = {"A": a, "A1": a1, "equal": a == a1}
        report["passed"] = report["passed"] and a == a1
    return report
