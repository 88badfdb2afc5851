"""Vectorized linear algebra over Z/p^n (numpy int64 matrices).

Z/p^n is a chain ring, so Smith normal form exists: pivot by minimal
p-valuation, normalize the unit part, clear row and column.  Transform
tracking is optional because row transforms of tall matrices are the memory
hog; solving is done with augmented right-hand sides instead.
"""

import numpy as np

from .errors import NotDivisible


def _val_table(pn, p, n):
    # valuation of every residue class would be huge for big pn; compute per element
    pass


def val_of(x, p, n):
    x = int(x)
    if x == 0:
        return n
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def as_array(mat, pn):
    a = np.array(mat, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(len(mat), -1)
    if a.size == 0:
        a = a.reshape(a.shape[0], a.shape[1] if a.ndim > 1 else 0)
    return np.mod(a, pn)


def snf(mat, p, n, want_rows=False, want_cols=False, aug=None):
    """Diagonalize over Z/p^n.

    Returns dict with 'diag' (list of residues p^k or 0), optional 'rows' /
    'cols' transforms (numpy), and 'aug' = row_ops @ aug for the augmented
    block.  row_ops @ mat @ col_ops = diag holds exactly mod p^n.
    """
    pn = p ** n
    a = as_array(mat, pn).copy()
    rows, cols = a.shape
    r = np.eye(rows, dtype=np.int64) if want_rows else None
    c = np.eye(cols, dtype=np.int64) if want_cols else None
    b = as_array(aug, pn).copy() if aug is not None else None

    # valuation matrix maintained lazily: recompute candidate mins per step
    def vals(sub):
        out = np.full(sub.shape, n, dtype=np.int64)
        nz = sub != 0
        x = sub.copy()
        v = np.zeros(sub.shape, dtype=np.int64)
        while True:
            div = nz & (np.mod(x, p) == 0)
            if not div.any():
                break
            x[div] //= p
            v[div] += 1
            nz = div
        out[sub != 0] = v[sub != 0]
        return out

    k = 0
    while k < min(rows, cols):
        sub = a[k:, k:]
        if not sub.any():
            break
        vv = vals(sub)
        idx = np.unravel_index(np.argmin(vv), vv.shape)
        bv = int(vv[idx])
        if bv >= n:
            break
        bi, bj = idx[0] + k, idx[1] + k
        if bi != k:
            a[[k, bi]] = a[[bi, k]]
            if r is not None:
                r[[k, bi]] = r[[bi, k]]
            if b is not None:
                b[[k, bi]] = b[[bi, k]]
        if bj != k:
            a[:, [k, bj]] = a[:, [bj, k]]
            if c is not None:
                c[:, [k, bj]] = c[:, [bj, k]]
        piv = int(a[k, k])
        u = piv // (p ** bv)
        uinv = pow(u, -1, pn)
        a[k] = np.mod(a[k] * uinv, pn)
        if r is not None:
            r[k] = np.mod(r[k] * uinv, pn)
        if b is not None:
            b[k] = np.mod(b[k] * uinv, pn)
        pk = p ** bv
        colk = a[:, k]
        mask = (colk != 0)
        mask[k] = False
        if mask.any():
            f = (colk[mask] // pk).reshape(-1, 1)
            a[mask] = np.mod(a[mask] - f * a[k], pn)
            if r is not None:
                r[mask] = np.mod(r[mask] - f * r[k], pn)
            if b is not None:
                b[mask] = np.mod(b[mask] - f * b[k], pn)
        rowk = a[k]
        maskc = (rowk != 0)
        maskc[k] = False
        if maskc.any():
            f = rowk[maskc] // pk
            a[:, maskc] = np.mod(a[:, maskc] - np.outer(a[:, k], f), pn)
            if c is not None:
                c[:, maskc] = np.mod(c[:, maskc] - np.outer(c[:, k], f), pn)
        k += 1
    diag = [int(a[i, i]) for i in range(min(rows, cols))]
    return {"diag": diag, "rows": r, "cols": c, "aug": b, "shape": (rows, cols)}


def kernel(mat, p, n):
    """Generators of the kernel over Z/p^n: list of (numpy vector, order_val)
    where order_val = k means p^k * gen = 0 is the generator's annihilator
    exponent (k = n for free directions)."""
    pn = p ** n
    a = as_array(mat, pn)
    rows, cols = a.shape
    if rows == 0:
        return [(np.eye(cols, dtype=np.int64)[:, j], n) for j in range(cols)]
    res = snf(a, p, n, want_cols=True)
    diag, c = res["diag"], res["cols"]
    gens = []
    for j in range(cols):
        if j < len(diag) and diag[j]:
            v = val_of(diag[j], p, n)
            if v == 0:
                continue
            gens.append((np.mod(c[:, j] * (p ** (n - v)), pn), v))
        else:
            gens.append((np.mod(c[:, j], pn), n))
    return gens


def solve_many(mat, rhs, p, n):
    """Solve mat @ X = rhs columnwise over Z/p^n.

    Returns (X, lost_vals) where lost_vals[j] is the max p-division used for
    column j; a column with no solution gets None in X's column list.
    """
    pn = p ** n
    a = as_array(mat, pn)
    rows, cols = a.shape
    res = snf(a, p, n, want_cols=True, aug=rhs)
    diag, c, b = res["diag"], res["cols"], res["aug"]
    out = []
    losses = []
    nrhs = b.shape[1] if b is not None else 0
    for j in range(nrhs):
        y = b[:, j]
        x0 = np.zeros(cols, dtype=np.int64)
        ok = True
        lost = 0
        for i in range(rows):
            yi = int(y[i]) % pn
            if i < min(rows, cols) and i < len(diag) and diag[i]:
                v = val_of(diag[i], p, n)
                if yi % (p ** v):
                    ok = False
                    break
                x0[i] = yi // (p ** v)
                if yi and v:
                    lost = max(lost, v)
            elif yi:
                ok = False
                break
        if not ok:
            out.append(None)
            losses.append(0)
            continue
        out.append(np.mod(c @ x0, pn))
        losses.append(lost)
    return out, losses


def matmul(a, b, pn):
    return np.mod(as_array(a, pn) @ as_array(b, pn), pn)


def rank_modp(mat, p):
    """Rank over F_p by plain elimination (no transforms, no valuations)."""
    a = as_array(mat, p).copy()
    rows, cols = a.shape
    if rows < cols:
        a = a.T.copy()
        rows, cols = cols, rows
    rank = 0
    for j in range(cols):
        piv = None
        for i in range(rank, rows):
            if a[i, j]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, j]), -1, p)
        a[rank] = np.mod(a[rank] * inv, p)
        col = a[rank + 1:, j]
        mask = col != 0
        if mask.any():
            rows_idx = np.nonzero(mask)[0] + rank + 1
            a[rows_idx] = np.mod(a[rows_idx] - np.outer(col[mask], a[rank]), p)
        rank += 1
        if rank == rows:
            break
    return rank


def in_span(mat, vec, p, n):
    sols, _ = solve_many(mat, np.array(vec, dtype=np.int64).reshape(-1, 1), p, n)
    return sols[0] is not None


class Subquotient:
    """H = {x : D x in span(S)} / (span(B) + span(R)) over Z/p^n.

    D: matrix out of the ambient module; S: relations in the target;
    B: boundary generators; R: relations in the ambient module.
    Computes summand exponents (Z/p^e per generator, e = n meaning a free
    Z/p^n summand) and representative vectors.
    """

    def __init__(self, dim, D, S, B, R, p, n):
        self.p, self.n = p, n
        pn = p ** n
        D = as_array(D, pn) if D is not None else np.zeros((0, dim), dtype=np.int64)
        S = as_array(S, pn) if S is not None else np.zeros((D.shape[0], 0), dtype=np.int64)
        B = as_array(B, pn) if B is not None else np.zeros((dim, 0), dtype=np.int64)
        R = as_array(R, pn) if R is not None else np.zeros((dim, 0), dtype=np.int64)
        # generators of W = {x : D x in span(S)}: project the kernel of [D | S]
        if S.shape[1]:
            stacked = np.concatenate([D, S], axis=1)
            kgens = [g[:dim] for g, _ in kernel(stacked, p, n) if g[:dim].any()]
        else:
            kgens = [g for g, _ in kernel(D, p, n) if g.any()]
        K = (np.stack(kgens, axis=1) if kgens
             else np.zeros((dim, 0), dtype=np.int64))
        self.kmat = K
        g = K.shape[1]
        if g == 0:
            self.exponents = []
            self.reps = np.zeros((dim, 0), dtype=np.int64)
            self.relexpr = np.zeros((0, 0), dtype=np.int64)
            self._rt = np.zeros((0, 0), dtype=np.int64)
            self._kept = []
            return
        # relations among the projected generators: {z : K z in span(B) + span(R)},
        # computed as the z-block of the kernel of [K | B | R].  This includes
        # ker(K) itself (take the B/R coefficients to be 0), so no separate
        # annihilator bookkeeping is needed.
        rel_src = np.concatenate([B, R], axis=1)
        stacked2 = np.concatenate([K, rel_src], axis=1) if rel_src.shape[1] else K
        zgens = [gg[:g] for gg, _ in kernel(stacked2, p, n) if gg[:g].any()]
        relmat = (np.stack(zgens, axis=1) if zgens
                  else np.zeros((g, 0), dtype=np.int64))
        self.relexpr = relmat
        res = snf(relmat, p, n, want_rows=True)
        diag, rt = res["diag"], res["rows"]
        exps = []
        reps = []
        kept = []
        for i in range(g):
            d = diag[i] if i < len(diag) else 0
            e = n if d == 0 else val_of(d, p, n)
            if e > 0:
                exps.append(e)
                kept.append(i)
                sol, _ = solve_many(rt, np.eye(g, dtype=np.int64)[:, i:i + 1], p, n)
                if sol[0] is None:
                    raise NotDivisible("row transform not invertible?")
                reps.append(np.mod(K @ sol[0], pn))
        self.exponents = exps
        self._rt = rt
        self._kept = kept
        self.reps = (np.stack(reps, axis=1) if reps
                     else np.zeros((dim, 0), dtype=np.int64))

    def class_of(self, vec):
        """Coordinates of a kernel element's class over the chosen summand
        generators, entry i reduced mod p^exponents[i]."""
        pn = self.p ** self.n
        v = np.mod(np.array(vec, dtype=np.int64), pn)
        if not self._kept:
            return np.zeros(0, dtype=np.int64)
        sols, _ = solve_many(self.kmat, v.reshape(-1, 1), self.p, self.n)
        if sols[0] is None:
            raise NotDivisible("vector is not in the kernel span")
        y = np.mod(self._rt @ sols[0], pn)
        out = np.zeros(len(self._kept), dtype=np.int64)
        for t, (i, e) in enumerate(zip(self._kept, self.exponents)):
            out[t] = int(y[i]) % (self.p ** e)
        return out

    def class_is_zero(self, vec):
        return not self.class_of(vec).any()

    def summary(self):
        free = sum(1 for e in self.exponents if e == self.n)
        torsion = sorted(self.p ** e for e in self.exponents if e < self.n)
        return {"free_rank": free, "torsion": torsion,
                "exponents": sorted(self.exponents, reverse=True)}
