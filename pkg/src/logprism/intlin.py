"""Exact integer lattice linear algebra: HNF, Smith form, Diophantine solving.

Everything here is pure-Python arbitrary-precision arithmetic; matrices are
lists of lists of ints.  Sizes stay tiny (lattice ranks <= ~12), so no effort
is spent on asymptotics.
"""


def xgcd(a, b):
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def mat_copy(m):
    return [row[:] for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    oi[j] += c * bk[j]
    return out


def mat_vec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def hnf_rows(mat):
    """Row-style Hermite normal form of the row span of `mat`.

    Returns a list of nonzero rows forming a basis (upper-triangular up to
    column permutation) of the lattice generated by the input rows.
    """
    if not mat:
        return []
    m = [list(row) for row in mat]
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, rows):
            while m[i][c]:
                x, y, g = xgcd(m[r][c], m[i][c])
                a, b = m[r][c] // g, m[i][c] // g
                new_r = [x * m[r][j] + y * m[i][j] for j in range(cols)]
                new_i = [-b * m[r][j] + a * m[i][j] for j in range(cols)]
                m[r], m[i] = new_r, new_i
        if m[r][c] < 0:
            m[r] = [-v for v in m[r]]
        # reduce rows above
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [m[i][j] - q * m[r][j] for j in range(cols)]
        r += 1
        if r == rows:
            break
    return [row for row in m[:r] if any(row)]


def snf_int(mat):
    """Integer Smith normal form.

    Returns (d, U, V) with U * mat * V = diag(d), U and V unimodular.
    `d` has nonnegative entries with d[i] | d[i+1].
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = mat_copy(mat)
    u = identity(rows)
    v = identity(cols)

    def row_op(i1, i2, x, y, s, t):
        # (row i1, row i2) <- (x*r1 + y*r2, s*r1 + t*r2)
        for m in (a, u):
            r1, r2 = m[i1], m[i2]
            for j in range(len(r1)):
                r1[j], r2[j] = x * r1[j] + y * r2[j], s * r1[j] + t * r2[j]

    def col_op(j1, j2, x, y, s, t):
        for m in (a, v):
            for row in m:
                row[j1], row[j2] = x * row[j1] + y * row[j2], s * row[j1] + t * row[j2]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    k = 0
    while k < min(rows, cols):
        # find a nonzero pivot of minimal absolute value
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != k:
            row_op(k, bi, 0, 1, 1, 0)
        if bj != k:
            col_op(k, bj, 0, 1, 1, 0)
        dirty = True
        while dirty:
            dirty = False
            for i in range(k + 1, rows):
                if a[i][k]:
                    if a[i][k] % a[k][k] == 0:
                        row_op(k, i, 1, 0, -(a[i][k] // a[k][k]), 1)
                    else:
                        x, y, g = xgcd(a[k][k], a[i][k])
                        row_op(k, i, x, y, -(a[i][k] // g), a[k][k] // g)
                        dirty = True
            for j in range(k + 1, cols):
                if a[k][j]:
                    if a[k][j] % a[k][k] == 0:
                        col_op(k, j, 1, 0, -(a[k][j] // a[k][k]), 1)
                    else:
                        x, y, g = xgcd(a[k][k], a[k][j])
                        col_op(k, j, x, y, -(a[k][j] // g), a[k][k] // g)
                        dirty = True
            if not dirty:
                # plain eliminations above cannot reintroduce entries, but an
                # xgcd pass can; rescan to be safe
                if any(a[i][k] for i in range(k + 1, rows)) or \
                   any(a[k][j] for j in range(k + 1, cols)):
                    dirty = True
        if a[k][k] < 0:
            negate_row(k)
        k += 1
    # enforce divisibility d[i] | d[i+1] (zero diagonal entries already trail)
    k = min(rows, cols)
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di and dj and dj % di:
                # fold diag(di, dj) into diag(gcd, lcm)
                col_op(i, i + 1, 1, 1, 0, 1)          # col i += col i+1
                x, y, g = xgcd(a[i][i], a[i + 1][i])
                row_op(i, i + 1, x, y, -(a[i + 1][i] // g), a[i][i] // g)
                q = a[i][i + 1] // g
                col_op(i + 1, i, 1, -q, 0, 1)          # col i+1 -= q * col i
                changed = True
    d = [abs(a[i][i]) for i in range(min(rows, cols))]
    return d, u, v


def solve_int(mat, b):
    """One integer solution x of mat @ x = b, or None."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return [0] * cols
    d, u, v = snf_int(mat)
    y = mat_vec(u, b)
    x0 = [0] * cols
    for i in range(min(rows, cols)):
        if d[i]:
            if y[i] % d[i]:
                return None
            x0[i] = y[i] // d[i]
        elif y[i]:
            return None
    for i in range(min(rows, cols), rows):
        if y[i]:
            return None
    return mat_vec(v, x0)


def kernel_int(mat):
    """Basis of the integer kernel {x : mat @ x = 0}."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return identity(cols)
    d, u, v = snf_int(mat)
    basis = []
    for j in range(cols):
        if j >= min(rows, cols) or d[j] == 0:
            basis.append([v[i][j] for i in range(cols)])
    return basis


def in_lattice(basis_rows, vec):
    """Integer coordinates of `vec` over `basis_rows` (list of row vectors),
    or None if vec is not in the generated lattice."""
    if not basis_rows:
        return [] if not any(vec) else None
    cols = [[basis_rows[i][j] for i in range(len(basis_rows))] for j in range(len(vec))]
    return solve_int(cols, list(vec))


def cokernel_divisors(mat, target_rank):
    """Elementary divisors of Z^target_rank / column-span(mat).

    Returns (free_rank, list of divisors > 1).
    """
    if not mat or not mat[0]:
        return target_rank, []
    d, _, _ = snf_int(mat)
    nonzero = [x for x in d if x]
    free = target_rank - len(nonzero)
    torsion = [x for x in nonzero if x != 1]
    return free, torsion
