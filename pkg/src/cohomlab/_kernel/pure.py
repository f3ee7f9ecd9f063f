"""Pure-Python integer matrix kernels.

The equivalent of cohomlab._kernel._speedups, implemented entirely with
Python lists.  Slower than the compiled version, but always available and
useful for comparison (see benchmarks/bench_kernels.py).

All functions take and return matrices as lists of row lists of Python
ints.  Inputs are never mutated.  The two backends must stay

    * algorithmically identical (same pivot choices), so that every
      canonical form produced by the package is byte-for-byte identical
      no matter which backend is active.
"""

BACKEND = "pure"


def xgcd(a, b):
    """Return (g, x, y) with g = a*x + b*y and g = gcd(a, b) >= 0."""
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
    return g, x, y


def _copy(mat):
    return [row[:] for row in mat]


def _identity(n):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    return rows


def _swap_cols(mat, j0, j1):
    for row in mat:
        row[j0], row[j1] = row[j1], row[j0]


def _addmul_col(mat, jdst, jsrc, q):
    # col[jdst] += q * col[jsrc]
    if q == 0:
        return
    for row in mat:
        s = row[jsrc]
        if s:
            row[jdst] += q * s


def _negate_col(mat, j):
    for row in mat:
        row[j] = -row[j]


def hnf_transform(mat):
    """Column-style Hermite normal form with transform.

    Returns (H, T, rank) where H = mat @ T, T is unimodular, and H is in
    column echelon form: pivot rows strictly increase with the column
    index, pivots are positive, entries in a pivot row to the left of the
    pivot lie in [0, pivot), and zero columns are collected at the end.
    """
    h = _copy(mat)
    m = len(h)
    n = len(h[0]) if m else 0
    t = _identity(n)
    nxt = 0
    for i in range(m):
        if nxt == n:
            break
        row = h[i]
        # gcd-reduce the active columns until at most one entry survives
        while True:
            best = -1
            besta = 0
            count = 0
            for j in range(nxt, n):
                v = row[j]
                if v:
                    count += 1
                    a = -v if v < 0 else v
                    if best < 0 or a < besta:
                        best, besta = j, a
            if count <= 1:
                break
            for j in range(nxt, n):
                if j != best and row[j]:
                    q = row[j] // row[best]
                    if q:
                        _addmul_col(h, j, best, -q)
                        _addmul_col(t, j, best, -q)
        if count == 0:
            continue
        if best != nxt:
            _swap_cols(h, nxt, best)
            _swap_cols(t, nxt, best)
        if row[nxt] < 0:
            _negate_col(h, nxt)
            _negate_col(t, nxt)
        p = row[nxt]
        for j in range(nxt):
            q = row[j] // p
            if q:
                _addmul_col(h, j, nxt, -q)
                _addmul_col(t, j, nxt, -q)
        nxt += 1
    return h, t, nxt


def hnf_basis(mat):
    """Column HNF without transform; zero columns dropped.

    Returns (H, pivot_rows) with H the canonical basis (as rows of the
    ambient: H is m x rank) of the column span of mat.
    """
    h = _copy(mat)
    m = len(h)
    n = len(h[0]) if m else 0
    nxt = 0
    pivots = []
    for i in range(m):
        if nxt == n:
            break
        row = h[i]
        while True:
            best = -1
            besta = 0
            count = 0
            for j in range(nxt, n):
                v = row[j]
                if v:
                    count += 1
                    a = -v if v < 0 else v
                    if best < 0 or a < besta:
                        best, besta = j, a
            if count <= 1:
                break
            for j in range(nxt, n):
                if j != best and row[j]:
                    q = row[j] // row[best]
                    if q:
                        _addmul_col(h, j, best, -q)
        if count == 0:
            continue
        if best != nxt:
            _swap_cols(h, nxt, best)
        if row[nxt] < 0:
            _negate_col(h, nxt)
        p = row[nxt]
        for j in range(nxt):
            q = row[j] // p
            if q:
                _addmul_col(h, j, nxt, -q)
        pivots.append(i)
        nxt += 1
    out = [row[:nxt] for row in h]
    return out, pivots


def snf_transform(mat):
    """Smith normal form with transforms.

    Returns (D, U, V, Uinv) where U @ mat @ V = D, U and V unimodular,
    D diagonal with d0 | d1 | ... and all di >= 0, and Uinv = U^-1.
    """
    d = _copy(mat)
    m = len(d)
    n = len(d[0]) if m else 0
    u = _identity(m)
    uinv = _identity(m)
    v = _identity(n)

    def row_addmul(i_dst, i_src, q):
        # row[i_dst] += q*row[i_src]; inverse column op on uinv
        if q == 0:
            return
        rd, rs = d[i_dst], d[i_src]
        for j in range(n):
            s = rs[j]
            if s:
                rd[j] += q * s
        rd, rs = u[i_dst], u[i_src]
        for j in range(m):
            s = rs[j]
            if s:
                rd[j] += q * s
        for row in uinv:
            s = row[i_dst]
            if s:
                row[i_src] -= q * s

    def row_swap(i0, i1):
        d[i0], d[i1] = d[i1], d[i0]
        u[i0], u[i1] = u[i1], u[i0]
        for row in uinv:
            row[i0], row[i1] = row[i1], row[i0]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for row in uinv:
            row[i] = -row[i]

    def col_addmul(j_dst, j_src, q):
        if q == 0:
            return
        for row in d:
            s = row[j_src]
            if s:
                row[j_dst] += q * s
        for row in v:
            s = row[j_src]
            if s:
                row[j_dst] += q * s

    def col_swap(j0, j1):
        _swap_cols(d, j0, j1)
        _swap_cols(v, j0, j1)

    t = 0
    limit = m if m < n else n
    while t < limit:
        # locate a pivot of least magnitude in the trailing submatrix
        pi = pj = -1
        pa = 0
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                val = row[j]
                if val:
                    a = -val if val < 0 else val
                    if pi < 0 or a < pa:
                        pi, pj, pa = i, j, a
            if pa == 1:
                break
        if pi < 0:
            break
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        while True:
            # clear column t with row operations
            dirty = False
            for i in range(t + 1, m):
                val = d[i][t]
                if val:
                    q = val // d[t][t]
                    row_addmul(i, t, -q)
                    if d[i][t]:
                        row_swap(t, i)
                        dirty = True
            if dirty:
                continue
            # clear row t with column operations
            for j in range(t + 1, n):
                val = d[t][j]
                if val:
                    q = val // d[t][t]
                    col_addmul(j, t, -q)
                    if d[t][j]:
                        col_swap(t, j)
                        dirty = True
            if not dirty:
                break
        if d[t][t] < 0:
            row_negate(t)
        # enforce divisibility of the remaining block by d[t][t]
        pivot = d[t][t]
        fixed = True
        for i in range(t + 1, m):
            row = d[i]
            for j in range(t + 1, n):
                if row[j] % pivot:
                    row_addmul(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1
    return d, u, v, uinv


def mat_mul(a, b):
    """Plain integer matrix product a @ b."""
    m = len(a)
    k = len(a[0]) if m else 0
    n = len(b[0]) if b else 0
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            s = arow[t]
            if s:
                brow = b[t]
                for j in range(n):
                    bv = brow[j]
                    if bv:
                        orow[j] += s * bv
    return out
