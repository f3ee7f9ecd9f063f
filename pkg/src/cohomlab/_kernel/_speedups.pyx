# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled integer matrix kernels.

Mirror of cohomlab._kernel.pure: same algorithms, same pivot choices,
bit-identical results.  Entries stay arbitrary-precision Python ints;
the speedup comes from compiling the loop and indexing machinery.
"""

BACKEND = "compiled"


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


cdef list _copy(mat):
    cdef list out = []
    for row in mat:
        out.append(list(row))
    return out


cdef list _identity(Py_ssize_t n):
    cdef list rows = []
    cdef Py_ssize_t i
    for i in range(n):
        row = [0] * n
        row[i] = 1
        rows.append(row)
    return rows


cdef void _swap_cols(list mat, Py_ssize_t j0, Py_ssize_t j1):
    cdef list row
    for row in mat:
        row[j0], row[j1] = row[j1], row[j0]


cdef void _addmul_col(list mat, Py_ssize_t jdst, Py_ssize_t jsrc, q):
    cdef list row
    if q == 0:
        return
    for row in mat:
        s = row[jsrc]
        if s:
            row[jdst] = row[jdst] + q * s


cdef void _negate_col(list mat, Py_ssize_t j):
    cdef list row
    for row in mat:
        row[j] = -row[j]


def hnf_transform(mat):
    """Column-style Hermite normal form with transform.

    Returns (H, T, rank) with H = mat @ T, T unimodular; see the pure
    twin for the exact normal form conventions.
    """
    cdef list h = _copy(mat)
    cdef Py_ssize_t m = len(h)
    cdef Py_ssize_t n = len(h[0]) if m else 0
    cdef list t = _identity(n)
    cdef Py_ssize_t nxt = 0, i, j, best, count
    cdef list row
    for i in range(m):
        if nxt == n:
            break
        row = h[i]
        count = 2
        best = -1
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
                        best = j
                        besta = a
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
    """Column HNF without transform; zero columns dropped."""
    cdef list h = _copy(mat)
    cdef Py_ssize_t m = len(h)
    cdef Py_ssize_t n = len(h[0]) if m else 0
    cdef Py_ssize_t nxt = 0, i, j, best, count
    cdef list row, pivots = []
    for i in range(m):
        if nxt == n:
            break
        row = h[i]
        count = 2
        best = -1
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
                        best = j
                        besta = a
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
    cdef list out = []
    for row in h:
        out.append(row[:nxt])
    return out, pivots


def snf_transform(mat):
    """Smith normal form with transforms: U @ mat @ V = D, plus U^-1."""
    cdef list d = _copy(mat)
    cdef Py_ssize_t m = len(d)
    cdef Py_ssize_t n = len(d[0]) if m else 0
    cdef list u = _identity(m)
    cdef list uinv = _identity(m)
    cdef list v = _identity(n)
    cdef Py_ssize_t t = 0, limit, i, j, pi, pj
    cdef bint dirty, fixed
    cdef list row, rd, rs

    limit = m if m < n else n
    while t < limit:
        pi = -1
        pj = -1
        pa = 0
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                val = row[j]
                if val:
                    a = -val if val < 0 else val
                    if pi < 0 or a < pa:
                        pi = i
                        pj = j
                        pa = a
            if pa == 1:
                break
        if pi < 0:
            break
        if pi != t:
            d[t], d[pi] = d[pi], d[t]
            u[t], u[pi] = u[pi], u[t]
            for row in uinv:
                row[t], row[pi] = row[pi], row[t]
        if pj != t:
            _swap_cols(d, t, pj)
            _swap_cols(v, t, pj)
        while True:
            dirty = False
            for i in range(t + 1, m):
                val = d[i][t]
                if val:
                    q = val // d[t][t]
                    if q:
                        rd = d[i]
                        rs = d[t]
                        for j in range(n):
                            s = rs[j]
                            if s:
                                rd[j] = rd[j] - q * s
                        rd = u[i]
                        rs = u[t]
                        for j in range(m):
                            s = rs[j]
                            if s:
                                rd[j] = rd[j] - q * s
                        for row in uinv:
                            s = row[i]
                            if s:
                                row[t] = row[t] + q * s
                    if d[i][t]:
                        d[t], d[i] = d[i], d[t]
                        u[t], u[i] = u[i], u[t]
                        for row in uinv:
                            row[t], row[i] = row[i], row[t]
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, n):
                val = d[t][j]
                if val:
                    q = val // d[t][t]
                    if q:
                        for row in d:
                            s = row[t]
                            if s:
                                row[j] = row[j] - q * s
                        for row in v:
                            s = row[t]
                            if s:
                                row[j] = row[j] - q * s
                    if d[t][j]:
                        _swap_cols(d, t, j)
                        _swap_cols(v, t, j)
                        dirty = True
            if not dirty:
                break
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
            for row in uinv:
                row[t] = -row[t]
        pivot = d[t][t]
        fixed = True
        for i in range(t + 1, m):
            row = d[i]
            for j in range(t + 1, n):
                if row[j] % pivot:
                    rd = d[t]
                    for j in range(n):
                        s = row[j]
                        if s:
                            rd[j] = rd[j] + s
                    rd = u[t]
                    rs = u[i]
                    for j in range(m):
                        s = rs[j]
                        if s:
                            rd[j] = rd[j] + s
                    for row in uinv:
                        s = row[t]
                        if s:
                            row[i] = row[i] - s
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1
    return d, u, v, uinv


def mat_mul(a, b):
    """Plain integer matrix product a @ b."""
    cdef Py_ssize_t m = len(a)
    cdef Py_ssize_t k = len(a[0]) if m else 0
    cdef Py_ssize_t n = len(b[0]) if len(b) else 0
    cdef list out = []
    cdef Py_ssize_t i, t, j
    cdef list arow, orow, brow
    for i in range(m):
        out.append([0] * n)
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
                        orow[j] = orow[j] + s * bv
    return out
