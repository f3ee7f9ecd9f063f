"""Exact integer linear algebra: matrices, Smith/Hermite forms, lattices.

Everything in this module is exact (arbitrary-precision ints, no floats)
and immutable after construction; all operations are pure functions, so
concurrent use needs no synchronization.  Canonical forms are used
throughout so that repeated runs produce identical output.

>>> m = IntMatrix([[2, 4], [6, 8]])
>>> smith_normal_form(m).D.diagonal()
(2, 4)
>>> cokernel_structure(IntMatrix([[2]]))
(0, [2])
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernel

KERNEL_BACKEND = _kernel.BACKEND


class IntMatrix:
    """Immutable dense integer matrix, row-major."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        self._rows = rows
        self.nrows = len(rows)
        if rows:
            self.ncols = len(rows[0])
            if any(len(r) != self.ncols for r in rows):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != self.ncols:
                raise ValueError("ncols mismatch")
        else:
            self.ncols = 0 if ncols is None else ncols

    @classmethod
    def _raw(cls, rows, ncols):
        """Trusted fast path: rows are already sequences of ints."""
        obj = object.__new__(cls)
        obj._rows = tuple(tuple(r) for r in rows)
        obj.nrows = len(obj._rows)
        obj.ncols = ncols
        return obj

    @classmethod
    def identity(cls, n):
        return cls._raw(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)], n
        )

    @classmethod
    def zeros(cls, m, n):
        return cls([[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def diagonal_matrix(cls, entries, m=None, n=None):
        k = len(entries)
        m = k if m is None else m
        n = k if n is None else n
        rows = [[0] * n for _ in range(m)]
        for i, d in enumerate(entries):
            rows[i][i] = int(d)
        return cls(rows, ncols=n)

    @classmethod
    def from_columns(cls, cols, nrows):
        cols = list(cols)
        if not cols:
            return cls.zeros(nrows, 0)
        if nrows == 0:
            return cls.zeros(0, len(cols))
        return cls([[col[i] for col in cols] for i in range(nrows)])

    @property
    def rows(self):
        return self._rows

    def to_lists(self):
        return [list(r) for r in self._rows]

    def row(self, i):
        return self._rows[i]

    def column(self, j):
        return tuple(r[j] for r in self._rows)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def entry(self, i, j):
        return self._rows[i][j]

    def transpose(self):
        return IntMatrix._raw(
            [[self._rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.nrows,
        )

    def apply(self, vec):
        """Matrix-vector product, returned as a tuple."""
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        out = []
        for row in self._rows:
            s = 0
            for a, x in zip(row, vec):
                if a and x:
                    s += a * x
            out.append(s)
        return tuple(out)

    def take_columns(self, js):
        js = list(js)
        return IntMatrix._raw([[row[j] for j in js] for row in self._rows], len(js))

    def take_rows(self, iis):
        return IntMatrix._raw([self._rows[i] for i in iis], self.ncols)

    def is_zero(self):
        return all(all(x == 0 for x in row) for row in self._rows)

    def diagonal(self):
        k = min(self.nrows, self.ncols)
        return tuple(self._rows[i][i] for i in range(k))

    def __mul__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product")
        if self.nrows == 0 or other.ncols == 0:
            return IntMatrix.zeros(self.nrows, other.ncols)
        if self.ncols == 0:
            return IntMatrix.zeros(self.nrows, other.ncols)
        return IntMatrix._raw(
            _kernel.mat_mul(self.to_lists(), other.to_lists()), other.ncols
        )

    def __add__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch in sum")
        return IntMatrix._raw(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)],
            self.ncols,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return IntMatrix._raw([[-x for x in row] for row in self._rows], self.ncols)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self._rows))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self._rows]!r})"


def hstack(*mats):
    mats = [m for m in mats if m.ncols or m.nrows]
    if not mats:
        return IntMatrix.zeros(0, 0)
    m = mats[0].nrows
    if any(a.nrows != m for a in mats):
        raise ValueError("row count mismatch in hstack")
    rows = [sum((list(a._rows[i]) for a in mats), []) for i in range(m)]
    return IntMatrix._raw(rows, sum(a.ncols for a in mats))


def vstack(*mats):
    n = mats[0].ncols
    if any(a.ncols != n for a in mats):
        raise ValueError("column count mismatch in vstack")
    rows = []
    for a in mats:
        rows.extend(a._rows)
    return IntMatrix._raw(rows, n)


def block_diag(*mats):
    m = sum(a.nrows for a in mats)
    n = sum(a.ncols for a in mats)
    rows = [[0] * n for _ in range(m)]
    ro = co = 0
    for a in mats:
        for i in range(a.nrows):
            rows[ro + i][co : co + a.ncols] = list(a._rows[i])
        ro += a.nrows
        co += a.ncols
    return IntMatrix._raw(rows, n)


def determinant(m: IntMatrix):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of non-square matrix")
    n = m.nrows
    if n == 0:
        return 1
    a = m.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V = D with U, V unimodular and D = diag(d0 | d1 | ...)."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix

    def invariant_factors(self):
        return [d for d in self.D.diagonal() if d]


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Diagonalize over Z with unimodular transforms.

    Total: empty shapes are fine.  Deterministic pivot choice (least
    magnitude, first position) makes the output canonical for testing.
    """
    if m.nrows == 0 or m.ncols == 0:
        return SmithDecomposition(
            U=IntMatrix.identity(m.nrows),
            D=IntMatrix.zeros(m.nrows, m.ncols),
            V=IntMatrix.identity(m.ncols),
            Uinv=IntMatrix.identity(m.nrows),
        )
    d, u, v, uinv = _kernel.snf_transform(m.to_lists())
    return SmithDecomposition(
        U=IntMatrix(u, ncols=m.nrows),
        D=IntMatrix(d, ncols=m.ncols),
        V=IntMatrix(v, ncols=m.ncols),
        Uinv=IntMatrix(uinv, ncols=m.nrows),
    )


def cokernel_structure(m: IntMatrix):
    """Structure of Z^rows / col-span(m).

    Returns (free_rank, torsion) with torsion the invariant factors > 1
    in divisibility order.

    >>> cokernel_structure(IntMatrix.diagonal_matrix([1, 6]))
    (0, [6])
    """
    if m.ncols == 0:
        return m.nrows, []
    d = _kernel.snf_transform(m.to_lists())[0]
    k = min(m.nrows, m.ncols)
    diag = [d[i][i] for i in range(k)]
    nonzero = [x for x in diag if x]
    free_rank = m.nrows - len(nonzero)
    torsion = [x for x in nonzero if x > 1]
    return free_rank, torsion


class LatticeSolver:
    """Reusable exact solver for M @ x = b via cached column Hermite form.

    The solution, when it exists, is canonical: free coordinates in the
    Hermite transform basis are set to zero, so repeated runs agree.
    """

    def __init__(self, m: IntMatrix):
        self.matrix = m
        if m.nrows == 0:
            self._h = []
            self._t = _kernel.hnf_transform([[0] * m.ncols])[1] if m.ncols else []
            self._pivots = []
            self._rank = 0
        else:
            h, t, rank = _kernel.hnf_transform(m.to_lists())
            self._h = h
            self._t = t
            self._rank = rank
            self._pivots = []
            for j in range(rank):
                i = 0
                while self._h[i][j] == 0:
                    i += 1
                self._pivots.append(i)

    def solve(self, b):
        """Return canonical x with M @ x == b, or None if b not in im(M)."""
        m = self.matrix
        if len(b) != m.nrows:
            raise ValueError("dimension mismatch")
        residual = [int(x) for x in b]
        coeffs = [0] * m.ncols
        for j, r in enumerate(self._pivots):
            p = self._h[r][j]
            q, rem = divmod(residual[r], p)
            if rem:
                return None
            if q:
                coeffs[j] = q
                for i in range(r, m.nrows):
                    hij = self._h[i][j]
                    if hij:
                        residual[i] -= q * hij
        if any(residual):
            return None
        x = [0] * m.ncols
        for j, c in enumerate(coeffs):
            if c:
                for i in range(m.ncols):
                    tij = self._t[i][j]
                    if tij:
                        x[i] += c * tij
        return tuple(x)

    def contains(self, b):
        return self.solve(b) is not None


def solve_in_lattice(m: IntMatrix, b):
    """One-shot exact solve of m @ x = b; None signals b not in im(m)."""
    return LatticeSolver(m).solve(b)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Canonical (HNF) basis of {x : m @ x = 0}, columns of the result."""
    if m.ncols == 0:
        return IntMatrix.zeros(0, 0)
    if m.nrows == 0:
        return IntMatrix.identity(m.ncols)
    _, t, rank = _kernel.hnf_transform(m.to_lists())
    cols = list(zip(*t))[rank:]
    if not cols:
        return IntMatrix.zeros(m.ncols, 0)
    gens = [list(row) for row in zip(*cols)]
    h, _ = _kernel.hnf_basis(gens)
    return IntMatrix._raw(h, len(h[0]) if h and h[0] else 0)


def kernel_mod_moduli(w: IntMatrix, moduli) -> IntMatrix:
    """Canonical basis of {x : (w @ x)[i] == 0 mod moduli[i] for all i}.

    A modulus of 0 demands exact vanishing of that coordinate.  This is
    the workhorse for kernels of maps into presented groups: rows of w
    are the target's cyclic coordinates.
    """
    if len(moduli) != w.nrows:
        raise ValueError("one modulus per row required")
    aug_cols = []
    for i, d in enumerate(moduli):
        if d:
            col = [0] * w.nrows
            col[i] = int(d)
            aug_cols.append(col)
    if aug_cols:
        full = hstack(w, IntMatrix.from_columns(aug_cols, w.nrows))
    else:
        full = w
    ker = kernel_basis(full)
    proj = ker.take_rows(range(w.ncols))
    h, _ = _kernel.hnf_basis(proj.to_lists()) if proj.nrows else ([], [])
    if not h or not h[0]:
        return IntMatrix.zeros(w.ncols, 0)
    return IntMatrix._raw(h, len(h[0]))


def hermite_basis(gens: IntMatrix) -> IntMatrix:
    """Canonical column-HNF basis of the column span of gens."""
    if gens.nrows == 0 or gens.ncols == 0:
        return IntMatrix.zeros(gens.nrows, 0)
    h, _ = _kernel.hnf_basis(gens.to_lists())
    if not h or not h[0]:
        return IntMatrix.zeros(gens.nrows, 0)
    return IntMatrix._raw(h, len(h[0]))


class SubgroupLattice:
    """Subgroup of Z^ambient given by a canonical column-HNF basis."""

    __slots__ = ("ambient", "basis", "_solver")

    def __init__(self, ambient, generators: IntMatrix):
        if generators.nrows != ambient:
            raise ValueError("generator column length != ambient rank")
        self.ambient = ambient
        self.basis = hermite_basis(generators)
        self._solver = None

    @classmethod
    def zero(cls, ambient):
        return cls(ambient, IntMatrix.zeros(ambient, 0))

    @classmethod
    def full(cls, ambient):
        return cls(ambient, IntMatrix.identity(ambient))

    @property
    def rank(self):
        return self.basis.ncols

    def solver(self) -> LatticeSolver:
        if self._solver is None:
            self._solver = LatticeSolver(self.basis)
        return self._solver

    def contains(self, v):
        return self.solver().contains(v)

    def coordinates(self, v):
        """Express v in the basis; None if v is outside the lattice."""
        return self.solver().solve(v)

    def __eq__(self, other):
        if not isinstance(other, SubgroupLattice):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"SubgroupLattice(ambient={self.ambient}, rank={self.rank})"


@dataclass(frozen=True)
class LatticeOpsResult:
    sum: SubgroupLattice
    intersection: SubgroupLattice
    quotient_free_rank: int
    quotient_torsion: tuple


def lattice_sum(a: SubgroupLattice, b: SubgroupLattice) -> SubgroupLattice:
    if a.ambient != b.ambient:
        raise ValueError("ambient rank mismatch")
    return SubgroupLattice(a.ambient, hstack(a.basis, b.basis))


def lattice_intersection(a: SubgroupLattice, b: SubgroupLattice) -> SubgroupLattice:
    """A cap B, computed from the kernel of [A | -B]."""
    if a.ambient != b.ambient:
        raise ValueError("ambient rank mismatch")
    if a.rank == 0 or b.rank == 0:
        return SubgroupLattice.zero(a.ambient)
    stacked = hstack(a.basis, -b.basis)
    ker = kernel_basis(stacked)
    coeffs = ker.take_rows(range(a.rank))
    return SubgroupLattice(a.ambient, a.basis * coeffs)


def lattice_quotient_structure(a: SubgroupLattice, b: SubgroupLattice):
    """Structure of A / (A cap B) as (free_rank, torsion)."""
    inter = lattice_intersection(a, b)
    if a.rank == 0:
        return 0, []
    coords = []
    solver = a.solver()
    for j in range(inter.rank):
        c = solver.solve(inter.basis.column(j))
        if c is None:
            raise RuntimeError("intersection escaped the lattice")
        coords.append(list(c))
    rel = IntMatrix.from_columns(coords, a.rank) if coords else IntMatrix.zeros(a.rank, 0)
    free_rank, torsion = cokernel_structure(rel)
    return free_rank, torsion


def lattice_ops(a: SubgroupLattice, b: SubgroupLattice) -> LatticeOpsResult:
    """Sum, intersection and the structure of A/(A cap B) in one call."""
    free_rank, torsion = lattice_quotient_structure(a, b)
    return LatticeOpsResult(
        sum=lattice_sum(a, b),
        intersection=lattice_intersection(a, b),
        quotient_free_rank=free_rank,
        quotient_torsion=tuple(torsion),
    )
