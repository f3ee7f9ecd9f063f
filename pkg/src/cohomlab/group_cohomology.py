"""Finite groups, G-modules and the inhomogeneous cochain machinery.

Cochains of degree n are tables indexed by n-tuples of group elements
(lexicographic, leftmost entry most significant) with values in a
finitely generated coefficient module.  The differential is

  (d f)(g0,...,gn) = g0.f(g1,...,gn)
                     + sum_{j=1..n} (-1)^j f(g0,...,g_{j-1}g_j,...,gn)
                     + (-1)^{n+1} f(g0,...,g_{n-1})

and all other modules of the package convert to this convention.

Action matrices of a GModule must be *exactly* multiplicative
(rho(g) rho(h) = rho(gh) as integer matrices, not merely modulo the
relation lattice): the generator-cover differentials then compose to
zero on the nose, which the total-complex cohomology path requires.
All built-in constructions (trivial/sign/permutation actions, coinduced
modules, tensor products) are exact in this sense.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroups import (
    AbCochainComplex,
    AbMorphism,
    CohomologyGroup,
    FgAbelianGroup,
    SesOfComplexes,
    cohomology_at,
    long_exact_sequence,
)
from .intlinalg import IntMatrix, kernel_mod_moduli


class CocycleError(ValueError):
    """Input fails a cocycle identity; carries a witness tuple."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FiniteGroup:
    """Finite group as a multiplication table; identity has index 0."""

    __slots__ = ("order", "table", "_inverse", "name")

    def __init__(self, table, name=None, check=True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name or f"group{self.order}"
        if check:
            self.validate()
        inv = [None] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.table[a][b] == 0:
                    inv[a] = b
        self._inverse = tuple(inv)

    def validate(self):
        n = self.order
        for row in self.table:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise ValueError("multiplication table malformed")
        for a in range(n):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise ValueError("index 0 is not an identity")
        for a in range(n):
            if 0 not in self.table[a]:
                raise ValueError(f"element {a} has no inverse")
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise CocycleError(
                            "associativity fails", witness=(a, b, c)
                        )

    @classmethod
    def cyclic(cls, m, name=None):
        table = [[(a + b) % m for b in range(m)] for a in range(m)]
        return cls(table, name=name or f"Z{m}", check=False)

    @classmethod
    def direct_product(cls, g, h, name=None):
        n = g.order * h.order
        idx = lambda a, b: a * h.order + b
        table = [[0] * n for _ in range(n)]
        for a1 in range(g.order):
            for b1 in range(h.order):
                for a2 in range(g.order):
                    for b2 in range(h.order):
                        table[idx(a1, b1)][idx(a2, b2)] = idx(
                            g.mul(a1, a2), h.mul(b1, b2)
                        )
        return cls(table, name=name or f"{g.name}x{h.name}", check=False)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inverse[a]

    def elements(self):
        return range(self.order)

    def multiply_all(self, elems):
        acc = 0
        for g in elems:
            acc = self.table[acc][g]
        return acc

    def element_order(self, a):
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def generators(self):
        """Small deterministic generating set (greedy closure)."""
        gens = []
        closure = {0}
        while len(closure) < self.order:
            gens.append(min(x for x in range(self.order) if x not in closure))
            closure = {0}
            frontier = [0]
            while frontier:
                fresh = []
                for a in frontier:
                    for b in gens:
                        for c in (self.table[a][b], self.table[b][a]):
                            if c not in closure:
                                closure.add(c)
                                fresh.append(c)
                frontier = fresh
        return gens

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


class GModule:
    """FgAbelianGroup with an exactly multiplicative action of G."""

    __slots__ = ("group", "underlying", "action", "name")

    def __init__(self, group, underlying, action, name=None, check=True):
        self.group = group
        self.underlying = underlying
        self.action = tuple(action)
        self.name = name or "module"
        if len(self.action) != group.order:
            raise ValueError("one action matrix per group element required")
        if check:
            self.validate()

    def validate(self):
        r = self.underlying.rank
        ident = IntMatrix.identity(r)
        if self.action[0] != ident:
            raise ValueError("action of the identity must be the identity matrix")
        lat = self.underlying.lattice
        for g, m in enumerate(self.action):
            if m.nrows != r or m.ncols != r:
                raise ValueError("action matrix shape mismatch")
            for j in range(lat.basis.ncols):
                if not lat.contains(m.apply(lat.basis.column(j))):
                    raise ValueError(
                        f"action of element {g} does not preserve the relations"
                    )
        # rho(s x) = rho(s) rho(x) for generators s and all x implies exact
        # multiplicativity everywhere (induction on word length)
        for s in self.group.generators():
            for h in range(self.group.order):
                if self.action[s] * self.action[h] != self.action[self.group.mul(s, h)]:
                    raise ValueError(
                        "action matrices must compose exactly; "
                        f"failure at pair ({s}, {h})"
                    )

    @classmethod
    def trivial(cls, group, underlying, name=None):
        ident = IntMatrix.identity(underlying.rank)
        return cls(group, underlying, [ident] * group.order,
                   name=name, check=False)

    def act(self, g, v):
        return self.action[g].apply(v)

    @property
    def rank(self):
        return self.underlying.rank

    def zero(self):
        return self.underlying.zero_vector()

    def invariant_lattice(self) -> IntMatrix:
        """Basis of {v : g.v - v lies in the relation lattice for all g}."""
        dec = self.underlying.decomposition
        rows = []
        mods = []
        ident = IntMatrix.identity(self.rank)
        for g in self.group.generators():
            w = dec.proj * (self.action[g] - ident)
            rows.extend(w.to_lists())
            mods.extend(dec.mods)
        if not rows:
            return IntMatrix.identity(self.rank)
        return kernel_mod_moduli(IntMatrix(rows, ncols=self.rank), mods)

    def __repr__(self):
        return f"GModule({self.name} over {self.group.name})"


def tensor_module(a: GModule, b: GModule, name=None) -> GModule:
    """A (x) B with the diagonal action; generator (i,j) -> i*rank(B)+j."""
    if a.group is not b.group and a.group.table != b.group.table:
        raise ValueError("tensor factors live over different groups")
    ra, rb = a.rank, b.rank
    rank = ra * rb
    cols = []
    for j in range(a.underlying.lattice.basis.ncols):
        rel = a.underlying.lattice.basis.column(j)
        for t in range(rb):
            col = [0] * rank
            for i in range(ra):
                col[i * rb + t] = rel[i]
            cols.append(col)
    for j in range(b.underlying.lattice.basis.ncols):
        rel = b.underlying.lattice.basis.column(j)
        for s in range(ra):
            col = [0] * rank
            for i in range(rb):
                col[s * rb + i] = rel[i]
            cols.append(col)
    rels = IntMatrix.from_columns(cols, rank) if cols else IntMatrix.zeros(rank, 0)
    group = FgAbelianGroup(rank, rels)

    def kron(m1, m2):
        rows = [[0] * rank for _ in range(rank)]
        for i1 in range(ra):
            for j1 in range(ra):
                v = m1.entry(i1, j1)
                if v:
                    for i2 in range(rb):
                        for j2 in range(rb):
                            w = m2.entry(i2, j2)
                            if w:
                                rows[i1 * rb + i2][j1 * rb + j2] = v * w
        return IntMatrix(rows, ncols=rank)

    action = [kron(a.action[g], b.action[g]) for g in range(a.group.order)]
    return GModule(a.group, group, action,
                   name=name or f"{a.name}(x){b.name}", check=False)


class Cochain:
    """Degree-n table of module values indexed by n-tuples over G."""

    __slots__ = ("module", "degree", "values")

    def __init__(self, module, degree, values):
        self.module = module
        self.degree = degree
        n = module.group.order
        expected = n ** degree
        values = tuple(tuple(int(x) for x in v) for v in values)
        if len(values) != expected:
            raise ValueError(f"need {expected} values for degree {degree}")
        if any(len(v) != module.rank for v in values):
            raise ValueError("value length != module rank")
        self.values = values

    @classmethod
    def zero(cls, module, degree):
        n = module.group.order
        return cls(module, degree, [module.zero()] * (n ** degree))

    @classmethod
    def from_function(cls, module, degree, fn):
        n = module.group.order
        vals = []
        for idx in range(n ** degree):
            vals.append(tuple(fn(*cls.unindex(idx, degree, n))))
        return cls(module, degree, vals)

    @staticmethod
    def unindex(idx, degree, order):
        out = []
        for _ in range(degree):
            idx, r = divmod(idx, order)
            out.append(r)
        return tuple(reversed(out))

    def index(self, t):
        n = self.module.group.order
        idx = 0
        for g in t:
            idx = idx * n + g
        return idx

    def value(self, t):
        return self.values[self.index(t)]

    def tuples(self):
        n = self.module.group.order
        for idx in range(n ** self.degree):
            yield self.unindex(idx, self.degree, n)

    def __add__(self, other):
        self._check_compatible(other)
        return Cochain(
            self.module,
            self.degree,
            [tuple(x + y for x, y in zip(v, w)) for v, w in zip(self.values, other.values)],
        )

    def __sub__(self, other):
        self._check_compatible(other)
        return Cochain(
            self.module,
            self.degree,
            [tuple(x - y for x, y in zip(v, w)) for v, w in zip(self.values, other.values)],
        )

    def __neg__(self):
        return Cochain(
            self.module, self.degree, [tuple(-x for x in v) for v in self.values]
        )

    def _check_compatible(self, other):
        if self.module is not other.module and self.module.underlying != other.module.underlying:
            raise ValueError("cochains over different modules")
        if self.degree != other.degree:
            raise ValueError("cochains of different degrees")

    def is_zero(self):
        grp = self.module.underlying
        return all(grp.is_zero_element(v) for v in self.values)

    def to_vector(self):
        out = []
        for v in self.values:
            out.extend(v)
        return tuple(out)

    @classmethod
    def from_vector(cls, module, degree, vec):
        r = module.rank
        n = module.group.order
        count = n ** degree
        if len(vec) != r * count:
            raise ValueError("vector length mismatch")
        vals = [tuple(vec[i * r : (i + 1) * r]) for i in range(count)]
        return cls(module, degree, vals)

    def __repr__(self):
        return f"Cochain(degree={self.degree}, module={self.module.name})"


def group_differential(f: Cochain) -> Cochain:
    """The inhomogeneous differential, raising degree by one."""
    module = f.module
    grp = module.group
    n = f.degree
    out = Cochain.zero(module, n + 1)
    vals = [list(v) for v in out.values]
    for idx, t in enumerate(out.tuples()):
        acc = list(module.act(t[0], f.value(t[1:])))
        for j in range(1, n + 1):
            merged = t[: j - 1] + (grp.mul(t[j - 1], t[j]),) + t[j + 1 :]
            v = f.value(merged)
            if j % 2:
                acc = [x - y for x, y in zip(acc, v)]
            else:
                acc = [x + y for x, y in zip(acc, v)]
        v = f.value(t[:-1])
        if (n + 1) % 2:
            acc = [x - y for x, y in zip(acc, v)]
        else:
            acc = [x + y for x, y in zip(acc, v)]
        vals[idx] = acc
    return Cochain(module, n + 1, vals)


def is_cocycle(f: Cochain) -> bool:
    return group_differential(f).is_zero()


def bar_term_group(module: GModule, n) -> FgAbelianGroup:
    """C^n(G, A) as a presented group: one block of A per n-tuple."""
    count = module.group.order ** n
    r = module.rank
    basis = module.underlying.lattice.basis
    k = basis.ncols
    rows = [[0] * (k * count) for _ in range(r * count)]
    for b in range(count):
        for i in range(r):
            row = basis.row(i)
            for j in range(k):
                if row[j]:
                    rows[b * r + i][b * k + j] = row[j]
    return FgAbelianGroup(r * count, IntMatrix._raw(rows, k * count))


def bar_differential_matrix(module: GModule, n) -> IntMatrix:
    """Matrix of d: C^n -> C^{n+1} on generator coordinates."""
    grp = module.group
    r = module.rank
    src_count = grp.order ** n
    dst_count = grp.order ** (n + 1)
    rows = [[0] * (r * src_count) for _ in range(r * dst_count)]

    def add_block(dst_idx, src_idx, mat, sign):
        r0, c0 = dst_idx * r, src_idx * r
        for i in range(r):
            row = mat.row(i)
            for j in range(r):
                if row[j]:
                    rows[r0 + i][c0 + j] += sign * row[j]

    ident = IntMatrix.identity(r)
    for idx in range(dst_count):
        t = Cochain.unindex(idx, n + 1, grp.order)
        add_block(idx, _tuple_index(t[1:], grp.order), module.action[t[0]], 1)
        for j in range(1, n + 1):
            merged = t[: j - 1] + (grp.mul(t[j - 1], t[j]),) + t[j + 1 :]
            add_block(idx, _tuple_index(merged, grp.order), ident, -1 if j % 2 else 1)
        add_block(idx, _tuple_index(t[:-1], grp.order), ident, -1 if (n + 1) % 2 else 1)
    return IntMatrix._raw(rows, r * src_count)


def _tuple_index(t, order):
    idx = 0
    for g in t:
        idx = idx * order + g
    return idx


def bar_cochain_complex(module: GModule, n_max) -> AbCochainComplex:
    """The cochain complex (C^n(G, A), d) for 0 <= n <= n_max."""
    terms = [bar_term_group(module, n) for n in range(n_max + 1)]
    diffs = []
    for n in range(n_max):
        diffs.append(
            AbMorphism(terms[n], terms[n + 1], bar_differential_matrix(module, n), check=False)
        )
    return AbCochainComplex(terms, diffs, check=False)


def bar_window_complex(module: GModule, n) -> tuple[AbCochainComplex, int]:
    """Three-term window of the bar complex around degree n.

    Returns (complex, local degree of n inside it); avoids building the
    lower differentials when only one cohomology group is wanted.
    """
    lo = max(0, n - 1)
    terms = [bar_term_group(module, k) for k in range(lo, n + 2)]
    diffs = []
    for k in range(lo, n + 1):
        diffs.append(
            AbMorphism(
                terms[k - lo],
                terms[k - lo + 1],
                bar_differential_matrix(module, k),
                check=False,
            )
        )
    return AbCochainComplex(terms, diffs, check=False), n - lo


def cohomology(module: GModule, n) -> CohomologyGroup:
    """H^n(G, A) of the inhomogeneous cochain complex; H^0 = invariants."""
    if n < 0:
        raise ValueError("negative degree")
    window, local = bar_window_complex(module, n)
    h = cohomology_at(window, local)
    return CohomologyGroup(n, h.term, h.subquotient)


def cochain_class(module: GModule, f: Cochain):
    """CohomologyGroup of f's degree plus f's coordinates in it."""
    h = cohomology(module, f.degree)
    return h, h.class_of(f.to_vector())


def coboundary_witness(f: Cochain):
    """Solve d b = f; returns the Cochain b or None.

    Exact linear solve over the relation lattice of C^{deg}(G, A), no
    enumeration.
    """
    from .intlinalg import hstack, solve_in_lattice

    module = f.module
    n = f.degree
    if n == 0:
        return None if not f.is_zero() else Cochain.zero(module, 0)
    d = bar_differential_matrix(module, n - 1)
    target = bar_term_group(module, n)
    sol = solve_in_lattice(hstack(d, target.lattice.basis), f.to_vector())
    if sol is None:
        return None
    return Cochain.from_vector(module, n - 1, sol[: d.ncols])


@dataclass(frozen=True)
class Pairing:
    """Bilinear pairing left (x) right -> target between G-modules.

    morphism is an AbMorphism out of the internally constructed tensor
    presentation (generator (i, j) at position i*rank(right)+j).
    """

    left: GModule
    right: GModule
    target: GModule
    morphism: AbMorphism

    @classmethod
    def build(cls, left, right, target, matrix: IntMatrix):
        tens = tensor_module(left, right)
        mor = AbMorphism(tens.underlying, target.underlying, matrix)
        return cls(left, right, target, mor)


def multiplication_pairing(a: GModule) -> Pairing:
    """Multiplication pairing A (x) A -> A for rank-1 coefficients."""
    if a.rank != 1:
        raise ValueError("multiplication pairing implemented for rank-1 modules")
    return Pairing.build(a, a, a, IntMatrix([[1]]))


def cup_product(pairing: Pairing, c: Cochain, cp: Cochain) -> Cochain:
    """Cup product of inhomogeneous cochains through a coefficient pairing.

    The second factor is translated by the product of the first p
    arguments:

      (c u cp)(g1..g_{p+q}) = pairing(c(g1..gp) (x) (g1...gp).cp(...)),

    which satisfies the Leibniz rule for the differential above.
    """
    a, b = pairing.left, pairing.right
    if c.module.underlying != a.underlying or cp.module.underlying != b.underlying:
        raise ValueError("cochain coefficients do not match the pairing")
    grp = a.group
    p = c.degree
    rb = b.rank

    def fn(*t):
        left = c.value(t[:p])
        translate = grp.multiply_all(t[:p])
        right = b.act(translate, cp.value(t[p:]))
        tensor_vec = [0] * (a.rank * rb)
        for i, x in enumerate(left):
            if x:
                for j, y in enumerate(right):
                    if y:
                        tensor_vec[i * rb + j] = x * y
        return pairing.morphism.matrix.apply(tensor_vec)

    return Cochain.from_function(pairing.target, p + cp.degree, fn)


@dataclass(frozen=True)
class GModuleSes:
    """Short exact sequence of G-modules A -> B -> C (equivariant maps)."""

    sub: GModule
    total: GModule
    quotient: GModule
    alpha: AbMorphism
    beta: AbMorphism

    @classmethod
    def build(cls, sub, total, quotient, alpha, beta, check=True):
        ses = cls(sub, total, quotient, alpha, beta)
        if check:
            ses.validate()
        return ses

    def validate(self):
        if not self.alpha.is_injective_on_quotients():
            raise ValueError("alpha is not injective")
        if not self.beta.is_surjective_on_quotients():
            raise ValueError("beta is not surjective")
        if not self.beta.compose(self.alpha).is_zero_map():
            raise ValueError("beta after alpha is nonzero")
        from .intlinalg import LatticeSolver, hstack

        k = self.beta.quotient_kernel_lattice()
        solver = LatticeSolver(hstack(self.alpha.matrix, self.total.underlying.lattice.basis))
        for j in range(k.ncols):
            if solver.solve(k.column(j)) is None:
                raise ValueError("kernel of beta exceeds image of alpha")
        for g in range(self.sub.group.order):
            left = self.total.action[g] * self.alpha.matrix
            right = self.alpha.matrix * self.sub.action[g]
            m = AbMorphism(self.sub.underlying, self.total.underlying, left - right, check=False)
            if not m.is_zero_map():
                raise ValueError(f"alpha not equivariant at element {g}")
            left = self.quotient.action[g] * self.beta.matrix
            right = self.beta.matrix * self.total.action[g]
            m = AbMorphism(self.total.underlying, self.quotient.underlying, left - right, check=False)
            if not m.is_zero_map():
                raise ValueError(f"beta not equivariant at element {g}")


def bar_ses_of_complexes(ses: GModuleSes, n_max) -> SesOfComplexes:
    """Degreewise SES of bar complexes induced by a coefficient SES.

    Complexes are built to degree n_max+2 so every LES node up to
    H^{n_max+1} is computed against an honest next term.
    """
    from .intlinalg import block_diag

    top = n_max + 2
    ca = bar_cochain_complex(ses.sub, top)
    cb = bar_cochain_complex(ses.total, top)
    cc = bar_cochain_complex(ses.quotient, top)
    incs = []
    projs = []
    for n in range(top + 1):
        count = ses.sub.group.order ** n
        incs.append(
            AbMorphism(
                ca.terms[n], cb.terms[n],
                block_diag(*([ses.alpha.matrix] * count)), check=False,
            )
        )
        projs.append(
            AbMorphism(
                cb.terms[n], cc.terms[n],
                block_diag(*([ses.beta.matrix] * count)), check=False,
            )
        )
    return SesOfComplexes.build(ca, cb, cc, incs, projs)


def coefficient_les(ses: GModuleSes, n_max):
    """Long exact coefficient sequence of bar cohomology, with report."""
    from .abgroups import verify_exactness

    chain_ses = bar_ses_of_complexes(ses, n_max)
    nodes = long_exact_sequence(chain_ses, n_max)
    report = verify_exactness(nodes)
    return nodes, report


def extension_from_2cocycle(module: GModule, f: Cochain):
    """The extension group A x_f G for a 2-cocycle f.

    Multiplication (a,g)(b,h) = (a + g.b + f(g,h), gh); associativity is
    exactly the cocycle identity, and on failure the witness triple is
    reported.  A must be finite.  Returns (group, projection, section)
    where projection maps extension indices to G and section embeds G on
    the set level as x -> (0, x).
    """
    if f.degree != 2:
        raise ValueError("need a 2-cochain")
    a_grp = module.underlying
    if not a_grp.is_finite():
        raise ValueError("extension table requires finite coefficients")
    df = group_differential(f)
    for t in df.tuples():
        if not a_grp.is_zero_element(df.value(t)):
            raise CocycleError("not a 2-cocycle: associativity fails", witness=t)
    grp = module.group
    elems = a_grp.elements()
    index_of = a_grp.element_index()
    # identity of the extension is (-f(e,e), e); list it first so that the
    # FiniteGroup convention (identity index 0) holds
    fee = f.value((0, 0))
    ident_a = a_grp.class_coords([-x for x in fee])
    order = [ident_a] + [c for c in sorted(index_of) if c != ident_a]
    a_pos = {c: i for i, c in enumerate(order)}
    reps = {a_grp.class_coords(v): v for v in elems}

    def pair_index(acoords, g):
        return a_pos[acoords] * grp.order + g

    n = len(elems) * grp.order
    table = [[0] * n for _ in range(n)]
    pairs = [(c, g) for c in order for g in range(grp.order)]
    for i, (c1, g) in enumerate(pairs):
        v1 = reps[c1]
        for j, (c2, h) in enumerate(pairs):
            v2 = reps[c2]
            prod = [
                x + y + z
                for x, y, z in zip(v1, module.act(g, v2), f.value((g, h)))
            ]
            table[i][j] = pair_index(a_grp.class_coords(prod), grp.mul(g, h))
    ext = FiniteGroup(table, name=f"{module.name}x[{grp.name}]")
    projection = [g for (_, g) in pairs]
    zero_coords = a_grp.class_coords(a_grp.zero_vector())
    section = [pair_index(zero_coords, g) for g in range(grp.order)]
    return ext, projection, section


def extension_equivalence(module, f, g, b):
    """The map (a, x) -> (a + b(x), x) as a table bijection between the
    extensions of f and of g = f + d b.  Returns the permutation or None."""
    ext_f = extension_from_2cocycle(module, f)
    ext_g = extension_from_2cocycle(module, g)
    a_grp = module.underlying
    grp = module.group
    elems = a_grp.elements()
    index_of = a_grp.element_index()
    fee = f.value((0, 0))
    ident_f = a_grp.class_coords([-x for x in fee])
    order_f = [ident_f] + [c for c in sorted(index_of) if c != ident_f]
    gee = g.value((0, 0))
    ident_g = a_grp.class_coords([-x for x in gee])
    order_g = [ident_g] + [c for c in sorted(index_of) if c != ident_g]
    pos_f = {c: i for i, c in enumerate(order_f)}
    pos_g = {c: i for i, c in enumerate(order_g)}
    reps = {a_grp.class_coords(v): v for v in elems}
    perm = [0] * (len(elems) * grp.order)
    for c in order_f:
        for x in range(grp.order):
            src = pos_f[c] * grp.order + x
            v = [p + q for p, q in zip(reps[c], b.value((x,)))]
            perm[src] = pos_g[a_grp.class_coords(v)] * grp.order + x
    # verify it is an isomorphism of the two tables
    tf, tg = ext_f[0].table, ext_g[0].table
    n = len(perm)
    if sorted(perm) != list(range(n)):
        return None
    for i in range(n):
        for j in range(n):
            if perm[tf[i][j]] != tg[perm[i]][perm[j]]:
                return None
    return perm
