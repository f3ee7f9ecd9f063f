"""Finitely generated abelian groups, their morphisms and cochain complexes.

A group is presented as Z^rank modulo the column span of an integer
relation matrix.  Elements are integer vectors in generator coordinates;
two vectors are equal iff their difference lies in the relation lattice.
Every element has a canonical normal form (Hermite reduction against the
relation lattice), which makes all downstream output deterministic.

Cohomology of a complex of presented groups is computed by forming the
two-row double complex (relation generators in one row, group generators
in the other, vertical map the relation inclusion) and taking cohomology
of its total complex, which is a complex of free groups; see
``cohomology_at``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import (
    IntMatrix,
    LatticeSolver,
    SubgroupLattice,
    hermite_basis,
    hstack,
    kernel_basis,
    kernel_mod_moduli,
    smith_normal_form,
)


class MalformedComplexError(ValueError):
    """A cochain complex violated d ∘ d = 0 or exactness preconditions."""


class _Decomposition:
    """Cyclic-coordinate decomposition of Z^rank / lattice.

    proj maps a generator vector to its cyclic coordinates; coordinate i
    is taken mod mods[i] (0 means a free Z coordinate).  section maps
    coordinates back to generator vectors.
    """

    __slots__ = ("proj", "mods", "section")

    def __init__(self, rank, lattice_basis: IntMatrix):
        s = smith_normal_form(lattice_basis)
        diag = list(s.D.diagonal())
        npiv = len([d for d in diag if d])
        keep = []
        mods = []
        for i in range(rank):
            d = diag[i] if i < len(diag) else 0
            if i < npiv and d == 1:
                continue
            keep.append(i)
            mods.append(d if i < npiv else 0)
        self.proj = s.U.take_rows(keep)
        self.mods = tuple(mods)
        self.section = s.Uinv.take_columns(keep)

    def coords(self, v):
        raw = self.proj.apply(v)
        return tuple(
            (x % d) if d else x for x, d in zip(raw, self.mods)
        )


class FgAbelianGroup:
    """Z^rank modulo the column span of ``relations``."""

    __slots__ = ("rank", "relations", "_lattice", "_decomp", "_elements")

    def __init__(self, rank, relations: IntMatrix | None = None):
        self.rank = rank
        if relations is None:
            relations = IntMatrix.zeros(rank, 0)
        if relations.nrows != rank:
            raise ValueError("relation columns must have length rank")
        self.relations = relations
        self._lattice = None
        self._decomp = None
        self._elements = None

    @classmethod
    def free(cls, rank):
        return cls(rank)

    @classmethod
    def zero(cls):
        return cls(0)

    @classmethod
    def cyclic(cls, m):
        return cls(1, IntMatrix([[m]]))

    @classmethod
    def from_invariants(cls, invariants):
        """Group with one generator per entry; 0 entries give Z factors."""
        n = len(invariants)
        cols = []
        for i, d in enumerate(invariants):
            if d:
                col = [0] * n
                col[i] = d
                cols.append(col)
        rel = IntMatrix.from_columns(cols, n) if cols else IntMatrix.zeros(n, 0)
        return cls(n, rel)

    @classmethod
    def direct_sum(cls, *groups):
        from .intlinalg import block_diag

        rank = sum(g.rank for g in groups)
        rel = block_diag(*[g.relations for g in groups]) if groups else IntMatrix.zeros(0, 0)
        return cls(rank, rel)

    # -- lattice plumbing ------------------------------------------------

    @property
    def lattice(self) -> SubgroupLattice:
        if self._lattice is None:
            self._lattice = SubgroupLattice(self.rank, self.relations)
        return self._lattice

    @property
    def decomposition(self) -> _Decomposition:
        if self._decomp is None:
            self._decomp = _Decomposition(self.rank, self.lattice.basis)
        return self._decomp

    def zero_vector(self):
        return (0,) * self.rank

    def normal_form(self, v):
        """Canonical representative of the class of v."""
        if len(v) != self.rank:
            raise ValueError("vector length != rank")
        basis = self.lattice.basis
        v = [int(x) for x in v]
        col_pivot_rows = []
        for j in range(basis.ncols):
            i = 0
            while basis.entry(i, j) == 0:
                i += 1
            col_pivot_rows.append(i)
        for j, r in enumerate(col_pivot_rows):
            p = basis.entry(r, j)
            q = v[r] // p
            if q:
                for i in range(r, self.rank):
                    bij = basis.entry(i, j)
                    if bij:
                        v[i] -= q * bij
        return tuple(v)

    def is_zero_element(self, v):
        return all(x == 0 for x in self.normal_form(v))

    def same_element(self, v, w):
        return self.is_zero_element([a - b for a, b in zip(v, w)])

    def class_coords(self, v):
        """Canonical cyclic coordinates of the class of v."""
        return self.decomposition.coords(v)

    def structure(self):
        """(free_rank, invariant factors > 1, divisibility order)."""
        mods = self.decomposition.mods
        return len([d for d in mods if d == 0]), [d for d in mods if d]

    def is_finite(self):
        return all(d for d in self.decomposition.mods)

    def order(self):
        if not self.is_finite():
            return None
        n = 1
        for d in self.decomposition.mods:
            n *= d
        return n

    def elements(self):
        """Canonical representative vectors; finite groups only."""
        if not self.is_finite():
            raise ValueError("infinite group")
        if self._elements is None:
            dec = self.decomposition
            coords = [()]
            for d in dec.mods:
                coords = [c + (x,) for c in coords for x in range(d)]
            elems = []
            for c in coords:
                v = dec.section.apply(c)
                elems.append(self.normal_form(v))
            self._elements = elems
        return list(self._elements)

    def element_index(self):
        """Map canonical class coordinates -> position in elements()."""
        return {self.class_coords(v): i for i, v in enumerate(self.elements())}

    def __eq__(self, other):
        if not isinstance(other, FgAbelianGroup):
            return NotImplemented
        return self.rank == other.rank and self.lattice.basis == other.lattice.basis

    def __hash__(self):
        return hash((self.rank, self.lattice.basis))

    def __repr__(self):
        free, tors = self.structure()
        parts = ["Z"] * free + [f"C{d}" for d in tors]
        return "FgAbelianGroup<{}>".format(" x ".join(parts) if parts else "0")


class AbMorphism:
    """Morphism of presented groups, given by a matrix on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix: IntMatrix, check=True):
        if matrix.nrows != target.rank or matrix.ncols != source.rank:
            raise ValueError("matrix shape does not match source/target ranks")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.is_well_defined():
            raise ValueError("matrix does not map relations into relations")

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, IntMatrix.zeros(target.rank, source.rank), check=False)

    @classmethod
    def identity(cls, group):
        return cls(group, group, IntMatrix.identity(group.rank), check=False)

    def is_well_defined(self):
        basis = self.source.lattice.basis
        for j in range(basis.ncols):
            if not self.target.lattice.contains(self.matrix.apply(basis.column(j))):
                return False
        return True

    def __call__(self, v):
        return self.matrix.apply(v)

    def compose(self, inner: "AbMorphism") -> "AbMorphism":
        """self after inner."""
        if inner.target is not self.source and inner.target != self.source:
            raise ValueError("composition mismatch")
        return AbMorphism(inner.source, self.target, self.matrix * inner.matrix, check=False)

    def is_zero_map(self):
        for j in range(self.matrix.ncols):
            if not self.target.lattice.contains(self.matrix.column(j)):
                return False
        return True

    def quotient_kernel_lattice(self) -> IntMatrix:
        """Basis of {v : self(v) == 0 in the target quotient}."""
        dec = self.target.decomposition
        return kernel_mod_moduli(dec.proj * self.matrix, dec.mods)

    def is_injective_on_quotients(self):
        k = self.quotient_kernel_lattice()
        return all(
            self.source.lattice.contains(k.column(j)) for j in range(k.ncols)
        )

    def is_surjective_on_quotients(self):
        image = hstack(self.matrix, self.target.lattice.basis)
        h = hermite_basis(image)
        return h == IntMatrix.identity(self.target.rank)

    def is_isomorphism(self):
        return self.is_injective_on_quotients() and self.is_surjective_on_quotients()

    def equals(self, other: "AbMorphism"):
        diff = self.matrix - other.matrix
        return all(
            self.target.lattice.contains(diff.column(j)) for j in range(diff.ncols)
        )

    def __repr__(self):
        return f"AbMorphism({self.source!r} -> {self.target!r})"


class AbCochainComplex:
    """Terms indexed 0..n_max with differentials raising degree by one.

    Degrees outside the range behave as zero groups.
    """

    def __init__(self, terms, differentials, check=True):
        if len(differentials) != max(len(terms) - 1, 0):
            raise MalformedComplexError("need one differential per adjacent pair")
        self.terms = list(terms)
        self.differentials = list(differentials)
        if check:
            self.validate()

    @property
    def n_max(self):
        return len(self.terms) - 1

    def term(self, n):
        if 0 <= n < len(self.terms):
            return self.terms[n]
        return FgAbelianGroup.zero()

    def differential(self, n):
        if 0 <= n < len(self.differentials):
            return self.differentials[n]
        return AbMorphism.zero(self.term(n), self.term(n + 1))

    def validate(self):
        for n, d in enumerate(self.differentials):
            if d.source != self.terms[n] or d.target != self.terms[n + 1]:
                raise MalformedComplexError(f"differential {n} endpoints wrong")
            if not d.is_well_defined():
                raise MalformedComplexError(f"differential {n} not defined on quotients")
        for n in range(len(self.differentials) - 1):
            comp = self.differentials[n + 1].compose(self.differentials[n])
            if not comp.is_zero_map():
                raise MalformedComplexError(f"d² != 0 at degree {n}")


class Subquotient:
    """Z lattice / B lattice inside a free ambient Z^ambient.

    Carries canonical structure data, representatives and a class_of map.
    """

    __slots__ = ("ambient", "numerator", "denominator", "_snf", "_solver", "mods")

    def __init__(self, ambient, numerator: IntMatrix, denominator: IntMatrix):
        self.ambient = ambient
        self.numerator = hermite_basis(numerator)
        self.denominator = hermite_basis(denominator)
        self._solver = LatticeSolver(self.numerator)
        coords = []
        for j in range(self.denominator.ncols):
            c = self._solver.solve(self.denominator.column(j))
            if c is None:
                raise ValueError("denominator lattice not inside numerator lattice")
            coords.append(list(c))
        z = self.numerator.ncols
        x = IntMatrix.from_columns(coords, z) if coords else IntMatrix.zeros(z, 0)
        s = smith_normal_form(x)
        diag = list(s.D.diagonal())
        npiv = len([d for d in diag if d])
        keep = []
        mods = []
        for i in range(z):
            d = diag[i] if i < len(diag) else 0
            if i < npiv and d == 1:
                continue
            keep.append(i)
            mods.append(d if i < npiv else 0)
        self._snf = (s.U.take_rows(keep), s.Uinv.take_columns(keep))
        self.mods = tuple(mods)

    @property
    def torsion(self):
        return [d for d in self.mods if d]

    @property
    def free_rank(self):
        return len([d for d in self.mods if d == 0])

    def structure(self):
        return self.free_rank, self.torsion

    def representatives(self):
        """One ambient vector per cyclic coordinate, canonical order."""
        proj, section = self._snf
        reps = []
        for j in range(len(self.mods)):
            xi = section.column(j)
            reps.append(self.numerator.apply(xi))
        return reps

    def contains(self, v):
        return self._solver.contains(v)

    def class_of(self, v):
        xi = self._solver.solve(v)
        if xi is None:
            raise ValueError("vector is not in the numerator lattice")
        proj, _ = self._snf
        raw = proj.apply(xi)
        return tuple((x % d) if d else x for x, d in zip(raw, self.mods))

    def is_zero_class(self, v):
        return all(x == 0 for x in self.class_of(v))

    def as_group(self) -> FgAbelianGroup:
        return FgAbelianGroup.from_invariants(list(self.mods))


class CohomologyGroup:
    """H^n of a complex of presented groups, with representative cocycles."""

    __slots__ = ("degree", "term", "subquotient")

    def __init__(self, degree, term: FgAbelianGroup, subquotient: Subquotient):
        self.degree = degree
        self.term = term
        self.subquotient = subquotient

    @property
    def free_rank(self):
        return self.subquotient.free_rank

    @property
    def torsion(self):
        return self.subquotient.torsion

    def structure(self):
        return self.subquotient.structure()

    def representatives(self):
        return self.subquotient.representatives()

    def is_cocycle(self, v):
        return self.subquotient.contains(v)

    def class_of(self, v):
        return self.subquotient.class_of(v)

    def is_zero_class(self, v):
        return self.subquotient.is_zero_class(v)

    def same_class(self, v, w):
        return self.is_zero_class([a - b for a, b in zip(v, w)])

    def as_group(self):
        return self.subquotient.as_group()

    def __repr__(self):
        free, tors = self.structure()
        parts = ["Z"] * free + [f"C{d}" for d in tors]
        return "H^{}<{}>".format(self.degree, " x ".join(parts) if parts else "0")


def _two_row_total(complex_: AbCochainComplex, lo, hi):
    """Total complex of the two-row double complex of a window [lo, hi].

    Column p holds the relation generators of term lo+p in row 0 and the
    group generators in row 1; the vertical map is the relation lattice
    inclusion, horizontal maps are the differentials (generators row)
    and their lifts to relation coordinates, negated so squares
    anticommute.  When differentials compose to zero only modulo
    relations, a correction block (generators of column p into relation
    coordinates of column p+2, solving R C = -D D) is added to the total
    differential; it vanishes for exactly composing differentials and
    restores d_tot^2 = 0 on the nose in general.
    """
    from .double_complex import DoubleComplex, total_complex

    cols = list(range(lo, hi + 1))
    gen_terms = {}
    rel_terms = {}
    rel_bases = {}
    rel_solvers = {}
    for p, n in enumerate(cols):
        term = complex_.term(n)
        basis = term.lattice.basis
        gen_terms[p] = FgAbelianGroup.free(term.rank)
        rel_terms[p] = FgAbelianGroup.free(basis.ncols)
        rel_bases[p] = basis
        rel_solvers[p] = LatticeSolver(basis)
    terms = {}
    vert = {}
    horiz = {}
    for p in range(len(cols)):
        terms[(p, 0)] = rel_terms[p]
        terms[(p, 1)] = gen_terms[p]
        vert[(p, 0)] = AbMorphism(rel_terms[p], gen_terms[p], rel_bases[p], check=False)
    for p in range(len(cols) - 1):
        d = complex_.differential(cols[p])
        horiz[(p, 1)] = AbMorphism(gen_terms[p], gen_terms[p + 1], d.matrix, check=False)
        # lift of d to relation coordinates: R_{p+1} S = D R_p, negated
        images = d.matrix * rel_bases[p]
        scols = []
        for j in range(rel_bases[p].ncols):
            s = rel_solvers[p + 1].solve(images.column(j))
            if s is None:
                raise MalformedComplexError(
                    f"differential {cols[p]} does not preserve relations"
                )
            scols.append([-x for x in s])
        smat = (
            IntMatrix.from_columns(scols, rel_bases[p + 1].ncols)
            if scols
            else IntMatrix.zeros(rel_bases[p + 1].ncols, 0)
        )
        horiz[(p, 0)] = AbMorphism(rel_terms[p], rel_terms[p + 1], smat, check=False)
    dc = DoubleComplex(
        p_max=len(cols) - 1, q_max=1, terms=terms, horizontal=horiz,
        vertical=vert, check=False,
    )
    tot = total_complex(dc)
    # correction blocks for lax (mod-relations) composability
    patched = list(tot.differentials)
    for p in range(len(cols) - 2):
        dd = complex_.differential(cols[p + 1]).matrix * complex_.differential(cols[p]).matrix
        if dd.is_zero():
            continue
        ccols = []
        for j in range(dd.ncols):
            s = rel_solvers[p + 2].solve(dd.column(j))
            if s is None:
                raise MalformedComplexError(
                    f"d^2 at degree {cols[p]} does not vanish modulo relations"
                )
            ccols.append([-x for x in s])
        cmat = IntMatrix.from_columns(ccols, rel_bases[p + 2].ncols)
        # generator block of column p sits in Tot^{p+1}; relation block of
        # column p+2 sits in Tot^{p+2}
        m = p + 1
        src_off, src_rank = dc.block_offsets(m)
        dst_off, dst_rank = dc.block_offsets(m + 1)
        rows = [list(r) for r in patched[m].matrix.rows]
        r0 = dst_off[(p + 2, 0)]
        c0 = src_off[(p, 1)]
        for i in range(cmat.nrows):
            crow = cmat.row(i)
            for j in range(cmat.ncols):
                if crow[j]:
                    rows[r0 + i][c0 + j] += crow[j]
        patched[m] = AbMorphism(
            patched[m].source, patched[m].target,
            IntMatrix._raw(rows, src_rank), check=False,
        )
    return AbCochainComplex(tot.terms, patched, check=False)


def cohomology_at(complex_: AbCochainComplex, n) -> CohomologyGroup:
    """H^n = ker d^n / im d^{n-1} of a complex of presented groups.

    Out-of-range degrees give the zero group.  Computed through the
    two-row total complex so that presented and free complexes share one
    code path.
    """
    term = complex_.term(n)
    if n < 0 or n > complex_.n_max:
        return CohomologyGroup(
            n, term, Subquotient(0, IntMatrix.zeros(0, 0), IntMatrix.zeros(0, 0))
        )
    lo = max(0, n - 1)
    hi = min(complex_.n_max, n + 1)
    tot = _two_row_total(complex_, lo, hi)
    m = n - lo + 1
    d_out = tot.differential(m)
    d_in = tot.differential(m - 1)
    cycles = kernel_basis(d_out.matrix)
    boundaries = d_in.matrix
    # blocks of Tot^m are ordered by ascending column: generators of term n
    # first (column n-lo, row 1), relation coordinates of term n+1 second
    rank = term.rank
    z_term = hermite_basis(cycles.take_rows(range(rank)))
    b_term = hermite_basis(boundaries.take_rows(range(rank)))
    return CohomologyGroup(n, term, Subquotient(rank, z_term, b_term))


@dataclass(frozen=True)
class SesOfComplexes:
    """Degreewise short exact sequence of cochain complexes."""

    sub: AbCochainComplex
    total: AbCochainComplex
    quotient: AbCochainComplex
    inclusions: tuple
    projections: tuple

    @classmethod
    def build(cls, sub, total, quotient, inclusions, projections, check=True):
        ses = cls(sub, total, quotient, tuple(inclusions), tuple(projections))
        if check:
            ses.validate()
        return ses

    def validate(self):
        n_max = max(self.sub.n_max, self.total.n_max, self.quotient.n_max)
        if len(self.inclusions) < n_max + 1 or len(self.projections) < n_max + 1:
            raise MalformedComplexError("need inclusion/projection per degree")
        for n in range(n_max + 1):
            iota, pi = self.inclusions[n], self.projections[n]
            if not iota.is_injective_on_quotients():
                raise MalformedComplexError(f"inclusion at degree {n} not injective")
            if not pi.is_surjective_on_quotients():
                raise MalformedComplexError(f"projection at degree {n} not surjective")
            if not pi.compose(iota).is_zero_map():
                raise MalformedComplexError(f"composite not zero at degree {n}")
            # exactness in the middle: ker(pi) inside im(iota)
            k = pi.quotient_kernel_lattice()
            witness_solver = LatticeSolver(
                hstack(iota.matrix, self.total.term(n).lattice.basis)
            )
            for j in range(k.ncols):
                if witness_solver.solve(k.column(j)) is None:
                    raise MalformedComplexError(
                        f"kernel exceeds image at degree {n}"
                    )
            # chain map squares
            if n < n_max:
                left = self.total.differential(n).compose(iota)
                right = self.inclusions[n + 1].compose(self.sub.differential(n))
                if not left.equals(right):
                    raise MalformedComplexError(f"inclusion square {n} fails")
                left = self.quotient.differential(n).compose(pi)
                right = self.projections[n + 1].compose(self.total.differential(n))
                if not left.equals(right):
                    raise MalformedComplexError(f"projection square {n} fails")


def induced_map(h_src: CohomologyGroup, h_dst: CohomologyGroup, phi: AbMorphism):
    """Map on cohomology induced by a chain map component."""
    cols = []
    for rep in h_src.representatives():
        cols.append(list(h_dst.class_of(phi(rep))))
    mat = (
        IntMatrix.from_columns(cols, len(h_dst.subquotient.mods))
        if cols
        else IntMatrix.zeros(len(h_dst.subquotient.mods), 0)
    )
    return AbMorphism(h_src.as_group(), h_dst.as_group(), mat, check=False)


def connecting_homomorphism(
    ses: SesOfComplexes, n, preimage_shift=None
) -> AbMorphism:
    """Snake-lemma connecting map H^n(quotient) -> H^{n+1}(sub).

    The preimage of a representative under the projection is chosen
    canonically (Hermite solve); ``preimage_shift(j)`` may add any vector
    that projects to zero, for choice-independence testing.
    """
    hq = cohomology_at(ses.quotient, n)
    hs = cohomology_at(ses.sub, n + 1)
    if n + 1 > ses.sub.n_max:
        return AbMorphism.zero(hq.as_group(), hs.as_group())
    pi = ses.projections[n]
    iota = ses.inclusions[n + 1] if n + 1 < len(ses.inclusions) else None
    d_total = ses.total.differential(n)
    pre_solver = LatticeSolver(
        hstack(pi.matrix, ses.quotient.term(n).lattice.basis)
    )
    cols = []
    for j, z in enumerate(hq.representatives()):
        sol = pre_solver.solve(z)
        if sol is None:
            raise MalformedComplexError("projection not surjective on a cocycle")
        b = list(sol[: ses.total.term(n).rank])
        if preimage_shift is not None:
            shift = preimage_shift(j)
            if shift is not None:
                if not ses.quotient.term(n).is_zero_element(pi(shift)):
                    raise ValueError("preimage shift must project to zero")
                b = [x + y for x, y in zip(b, shift)]
        db = d_total(b)
        if iota is None:
            raise MalformedComplexError("missing inclusion at degree n+1")
        back_solver = LatticeSolver(
            hstack(iota.matrix, ses.total.term(n + 1).lattice.basis)
        )
        sol2 = back_solver.solve(db)
        if sol2 is None:
            raise MalformedComplexError(
                "snake pullback failed: input sequence not exact"
            )
        a = sol2[: ses.sub.term(n + 1).rank]
        cols.append(list(hs.class_of(a)))
    mat = (
        IntMatrix.from_columns(cols, len(hs.subquotient.mods))
        if cols
        else IntMatrix.zeros(len(hs.subquotient.mods), 0)
    )
    return AbMorphism(hq.as_group(), hs.as_group(), mat, check=False)


def long_exact_sequence(ses: SesOfComplexes, n_max):
    """[(H, map to the next node), ...] for
    H^0(A) -> H^0(B) -> H^0(C) -> H^1(A) -> ... -> H^{n_max}(C) -> H^{n_max+1}(A).
    """
    nodes = []
    for n in range(n_max + 1):
        ha = cohomology_at(ses.sub, n)
        hb = cohomology_at(ses.total, n)
        hc = cohomology_at(ses.quotient, n)
        nodes.append((ha, induced_map(ha, hb, ses.inclusions[n])))
        nodes.append((hb, induced_map(hb, hc, ses.projections[n])))
        nodes.append((hc, connecting_homomorphism(ses, n)))
    nodes.append((cohomology_at(ses.sub, n_max + 1), None))
    return nodes


def verify_exactness(nodes):
    """Check ker = im at each interior node of an alternating sequence.

    ``nodes`` is a list of (group-like, AbMorphism-or-None) pairs as
    produced by long_exact_sequence.  Returns a report dict with one
    entry per interior node and a failure witness where applicable.
    """
    report = []
    ok = True
    for i in range(1, len(nodes) - 1):
        fin = nodes[i - 1][1]
        fout = nodes[i][1]
        if fin is None or fout is None:
            continue
        entry = {"node": i, "exact": True, "witness": None}
        comp = fout.compose(fin)
        if not comp.is_zero_map():
            entry["exact"] = False
            entry["witness"] = "composite is nonzero"
        else:
            k = fout.quotient_kernel_lattice()
            solver = LatticeSolver(
                hstack(fin.matrix, fin.target.lattice.basis)
            )
            for j in range(k.ncols):
                if solver.solve(k.column(j)) is None:
                    entry["exact"] = False
                    entry["witness"] = list(k.column(j))
                    break
        ok = ok and entry["exact"]
        report.append(entry)
    return {"ok": ok, "nodes": report}
