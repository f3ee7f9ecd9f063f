"""First-quadrant double complexes, total complexes, spectral sequences.

Conventions: horizontal maps raise p, vertical maps raise q, and every
square anticommutes (d_h d_v + d_v d_h = 0), so the total differential
is plainly d_h + d_v.  Spectral pages are computed from the column
filtration F^p Tot = (columns >= p) as honest subquotient lattices over
Z; no field shortcuts, torsion is carried exactly.

Entries on the outer boundary (p = p_max or q = q_max) of a complex
that was truncated from something larger reflect the truncation: build
one extra row/column beyond the degrees of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abgroups import (
    AbCochainComplex,
    AbMorphism,
    CohomologyGroup,
    FgAbelianGroup,
    MalformedComplexError,
    Subquotient,
    cohomology_at,
)
from .intlinalg import (
    IntMatrix,
    LatticeSolver,
    hermite_basis,
    hstack,
    kernel_basis,
    kernel_mod_moduli,
)

DEFAULT_BOUND = 6


class DoubleComplex:
    """Bigraded terms T^{p,q} with anticommuting d_h, d_v."""

    def __init__(self, p_max, q_max, terms, horizontal, vertical,
                 bound=DEFAULT_BOUND, check=True):
        if p_max > bound or q_max > bound:
            raise ValueError(
                f"bounds ({p_max},{q_max}) exceed limit {bound}; pass bound= to raise it"
            )
        self.p_max = p_max
        self.q_max = q_max
        self._terms = dict(terms)
        self._horizontal = dict(horizontal)
        self._vertical = dict(vertical)
        if check:
            self.validate()

    def term(self, p, q):
        if 0 <= p <= self.p_max and 0 <= q <= self.q_max:
            return self._terms.get((p, q), FgAbelianGroup.zero())
        return FgAbelianGroup.zero()

    def horizontal(self, p, q) -> AbMorphism:
        m = self._horizontal.get((p, q))
        if m is None:
            return AbMorphism.zero(self.term(p, q), self.term(p + 1, q))
        return m

    def vertical(self, p, q) -> AbMorphism:
        m = self._vertical.get((p, q))
        if m is None:
            return AbMorphism.zero(self.term(p, q), self.term(p, q + 1))
        return m

    def validate(self):
        for p in range(self.p_max + 1):
            for q in range(self.q_max + 1):
                dh = self.horizontal(p, q)
                dv = self.vertical(p, q)
                if dh.source != self.term(p, q) or dh.target != self.term(p + 1, q):
                    raise MalformedComplexError(f"horizontal map at {(p, q)} misplaced")
                if dv.source != self.term(p, q) or dv.target != self.term(p, q + 1):
                    raise MalformedComplexError(f"vertical map at {(p, q)} misplaced")
                if not dh.is_well_defined() or not dv.is_well_defined():
                    raise MalformedComplexError(f"map at {(p, q)} not defined on quotients")
                if not self.horizontal(p + 1, q).compose(dh).is_zero_map():
                    raise MalformedComplexError(f"d_h^2 != 0 at {(p, q)}")
                if not self.vertical(p, q + 1).compose(dv).is_zero_map():
                    raise MalformedComplexError(f"d_v^2 != 0 at {(p, q)}")
                anti = self.vertical(p + 1, q).compose(dh).matrix + \
                    self.horizontal(p, q + 1).compose(dv).matrix
                square = AbMorphism(
                    self.term(p, q), self.term(p + 1, q + 1), anti, check=False
                )
                if not square.is_zero_map():
                    raise MalformedComplexError(
                        f"d_h d_v + d_v d_h != 0 at {(p, q)}"
                    )

    def antidiagonal(self, n):
        """Blocks (p, q) with p+q = n, ascending p, nonzero range only."""
        out = []
        for p in range(max(0, n - self.q_max), min(n, self.p_max) + 1):
            out.append((p, n - p))
        return out

    def block_offsets(self, n):
        """Offsets of each (p,q) block inside Tot^n, plus the total rank."""
        offsets = {}
        pos = 0
        for p, q in self.antidiagonal(n):
            offsets[(p, q)] = pos
            pos += self.term(p, q).rank
        return offsets, pos


def total_complex(dc: DoubleComplex) -> AbCochainComplex:
    """Tot^n = direct sum over p+q = n, differential d_h + d_v."""
    n_top = dc.p_max + dc.q_max
    terms = []
    for n in range(n_top + 1):
        terms.append(
            FgAbelianGroup.direct_sum(*[dc.term(p, q) for p, q in dc.antidiagonal(n)])
        )
    diffs = []
    for n in range(n_top):
        src_off, src_rank = dc.block_offsets(n)
        dst_off, dst_rank = dc.block_offsets(n + 1)
        rows = [[0] * src_rank for _ in range(dst_rank)]

        def write(mat, r0, c0):
            for i in range(mat.nrows):
                row = mat.row(i)
                for j in range(mat.ncols):
                    if row[j]:
                        rows[r0 + i][c0 + j] = row[j]

        for p, q in dc.antidiagonal(n):
            c0 = src_off[(p, q)]
            if (p + 1, q) in dst_off:
                write(dc.horizontal(p, q).matrix, dst_off[(p + 1, q)], c0)
            if (p, q + 1) in dst_off:
                write(dc.vertical(p, q).matrix, dst_off[(p, q + 1)], c0)
        diffs.append(
            AbMorphism(terms[n], terms[n + 1], IntMatrix._raw(rows, src_rank), check=False)
        )
    return AbCochainComplex(terms, diffs, check=False)


class _Filtration:
    """Column-filtration helper for one double complex."""

    def __init__(self, dc: DoubleComplex):
        self.dc = dc
        self.tot = total_complex(dc)
        self._zr_cache = {}

    def offsets(self, n):
        return self.dc.block_offsets(n)

    def filtration_start(self, n, p):
        """First Tot^n coordinate belonging to columns >= p."""
        offsets, rank = self.offsets(n)
        best = rank
        for (pp, qq), off in offsets.items():
            if pp >= p:
                best = min(best, off)
        return best

    def approx_cycles(self, p, q, r) -> IntMatrix:
        """Lattice Z_r^{p,q}: x in F^p Tot^{p+q} with d x in F^{p+r} + relations.

        Returned as an HNF basis in full Tot^{p+q} coordinates.
        """
        key = (p, q, r)
        if key in self._zr_cache:
            return self._zr_cache[key]
        n = p + q
        offsets, rank = self.offsets(n)
        start = self.filtration_start(n, p)
        width = rank - start
        if width <= 0:
            out = IntMatrix.zeros(rank, 0)
            self._zr_cache[key] = out
            return out
        d = self.tot.differential(n)
        dst_off, _ = self.offsets(n + 1)
        rows = []
        mods = []
        for (pp, qq), off in sorted(dst_off.items()):
            if pp < p or pp >= p + r:
                continue
            term = self.dc.term(pp, qq)
            dec = term.decomposition
            block = d.matrix.take_rows(range(off, off + term.rank)).take_columns(
                range(start, rank)
            )
            restricted = dec.proj * block
            for i in range(restricted.nrows):
                rows.append(list(restricted.row(i)))
                mods.append(dec.mods[i])
        if rows:
            w = IntMatrix(rows, ncols=width)
            core = kernel_mod_moduli(w, mods)
        else:
            core = IntMatrix.identity(width)
        padded = [[0] * core.ncols for _ in range(start)]
        padded += core.to_lists()
        out = hermite_basis(IntMatrix(padded, ncols=core.ncols))
        self._zr_cache[key] = out
        return out

    def image_part(self, p, q, r) -> IntMatrix:
        """(d Z_{r-1}^{p-r+1, q+r-2} + relations) intersected with F^p."""
        n = p + q
        offsets, rank = self.offsets(n)
        start = self.filtration_start(n, p)
        gens = []
        if n >= 1:
            # p - r + 1 may be negative: F^{p-r+1} is then all of Tot^{n-1},
            # but the condition "d x lands in F^p" stays and matters.
            z_prev = self.approx_cycles(p - r + 1, q + r - 2, r - 1)
            d = self.tot.differential(n - 1)
            img = d.matrix * z_prev if z_prev.ncols else IntMatrix.zeros(rank, 0)
            gens.append(img)
        gens.append(self.tot.term(n).lattice.basis)
        combined = hstack(*gens) if gens else IntMatrix.zeros(rank, 0)
        if combined.ncols == 0:
            return IntMatrix.zeros(rank, 0)
        # intersect the span with the coordinate subspace F^p
        head = combined.take_rows(range(start))
        coeffs = kernel_basis(head) if start else IntMatrix.identity(combined.ncols)
        return hermite_basis(combined * coeffs)

    def entry(self, p, q, r) -> Subquotient:
        n = p + q
        _, rank = self.offsets(n)
        numer = self.approx_cycles(p, q, r)
        denom_parts = [self.image_part(p, q, r), self.approx_cycles(p + 1, q - 1, r - 1)]
        denom = hermite_basis(hstack(*denom_parts))
        return Subquotient(rank, numer, denom)

    def reduce_to_filtration(self, n, p, vec):
        """Subtract a relation-lattice vector so blocks < p vanish exactly."""
        v = list(vec)
        offsets, _ = self.offsets(n)
        for (pp, qq), off in sorted(offsets.items()):
            if pp >= p:
                continue
            term = self.dc.term(pp, qq)
            if term.rank == 0:
                continue
            block = v[off : off + term.rank]
            coords = term.lattice.coordinates(block)
            if coords is None:
                raise MalformedComplexError(
                    "vector not reducible into the filtration"
                )
            basis = term.lattice.basis
            for j, c in enumerate(coords):
                if c:
                    for i in range(term.rank):
                        bij = basis.entry(i, j)
                        if bij:
                            v[off + i] -= c * bij
        return v


@dataclass
class SpectralPage:
    """One page E_r with entry subquotients and d_r data."""

    r: int
    entries: dict = field(default_factory=dict)
    differentials: dict = field(default_factory=dict)

    def structure(self, p, q):
        e = self.entries.get((p, q))
        return e.structure() if e is not None else (0, [])

    def all_differentials_zero(self):
        for m in self.differentials.values():
            if not m.is_zero_map():
                return False
        return True


def spectral_sequence(dc: DoubleComplex, r_max):
    """Pages E_1 .. E_{r_max} of the column-filtration spectral sequence."""
    filt = _Filtration(dc)
    pages = []
    for r in range(1, r_max + 1):
        page = SpectralPage(r=r)
        for p in range(dc.p_max + 1):
            for q in range(dc.q_max + 1):
                page.entries[(p, q)] = filt.entry(p, q, r)
        for p in range(dc.p_max + 1):
            for q in range(dc.q_max + 1):
                src = page.entries[(p, q)]
                tp, tq = p + r, q - r + 1
                if tq < 0 or tp > dc.p_max:
                    continue
                dst = page.entries.get((tp, tq))
                if dst is None:
                    continue
                n = p + q
                d = filt.tot.differential(n)
                cols = []
                for rep in src.representatives():
                    img = filt.reduce_to_filtration(n + 1, tp, d(rep))
                    cols.append(list(dst.class_of(img)))
                mat = (
                    IntMatrix.from_columns(cols, len(dst.mods))
                    if cols
                    else IntMatrix.zeros(len(dst.mods), 0)
                )
                page.differentials[(p, q)] = AbMorphism(
                    src.as_group(), dst.as_group(), mat, check=False
                )
        pages.append(page)
    return pages


def infinity_page(dc: DoubleComplex) -> SpectralPage:
    """The stable page (differentials vanish beyond max(p_max, q_max)+1)."""
    r = dc.p_max + dc.q_max + 2
    filt = _Filtration(dc)
    page = SpectralPage(r=r)
    for p in range(dc.p_max + 1):
        for q in range(dc.q_max + 1):
            page.entries[(p, q)] = filt.entry(p, q, r)
    return page


def total_cohomology_graded(dc: DoubleComplex, n):
    """gr^p H^n(Tot) for the column filtration, as {p: (free, torsion)}."""
    filt = _Filtration(dc)
    tot = filt.tot
    term = tot.term(n)
    d_out = tot.differential(n)
    d_in = tot.differential(n - 1)
    dec_target = tot.term(n + 1).decomposition
    cycles = kernel_mod_moduli(dec_target.proj * d_out.matrix, dec_target.mods)
    boundaries = hstack(d_in.matrix, term.lattice.basis)
    out = {}
    for p in range(dc.p_max + 2):
        start = filt.filtration_start(n, p)

        def cut(lat, s):
            head = lat.take_rows(range(s))
            coeffs = kernel_basis(head) if s else IntMatrix.identity(lat.ncols)
            return hermite_basis(lat * coeffs)

        znum = cut(cycles, start)
        zden = cut(cycles, filt.filtration_start(n, p + 1))
        numer = hermite_basis(hstack(znum, boundaries))
        denom = hermite_basis(hstack(zden, boundaries))
        sq = Subquotient(term.rank, numer, denom)
        out[p] = sq.structure()
    return out


def convergence_report(dc: DoubleComplex):
    """Compare E_infinity entries against the graded pieces of H(Tot).

    For each total degree the antidiagonal of stable entries must equal,
    piece by piece, the column-filtration graded of the total cohomology.
    """
    einf = infinity_page(dc)
    tot = total_complex(dc)
    report = {"ok": True, "degrees": []}
    for n in range(dc.p_max + dc.q_max + 1):
        gr = total_cohomology_graded(dc, n)
        entry = {"n": n, "ok": True, "pieces": []}
        h = cohomology_at(tot, n)
        entry["total"] = {"free_rank": h.free_rank, "torsion": list(h.torsion)}
        for p, q in dc.antidiagonal(n):
            got = einf.structure(p, q)
            want = gr.get(p, (0, []))
            piece_ok = got[0] == want[0] and list(got[1]) == list(want[1])
            entry["pieces"].append(
                {"p": p, "q": q,
                 "stable": {"free_rank": got[0], "torsion": list(got[1])},
                 "graded": {"free_rank": want[0], "torsion": list(want[1])},
                 "ok": piece_ok}
            )
            entry["ok"] = entry["ok"] and piece_ok
        free_sum = sum(pc["stable"]["free_rank"] for pc in entry["pieces"])
        entry["ok"] = entry["ok"] and free_sum == h.free_rank
        report["degrees"].append(entry)
        report["ok"] = report["ok"] and entry["ok"]
    return report


def page_turn_check(dc: DoubleComplex, r):
    """Recompute E_{r+1} as homology of (E_r, d_r) and compare structures."""
    pages = spectral_sequence(dc, r + 1)
    er, ernext = pages[r - 1], pages[r]
    ok = True
    details = []
    for p in range(dc.p_max + 1):
        for q in range(dc.q_max + 1):
            out_map = er.differentials.get((p, q))
            src = er.entries[(p, q)]
            group = src.as_group()
            if out_map is None:
                out_map = AbMorphism.zero(group, FgAbelianGroup.zero())
            in_map = er.differentials.get((p - r, q + r - 1))
            dec = out_map.target.decomposition
            cycles = kernel_mod_moduli(dec.proj * out_map.matrix, dec.mods)
            bound = (
                in_map.matrix if in_map is not None else IntMatrix.zeros(group.rank, 0)
            )
            sq = Subquotient(
                group.rank,
                hermite_basis(hstack(cycles, group.lattice.basis)),
                hermite_basis(hstack(bound, group.lattice.basis)),
            )
            want = ernext.entries[(p, q)].structure()
            got = sq.structure()
            agree = got[0] == want[0] and list(got[1]) == list(want[1])
            ok = ok and agree
            details.append({"p": p, "q": q, "ok": agree,
                            "homology_of_page": got, "filtration_page": want})
    return {"ok": ok, "entries": details}


def edge_homomorphism(dc: DoubleComplex, n):
    """Edge map H^n(Tot) -> E_1^{1,n-1}; requires E_1^{0,q} = 0 for q >= 1.

    Returns (morphism, h_total, e1_entry).  A class is represented by a
    cocycle with vanishing column-0 block (possible by the precondition)
    whose column-1 block is then read off on the E_1 page.
    """
    if n < 1:
        raise ValueError("edge map needs n >= 1")
    filt = _Filtration(dc)
    for q in range(1, dc.q_max + 1):
        e = filt.entry(0, q, 1)
        if e.structure() != (0, []):
            raise MalformedComplexError(
                f"edge precondition fails: E_1^(0,{q}) is nonzero"
            )
    tot = filt.tot
    h = cohomology_at(tot, n)
    target = filt.entry(1, n - 1, 1)
    offsets, rank = filt.offsets(n)
    start1 = filt.filtration_start(n, 1)
    d_in = tot.differential(n - 1)
    l_basis = tot.term(n).lattice.basis
    head = hstack(d_in.matrix, l_basis).take_rows(range(start1))
    solver = LatticeSolver(head) if start1 else None
    cols = []
    for rep in h.representatives():
        v = list(rep)
        if solver is not None:
            sol = solver.solve(v[:start1])
            if sol is None:
                raise MalformedComplexError(
                    "cannot push representative into filtration degree 1"
                )
            w = d_in.matrix.apply(sol[: d_in.matrix.ncols])
            lpart = l_basis.apply(sol[d_in.matrix.ncols :]) if l_basis.ncols else [0] * rank
            v = [a - b - c for a, b, c in zip(v, w, lpart)]
        cols.append(list(target.class_of(v)))
    mat = (
        IntMatrix.from_columns(cols, len(target.mods))
        if cols
        else IntMatrix.zeros(len(target.mods), 0)
    )
    morphism = AbMorphism(h.as_group(), target.as_group(), mat, check=False)
    return morphism, h, target
