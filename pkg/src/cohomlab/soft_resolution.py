"""Coinduced (soft) modules, their resolutions, and invariants cohomology.

For a finite group the module of all functions G -> A, with the action
(g.f)(x) = g.(f(g^-1 x)), has vanishing higher cohomology; it plays the
role the function-space modules play for topological groups, with the
contractible mediator dropped (it has no finite avatar, and acyclicity
is verified here rather than assumed).  Iterating functions-mod-constants
produces a resolution

    A -> E(A) -> E(B A) -> E(B^2 A) -> ...   (B X = E(X)/constants)

whose invariants complex computes a second cohomology theory; the
package's comparison machinery identifies it with bar cohomology.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroups import (
    AbCochainComplex,
    AbMorphism,
    CohomologyGroup,
    FgAbelianGroup,
    cohomology_at,
)
from .group_cohomology import GModule, GModuleSes, cohomology
from .intlinalg import (
    IntMatrix,
    LatticeSolver,
    hermite_basis,
    hstack,
    kernel_mod_moduli,
    vstack,
)


@dataclass(frozen=True)
class SoftModuleData:
    """E(A) = Map(G, A) with the constants embedding and its quotient."""

    base: GModule
    soft: GModule
    embedding: AbMorphism
    quotient: GModule
    projection: AbMorphism


def soft_module(module: GModule) -> SoftModuleData:
    """Functions G -> A as a G-module, with (g.f)(x) = g.(f(g^-1 x)).

    Coordinate block x of E holds f(x); the action permutes blocks and
    acts pointwise, so exact multiplicativity is inherited from A.
    """
    grp = module.group
    r = module.rank
    n = grp.order
    rank = r * n
    # relations: one copy of A's relations per function value
    basis = module.underlying.lattice.basis
    k = basis.ncols
    rel_rows = [[0] * (k * n) for _ in range(rank)]
    for b in range(n):
        for i in range(r):
            row = basis.row(i)
            for j in range(k):
                if row[j]:
                    rel_rows[b * r + i][b * k + j] = row[j]
    e_group = FgAbelianGroup(rank, IntMatrix._raw(rel_rows, k * n))

    def action_matrix(g):
        rows = [[0] * rank for _ in range(rank)]
        mat = module.action[g]
        ginv = grp.inv(g)
        for x in range(n):
            src = grp.mul(ginv, x)
            for i in range(r):
                mrow = mat.row(i)
                for j in range(r):
                    if mrow[j]:
                        rows[x * r + i][src * r + j] = mrow[j]
        return IntMatrix._raw(rows, rank)

    e_mod = GModule(grp, e_group, [action_matrix(g) for g in range(n)],
                    name=f"E({module.name})", check=False)
    embed = AbMorphism(
        module.underlying,
        e_group,
        vstack(*([IntMatrix.identity(r)] * n)),
        check=False,
    )
    b_group = FgAbelianGroup(
        rank, hstack(e_group.lattice.basis, embed.matrix)
    )
    b_mod = GModule(grp, b_group, e_mod.action, name=f"B({module.name})",
                    check=False)
    project = AbMorphism(e_group, b_group, IntMatrix.identity(rank), check=False)
    return SoftModuleData(module, e_mod, embed, b_mod, project)


def soft_acyclicity_check(module: GModule, n_max) -> dict:
    """Assert H^n(G, E(A)) = 0 for 1 <= n <= n_max; returns the report."""
    data = soft_module(module)
    degrees = []
    ok = True
    for n in range(1, n_max + 1):
        h = cohomology(data.soft, n)
        free, torsion = h.structure()
        vanished = free == 0 and not torsion
        ok = ok and vanished
        degrees.append(
            {"n": n, "free_rank": free, "torsion": list(torsion), "zero": vanished}
        )
    return {"module": module.name, "ok": ok, "degrees": degrees}


def functions_group(underlying: FgAbelianGroup, copies) -> FgAbelianGroup:
    """Underlying group of Map(G, X) without building action matrices."""
    return FgAbelianGroup.direct_sum(*([underlying] * copies))


def quotient_by_constants_group(underlying: FgAbelianGroup, copies) -> FgAbelianGroup:
    """Underlying group of Map(G, X)/constants, again matrices-free."""
    e_group = functions_group(underlying, copies)
    embed = vstack(*([IntMatrix.identity(underlying.rank)] * copies))
    return FgAbelianGroup(e_group.rank, hstack(e_group.lattice.basis, embed))


@dataclass(frozen=True)
class SmResolution:
    """Terms E(B^k A) with the constants-of-quotient maps between them."""

    base: GModule
    inners: tuple       # (A, B A, B^2 A, ...) as GModules
    terms: tuple        # (E(A), E(B A), ...) as GModules
    maps: tuple         # AbMorphism term k -> term k+1
    augmentation: AbMorphism
    layers: tuple       # SoftModuleData per step

    def next_inner(self) -> GModule:
        """B^{length+1} A, the inner module one step past the last term."""
        data = soft_module(self.inners[-1])
        return data.quotient

    def next_inner_group(self) -> FgAbelianGroup:
        """Underlying group of B^{length+1} A (no action matrices built)."""
        grp = self.base.group
        return quotient_by_constants_group(
            self.inners[-1].underlying, grp.order
        )

    def exactness_report(self) -> dict:
        """ker(term k -> term k+1) = im(term k-1 -> term k) degreewise."""
        entries = []
        ok = True
        for k in range(len(self.maps)):
            out_map = self.maps[k]
            dec = out_map.target.decomposition
            ker = kernel_mod_moduli(dec.proj * out_map.matrix, dec.mods)
            if k == 0:
                image = self.augmentation.matrix
            else:
                image = self.maps[k - 1].matrix
            solver = LatticeSolver(
                hstack(image, self.terms[k].underlying.lattice.basis)
            )
            witness = None
            for j in range(ker.ncols):
                if solver.solve(ker.column(j)) is None:
                    witness = list(ker.column(j))
                    break
            entries.append({"k": k, "exact": witness is None, "witness": witness})
            ok = ok and witness is None
        return {"ok": ok, "steps": entries}


def sm_resolution(module: GModule, length) -> SmResolution:
    """The resolution A -> E(A) -> E(B A) -> ... with `length`+1 terms."""
    if length < 0:
        raise ValueError("length must be >= 0")
    inners = [module]
    layers = []
    terms = []
    for k in range(length + 1):
        data = soft_module(inners[-1])
        layers.append(data)
        terms.append(data.soft)
        inners.append(data.quotient)
    maps = []
    for k in range(length):
        # term k  ->  B^{k+1} A  (identity on generators)  ->  constants
        rank = terms[k].rank
        maps.append(
            AbMorphism(
                terms[k].underlying,
                terms[k + 1].underlying,
                vstack(*([IntMatrix.identity(rank)] * module.group.order)),
                check=False,
            )
        )
    return SmResolution(
        base=module,
        inners=tuple(inners[: length + 1]),
        terms=tuple(terms),
        maps=tuple(maps),
        augmentation=layers[0].embedding,
        layers=tuple(layers),
    )


def invariants_complex(res: SmResolution, n) -> tuple[AbCochainComplex, list]:
    """Invariants of the first n+1 resolution terms, plus a full-module coda.

    Term k < n+1 is the invariant sublattice of E(B^k A) presented in its
    own basis; the coda at position n+1 is the full module E(B^{n+1} A),
    so kernels at position n are honest without computing the big
    invariant lattice.
    """
    if len(res.terms) < n + 1:
        raise ValueError("resolution too short for the requested degree")
    bases = []
    k_terms = []
    for k in range(n + 1):
        term = res.terms[k]
        z = term.invariant_lattice()
        solver = LatticeSolver(z)
        rel_cols = []
        lat = term.underlying.lattice.basis
        for j in range(lat.ncols):
            c = solver.solve(lat.column(j))
            if c is None:
                raise RuntimeError("relation lattice escaped the invariants")
            rel_cols.append(list(c))
        rels = (
            IntMatrix.from_columns(rel_cols, z.ncols)
            if rel_cols
            else IntMatrix.zeros(z.ncols, 0)
        )
        bases.append(z)
        k_terms.append(FgAbelianGroup(z.ncols, rels))
    # coda: the full next term as a plain group
    if n < len(res.terms) - 1:
        coda = res.terms[n + 1].underlying
        coda_map_matrix = res.maps[n].matrix
    else:
        coda = functions_group(res.next_inner_group(), res.base.group.order)
        rank = res.terms[n].rank
        coda_map_matrix = vstack(
            *([IntMatrix.identity(rank)] * res.base.group.order)
        )
    diffs = []
    for k in range(n):
        target_solver = LatticeSolver(bases[k + 1])
        src = bases[k]
        images = res.maps[k].matrix * src
        cols = []
        for j in range(src.ncols):
            c = target_solver.solve(images.column(j))
            if c is None:
                raise RuntimeError("differential image escaped the invariants")
            cols.append(list(c))
        m = (
            IntMatrix.from_columns(cols, bases[k + 1].ncols)
            if cols
            else IntMatrix.zeros(bases[k + 1].ncols, 0)
        )
        diffs.append(AbMorphism(k_terms[k], k_terms[k + 1], m, check=False))
    diffs.append(
        AbMorphism(k_terms[n], coda, coda_map_matrix * bases[n], check=False)
    )
    return AbCochainComplex(k_terms + [coda], diffs, check=False), bases


class SmCohomology:
    """H^n of the invariants complex, with module-level representatives."""

    __slots__ = ("degree", "value", "term", "invariant_basis", "_solver")

    def __init__(self, degree, value: CohomologyGroup, term: GModule, basis: IntMatrix):
        self.degree = degree
        self.value = value
        self.term = term
        self.invariant_basis = basis
        self._solver = LatticeSolver(basis)

    def structure(self):
        return self.value.structure()

    @property
    def free_rank(self):
        return self.value.free_rank

    @property
    def torsion(self):
        return self.value.torsion

    def representatives(self):
        """Invariant cocycles inside the resolution term, one per factor."""
        return [self.invariant_basis.apply(r) for r in self.value.representatives()]

    def class_of(self, module_vector):
        xi = self._solver.solve(module_vector)
        if xi is None:
            raise ValueError("vector is not an invariant of the term")
        return self.value.class_of(xi)

    def is_zero_class(self, module_vector):
        return all(x == 0 for x in self.class_of(module_vector))

    def as_group(self):
        return self.value.as_group()

    def __repr__(self):
        free, tors = self.structure()
        parts = ["Z"] * free + [f"C{d}" for d in tors]
        return "H_inv^{}<{}>".format(self.degree, " x ".join(parts) if parts else "0")


def sm_cohomology(module: GModule, n, resolution: SmResolution | None = None) -> SmCohomology:
    """Cohomology of the invariants complex of the soft resolution."""
    if n < 0:
        raise ValueError("negative degree")
    if resolution is None or len(resolution.terms) < n + 1:
        resolution = sm_resolution(module, n)
    complex_, bases = invariants_complex(resolution, n)
    h = cohomology_at(complex_, n)
    return SmCohomology(n, h, resolution.terms[n], bases[n])


def lift_invariant(inner: GModule, ses: GModuleSes, y):
    """Invariant preimage of an invariant, for soft first term E = Map(G, inner).

    Given the exact sequence E -> B -> C with E the functions module of
    ``inner`` and an invariant y of C, pick any set-level preimage x and
    return x - xi where xi is built from psi(g, h) = (g.x - x)(h) via
    xi(h) = h.psi(h^-1, e); the result is G-invariant and maps to y.
    """
    e_mod, b_mod, c_mod = ses.sub, ses.total, ses.quotient
    grp = b_mod.group
    r_inner = inner.rank
    if e_mod.rank != r_inner * grp.order:
        raise ValueError("first term is not the functions module of `inner`")
    # y invariant?
    for g in grp.generators():
        diff = [a - b for a, b in zip(c_mod.act(g, y), y)]
        if not c_mod.underlying.is_zero_element(diff):
            raise ValueError("y is not invariant")
    pre_solver = LatticeSolver(
        hstack(ses.beta.matrix, c_mod.underlying.lattice.basis)
    )
    sol = pre_solver.solve(y)
    if sol is None:
        raise ValueError("projection misses y: sequence not exact")
    x = list(sol[: b_mod.rank])
    back_solver = LatticeSolver(
        hstack(ses.alpha.matrix, b_mod.underlying.lattice.basis)
    )
    psi = {}
    for g in range(grp.order):
        w = [a - b for a, b in zip(b_mod.act(g, x), x)]
        esol = back_solver.solve(w)
        if esol is None:
            raise ValueError("g.x - x does not come from the soft term")
        e_vec = esol[: e_mod.rank]
        for h in range(grp.order):
            psi[(g, h)] = e_vec[h * r_inner : (h + 1) * r_inner]
    xi = [0] * e_mod.rank
    for h in range(grp.order):
        val = inner.act(h, psi[(grp.inv(h), 0)])
        xi[h * r_inner : (h + 1) * r_inner] = list(val)
    shift = ses.alpha.matrix.apply(xi)
    out = tuple(a - b for a, b in zip(x, shift))
    # post: invariant, and still a preimage of y
    for g in grp.generators():
        diff = [a - b for a, b in zip(b_mod.act(g, out), out)]
        if not b_mod.underlying.is_zero_element(diff):
            raise RuntimeError("lift failed to be invariant")
    img = ses.beta.matrix.apply(out)
    if not c_mod.underlying.same_element(img, y):
        raise RuntimeError("lift changed the image")
    return out


def functions_functor_matrix(f: AbMorphism, copies) -> IntMatrix:
    """Map(G, f): block-diagonal extension of f over the value blocks."""
    from .intlinalg import block_diag

    return block_diag(*([f.matrix] * copies))


def b_e_commutation_check(module: GModule) -> dict:
    """Structural comparison of B(E(A)) and E(B(A))."""
    e_data = soft_module(module)
    be = soft_module(e_data.soft).quotient      # B(E(A))
    eb = soft_module(e_data.quotient).soft      # E(B(A))
    s1 = be.underlying.structure()
    s2 = eb.underlying.structure()
    inv1 = _invariants_structure(be)
    inv2 = _invariants_structure(eb)
    return {
        "module": module.name,
        "underlying_match": s1 == s2,
        "invariants_match": inv1 == inv2,
        "b_of_e": {"free_rank": s1[0], "torsion": list(s1[1])},
        "e_of_b": {"free_rank": s2[0], "torsion": list(s2[1])},
        "ok": s1 == s2 and inv1 == inv2,
    }


def _invariants_structure(module: GModule):
    z = module.invariant_lattice()
    lat = module.underlying.lattice.basis
    from .abgroups import Subquotient

    sq = Subquotient(
        module.rank, hermite_basis(hstack(z, lat)), lat
    )
    return sq.structure()
