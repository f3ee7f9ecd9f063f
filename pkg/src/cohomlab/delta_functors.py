"""Delta-functor plumbing: axiom checks, Q_f, and comparison morphisms.

A cohomology theory is presented to this module as a handle of three
callbacks (evaluate / induced map / connecting map).  Naturality and
exactness are verified extensionally on a finite corpus of modules and
short exact sequences; the comparison morphism between two theories is
built degree by degree through the connecting maps of the canonical
sequences A -> E(A) -> B(A), using that the middle term is acyclic for
the source theory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abgroups import AbMorphism, FgAbelianGroup, verify_exactness
from .group_cohomology import (
    GModule,
    GModuleSes,
    bar_ses_of_complexes,
    cohomology,
)
from .intlinalg import IntMatrix, LatticeSolver, hstack, kernel_mod_moduli
from .soft_resolution import (
    functions_functor_matrix,
    lift_invariant,
    sm_cohomology,
    sm_resolution,
    soft_module,
)


@dataclass
class DeltaFunctorHandle:
    """Engine-backed delta functor: three callbacks plus a name.

    evaluate(module, n) must return an object with structure(),
    representatives(), class_of(vector) and as_group(); induced and
    connecting return AbMorphism values between the coordinate groups of
    the corresponding evaluations.
    """

    name: str
    evaluate: object
    induced: object
    connecting: object


class SoftClosure:
    """Memoized A -> (E(A), B(A)) data shared between functors."""

    def __init__(self):
        self._data = {}

    def of(self, module: GModule):
        key = id(module)
        if key not in self._data:
            self._data[key] = soft_module(module)
        return self._data[key]

    def canonical_ses(self, module: GModule) -> GModuleSes:
        data = self.of(module)
        return GModuleSes.build(
            module, data.soft, data.quotient,
            data.embedding,
            AbMorphism(
                data.soft.underlying, data.quotient.underlying,
                data.projection.matrix, check=False,
            ),
            check=False,
        )


def bar_functor() -> DeltaFunctorHandle:
    """The inhomogeneous-cochain cohomology theory as a handle."""
    eval_cache = {}
    ses_cache = {}

    def evaluate(module, n):
        key = (id(module), n)
        if key not in eval_cache:
            eval_cache[key] = cohomology(module, n)
        return eval_cache[key]

    def induced(f: AbMorphism, src: GModule, dst: GModule, n):
        h_src = evaluate(src, n)
        h_dst = evaluate(dst, n)
        count = src.group.order ** n
        big = functions_functor_matrix(f, count)
        cols = [list(h_dst.class_of(big.apply(rep))) for rep in h_src.representatives()]
        mat = (
            IntMatrix.from_columns(cols, len(h_dst.subquotient.mods))
            if cols
            else IntMatrix.zeros(len(h_dst.subquotient.mods), 0)
        )
        return AbMorphism(h_src.as_group(), h_dst.as_group(), mat, check=False)

    def connecting(ses: GModuleSes, n):
        key = id(ses)
        chain = ses_cache.get(key)
        if chain is None or chain.sub.n_max < n + 2:
            chain = bar_ses_of_complexes(ses, n)
            ses_cache[key] = chain
        from .abgroups import connecting_homomorphism

        return connecting_homomorphism(chain, n)

    return DeltaFunctorHandle("bar", evaluate, induced, connecting)


def sm_functor() -> DeltaFunctorHandle:
    """The invariants-of-soft-resolution theory as a handle."""
    eval_cache = {}
    res_cache = {}

    def resolution(module, length):
        key = id(module)
        res = res_cache.get(key)
        if res is None or len(res.terms) < length + 1:
            res = sm_resolution(module, length)
            res_cache[key] = res
        return res

    def evaluate(module, n):
        key = (id(module), n)
        if key not in eval_cache:
            eval_cache[key] = sm_cohomology(module, n, resolution(module, n))
        return eval_cache[key]

    def induced(f: AbMorphism, src: GModule, dst: GModule, n):
        h_src = evaluate(src, n)
        h_dst = evaluate(dst, n)
        copies = src.group.order ** (n + 1)
        big = functions_functor_matrix(f, copies)
        cols = [list(h_dst.class_of(big.apply(rep))) for rep in h_src.representatives()]
        mat = (
            IntMatrix.from_columns(cols, len(h_dst.value.subquotient.mods))
            if cols
            else IntMatrix.zeros(len(h_dst.value.subquotient.mods), 0)
        )
        return AbMorphism(h_src.as_group(), h_dst.as_group(), mat, check=False)

    def connecting(ses: GModuleSes, n):
        grp = ses.sub.group
        res_a = resolution(ses.sub, n + 1)
        res_b = resolution(ses.total, n)
        h_c = evaluate(ses.quotient, n)
        h_a = evaluate(ses.sub, n + 1)
        copies = grp.order ** (n + 1)
        alpha_n = AbMorphism(
            res_a.terms[n].underlying,
            res_b.terms[n].underlying,
            functions_functor_matrix(ses.alpha, copies),
            check=False,
        )
        beta_n = AbMorphism(
            res_b.terms[n].underlying,
            evaluate(ses.quotient, n).term.underlying,
            functions_functor_matrix(ses.beta, copies),
            check=False,
        )
        level_ses = GModuleSes.build(
            res_a.terms[n],
            res_b.terms[n],
            evaluate(ses.quotient, n).term,
            alpha_n,
            beta_n,
            check=False,
        )
        inner = res_a.inners[n]
        alpha_next = functions_functor_matrix(ses.alpha, grp.order ** (n + 2))
        from .soft_resolution import functions_group, quotient_by_constants_group

        if len(res_b.inners) > n + 1:
            inner_next = res_b.inners[n + 1].underlying
        else:
            inner_next = quotient_by_constants_group(
                res_b.inners[n].underlying, grp.order
            )
        t_next_b = functions_group(inner_next, grp.order)
        back_solver = LatticeSolver(
            hstack(alpha_next, t_next_b.lattice.basis)
        )
        d_b = res_b.maps[n].matrix if n < len(res_b.maps) else None
        if d_b is None:
            # extend the B-resolution one step: constants of the quotient
            from .intlinalg import vstack

            d_b = vstack(
                *([IntMatrix.identity(res_b.terms[n].rank)] * grp.order)
            )
        cols = []
        for rep in h_c.representatives():
            x = lift_invariant(inner, level_ses, rep)
            w = d_b.apply(x)
            sol = back_solver.solve(w)
            if sol is None:
                raise ValueError("connecting pullback failed: sequence not exact")
            a_vec = sol[: res_a.terms[n + 1].rank]
            cols.append(list(h_a.class_of(a_vec)))
        mat = (
            IntMatrix.from_columns(cols, len(h_a.value.subquotient.mods))
            if cols
            else IntMatrix.zeros(len(h_a.value.subquotient.mods), 0)
        )
        return AbMorphism(h_c.as_group(), h_a.as_group(), mat, check=False)

    return DeltaFunctorHandle("sm", evaluate, induced, connecting)


@dataclass(frozen=True)
class SesMorphism:
    """Morphism of short exact sequences: three commuting component maps."""

    source: GModuleSes
    target: GModuleSes
    on_sub: AbMorphism
    on_total: AbMorphism
    on_quotient: AbMorphism

    def validate(self):
        left = self.on_total.matrix * self.source.alpha.matrix
        right = self.target.alpha.matrix * self.on_sub.matrix
        m = AbMorphism(
            self.source.sub.underlying, self.target.total.underlying,
            left - right, check=False,
        )
        if not m.is_zero_map():
            raise ValueError("sub square of the SES morphism does not commute")
        left = self.on_quotient.matrix * self.source.beta.matrix
        right = self.target.beta.matrix * self.on_total.matrix
        m = AbMorphism(
            self.source.total.underlying, self.target.quotient.underlying,
            left - right, check=False,
        )
        if not m.is_zero_map():
            raise ValueError("quotient square of the SES morphism does not commute")


@dataclass
class DeltaCorpus:
    """Finite test bed: modules, short exact sequences, SES morphisms."""

    modules: list = field(default_factory=list)
    sequences: list = field(default_factory=list)
    morphisms: list = field(default_factory=list)


def assemble_les(handle: DeltaFunctorHandle, ses: GModuleSes, n_max):
    """[(H, map-to-next), ...] using only the handle's callbacks."""
    nodes = []
    for n in range(n_max + 1):
        ha = handle.evaluate(ses.sub, n)
        hb = handle.evaluate(ses.total, n)
        hc = handle.evaluate(ses.quotient, n)
        nodes.append((ha, handle.induced(ses.alpha, ses.sub, ses.total, n)))
        nodes.append((hb, handle.induced(ses.beta, ses.total, ses.quotient, n)))
        nodes.append((hc, handle.connecting(ses, n)))
    nodes.append((handle.evaluate(ses.sub, n_max + 1), None))
    return nodes


def verify_delta_functor(handle: DeltaFunctorHandle, corpus: DeltaCorpus, n_max=2):
    """LES exactness per corpus SES plus naturality per SES morphism."""
    report = {"functor": handle.name, "ok": True, "sequences": [], "naturality": []}
    for i, ses in enumerate(corpus.sequences):
        nodes = assemble_les(handle, ses, n_max)
        res = verify_exactness(nodes)
        report["sequences"].append({"index": i, "ok": res["ok"], "detail": res})
        report["ok"] = report["ok"] and res["ok"]
    for i, mor in enumerate(corpus.morphisms):
        mor.validate()
        entry = {"index": i, "ok": True, "failures": []}
        for n in range(n_max + 1):
            lhs = handle.connecting(mor.target, n).compose(
                handle.induced(mor.on_quotient, mor.source.quotient, mor.target.quotient, n)
            )
            rhs = handle.induced(
                mor.on_sub, mor.source.sub, mor.target.sub, n + 1
            ).compose(handle.connecting(mor.source, n))
            if not lhs.equals(rhs):
                entry["ok"] = False
                entry["failures"].append(n)
        report["naturality"].append(entry)
        report["ok"] = report["ok"] and entry["ok"]
    return report


@dataclass(frozen=True)
class QfData:
    """A -> E(B) -> Q_f completion of an injection f inside A -> B -> C."""

    ses: GModuleSes           # A -> E(B) -> Q_f
    beta_f: AbMorphism        # B(A) -> Q_f
    gamma_f: AbMorphism       # C -> Q_f
    report: dict


def q_f_construction(ses: GModuleSes, closure: SoftClosure | None = None) -> QfData:
    """Complete A --f--> E(B) to a short exact sequence with quotient Q_f.

    Q_f = E(B)/f(A) (constants composed with f); beta_f is induced by
    E(f) on B(A) = E(A)/A, gamma_f by constants on C = B/f(A); both
    squares of the defining diagrams are verified on generators.
    """
    closure = closure or SoftClosure()
    f = ses.alpha
    if not f.is_injective_on_quotients():
        raise ValueError("f must be injective on quotients")
    grp = ses.sub.group
    data_b = closure.of(ses.total)
    e_b = data_b.soft
    iota = AbMorphism(
        ses.sub.underlying, e_b.underlying,
        data_b.embedding.matrix * f.matrix, check=False,
    )
    qf_group = FgAbelianGroup(
        e_b.rank, hstack(e_b.underlying.lattice.basis, iota.matrix)
    )
    qf_mod = GModule(grp, qf_group, e_b.action, name=f"Q_f({ses.sub.name})", check=False)
    proj = AbMorphism(e_b.underlying, qf_group, IntMatrix.identity(e_b.rank), check=False)
    qf_ses = GModuleSes.build(ses.sub, e_b, qf_mod, iota, proj, check=False)

    data_a = closure.of(ses.sub)
    u_a = data_a.quotient
    beta_f = AbMorphism(
        u_a.underlying, qf_group,
        functions_functor_matrix(f, grp.order), check=True,
    )
    c_solver = LatticeSolver(
        hstack(ses.beta.matrix, ses.quotient.underlying.lattice.basis)
    )
    cols = []
    for j in range(ses.quotient.rank):
        e_j = [0] * ses.quotient.rank
        e_j[j] = 1
        sol = c_solver.solve(e_j)
        if sol is None:
            raise ValueError("beta is not surjective")
        b_vec = sol[: ses.total.rank]
        cols.append(list(data_b.embedding.matrix.apply(b_vec)))
    gamma_f = AbMorphism(
        ses.quotient.underlying, qf_group,
        IntMatrix.from_columns(cols, e_b.rank), check=True,
    )

    # first diagram: (A -> E(A) -> B(A)) into (A -> E(B) -> Q_f)
    sq1_left = AbMorphism(
        ses.sub.underlying, e_b.underlying,
        functions_functor_matrix(f, grp.order) * data_a.embedding.matrix - iota.matrix,
        check=False,
    )
    sq1_right = AbMorphism(
        data_a.soft.underlying, qf_group,
        beta_f.matrix * data_a.projection.matrix
        - proj.matrix * functions_functor_matrix(f, grp.order),
        check=False,
    )
    # second diagram: (A -> B -> C) into (A -> E(B) -> Q_f)
    sq2_left = AbMorphism(
        ses.sub.underlying, e_b.underlying,
        data_b.embedding.matrix * f.matrix - iota.matrix,
        check=False,
    )
    sq2_right = AbMorphism(
        ses.total.underlying, qf_group,
        gamma_f.matrix * ses.beta.matrix
        - proj.matrix * data_b.embedding.matrix,
        check=False,
    )
    report = {
        "square_I_left": sq1_left.is_zero_map(),
        "square_I_right": sq1_right.is_zero_map(),
        "square_II_left": sq2_left.is_zero_map(),
        "square_II_right": sq2_right.is_zero_map(),
    }
    report["ok"] = all(report.values())
    return QfData(qf_ses, beta_f, gamma_f, report)


@dataclass
class ComparisonMorphism:
    """phi^n per module, built by dimension-shifting induction."""

    source: str
    target: str
    maps: dict          # degree -> {module key -> AbMorphism}
    names: dict         # module key -> module name

    def morphism(self, degree, module):
        return self.maps[degree][id(module)]

    def isomorphism_report(self):
        out = {"ok": True, "entries": []}
        for degree in sorted(self.maps):
            for key, m in self.maps[degree].items():
                iso = m.is_isomorphism()
                out["entries"].append(
                    {"degree": degree, "module": self.names[key], "iso": iso}
                )
                out["ok"] = out["ok"] and iso
        return out


def comparison_morphism(
    h: DeltaFunctorHandle,
    k: DeltaFunctorHandle,
    phi0,
    modules,
    n_max,
    closure: SoftClosure | None = None,
    check_acyclicity=True,
    verify_choices=False,
):
    """Extend a degree-0 natural iso through the connecting maps.

    phi0(module) must give the degree-0 comparison AbMorphism.  For each
    module A and degree n the map phi^{n+1}_A is defined on a generator
    class z by choosing w with delta_n(w) = z in the canonical sequence
    A -> E(A) -> B(A) (delta_n is onto because E(A) is acyclic for h)
    and setting phi^{n+1}_A(z) = delta'_n(phi^n_{B(A)}(w)).
    """
    closure = closure or SoftClosure()
    if check_acyclicity:
        for module in modules:
            e_mod = closure.of(module).soft
            for n in range(1, n_max + 1):
                if h.evaluate(e_mod, n).structure() != (0, []):
                    raise ValueError(
                        f"{h.name} does not vanish on the soft module of "
                        f"{module.name} in degree {n}"
                    )
    # modules needed at degree n: U-iterates up to depth n_max - n
    layers = [list(modules)]
    for depth in range(n_max):
        layers.append([closure.of(m).quotient for m in layers[-1]])
    domain = {}
    names = {}
    for layer in layers:
        for m in layer:
            domain[id(m)] = m
            names[id(m)] = m.name
    maps = {0: {}}
    for key, module in domain.items():
        maps[0][key] = phi0(module)
    for n in range(n_max):
        maps[n + 1] = {}
        # at degree n+1 only modules whose U-chain stays in the domain matter
        needed = set()
        for layer_idx in range(n_max - n):
            for m in layers[layer_idx]:
                needed.add(id(m))
        for key in needed:
            module = domain[key]
            ses = closure.canonical_ses(module)
            u_mod = closure.of(module).quotient
            delta_h = h.connecting(ses, n)
            delta_k = k.connecting(ses, n)
            h_top = h.evaluate(module, n + 1)
            if not delta_h.is_surjective_on_quotients():
                raise ValueError(
                    f"connecting map of {h.name} at {module.name} degree {n} "
                    "is not surjective (corrupted functor?)"
                )
            phi_u = maps[n][id(u_mod)]
            solver = LatticeSolver(
                hstack(delta_h.matrix, h_top.as_group().lattice.basis)
            )
            cols = []
            target_len = delta_k.matrix.nrows
            src_group = h_top.as_group()
            for j in range(src_group.rank):
                e_j = [0] * src_group.rank
                e_j[j] = 1
                sol = solver.solve(e_j)
                if sol is None:
                    raise ValueError("connecting preimage solve failed")
                w = list(sol[: delta_h.matrix.ncols])
                val = delta_k.matrix.apply(phi_u.matrix.apply(w))
                cols.append(list(val))
                if verify_choices:
                    dec = src_group.decomposition
                    kerw = kernel_mod_moduli(dec.proj * delta_h.matrix, dec.mods)
                    if kerw.ncols:
                        w2 = [a + b for a, b in zip(w, kerw.column(0))]
                        val2 = delta_k.matrix.apply(phi_u.matrix.apply(w2))
                        tgt = k.evaluate(module, n + 1).as_group()
                        if not tgt.same_element(val, val2):
                            raise ValueError(
                                "comparison morphism depends on the preimage"
                            )
            k_top = k.evaluate(module, n + 1)
            mat = (
                IntMatrix.from_columns(cols, target_len)
                if cols
                else IntMatrix.zeros(target_len, 0)
            )
            maps[n + 1][key] = AbMorphism(
                h_top.as_group(), k_top.as_group(), mat, check=False
            )
    return ComparisonMorphism(h.name, k.name, maps, names)


def phi0_from_transport(h, k, transport):
    """Degree-0 comparison from a representative-level transport map."""

    def phi0(module):
        h0 = h.evaluate(module, 0)
        k0 = k.evaluate(module, 0)
        cols = [list(transport(module, rep)) for rep in h0.representatives()]
        rank = k0.as_group().rank
        mat = (
            IntMatrix.from_columns(cols, rank)
            if cols
            else IntMatrix.zeros(rank, 0)
        )
        return AbMorphism(h0.as_group(), k0.as_group(), mat, check=False)

    return phi0


def bar_to_sm_phi0(h, k, closure: SoftClosure):
    """Canonical invariants identification: v -> constants(v)."""

    def transport(module, rep):
        embed = closure.of(module).embedding
        return k.evaluate(module, 0).class_of(embed.matrix.apply(rep))

    return phi0_from_transport(h, k, transport)


def sm_to_bar_phi0(h, k, closure: SoftClosure):
    """Inverse identification: an invariant function f -> f(e)."""

    def transport(module, rep):
        r = module.rank
        return k.evaluate(module, 0).class_of(rep[:r])

    return phi0_from_transport(h, k, transport)


def connecting_square_report(h, k, cm: ComparisonMorphism, ses: GModuleSes, n):
    """Check phi^{n+1}_A delta_n = delta'_n phi^n_C for a corpus SES."""
    lhs = cm.morphism(n + 1, ses.sub).compose(h.connecting(ses, n))
    rhs = k.connecting(ses, n).compose(cm.morphism(n, ses.quotient))
    return {"n": n, "commutes": lhs.equals(rhs)}
