"""Independent oracles used to freeze expected values in tests.

None of these go through the bar-complex machinery: cyclic-group
cohomology comes from the periodic resolution (kernels and images of
the norm and augmentation maps, straight lattice arithmetic), and the
brute-force oracle enumerates cochain tables directly.
"""

from itertools import product

from cohomlab.abgroups import Subquotient
from cohomlab.intlinalg import IntMatrix, hermite_basis, hstack, kernel_mod_moduli


def _norm_and_shift(module):
    """(T - 1, N = 1 + T + ... + T^{m-1}) for the generator T of a cyclic group."""
    grp = module.group
    m = grp.order
    gen = 1 % m
    t = module.action[gen] if m > 1 else IntMatrix.identity(module.rank)
    ident = IntMatrix.identity(module.rank)
    shift = t - ident
    acc = IntMatrix.identity(module.rank)
    power = ident
    for _ in range(m - 1):
        power = t * power
        acc = acc + power
    return shift, acc


def cyclic_cohomology_oracle(module, n):
    """H^n(Z/m, A) via the periodic resolution: (free_rank, torsion).

    H^0 = ker(T-1), then kernels/images of T-1 and the norm alternate.
    """
    grp = module.underlying
    dec = grp.decomposition
    shift, norm = _norm_and_shift(module)

    def ker_mod(mat):
        return kernel_mod_moduli(dec.proj * mat, dec.mods)

    rels = grp.lattice.basis
    if n == 0:
        num = hermite_basis(hstack(ker_mod(shift), rels))
        den = rels
    elif n % 2:
        num = hermite_basis(hstack(ker_mod(norm), rels))
        den = hermite_basis(hstack(shift, rels))
    else:
        num = hermite_basis(hstack(ker_mod(shift), rels))
        den = hermite_basis(hstack(norm, rels))
    sq = Subquotient(grp.rank, num, den)
    return sq.structure()


def all_cochain_tables(module, degree):
    """Every function G^degree -> A as a dict, for finite small modules."""
    elems = module.underlying.elements()
    tuples = list(product(range(module.group.order), repeat=degree))
    for combo in product(elems, repeat=len(tuples)):
        yield dict(zip(tuples, combo))


def table_differential(module, degree, table):
    """Inhomogeneous differential evaluated on a plain dict table."""
    grp = module.group
    out = {}
    for t in product(range(grp.order), repeat=degree + 1):
        acc = list(module.act(t[0], table[t[1:]]))
        for j in range(1, degree + 1):
            merged = t[: j - 1] + (grp.mul(t[j - 1], t[j]),) + t[j + 1 :]
            sign = -1 if j % 2 else 1
            acc = [x + sign * y for x, y in zip(acc, table[merged])]
        sign = -1 if (degree + 1) % 2 else 1
        acc = [x + sign * y for x, y in zip(acc, table[t[:-1]])]
        out[t] = tuple(acc)
    return out


def is_zero_table(module, table):
    return all(module.underlying.is_zero_element(v) for v in table.values())


def brute_force_cohomology_order(module, degree):
    """|H^degree| by enumerating all cocycle and coboundary tables."""
    cocycles = [
        tb
        for tb in all_cochain_tables(module, degree)
        if is_zero_table(module, table_differential(module, degree, tb))
    ]
    seen = set()
    for tb in all_cochain_tables(module, degree - 1):
        db = table_differential(module, degree - 1, tb)
        key = tuple(
            module.underlying.class_coords(db[t])
            for t in sorted(db)
        )
        seen.add(key)
    return len(cocycles) // len(seen)


def hom_enumeration_count(group, module):
    """|Hom(G, A)| for finite A by direct enumeration."""
    elems = module.underlying.elements()
    count = 0
    for combo in product(elems, repeat=group.order):
        ok = True
        for g in range(group.order):
            for h in range(group.order):
                lhs = combo[group.mul(g, h)]
                rhs = [x + y for x, y in zip(combo[g], combo[h])]
                if not module.underlying.same_element(lhs, rhs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count
