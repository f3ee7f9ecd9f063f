from cohomlab.abgroups import FgAbelianGroup, cohomology_at
from cohomlab.cech import (
    CoefficientSystem,
    cech_double_complex,
    nerve,
    pointwise_cover,
    refine_cover,
    singleton_cover,
)
from cohomlab.double_complex import total_complex
from cohomlab.group_cohomology import FiniteGroup, GModule, cohomology
from cohomlab.intlinalg import IntMatrix


def zmod(grp, m):
    return GModule.trivial(grp, FgAbelianGroup.cyclic(m), name=f"Z{m}triv")


def zsign(grp):
    return GModule(
        grp,
        FgAbelianGroup.free(1),
        [IntMatrix([[1]]), IntMatrix([[-1]])],
        name="Zsign",
    )


def test_nerve_sizes_and_identities():
    z2 = FiniteGroup.cyclic(2)
    x = nerve(z2, 3)
    assert x.sizes == [1, 2, 4, 8]
    x.validate()


def test_nerve_face_multiplies():
    z3 = FiniteGroup.cyclic(3)
    x = nerve(z3, 2)
    for g in range(3):
        for h in range(3):
            idx = g * 3 + h
            assert x.labels[1][x.face(2, 1, idx)] == ((g + h) % 3,)
            assert x.labels[1][x.face(2, 0, idx)] == (h,)
            assert x.labels[1][x.face(2, 2, idx)] == (g,)


def test_singleton_and_pointwise_covers_valid():
    z2 = FiniteGroup.cyclic(2)
    x = nerve(z2, 3)
    singleton_cover(x).validate()
    pointwise_cover(x).validate()


def test_refine_cover_singleton_base():
    z2 = FiniteGroup.cyclic(2)
    x = nerve(z2, 3)
    cov = refine_cover(x, [frozenset([0])])
    cov.validate()
    for k in range(4):
        assert cov.index_count(k) == 1
        assert cov.subsets[k][0] == frozenset(range(x.sizes[k]))


def test_refine_cover_two_set_base():
    # duplicate base sets collapse to one distinct refinement family
    z2 = FiniteGroup.cyclic(2)
    x = nerve(z2, 3)
    cov = refine_cover(x, [frozenset([0]), frozenset([0])])
    cov.validate()
    assert cov.index_count(1) == 1


def _pair_object(group, k_max):
    """Levels G^{k+1} with faces dropping one entry (free contractible object)."""
    from cohomlab.cech import SemiSimplicialSet, _tuple_idx, _untuple

    n = group.order
    sizes = [n ** (k + 1) for k in range(k_max + 1)]
    labels = {k: [_untuple(i, k + 1, n) for i in range(sizes[k])] for k in range(k_max + 1)}
    faces = {}
    for k in range(1, k_max + 1):
        faces[k] = [
            tuple(
                _tuple_idx(labels[k][x][:i] + labels[k][x][i + 1 :], n)
                for x in range(sizes[k])
            )
            for i in range(k + 1)
        ]
    return SemiSimplicialSet(sizes, faces, labels=labels)


def test_refine_cover_pointwise_base_gives_points():
    z2 = FiniteGroup.cyclic(2)
    x = _pair_object(z2, 2)
    cov = refine_cover(x, [frozenset([0]), frozenset([1])])
    cov.validate()
    # pulling point covers back along drop-faces cuts every level to points
    for k in range(3):
        for u in cov.subsets[k]:
            assert len(u) == 1


def test_refine_cover_overlapping_base():
    z2 = FiniteGroup.cyclic(2)
    x = _pair_object(z2, 2)
    cov = refine_cover(x, [frozenset([0, 1]), frozenset([1])])
    cov.validate()
    assert cov.index_count(0) == 2


def test_coefficient_identities():
    z2 = FiniteGroup.cyclic(2)
    x = nerve(z2, 3)
    for module in (zmod(z2, 2), zsign(z2)):
        coeffs = CoefficientSystem(x, module)
        rep = coeffs.identities_report()
        assert rep["ok"], rep


def test_cech_singleton_row_is_bar_complex():
    z2 = FiniteGroup.cyclic(2)
    module = zmod(z2, 2)
    x = nerve(z2, 3)
    dc = cech_double_complex(singleton_cover(x), CoefficientSystem(x, module))
    dc.validate()
    from cohomlab.group_cohomology import bar_differential_matrix

    # q = 0 horizontal maps match the bar differential up to the (-1)^q sign
    for p in range(3):
        assert dc.horizontal(p, 0).matrix == bar_differential_matrix(module, p)


def _tot_cohomology_structures(dc, n_top):
    tot = total_complex(dc)
    return [cohomology_at(tot, n).structure() for n in range(n_top + 1)]


def test_cech_total_matches_bar_singleton():
    z2 = FiniteGroup.cyclic(2)
    module = zmod(z2, 2)
    x = nerve(z2, 4)
    dc = cech_double_complex(singleton_cover(x), CoefficientSystem(x, module))
    got = _tot_cohomology_structures(dc, 3)
    want = [cohomology(module, n).structure() for n in range(4)]
    assert got == want


def test_cech_total_matches_bar_pointwise():
    z2 = FiniteGroup.cyclic(2)
    module = zmod(z2, 2)
    x = nerve(z2, 4)
    dc = cech_double_complex(pointwise_cover(x), CoefficientSystem(x, module))
    dc.validate()
    got = _tot_cohomology_structures(dc, 3)
    want = [cohomology(module, n).structure() for n in range(4)]
    assert got == want


def test_cech_total_matches_bar_z3():
    z3 = FiniteGroup.cyclic(3)
    module = zmod(z3, 3)
    x = nerve(z3, 4)
    dc = cech_double_complex(singleton_cover(x), CoefficientSystem(x, module))
    got = _tot_cohomology_structures(dc, 3)
    want = [cohomology(module, n).structure() for n in range(4)]
    assert got == want


def test_cech_e1_concentrated_in_bottom_row():
    # discrete covers are good: vertical cohomology vanishes for q >= 1
    from cohomlab.double_complex import spectral_sequence

    z2 = FiniteGroup.cyclic(2)
    module = zmod(z2, 2)
    x = nerve(z2, 3)
    dc = cech_double_complex(pointwise_cover(x), CoefficientSystem(x, module))
    e1 = spectral_sequence(dc, 1)[0]
    # entries at q = q_max see the truncated complex; assert the interior
    for p in range(dc.p_max + 1):
        for q in range(1, dc.q_max):
            assert e1.structure(p, q) == (0, []), (p, q)
