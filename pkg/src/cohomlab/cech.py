"""Finite semi-simplicial sets, covers, and the Cech double complex.

The classifying object of a finite group lives here: level k is the set
of k-tuples, faces multiply adjacent entries or drop the outermost one.
Covers are levelwise families of subsets compatible with faces through
index maps; coefficients assign Map(U, A) to each subset with
restrictions as coordinate projections, the 0th structure map twisted
by the module action on the nerve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .abgroups import AbMorphism, FgAbelianGroup
from .double_complex import DoubleComplex
from .group_cohomology import GModule
from .intlinalg import IntMatrix


class SemiSimplicialSet:
    """Finite sets X_0..X_{k_max} with face maps satisfying the identities."""

    def __init__(self, sizes, faces, labels=None, check=True):
        self.sizes = list(sizes)
        self.k_max = len(self.sizes) - 1
        self.faces = {k: [tuple(f) for f in faces[k]] for k in faces}
        self.labels = labels or {}
        if check:
            self.validate()

    def face(self, k, i, x):
        return self.faces[k][i][x]

    def validate(self):
        for k in range(1, self.k_max + 1):
            if k not in self.faces or len(self.faces[k]) != k + 1:
                raise ValueError(f"level {k} needs faces 0..{k}")
            for f in self.faces[k]:
                if len(f) != self.sizes[k]:
                    raise ValueError(f"face table at level {k} has wrong length")
                if any(not (0 <= y < self.sizes[k - 1]) for y in f):
                    raise ValueError(f"face at level {k} maps out of range")
        for k in range(2, self.k_max + 1):
            for i in range(k):
                for j in range(i + 1, k + 1):
                    for x in range(self.sizes[k]):
                        lhs = self.face(k - 1, i, self.face(k, j, x))
                        rhs = self.face(k - 1, j - 1, self.face(k, i, x))
                        if lhs != rhs:
                            raise ValueError(
                                f"face identity fails at level {k}, (i,j)=({i},{j})"
                            )


def nerve(group, k_max) -> SemiSimplicialSet:
    """Levels G^k with faces multiplying adjacent entries.

    Face 0 drops the first entry, face k the last, face i (0 < i < k)
    multiplies entries i-1 and i.
    """
    n = group.order
    sizes = [n ** k for k in range(k_max + 1)]
    labels = {}
    for k in range(k_max + 1):
        labels[k] = [_untuple(idx, k, n) for idx in range(sizes[k])]
    faces = {}
    for k in range(1, k_max + 1):
        level = []
        for i in range(k + 1):
            table = []
            for idx in range(sizes[k]):
                t = labels[k][idx]
                if i == 0:
                    out = t[1:]
                elif i == k:
                    out = t[:-1]
                else:
                    out = t[: i - 1] + (group.mul(t[i - 1], t[i]),) + t[i + 1 :]
                table.append(_tuple_idx(out, n))
            level.append(tuple(table))
        faces[k] = level
    return SemiSimplicialSet(sizes, faces, labels=labels, check=False)


def _untuple(idx, k, n):
    out = []
    for _ in range(k):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


def _tuple_idx(t, n):
    idx = 0
    for g in t:
        idx = idx * n + g
    return idx


class SemiSimplicialCover:
    """Levelwise families of subsets compatible with faces via eps maps."""

    def __init__(self, space, subsets, eps, check=True):
        self.space = space
        self.subsets = {k: [frozenset(u) for u in subsets[k]] for k in subsets}
        self.eps = {key: tuple(v) for key, v in eps.items()}
        if check:
            self.validate()

    def index_count(self, k):
        return len(self.subsets[k])

    def validate(self):
        x = self.space
        for k in range(x.k_max + 1):
            if k not in self.subsets or not self.subsets[k]:
                raise ValueError(f"level {k} has no cover sets")
            union = set()
            for u in self.subsets[k]:
                union |= u
            if union != set(range(x.sizes[k])):
                raise ValueError(f"cover does not cover level {k}")
        for k in range(1, x.k_max + 1):
            for i in range(k + 1):
                key = (k, i)
                if key not in self.eps:
                    raise ValueError(f"missing eps map {key}")
                e = self.eps[key]
                if len(e) != len(self.subsets[k]):
                    raise ValueError(f"eps map {key} has wrong length")
                for j, u in enumerate(self.subsets[k]):
                    target = self.subsets[k - 1][e[j]]
                    for el in u:
                        if x.face(k, i, el) not in target:
                            raise ValueError(
                                f"containment fails at level {k}, face {i}, set {j}"
                            )


def singleton_cover(space: SemiSimplicialSet) -> SemiSimplicialCover:
    """One full set per level."""
    subsets = {k: [frozenset(range(space.sizes[k]))] for k in range(space.k_max + 1)}
    eps = {(k, i): (0,) for k in range(1, space.k_max + 1) for i in range(k + 1)}
    return SemiSimplicialCover(space, subsets, eps, check=False)


def pointwise_cover(space: SemiSimplicialSet) -> SemiSimplicialCover:
    """One singleton set per element; eps maps follow the faces."""
    subsets = {
        k: [frozenset([x]) for x in range(space.sizes[k])]
        for k in range(space.k_max + 1)
    }
    eps = {}
    for k in range(1, space.k_max + 1):
        for i in range(k + 1):
            eps[(k, i)] = tuple(
                space.face(k, i, x) for x in range(space.sizes[k])
            )
    return SemiSimplicialCover(space, subsets, eps, check=False)


def refine_cover(space: SemiSimplicialSet, base_sets) -> SemiSimplicialCover:
    """Extend a cover of X_0 over all levels by pullback and refinement.

    Level k sets are the nonempty common refinements of the pullbacks of
    the level k-1 cover along all faces; the index of such a set is the
    tuple of parent indices, which is exactly the eps data.
    """
    base = [frozenset(u) for u in base_sets]
    if not base:
        raise ValueError("empty base cover")
    union = set()
    for u in base:
        union |= u
    if union != set(range(space.sizes[0])):
        raise ValueError("base family does not cover level 0")
    subsets = {0: base}
    eps = {}
    for k in range(1, space.k_max + 1):
        prev = subsets[k - 1]
        pullbacks = []
        for i in range(k + 1):
            pullbacks.append([
                frozenset(
                    x for x in range(space.sizes[k]) if space.face(k, i, x) in u
                )
                for u in prev
            ])
        # distinct nonempty intersections across all faces, keeping the
        # lexicographically first parent tuple per set for the eps maps
        family = {}
        for j, u in enumerate(pullbacks[0]):
            if u and u not in family:
                family[u] = (j,)
        for i in range(1, k + 1):
            nxt = {}
            for u, parents in sorted(family.items(), key=lambda kv: kv[1]):
                for j, v in enumerate(pullbacks[i]):
                    w = u & v
                    if w and w not in nxt:
                        nxt[w] = parents + (j,)
            family = nxt
        if not family:
            raise ValueError(f"refinement produced an empty cover at level {k}")
        items = sorted(family.items(), key=lambda kv: kv[1])
        subsets[k] = [u for u, _ in items]
        for i in range(k + 1):
            eps[(k, i)] = tuple(parents[i] for _, parents in items)
    return SemiSimplicialCover(space, subsets, eps, check=False)


@dataclass
class CoefficientSystem:
    """Map(-, A) with projections as restrictions and a twisted 0th face.

    On the nerve the 0th structure map carries the module action of the
    leading tuple entry; elsewhere it is a plain pullback.
    """

    space: SemiSimplicialSet
    module: GModule
    nerve_twist: bool = True

    def group_of(self, subset_elems) -> FgAbelianGroup:
        return FgAbelianGroup.direct_sum(
            *([self.module.underlying] * len(subset_elems))
        )

    def twist_matrix(self, k, x):
        """Action applied to a value pulled back along face 0 into x."""
        if not self.nerve_twist:
            return IntMatrix.identity(self.module.rank)
        label = self.space.labels[k][x]
        return self.module.action[label[0]]

    def structure_matrix(self, k, i, src_elems, dst_elems):
        """Matrix of D_i: Map(src, A) -> Map(dst, A), dst at level k.

        src_elems must contain the i-th face of every dst element.
        """
        r = self.module.rank
        src_pos = {el: t for t, el in enumerate(src_elems)}
        rows = [[0] * (r * len(src_elems)) for _ in range(r * len(dst_elems))]
        for t_dst, x in enumerate(dst_elems):
            y = self.space.face(k, i, x)
            t_src = src_pos[y]
            block = (
                self.twist_matrix(k, x)
                if i == 0
                else IntMatrix.identity(r)
            )
            for a in range(r):
                row = block.row(a)
                for b in range(r):
                    if row[b]:
                        rows[t_dst * r + a][t_src * r + b] = row[b]
        return IntMatrix._raw(rows, r * len(src_elems))

    def restriction_matrix(self, src_elems, dst_elems):
        """Coordinate projection Map(src, A) -> Map(dst, A), dst inside src."""
        r = self.module.rank
        src_pos = {el: t for t, el in enumerate(src_elems)}
        rows = [[0] * (r * len(src_elems)) for _ in range(r * len(dst_elems))]
        for t_dst, x in enumerate(dst_elems):
            t_src = src_pos[x]
            for a in range(r):
                rows[t_dst * r + a][t_src * r + a] = 1
        return IntMatrix._raw(rows, r * len(src_elems))

    def identities_report(self, k_max=None) -> dict:
        """Check the contravariant face identities of the D_i on full levels."""
        x = self.space
        k_top = x.k_max if k_max is None else k_max
        full = {k: list(range(x.sizes[k])) for k in range(k_top + 1)}

        def f_mat(k, i):
            return self.structure_matrix(k, i, full[k - 1], full[k])

        ok = True
        failures = []
        for k in range(2, k_top + 1):
            for i in range(k):
                for j in range(i + 1, k + 1):
                    lhs = f_mat(k, j) * f_mat(k - 1, i)
                    rhs = f_mat(k, i) * f_mat(k - 1, j - 1)
                    if lhs != rhs:
                        ok = False
                        failures.append({"k": k, "i": i, "j": j})
        return {"ok": ok, "failures": failures}


class CechDoubleComplex(DoubleComplex):
    """Cech double complex with block layout retained for cocycle embedding.

    layout[(p, q)] is a list of (index_tuple, elements, offset) triples:
    one block Map(intersection, A) per ordered (q+1)-tuple of cover
    indices with nonempty intersection.
    """

    def __init__(self, cover, coeffs, layout, **kw):
        self.cover = cover
        self.coeffs = coeffs
        self.layout = layout
        super().__init__(**kw)

    def block_of(self, p, q, index_tuple):
        for t, elems, off in self.layout[(p, q)]:
            if t == index_tuple:
                return t, elems, off
        raise KeyError(f"no block {index_tuple} at {(p, q)}")


def cech_double_complex(
    cover: SemiSimplicialCover,
    coeffs: CoefficientSystem,
    p_max=None,
    q_max=None,
    bound=6,
) -> CechDoubleComplex:
    """Terms prod Map(U_{j0..jq}, A) with Cech vertical and simplicial
    horizontal differentials; the horizontal signs are (-1)^{i+q}."""
    space = cover.space
    if coeffs.space is not space:
        raise ValueError("cover and coefficients live on different spaces")
    p_top = space.k_max if p_max is None else min(p_max, space.k_max)
    q_top = p_top if q_max is None else q_max
    r = coeffs.module.rank

    layout = {}
    terms = {}
    for p in range(p_top + 1):
        sets_p = cover.subsets[p]
        for q in range(q_top + 1):
            blocks = []
            offset = 0
            # depth-first over index tuples, pruning empty intersections
            stack = [((), None)]
            while stack:
                prefix, inter = stack.pop()
                if len(prefix) == q + 1:
                    elems = tuple(sorted(inter))
                    blocks.append((prefix, elems, offset))
                    offset += r * len(elems)
                    continue
                for j in range(len(sets_p) - 1, -1, -1):
                    ni = sets_p[j] if inter is None else inter & sets_p[j]
                    if ni:
                        stack.append((prefix + (j,), ni))
            layout[(p, q)] = blocks
            terms[(p, q)] = FgAbelianGroup.direct_sum(
                *[coeffs.group_of(elems) for _, elems, _ in blocks]
            )

    horizontal = {}
    vertical = {}
    for p in range(p_top + 1):
        for q in range(q_top + 1):
            src_blocks = layout[(p, q)]
            src_rank = terms[(p, q)].rank
            src_off = {t: (elems, off) for t, elems, off in src_blocks}
            # vertical: alternating omissions with restrictions
            if q + 1 <= q_top:
                dst_blocks = layout[(p, q + 1)]
                rows = [[0] * src_rank for _ in range(terms[(p, q + 1)].rank)]
                for t_dst, elems_dst, off_dst in dst_blocks:
                    for drop in range(q + 2):
                        t_src = t_dst[:drop] + t_dst[drop + 1 :]
                        if t_src not in src_off:
                            continue
                        elems_src, off_src = src_off[t_src]
                        sign = -1 if drop % 2 else 1
                        mat = coeffs.restriction_matrix(elems_src, elems_dst)
                        _write_block(rows, mat, off_dst, off_src, sign)
                vertical[(p, q)] = AbMorphism(
                    terms[(p, q)], terms[(p, q + 1)],
                    IntMatrix._raw(rows, src_rank), check=False,
                )
            # horizontal: simplicial faces through eps, signs (-1)^{i+q}
            if p + 1 <= p_top:
                dst_blocks = layout[(p + 1, q)]
                rows = [[0] * src_rank for _ in range(terms[(p + 1, q)].rank)]
                for t_dst, elems_dst, off_dst in dst_blocks:
                    for i in range(p + 2):
                        e = cover.eps[(p + 1, i)]
                        t_src = tuple(e[j] for j in t_dst)
                        if t_src not in src_off:
                            continue
                        elems_src, off_src = src_off[t_src]
                        sign = -1 if (i + q) % 2 else 1
                        mat = coeffs.structure_matrix(
                            p + 1, i, elems_src, elems_dst
                        )
                        _write_block(rows, mat, off_dst, off_src, sign)
                horizontal[(p, q)] = AbMorphism(
                    terms[(p, q)], terms[(p + 1, q)],
                    IntMatrix._raw(rows, src_rank), check=False,
                )

    return CechDoubleComplex(
        cover=cover,
        coeffs=coeffs,
        layout=layout,
        p_max=p_top,
        q_max=q_top,
        terms=terms,
        horizontal=horizontal,
        vertical=vertical,
        bound=max(bound, p_top, q_top),
    )


def _write_block(rows, mat, r0, c0, sign):
    for i in range(mat.nrows):
        row = mat.row(i)
        for j in range(mat.ncols):
            if row[j]:
                rows[r0 + i][c0 + j] += sign * row[j]
