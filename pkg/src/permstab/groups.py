"""Finite groups given by multiplication tables, their actions on finite
sets, and the catalogue of transitive actions up to isomorphism.

Element ids are ``0..n-1`` with ``0`` the identity. A permutation action
stores one image tuple per group element; ``perms[g][x]`` is ``g·x``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations as _all_perms
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import GroupTooLarge, Incompatible, NotAGroup, NotAnAction
from .perms import Perm, compose, identity, is_perm

MAX_ORDER = 255


class FiniteGroup:
    """A finite group as a validated multiplication table.

    Build instances through :func:`validate_group` or the named constructors;
    the constructor itself trusts its input.
    """

    __slots__ = ("table", "labels", "inv", "generators", "_cache", "_key")

    def __init__(self, table: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(self.table)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        inv = [0] * n
        for a in range(n):
            inv[a] = self.table[a].index(0)
        self.inv = tuple(inv)
        self.generators = _greedy_generators(self.table)
        self._cache: dict = {}
        self._key = self.table

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def conj(self, x: int, k: int) -> int:
        """``x k x⁻¹``."""
        return self.table[self.table[x][k]][self.inv[x]]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.table[x][g]
            k += 1
        return k

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            return int(label)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table], "labels": list(self.labels)}


def _greedy_generators(table: tuple) -> tuple[int, ...]:
    n = len(table)
    gens: list[int] = []
    span = {0}
    for g in range(1, n):
        if g not in span:
            gens.append(g)
            span = _closure(table, gens)
            if len(span) == n:
                break
    return tuple(gens)


def _closure(table, gens: Iterable[int]) -> set[int]:
    gens = list(gens)
    seen = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for s in gens:
            b = table[a][s]
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def validate_group(table: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None) -> FiniteGroup:
    """Check that ``table`` is a group law and return it with the identity at 0."""
    n = len(table)
    if n == 0:
        raise NotAGroup("empty table")
    if any(len(row) != n for row in table):
        raise NotAGroup("table is not square")
    rows = [[int(x) for x in row] for row in table]
    if any(x < 0 or x >= n for row in rows for x in row):
        raise NotAGroup("entry out of range")
    for a, row in enumerate(rows):
        if not is_perm(row):
            raise NotAGroup(f"row {a} is not a permutation")
    for b in range(n):
        if not is_perm([rows[a][b] for a in range(n)]):
            raise NotAGroup(f"column {b} is not a permutation")
    ident = [e for e in range(n) if rows[e] == list(range(n)) and all(rows[a][e] == a for a in range(n))]
    if not ident:
        raise NotAGroup("no two-sided identity")
    e = ident[0]
    if labels is not None and len(labels) != n:
        raise NotAGroup("labels length differs from order")
    if e != 0:
        swap = list(range(n))
        swap[0], swap[e] = e, 0
        rows = [[swap[rows[swap[a]][swap[b]]] for b in range(n)] for a in range(n)]
        if labels is not None:
            labels = list(labels)
            labels[0], labels[e] = labels[e], labels[0]
    t = np.asarray(rows, dtype=np.int64)
    # (ab)c == a(bc) for all triples
    if not np.array_equal(t[t, :], t[:, t]):
        raise NotAGroup("multiplication is not associative")
    return FiniteGroup(rows, labels)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], [str(i) for i in range(n)])


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def symmetric_group(k: int) -> FiniteGroup:
    """Sym(k) with elements in lexicographic order of image tuples (identity first)."""
    elems = sorted(_all_perms(range(k)))
    index = {p: i for i, p in enumerate(elems)}
    table = [[index[compose(p, q)] for q in elems] for p in elems]
    return FiniteGroup(table, ["".join(map(str, p)) for p in elems])


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    @property
    def injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def __call__(self, g: int) -> int:
        return self.image[g]


def validate_hom(source: FiniteGroup, target: FiniteGroup, image: Sequence[int]) -> GroupHom:
    image = tuple(int(x) for x in image)
    if len(image) != source.order:
        raise Incompatible("image length differs from source order")
    if any(y < 0 or y >= target.order for y in image):
        raise Incompatible("image entry out of range")
    if image[0] != 0:
        raise Incompatible("identity not sent to identity")
    for a in source.elements:
        for b in source.elements:
            if image[source.mul(a, b)] != target.mul(image[a], image[b]):
                raise Incompatible(f"not a homomorphism at ({a},{b})")
    return GroupHom(source, target, image)


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, tuple(g.elements))


def trivial_hom(target: FiniteGroup) -> GroupHom:
    return GroupHom(trivial_group(), target, (0,))


def cyclic_embedding(m: int, n: int) -> GroupHom:
    """ℤ/m ↪ ℤ/n onto the unique subgroup of order m."""
    if n % m:
        raise Incompatible(f"{m} does not divide {n}")
    step = n // m
    return GroupHom(cyclic_group(m), cyclic_group(n), tuple(step * a for a in range(m)))


# ---------------------------------------------------------------------------
# transitive classes


@dataclass(frozen=True)
class TransClass:
    """Isomorphism class of a transitive action, i.e. a subgroup up to conjugacy."""

    owner: FiniteGroup = field(compare=False, repr=False)
    stabilizer: tuple[int, ...]
    degree: int

    def to_json(self) -> dict:
        return {"stabilizer": list(self.stabilizer), "degree": self.degree}


def canonical_subgroup(g: FiniteGroup, subgroup: Iterable[int]) -> tuple[int, ...]:
    """Lexicographically least conjugate of ``subgroup`` as a sorted tuple."""
    key = tuple(sorted(subgroup))
    memo = g._cache.setdefault("canon", {})
    hit = memo.get(key)
    if hit is None:
        hit = min(tuple(sorted(g.conj(x, k) for k in key)) for x in g.elements)
        memo[key] = hit
    return hit


def subgroup_classes(g: FiniteGroup, bound: int = MAX_ORDER) -> list[TransClass]:
    """One class per conjugacy class of subgroups, sorted by degree descending
    then by canonical stabilizer. This order is the coordinate basis of Λ_G."""
    if g.order > bound:
        raise GroupTooLarge(f"|G| = {g.order} exceeds bound {bound}")
    cached = g._cache.get("classes")
    if cached is not None:
        return cached
    trivial = (0,)
    found: dict[tuple[int, ...], tuple[int, ...]] = {trivial: ()}
    queue = deque([trivial])
    while queue:
        rep = queue.popleft()
        gens = found[rep]
        members = set(rep)
        for x in g.elements:
            if x in members:
                continue
            new_gens = gens + (x,)
            sub = canonical_subgroup(g, _closure(g.table, new_gens))
            if sub not in found:
                # store generators of the canonical representative itself
                found[sub] = _subgroup_generators(g, sub)
                queue.append(sub)
    classes = [TransClass(g, sub, g.order // len(sub)) for sub in found]
    classes.sort(key=lambda c: (-c.degree, c.stabilizer))
    g._cache["classes"] = classes
    g._cache["class_index"] = {c.stabilizer: i for i, c in enumerate(classes)}
    return classes


def _subgroup_generators(g: FiniteGroup, sub: tuple[int, ...]) -> tuple[int, ...]:
    gens: list[int] = []
    span = {0}
    for x in sub:
        if x not in span:
            gens.append(x)
            span = _closure(g.table, gens)
    return tuple(gens)


def class_index(g: FiniteGroup, stabilizer: Iterable[int]) -> int:
    """Basis position of the class whose stabilizer is conjugate to ``stabilizer``."""
    subgroup_classes(g)
    return g._cache["class_index"][canonical_subgroup(g, stabilizer)]


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True)
class FiniteAction:
    """A homomorphism ``group → Sym(degree)``, one image tuple per element."""

    group: FiniteGroup
    perms: tuple[Perm, ...]

    @property
    def degree(self) -> int:
        return len(self.perms[0])

    def __call__(self, g: int) -> Perm:
        return self.perms[g]

    def pullback(self, hom: GroupHom) -> "FiniteAction":
        """``self ∘ hom`` as an action of ``hom.source``."""
        return FiniteAction(hom.source, tuple(self.perms[hom.image[h]] for h in hom.source.elements))


def trivial_action(g: FiniteGroup, degree: int) -> FiniteAction:
    ident = identity(degree)
    return FiniteAction(g, tuple(ident for _ in g.elements))


def check_action(action: FiniteAction) -> None:
    """Raise :class:`NotAnAction` unless the perms respect the multiplication table."""
    g = action.group
    if len(action.perms) != g.order:
        raise NotAnAction("need one permutation per group element")
    n = action.degree
    for p in action.perms:
        if len(p) != n or not is_perm(p):
            raise NotAnAction("entry is not a permutation of the common degree")
    if action.perms[0] != identity(n):
        raise NotAnAction("identity does not act trivially")
    # checking products against generators suffices once every element is covered
    for a in g.elements:
        pa = action.perms[a]
        for s in g.generators:
            if action.perms[g.mul(a, s)] != compose(pa, action.perms[s]):
                raise NotAnAction(f"ρ({a}·{s}) ≠ ρ({a})ρ({s})")


def action_from_generators(g: FiniteGroup, degree: int, images: Mapping[int, Sequence[int]]) -> FiniteAction:
    """Extend generator images to all of ``g`` and check the result is an action."""
    ident = identity(degree)
    perms: dict[int, Perm] = {0: ident}
    gens = {int(k): tuple(v) for k, v in images.items()}
    for s, p in gens.items():
        if len(p) != degree or not is_perm(p):
            raise NotAnAction(f"image of {s} is not a permutation of degree {degree}")
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for s, p in gens.items():
            b = g.mul(a, s)
            q = compose(perms[a], p)
            if b in perms:
                if perms[b] != q:
                    raise NotAnAction(f"generator images violate the table at element {b}")
            else:
                perms[b] = q
                queue.append(b)
    if len(perms) != g.order:
        raise NotAnAction("given elements do not generate the group")
    action = FiniteAction(g, tuple(perms[a] for a in g.elements))
    check_action(action)
    return action


def coset_action(g: FiniteGroup, subgroup: Sequence[int]) -> FiniteAction:
    """Left multiplication on ``G/K``; point 0 is the coset ``K`` itself."""
    sub = tuple(sorted(subgroup))
    where = [-1] * g.order
    reps: list[int] = []
    for x in g.elements:
        if where[x] < 0:
            idx = len(reps)
            reps.append(x)
            for k in sub:
                where[g.mul(x, k)] = idx
    perms = tuple(tuple(where[g.mul(a, r)] for r in reps) for a in g.elements)
    return FiniteAction(g, perms)


def disjoint_union(actions: Sequence[FiniteAction]) -> FiniteAction:
    g = actions[0].group
    perms = []
    for a in g.elements:
        img: list[int] = []
        offset = 0
        for act in actions:
            img.extend(offset + y for y in act.perms[a])
            offset += act.degree
        perms.append(tuple(img))
    return FiniteAction(g, tuple(perms))


def orbits(action: FiniteAction, points: Optional[Iterable[int]] = None) -> list[list[int]]:
    """Orbits inside ``points`` (assumed invariant), each sorted, ordered by least point."""
    n = action.degree
    pool = range(n) if points is None else sorted(points)
    gens = [action.perms[s] for s in action.group.generators]
    seen = bytearray(n)
    out = []
    for x in pool:
        if seen[x]:
            continue
        seen[x] = 1
        orb = [x]
        i = 0
        while i < len(orb):
            y = orb[i]
            i += 1
            for p in gens:
                z = p[y]
                if not seen[z]:
                    seen[z] = 1
                    orb.append(z)
        orb.sort()
        out.append(orb)
    return out


def stabilizer(action: FiniteAction, x: int) -> tuple[int, ...]:
    return tuple(g for g in action.group.elements if action.perms[g][x] == x)


def orbit_decompose(action: FiniteAction, points: Optional[Iterable[int]] = None) -> list[tuple[list[int], TransClass]]:
    """Orbits with their transitive class, by least point."""
    classes = subgroup_classes(action.group)
    out = []
    for orb in orbits(action, points):
        stab = stabilizer(action, orb[0])
        if len(stab) * len(orb) != action.group.order:
            raise NotAnAction("orbit-stabilizer fails; perms are not an action")
        out.append((orb, classes[class_index(action.group, stab)]))
    return out


def sharp(action: FiniteAction, points: Optional[Iterable[int]] = None) -> tuple[int, ...]:
    """Orbit-type counts over the :func:`subgroup_classes` basis."""
    g = action.group
    counts = [0] * len(subgroup_classes(g))
    for orb in orbits(action, points):
        counts[class_index(g, stabilizer(action, orb[0]))] += 1
    return tuple(counts)


def class_norm(g: FiniteGroup, coords: Sequence[int]) -> int:
    return sum(abs(c) * k.degree for c, k in zip(coords, subgroup_classes(g)))


def invariant_shrink(action: FiniteAction, subset: Iterable[int]) -> set[int]:
    """Largest invariant subset of ``subset``: drop every orbit meeting the complement."""
    keep = set(subset)
    n = action.degree
    outside = [x for x in range(n) if x not in keep]
    if not outside:
        return keep
    gens = [action.perms[s] for s in action.group.generators]
    stack = list(outside)
    dropped = set(outside)
    while stack:
        y = stack.pop()
        for p in gens:
            z = p[y]
            if z not in dropped:
                dropped.add(z)
                stack.append(z)
    return keep - dropped


def restrict_class(hom: GroupHom, cls: TransClass) -> tuple[int, ...]:
    """Sharp of the coset model of ``cls`` pulled back along ``hom``."""
    memo = hom.target._cache.setdefault("restrict", {})
    key = (hom.source._key, hom.image, cls.stabilizer)
    hit = memo.get(key)
    if hit is None:
        hit = sharp(coset_action(hom.target, cls.stabilizer).pullback(hom))
        memo[key] = hit
    return hit


def pullback_coords(hom: GroupHom, coords: Sequence[int]) -> tuple[int, ...]:
    total = [0] * len(subgroup_classes(hom.source))
    for c, cls in zip(coords, subgroup_classes(hom.target)):
        if c:
            for j, v in enumerate(restrict_class(hom, cls)):
                total[j] += c * v
    return tuple(total)


def equivariant_matching(
    group: FiniteGroup,
    src_perms: Sequence[Sequence[int]],
    src_points: Iterable[int],
    dst_perms: Sequence[Sequence[int]],
    dst_points: Iterable[int],
    rng=None,
) -> dict[int, int]:
    """An isomorphism of ``group``-sets between two invariant subsets.

    Orbits of equal type are paired by least point; inside a pair the least
    source point goes to the least target point with the same stabilizer.
    With ``rng`` the pairing and the base point are drawn at random instead.
    """
    src = FiniteAction(group, tuple(tuple(p) for p in src_perms))
    dst = FiniteAction(group, tuple(tuple(p) for p in dst_perms))
    by_type_src: dict[tuple, list[list[int]]] = {}
    by_type_dst: dict[tuple, list[list[int]]] = {}
    for orb, cls in orbit_decompose(src, src_points):
        by_type_src.setdefault(cls.stabilizer, []).append(orb)
    for orb, cls in orbit_decompose(dst, dst_points):
        by_type_dst.setdefault(cls.stabilizer, []).append(orb)
    if {k: len(v) for k, v in by_type_src.items()} != {k: len(v) for k, v in by_type_dst.items()}:
        raise Incompatible("the two sets are not isomorphic")
    gens = group.generators
    f: dict[int, int] = {}
    for key, src_orbs in by_type_src.items():
        dst_orbs = list(by_type_dst[key])
        if rng is not None:
            dst_orbs = [dst_orbs[i] for i in rng.permutation(len(dst_orbs))]
        for o_src, o_dst in zip(src_orbs, dst_orbs):
            m0 = o_src[0]
            stab = set(stabilizer(src, m0))
            candidates = [x for x in o_dst if set(stabilizer(dst, x)) == stab]
            x0 = candidates[int(rng.integers(len(candidates)))] if rng is not None else candidates[0]
            f[m0] = x0
            queue = deque([m0])
            while queue:
                m = queue.popleft()
                for s in gens:
                    m2 = src.perms[s][m]
                    if m2 not in f:
                        f[m2] = dst.perms[s][f[m]]
                        queue.append(m2)
    return f


def extend_on(
    phi: FiniteAction,
    hom: GroupHom,
    coords: Sequence[int],
    points: Optional[Iterable[int]] = None,
    rng=None,
) -> dict[int, list[int]]:
    """Images of every ``g ∈ G`` on the φ-invariant ``points`` for an extension of φ.

    Returns ``{g: partial image list}`` with ``-1`` outside ``points``.
    """
    g = hom.target
    pts = sorted(range(phi.degree) if points is None else points)
    classes = subgroup_classes(g)
    if len(coords) != len(classes) or any(c < 0 for c in coords):
        raise Incompatible("λ must be a nonnegative vector over Trans(G)")
    if class_norm(g, coords) != len(pts):
        raise Incompatible(f"‖λ‖_G = {class_norm(g, coords)} but the set has {len(pts)} points")
    if pullback_coords(hom, coords) != sharp(phi, pts):
        raise Incompatible("pullback of λ differs from the type of φ")
    parts = []
    for c, cls in zip(coords, classes):
        parts.extend([coset_action(g, cls.stabilizer)] * c)
    n = phi.degree
    out = {a: [-1] * n for a in g.elements}
    if not parts:
        return out
    model = disjoint_union(parts)
    f = equivariant_matching(
        hom.source,
        [model.perms[hom.image[h]] for h in hom.source.elements],
        range(model.degree),
        phi.perms,
        pts,
        rng=rng,
    )
    for a in g.elements:
        img = out[a]
        pa = model.perms[a]
        for m, x in f.items():
            img[x] = f[pa[m]]
    return out


def extend_action(phi: FiniteAction, hom: GroupHom, coords: Sequence[int], rng=None) -> FiniteAction:
    """An action ρ of ``hom.target`` on φ's set with ρ^♯ = ``coords`` and ρ∘hom = φ."""
    imgs = extend_on(phi, hom, coords, rng=rng)
    return FiniteAction(hom.target, tuple(tuple(imgs[a]) for a in hom.target.elements))
