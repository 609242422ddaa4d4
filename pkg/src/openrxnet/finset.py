"""Finite sets, functions between them, and the decorated-cospan engine.

An open system is a cospan of finite sets ``X -> S <- Y`` whose apex ``S``
carries a *decoration* (a reaction network, a vector field, ...).  This
module is generic over the decoration: a :class:`DecorationKind` supplies
the action of a species map on decorations, the disjoint union of two
decorations, and the empty decoration.  Composition glues the outputs of
one system to the inputs of the next by a pushout of apexes and transports
the combined decoration along the quotient map.

Everything here is an immutable value; all operations are pure.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import permutations
from typing import Any

from .errors import ApexTooLargeError, BoundaryMismatchError

#: Suffixes used to disambiguate colliding labels in a disjoint union.
LEFT_SUFFIX = "·l"
RIGHT_SUFFIX = "·r"

#: Largest number of leg-unconstrained apex elements `is_equivalent` will
#: search over (10! bijections is the most we are willing to enumerate).
EQUIVALENCE_SEARCH_CAP = 10


@dataclass(frozen=True)
class FinSet:
    """A finite set of distinct string labels, kept in sorted order."""

    elements: tuple[str, ...] = ()

    def __post_init__(self):
        labels = tuple(sorted(self.elements))
        for a, b in zip(labels, labels[1:]):
            if a == b:
                raise ValueError(f"duplicate label {a!r} in finite set")
        object.__setattr__(self, "elements", labels)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, label: object) -> bool:
        return label in self.elements

    def index(self, label: str) -> int:
        return self.elements.index(label)

    def __repr__(self) -> str:
        return "FinSet({%s})" % ", ".join(self.elements)


EMPTY_SET = FinSet()


@dataclass(frozen=True)
class FinFun:
    """A total function between finite sets, given element by element."""

    dom: FinSet
    cod: FinSet
    mapping: tuple[tuple[str, str], ...]

    def __post_init__(self):
        entries = dict(self.mapping) if not isinstance(self.mapping, Mapping) \
            else dict(self.mapping)
        if set(entries) != set(self.dom.elements):
            missing = set(self.dom.elements) - set(entries)
            extra = set(entries) - set(self.dom.elements)
            raise ValueError(
                f"function must be defined exactly on its domain "
                f"(missing {sorted(missing)}, extra {sorted(extra)})")
        for src, dst in entries.items():
            if dst not in self.cod:
                raise ValueError(f"image {dst!r} of {src!r} is not in the codomain")
        object.__setattr__(self, "mapping",
                           tuple(sorted(entries.items())))

    @staticmethod
    def make(dom: FinSet, cod: FinSet, assignment: Mapping[str, str]) -> FinFun:
        return FinFun(dom, cod, tuple(assignment.items()))

    @staticmethod
    def identity(s: FinSet) -> FinFun:
        return FinFun(s, s, tuple((x, x) for x in s))

    @staticmethod
    def empty_into(cod: FinSet) -> FinFun:
        """The unique function from the empty set."""
        return FinFun(EMPTY_SET, cod, ())

    def __call__(self, label: str) -> str:
        for src, dst in self.mapping:
            if src == label:
                return dst
        raise KeyError(label)

    @property
    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def then(self, other: FinFun) -> FinFun:
        """Composition ``other after self``: (f.then(g))(x) = g(f(x))."""
        if self.cod != other.dom:
            raise ValueError("cannot compose: codomain/domain mismatch")
        return FinFun(self.dom, other.cod,
                      tuple((x, other(y)) for x, y in self.mapping))

    def image(self) -> set[str]:
        return {y for _, y in self.mapping}

    def is_bijection(self) -> bool:
        return len(self.image()) == len(self.dom) == len(self.cod)

    def fiber(self, label: str) -> tuple[str, ...]:
        """All domain elements mapping to ``label``."""
        return tuple(x for x, y in self.mapping if y == label)


@dataclass(frozen=True)
class Cospan:
    """A cospan ``left -> apex <- right`` of finite sets."""

    left: FinSet
    apex: FinSet
    right: FinSet
    i: FinFun
    o: FinFun

    def __post_init__(self):
        if self.i.dom != self.left or self.i.cod != self.apex:
            raise ValueError("input leg must map left boundary into apex")
        if self.o.dom != self.right or self.o.cod != self.apex:
            raise ValueError("output leg must map right boundary into apex")

    @staticmethod
    def identity(x: FinSet) -> Cospan:
        ident = FinFun.identity(x)
        return Cospan(x, x, x, ident, ident)


def _disambiguate(base: str, suffix: str, taken: set[str]) -> str:
    label = base + suffix
    while label in taken:
        label += suffix
    return label


def coproduct(a: FinSet, b: FinSet) -> tuple[FinSet, FinFun, FinFun]:
    """Disjoint union of two finite sets with its injection maps.

    Labels present on both sides are renamed deterministically with the
    ``·l`` / ``·r`` suffixes (repeated until free), so the result depends
    only on the inputs.
    """
    shared = set(a.elements) & set(b.elements)
    taken = (set(a.elements) | set(b.elements)) - shared
    left: dict[str, str] = {}
    right: dict[str, str] = {}
    for x in a:
        if x in shared:
            left[x] = _disambiguate(x, LEFT_SUFFIX, taken)
            taken.add(left[x])
        else:
            left[x] = x
    for x in b:
        if x in shared:
            right[x] = _disambiguate(x, RIGHT_SUFFIX, taken)
            taken.add(right[x])
        else:
            right[x] = x
    union = FinSet(tuple(left.values()) + tuple(right.values()))
    return (union,
            FinFun.make(a, union, left),
            FinFun.make(b, union, right))


@dataclass(frozen=True)
class Pushout:
    """Result of gluing two apexes along a shared boundary.

    ``j`` and ``j2`` are the canonical maps from the original apexes, and
    ``copair`` is the quotient map from the disjoint union ``union``.
    """

    apex: FinSet
    j: FinFun
    j2: FinFun
    union: FinSet
    inl: FinFun
    inr: FinFun
    copair: FinFun


def pushout(o: FinFun, i2: FinFun) -> Pushout:
    """Pushout of ``o: Y -> S`` and ``i2: Y -> S2`` over their common domain.

    Computed by union-find on the disjoint union ``S ⊔ S2``, seeded with
    ``o(y) ~ i2(y)`` for every ``y``.  Each merged class is named after the
    lexicographically least *original* label among its members, falling
    back to the least disjoint-union label whenever that choice would
    collide with another class.
    """
    if o.dom != i2.dom:
        raise ValueError("pushout legs must share their domain")
    union, inl, inr = coproduct(o.cod, i2.cod)

    parent = {x: x for x in union}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def unite(x: str, y: str) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for y in o.dom:
        unite(inl(o(y)), inr(i2(y)))

    classes: dict[str, list[str]] = {}
    for x in union:
        classes.setdefault(find(x), []).append(x)

    original = {inl(x): x for x in o.cod}
    original.update({inr(x): x for x in i2.cod})

    candidates = {root: min(original[m] for m in members)
                  for root, members in classes.items()}
    counts: dict[str, int] = {}
    for cand in candidates.values():
        counts[cand] = counts.get(cand, 0) + 1

    label_of: dict[str, str] = {}
    used: set[str] = set()
    for root in sorted(classes, key=lambda r: min(classes[r])):
        label = candidates[root] if counts[candidates[root]] == 1 \
            else min(classes[root])
        while label in used:
            label += LEFT_SUFFIX
        label_of[root] = label
        used.add(label)

    apex = FinSet(tuple(label_of.values()))
    quotient = FinFun.make(union, apex, {x: label_of[find(x)] for x in union})
    return Pushout(apex=apex,
                   j=inl.then(quotient),
                   j2=inr.then(quotient),
                   union=union, inl=inl, inr=inr, copair=quotient)


class DecorationKind(ABC):
    """The structure carried on cospan apexes, with its functorial actions.

    Implementations must guarantee, for decorations ``d`` on ``S``:

    * ``map_along(identity, d) == d`` and ``map_along(g ∘ f, d) ==
      map_along(g, map_along(f, d))``;
    * ``combine(d, d2)`` lives on ``coproduct(carrier(d), carrier(d2))``
      built by :func:`coproduct` (so labels match the cospan engine);
    * ``empty()`` is the decoration of the empty set.
    """

    @abstractmethod
    def carrier(self, decoration: Any) -> FinSet:
        """The finite set the decoration lives on."""

    @abstractmethod
    def map_along(self, f: FinFun, decoration: Any) -> Any:
        """Transport a decoration on ``f.dom`` to one on ``f.cod``."""

    @abstractmethod
    def combine(self, d: Any, d2: Any) -> Any:
        """Place two decorations side by side on the disjoint union."""

    @abstractmethod
    def empty(self) -> Any:
        """The decoration of the empty set."""

    def same(self, d: Any, d2: Any) -> bool:
        """Decoration equality used by the equivalence search."""
        return d == d2

    def discrete(self, s: FinSet) -> Any:
        """The 'nothing happens' decoration on ``s``."""
        return self.map_along(FinFun.empty_into(s), self.empty())


@dataclass(frozen=True)
class DecoratedCospan:
    """An open system: a cospan whose apex carries a decoration."""

    kind: DecorationKind
    cospan: Cospan
    decoration: Any

    def __post_init__(self):
        if self.kind.carrier(self.decoration) != self.cospan.apex:
            raise ValueError("decoration must live exactly on the cospan apex")

    @property
    def left(self) -> FinSet:
        return self.cospan.left

    @property
    def apex(self) -> FinSet:
        return self.cospan.apex

    @property
    def right(self) -> FinSet:
        return self.cospan.right


def identity_open(kind: DecorationKind, x: FinSet) -> DecoratedCospan:
    """The identity open system on ``x``: identity legs, empty structure."""
    return DecoratedCospan(kind, Cospan.identity(x), kind.discrete(x))


def empty_open(kind: DecorationKind) -> DecoratedCospan:
    """The tensor unit: the empty cospan with the empty decoration."""
    return identity_open(kind, EMPTY_SET)


def compose_open(g: DecoratedCospan, f: DecoratedCospan) -> DecoratedCospan:
    """Glue ``f: X -> Y`` and ``g: Y -> Z`` into ``g ∘ f: X -> Z``.

    The apexes are pushed out over the shared boundary and the combined
    decoration is transported along the quotient map.
    """
    if f.kind is not g.kind:
        raise ValueError("cannot compose systems with different decoration kinds")
    if f.right != g.left:
        raise BoundaryMismatchError(
            f"outputs {list(f.right)} do not match inputs {list(g.left)}")
    po = pushout(f.cospan.o, g.cospan.i)
    decoration = f.kind.map_along(po.copair,
                                  f.kind.combine(f.decoration, g.decoration))
    cospan = Cospan(f.left, po.apex, g.right,
                    f.cospan.i.then(po.j), g.cospan.o.then(po.j2))
    return DecoratedCospan(f.kind, cospan, decoration)


def tensor_open(f: DecoratedCospan, f2: DecoratedCospan) -> DecoratedCospan:
    """Place two open systems side by side with no interaction."""
    if f.kind is not f2.kind:
        raise ValueError("cannot tensor systems with different decoration kinds")
    left, left_inl, left_inr = coproduct(f.left, f2.left)
    apex, apex_inl, apex_inr = coproduct(f.apex, f2.apex)
    right, right_inl, right_inr = coproduct(f.right, f2.right)
    i = FinFun(left, apex,
               tuple((left_inl(x), apex_inl(f.cospan.i(x))) for x in f.left)
               + tuple((left_inr(x), apex_inr(f2.cospan.i(x))) for x in f2.left))
    o = FinFun(right, apex,
               tuple((right_inl(y), apex_inl(f.cospan.o(y))) for y in f.right)
               + tuple((right_inr(y), apex_inr(f2.cospan.o(y))) for y in f2.right))
    return DecoratedCospan(f.kind, Cospan(left, apex, right, i, o),
                           f.kind.combine(f.decoration, f2.decoration))


def dagger(f: DecoratedCospan) -> DecoratedCospan:
    """Swap the roles of inputs and outputs; the decoration is untouched."""
    c = f.cospan
    return DecoratedCospan(f.kind, Cospan(c.right, c.apex, c.left, c.o, c.i),
                           f.decoration)


def is_equivalent(a: DecoratedCospan, b: DecoratedCospan) -> bool:
    """Whether two open systems differ only by renaming apex elements.

    True iff some bijection between the apexes commutes with both legs and
    carries one decoration to the other.  The legs pin down part of the
    bijection; the remaining elements are searched exhaustively, which is
    only feasible for small apexes (:data:`EQUIVALENCE_SEARCH_CAP`).
    """
    if a.kind is not b.kind:
        raise ValueError("cannot compare systems with different decoration kinds")
    if a.left != b.left or a.right != b.right:
        raise BoundaryMismatchError("equivalence needs equal boundary sets")
    if len(a.apex) != len(b.apex):
        return False

    forced: dict[str, str] = {}
    for x in a.left:
        src, dst = a.cospan.i(x), b.cospan.i(x)
        if forced.setdefault(src, dst) != dst:
            return False
    for y in a.right:
        src, dst = a.cospan.o(y), b.cospan.o(y)
        if forced.setdefault(src, dst) != dst:
            return False
    if len(set(forced.values())) != len(forced):
        return False

    free_a = [x for x in a.apex if x not in forced]
    free_b = [x for x in b.apex if x not in set(forced.values())]
    if len(free_a) != len(free_b):
        return False
    if len(free_a) > EQUIVALENCE_SEARCH_CAP:
        raise ApexTooLargeError(
            f"{len(free_a)} unconstrained apex elements exceed the search cap "
            f"of {EQUIVALENCE_SEARCH_CAP}")

    def matches(assignment: Mapping[str, str]) -> bool:
        h = FinFun.make(a.apex, b.apex, {**forced, **assignment})
        return a.kind.same(a.kind.map_along(h, a.decoration), b.decoration)

    # The sorted alignment succeeds immediately for systems built by the
    # same deterministic construction, so try it before the full search.
    first = dict(zip(free_a, free_b))
    if matches(first):
        return True
    for perm in permutations(free_b):
        assignment = dict(zip(free_a, perm))
        if assignment != first and matches(assignment):
            return True
    return False
