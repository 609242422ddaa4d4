"""Reaction networks with rate constants, and their use as decorations.

A reaction network is a finite set of species together with transitions
between *complexes* (multisets of species), each carrying a positive
rational rate constant.  Networks convert losslessly to and from the
Petri-net presentation (input/output multiplicity tables).

Networks decorate cospan apexes via :data:`NETWORK_DECORATION`: a species
map acts by summing multiplicities over merged species, and two networks
combine by disjoint union.  With that kind registered, composition,
tensoring, dagger and equivalence of open networks all come from
:mod:`openrxnet.finset`.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .finset import (Cospan, DecoratedCospan, DecorationKind, FinFun, FinSet,
                     RIGHT_SUFFIX, LEFT_SUFFIX, _disambiguate, coproduct)


@dataclass(frozen=True)
class Complex:
    """A multiset of species: the source or target of a transition."""

    counts: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        entries: dict[str, int] = {}
        for label, count in (self.counts.items()
                             if isinstance(self.counts, Mapping) else self.counts):
            if count < 0:
                raise ValueError(f"negative multiplicity for {label!r}")
            if count:
                entries[label] = entries.get(label, 0) + count
        object.__setattr__(self, "counts", tuple(sorted(entries.items())))

    def get(self, label: str) -> int:
        return dict(self.counts).get(label, 0)

    def total(self) -> int:
        return sum(k for _, k in self.counts)

    def support(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.counts)

    def items(self):
        return iter(self.counts)

    def is_empty(self) -> bool:
        return not self.counts

    def relabel(self, f: FinFun) -> Complex:
        """Push the multiset forward: merged species sum their counts."""
        merged: dict[str, int] = {}
        for label, count in self.counts:
            image = f(label)
            merged[image] = merged.get(image, 0) + count
        return Complex(tuple(merged.items()))

    def __str__(self) -> str:
        if not self.counts:
            return "0"
        return " + ".join(label if k == 1 else f"{k} {label}"
                          for label, k in self.counts)


EMPTY_COMPLEX = Complex()


def _as_rate(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("rate constants must be exact: pass Fraction, int or str")
    rate = Fraction(value)
    if rate <= 0:
        raise ValueError(f"rate constant must be positive, got {rate}")
    return rate


@dataclass(frozen=True)
class Transition:
    """A named reaction between two complexes with a positive rate."""

    name: str
    source: Complex
    target: Complex
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", _as_rate(self.rate))


@dataclass(frozen=True)
class ReactionNetwork:
    """Species plus rated transitions; the decoration of an open network."""

    species: FinSet = FinSet()
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise ValueError("transition names must be pairwise distinct")
        for t in self.transitions:
            for label in t.source.support() + t.target.support():
                if label not in self.species:
                    raise ValueError(
                        f"transition {t.name!r} mentions unknown species {label!r}")

    def signature(self) -> tuple:
        """Name-independent content: the sorted multiset of reactions."""
        return tuple(sorted((t.source.counts, t.target.counts, t.rate)
                            for t in self.transitions))


EMPTY_NETWORK = ReactionNetwork()


def complexes(net: ReactionNetwork) -> frozenset[Complex]:
    """All source and target complexes occurring in the network."""
    out: set[Complex] = set()
    for t in net.transitions:
        out.add(t.source)
        out.add(t.target)
    return frozenset(out)


def is_markov(net: ReactionNetwork) -> bool:
    """Whether every transition moves exactly one token to one token.

    Such networks have linear rate equations, which enables the exact
    linear-relation path in :mod:`openrxnet.blackbox`.
    """
    return all(t.source.total() == 1 and t.target.total() == 1
               for t in net.transitions)


def map_species(f: FinFun, net: ReactionNetwork) -> ReactionNetwork:
    """Apply a species map: complexes are pushed forward, rates kept.

    The multiplicity of a merged species is the sum over its preimages.
    This is functorial: identity maps act trivially and composites act in
    stages.
    """
    if f.dom != net.species:
        raise ValueError("species map must be defined on the network's species")
    return ReactionNetwork(
        f.cod,
        tuple(Transition(t.name, t.source.relabel(f), t.target.relabel(f), t.rate)
              for t in net.transitions))


def disjoint_union(a: ReactionNetwork, b: ReactionNetwork) -> ReactionNetwork:
    """Two networks side by side on the disjoint union of their species.

    Species labels are renamed by :func:`openrxnet.finset.coproduct`;
    colliding transition names get the same deterministic suffix treatment.
    """
    union, inl, inr = coproduct(a.species, b.species)
    shared = {t.name for t in a.transitions} & {t.name for t in b.transitions}
    taken = ({t.name for t in a.transitions} | {t.name for t in b.transitions}) - shared

    def renamed(transitions, leg, suffix):
        out = []
        for t in transitions:
            name = t.name
            if name in shared:
                name = _disambiguate(name, suffix, taken)
                taken.add(name)
            out.append(Transition(name, t.source.relabel(leg),
                                  t.target.relabel(leg), t.rate))
        return out

    merged = renamed(a.transitions, inl, LEFT_SUFFIX) \
        + renamed(b.transitions, inr, RIGHT_SUFFIX)
    return ReactionNetwork(union, tuple(merged))


class NetworkDecoration(DecorationKind):
    """Reaction networks as cospan decorations."""

    def carrier(self, decoration: ReactionNetwork) -> FinSet:
        return decoration.species

    def map_along(self, f: FinFun, decoration: ReactionNetwork) -> ReactionNetwork:
        return map_species(f, decoration)

    def combine(self, d: ReactionNetwork, d2: ReactionNetwork) -> ReactionNetwork:
        return disjoint_union(d, d2)

    def empty(self) -> ReactionNetwork:
        return EMPTY_NETWORK

    def same(self, d: ReactionNetwork, d2: ReactionNetwork) -> bool:
        # Transition names are bookkeeping for stable output; two networks
        # with the same species and the same multiset of rated reactions
        # describe the same system.
        return d.species == d2.species and d.signature() == d2.signature()


NETWORK_DECORATION = NetworkDecoration()


def open_network(net: ReactionNetwork,
                 inputs: Mapping[str, str],
                 outputs: Mapping[str, str]) -> DecoratedCospan:
    """Wrap a network as an open system with named boundary points.

    ``inputs`` and ``outputs`` map point names to the species they touch.
    """
    left = FinSet(tuple(inputs))
    right = FinSet(tuple(outputs))
    cospan = Cospan(left, net.species, right,
                    FinFun.make(left, net.species, dict(inputs)),
                    FinFun.make(right, net.species, dict(outputs)))
    return DecoratedCospan(NETWORK_DECORATION, cospan, net)


@dataclass(frozen=True)
class PetriView:
    """The same data as a network, as input/output multiplicity tables."""

    species: FinSet
    transitions: tuple[str, ...]
    inputs: tuple[tuple[tuple[str, str], int], ...]
    outputs: tuple[tuple[tuple[str, str], int], ...]
    rates: tuple[tuple[str, Fraction], ...]

    def m(self, species: str, transition: str) -> int:
        """How many times ``species`` enters ``transition``."""
        return dict(self.inputs).get((species, transition), 0)

    def n(self, species: str, transition: str) -> int:
        """How many times ``species`` leaves ``transition``."""
        return dict(self.outputs).get((species, transition), 0)

    def rate(self, transition: str) -> Fraction:
        return dict(self.rates)[transition]


def to_petri(net: ReactionNetwork) -> PetriView:
    """Tabulate a network's stoichiometry (zero entries omitted)."""
    inputs = []
    outputs = []
    for t in net.transitions:
        inputs.extend((((label, t.name), k) for label, k in t.source.items()))
        outputs.extend((((label, t.name), k) for label, k in t.target.items()))
    return PetriView(net.species,
                     tuple(t.name for t in net.transitions),
                     tuple(inputs), tuple(outputs),
                     tuple((t.name, t.rate) for t in net.transitions))


def from_petri(view: PetriView) -> ReactionNetwork:
    """Rebuild a network from its tables, preserving transition order."""
    inputs = dict(view.inputs)
    outputs = dict(view.outputs)
    transitions = []
    for name in view.transitions:
        source = Complex(tuple((s, inputs[(s, name)]) for s in view.species
                               if (s, name) in inputs))
        target = Complex(tuple((s, outputs[(s, name)]) for s in view.species
                               if (s, name) in outputs))
        transitions.append(Transition(name, source, target, view.rate(name)))
    return ReactionNetwork(view.species, tuple(transitions))
