"""Randomized executable law suites.

The algebra of open systems comes with laws: pushouts agree with a
brute-force closure, decoration actions are functorial, composition is
associative up to equivalence, gray-boxing commutes with everything, and
linear behavior composes exactly.  Each suite here generates seeded
random instances, checks one family of laws, and reports failures as
strings.  The same suites back the ``check-laws`` CLI subcommand and the
acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dynamics
from . import network
from .blackbox import (STEADY_TOL, compose_linear, flows_for, linear_blackbox,
                       partition, residual, sample_blackbox)
from .dynamics import (FIELD_DECORATION, PolyField, grey_box, map_variables,
                       mass_action_field, pullback, pushforward)
from .finset import (Cospan, DecoratedCospan, FinFun, FinSet, compose_open,
                     coproduct, dagger, identity_open, is_equivalent, pushout,
                     tensor_open)
from .network import (NETWORK_DECORATION, Complex, ReactionNetwork,
                      Transition, map_species)
from .poly import Poly

_SPECIES_POOL = tuple("ABCDEFGH")
_POINT_POOL = tuple(str(k) for k in range(1, 7))


@dataclass
class LawReport:
    """Outcome of one suite: every failure is a human-readable string."""

    name: str
    cases: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = "" if self.passed else f", {len(self.failures)} failing"
        return f"{status} {self.name} ({self.cases} cases{detail})"


def _pick_labels(rng, pool, size) -> tuple[str, ...]:
    chosen = rng.choice(len(pool), size=size, replace=False)
    return tuple(pool[int(k)] for k in sorted(chosen))


def _random_finset(rng, max_size: int, pool=_SPECIES_POOL,
                   min_size: int = 0) -> FinSet:
    size = int(rng.integers(min_size, max_size + 1))
    return FinSet(_pick_labels(rng, pool, size))


def _random_complex(rng, species: FinSet, allow_empty: bool = True) -> Complex:
    if not len(species):
        return Complex()
    low = 0 if allow_empty else 1
    support = int(rng.integers(low, min(len(species), 2) + 1))
    labels = _pick_labels(rng, species.elements, support)
    return Complex(tuple((s, int(rng.integers(1, 3))) for s in labels))


def _random_rate(rng) -> Fraction:
    return Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 6)))


def _random_network(rng, species: FinSet, max_transitions: int = 3,
                    tag: str = "t") -> ReactionNetwork:
    count = int(rng.integers(0, max_transitions + 1)) if len(species) else 0
    transitions = tuple(
        Transition(f"{tag}{k}", _random_complex(rng, species),
                   _random_complex(rng, species), _random_rate(rng))
        for k in range(count))
    return ReactionNetwork(species, transitions)


def _random_legs(rng, boundary: FinSet, apex: FinSet) -> FinFun:
    return FinFun.make(boundary, apex,
                       {p: apex.elements[int(rng.integers(0, len(apex)))]
                        for p in boundary})


def _random_open_network(rng, left: FinSet, right: FinSet,
                         max_species: int = 3,
                         tag: str = "t") -> DecoratedCospan:
    min_size = 1 if (len(left) or len(right)) else 0
    apex = _random_finset(rng, max_species, min_size=min_size)
    if min_size and not len(apex):
        apex = FinSet(("A",))
    net = _random_network(rng, apex, tag=tag)
    cospan = Cospan(left, apex, right,
                    _random_legs(rng, left, apex), _random_legs(rng, right, apex))
    return DecoratedCospan(NETWORK_DECORATION, cospan, net)


def _random_fun(rng, dom: FinSet, max_cod: int = 4) -> FinFun:
    min_size = 1 if len(dom) else 0
    cod = _random_finset(rng, max_cod, min_size=min_size)
    if min_size and not len(cod):
        cod = FinSet(("Z",))
    return _random_legs(rng, dom, cod) if len(dom) else FinFun.make(dom, cod, {})


def _random_field(rng, vars: FinSet) -> PolyField:
    table = {}
    for label in vars:
        terms = []
        for _ in range(int(rng.integers(0, 3))):
            mono = _random_complex(rng, vars)
            terms.append((mono.counts, _random_rate(rng) - Fraction(2)))
        table[label] = Poly(tuple(terms))
    return PolyField(vars, tuple(table.items()))


def pushout_oracle_suite(cases: int = 1000, seed: int = 101,
                         max_total: int = 12) -> LawReport:
    """Pushout classes must match a breadth-first closure of the seeds."""
    rng = np.random.default_rng(seed)
    report = LawReport("pushout matches brute-force closure", cases)
    pool = tuple(f"s{k}" for k in range(max_total))
    for case in range(cases):
        n1 = int(rng.integers(0, max_total + 1))
        n2 = int(rng.integers(0, max_total - n1 + 1))
        s1 = FinSet(_pick_labels(rng, pool, n1))
        s2 = FinSet(_pick_labels(rng, pool, n2))
        ny = int(rng.integers(0, 5)) if len(s1) and len(s2) else 0
        y = FinSet(tuple(f"y{k}" for k in range(ny)))
        o = _random_legs(rng, y, s1) if ny else FinFun.make(y, s1, {})
        i2 = _random_legs(rng, y, s2) if ny else FinFun.make(y, s2, {})
        po = pushout(o, i2)

        # Independent oracle: connected components by breadth-first search.
        adjacency = {x: set() for x in po.union}
        for point in y:
            a, b = po.inl(o(point)), po.inr(i2(point))
            adjacency[a].add(b)
            adjacency[b].add(a)
        seen: set[str] = set()
        components: set[frozenset[str]] = set()
        for x in po.union:
            if x in seen:
                continue
            queue, component = [x], set()
            while queue:
                node = queue.pop()
                if node in component:
                    continue
                component.add(node)
                queue.extend(adjacency[node] - component)
            seen |= component
            components.add(frozenset(component))

        grouped: dict[str, set[str]] = {}
        for x in po.union:
            grouped.setdefault(po.copair(x), set()).add(x)
        actual = {frozenset(v) for v in grouped.values()}
        if actual != components:
            report.failures.append(f"case {case}: classes {actual} "
                                   f"!= closure {components}")
        if len(po.apex) != len(components):
            report.failures.append(f"case {case}: apex size mismatch")
    return report


def functor_law_suite(cases: int = 100, seed: int = 202) -> LawReport:
    """Identity/composition laws for both decoration actions, plus
    adjointness of pullback and pushforward."""
    rng = np.random.default_rng(seed)
    report = LawReport("decoration functor laws", cases)
    for case in range(cases):
        species = _random_finset(rng, 4, min_size=1)
        net = _random_network(rng, species)
        f = _random_fun(rng, species)
        g = _random_fun(rng, f.cod)

        if map_species(FinFun.identity(species), net) != net:
            report.failures.append(f"case {case}: network identity law")
        if map_species(f.then(g), net) != map_species(g, map_species(f, net)):
            report.failures.append(f"case {case}: network composition law")
        mapped = map_species(f, net)
        if [t.rate for t in mapped.transitions] != [t.rate for t in net.transitions]:
            report.failures.append(f"case {case}: rates not preserved")
        for before, after in zip(net.transitions, mapped.transitions):
            if before.source.total() != after.source.total():
                report.failures.append(
                    f"case {case}: source multiplicity total changed")

        v = _random_field(rng, species)
        if map_variables(FinFun.identity(species), v) != v:
            report.failures.append(f"case {case}: field identity law")
        if map_variables(f.then(g), v) != map_variables(g, map_variables(f, v)):
            report.failures.append(f"case {case}: field composition law")

        point = {s: float(rng.uniform(0.1, 2.0)) for s in f.cod}
        direct = map_variables(f, v).evaluate(point)
        via_maps = pushforward(f, v.evaluate(pullback(f, point)))
        if max(abs(direct[s] - via_maps[s]) for s in f.cod) > 1e-12:
            report.failures.append(f"case {case}: evaluation consistency")

        weights = {s: float(rng.uniform(-1.0, 1.0)) for s in species}
        lhs = sum(pushforward(f, weights)[s] * point[s] for s in f.cod)
        rhs = sum(weights[s] * pullback(f, point)[s] for s in species)
        if abs(lhs - rhs) > 1e-12:
            report.failures.append(f"case {case}: pullback/pushforward adjointness")
    return report


def naturality_suite(cases: int = 500, seed: int = 303) -> LawReport:
    """Mass action commutes with species maps, exactly."""
    rng = np.random.default_rng(seed)
    report = LawReport("mass action naturality", cases)
    for case in range(cases):
        species = _random_finset(rng, 5, min_size=1)
        net = _random_network(rng, species, max_transitions=4)
        f = _random_fun(rng, species, max_cod=5)
        lhs = mass_action_field(map_species(f, net))
        rhs = map_variables(f, mass_action_field(net))
        if lhs != rhs:
            report.failures.append(f"case {case}: {lhs} != {rhs}")
    return report


def monoidality_suite(cases: int = 100, seed: int = 404) -> LawReport:
    """Mass action of a disjoint union is the disjoint union of fields;
    disjoint unions braid; token-conserving networks conserve total mass."""
    rng = np.random.default_rng(seed)
    report = LawReport("mass action monoidality", cases)
    for case in range(cases):
        a = _random_network(rng, _random_finset(rng, 3, min_size=1), tag="a")
        b = _random_network(rng, _random_finset(rng, 3, min_size=1), tag="b")
        lhs = mass_action_field(network.disjoint_union(a, b))
        rhs = dynamics.disjoint_union(mass_action_field(a), mass_action_field(b))
        if lhs != rhs:
            report.failures.append(f"case {case}: monoidality square")

        union_ab, inl_a, inr_b = coproduct(a.species, b.species)
        union_ba, inl_b, inr_a = coproduct(b.species, a.species)
        braiding = FinFun(union_ab, union_ba,
                          tuple((inl_a(s), inr_a(s)) for s in a.species)
                          + tuple((inr_b(s), inl_b(s)) for s in b.species))
        transported = map_species(braiding, network.disjoint_union(a, b))
        if not NETWORK_DECORATION.same(transported, network.disjoint_union(b, a)):
            report.failures.append(f"case {case}: network braiding")
        va, vb = mass_action_field(a), mass_action_field(b)
        if map_variables(braiding, dynamics.disjoint_union(va, vb)) \
                != dynamics.disjoint_union(vb, va):
            report.failures.append(f"case {case}: field braiding")

        species = _random_finset(rng, 4, min_size=1)
        conserving = []
        for k in range(int(rng.integers(1, 3))):
            source = _random_complex(rng, species, allow_empty=False)
            labels = [species.elements[int(rng.integers(0, len(species)))]
                      for _ in range(source.total())]
            target = Complex(tuple((s, labels.count(s)) for s in set(labels)))
            conserving.append(Transition(f"c{k}", source, target,
                                         _random_rate(rng)))
        total = Poly.zero()
        for _, poly in mass_action_field(
                ReactionNetwork(species, tuple(conserving))).components:
            total = total + poly
        if not total.is_zero():
            report.failures.append(f"case {case}: conservation, sum {total}")
    return report


def _random_composable_chain(rng, count: int, max_species: int = 3,
                             max_boundary: int = 2) -> list[DecoratedCospan]:
    boundaries = [_random_finset(rng, max_boundary, pool=_POINT_POOL)
                  for _ in range(count + 1)]
    return [_random_open_network(rng, boundaries[k], boundaries[k + 1],
                                 max_species=max_species, tag=f"t{k}_")
            for k in range(count)]


def category_law_suite(cases: int = 200, seed: int = 505) -> LawReport:
    """Associativity, units, dagger laws, interchange, and gray-box
    functoriality on random composable open networks."""
    rng = np.random.default_rng(seed)
    report = LawReport("category and gray-boxing laws", cases)
    for case in range(cases):
        f, g, h = _random_composable_chain(rng, 3)

        left_first = compose_open(h, compose_open(g, f))
        right_first = compose_open(compose_open(h, g), f)
        if not is_equivalent(left_first, right_first):
            report.failures.append(f"case {case}: associativity")

        if not is_equivalent(
                compose_open(f, identity_open(NETWORK_DECORATION, f.left)), f):
            report.failures.append(f"case {case}: right unit")
        if not is_equivalent(
                compose_open(identity_open(NETWORK_DECORATION, f.right), f), f):
            report.failures.append(f"case {case}: left unit")

        if dagger(dagger(f)) != f:
            report.failures.append(f"case {case}: dagger involution")
        if not is_equivalent(dagger(compose_open(g, f)),
                             compose_open(dagger(f), dagger(g))):
            report.failures.append(f"case {case}: dagger contravariance")

        if not is_equivalent(grey_box(compose_open(g, f)),
                             compose_open(grey_box(g), grey_box(f))):
            report.failures.append(f"case {case}: gray-box functoriality")

        if case % 4 == 0:
            f2, g2 = _random_composable_chain(rng, 2)
            tensored = compose_open(tensor_open(g, g2), tensor_open(f, f2))
            pairwise = tensor_open(compose_open(g, f), compose_open(g2, f2))
            if not is_equivalent(tensored, pairwise):
                report.failures.append(f"case {case}: interchange")
    return report


def _random_markov_open(rng, left: FinSet, right: FinSet,
                        tag: str) -> DecoratedCospan:
    min_size = 1 if (len(left) or len(right)) else 0
    apex = _random_finset(rng, 4, min_size=max(min_size, 1))
    transitions = []
    for k in range(int(rng.integers(1, 4))):
        src = apex.elements[int(rng.integers(0, len(apex)))]
        dst = apex.elements[int(rng.integers(0, len(apex)))]
        transitions.append(Transition(f"{tag}{k}", Complex(((src, 1),)),
                                      Complex(((dst, 1),)), _random_rate(rng)))
    net = ReactionNetwork(apex, tuple(transitions))
    cospan = Cospan(left, apex, right,
                    _random_legs(rng, left, apex), _random_legs(rng, right, apex))
    return DecoratedCospan(NETWORK_DECORATION, cospan, net)


def markov_linear_suite(cases: int = 100, seed: int = 606) -> LawReport:
    """Exact linear behavior composes: extract-then-compose equals
    compose-then-extract, as identical echelon bases."""
    rng = np.random.default_rng(seed)
    report = LawReport("linear behavior composition", cases)
    for case in range(cases):
        x = _random_finset(rng, 2, pool=_POINT_POOL)
        y = _random_finset(rng, 2, pool=_POINT_POOL, min_size=1)
        z = _random_finset(rng, 2, pool=_POINT_POOL)
        f = _random_markov_open(rng, x, y, tag="f")
        g = _random_markov_open(rng, y, z, tag="g")
        composed = linear_blackbox(grey_box(compose_open(g, f)))
        pairwise = compose_linear(linear_blackbox(grey_box(g)),
                                  linear_blackbox(grey_box(f)))
        if composed != pairwise:
            report.failures.append(
                f"case {case}: {composed.basis} != {pairwise.basis}")
    return report


def steady_state_suite(cases: int = 15, seed: int = 707) -> LawReport:
    """Sampled steady tuples satisfy the residual bound independently;
    kernel flows change nothing; Markov samples live in the exact relation."""
    rng = np.random.default_rng(seed)
    report = LawReport("steady-state sampling invariants", cases)
    for case in range(cases):
        x = _random_finset(rng, 2, pool=_POINT_POOL)
        y = _random_finset(rng, 2, pool=_POINT_POOL)
        sys = grey_box(_random_open_network(rng, x, y, max_species=3))
        tuples = sample_blackbox(sys, 3, seed=int(rng.integers(0, 10**6)))
        for t in tuples:
            res = residual(sys, t.witness, t.inflow, t.outflow)
            if max(map(abs, res.values()), default=0.0) > STEADY_TOL:
                report.failures.append(f"case {case}: emitted tuple not steady")
        if tuples:
            t = tuples[0]
            flows = flows_for(sys, t.witness, internal_tol=STEADY_TOL)
            if flows is None:
                report.failures.append(f"case {case}: flow solve lost a root")
            else:
                for k_in, k_out in flows.kernel:
                    base = residual(sys, t.witness, t.inflow, t.outflow)
                    shifted = residual(
                        sys, t.witness,
                        {p: t.inflow[p] + float(k_in[p]) for p in t.inflow},
                        {p: t.outflow[p] + float(k_out[p]) for p in t.outflow})
                    gap = max((abs(base[s] - shifted[s]) for s in base),
                              default=0.0)
                    if gap > 1e-9:
                        report.failures.append(
                            f"case {case}: kernel flow changed the residual")

        markov = grey_box(_random_markov_open(rng, x, y, tag="m"))
        relation = linear_blackbox(markov)
        from .blackbox import tuple_coordinates
        for t in sample_blackbox(markov, 2, seed=int(rng.integers(0, 10**6))):
            if not relation.contains(tuple_coordinates(markov, t)):
                report.failures.append(
                    f"case {case}: Markov sample outside the exact relation")
    return report


def all_suites(seed: int = 0, cases: int | None = None) -> list[LawReport]:
    """Run every suite; ``cases`` overrides each suite's default count."""
    def n(default: int) -> int:
        return cases if cases is not None else default

    return [
        pushout_oracle_suite(n(1000), seed + 101),
        functor_law_suite(n(100), seed + 202),
        naturality_suite(n(500), seed + 303),
        monoidality_suite(n(100), seed + 404),
        category_law_suite(n(200), seed + 505),
        markov_linear_suite(n(100), seed + 606),
        steady_state_suite(max(5, n(15) // 10) if cases is not None else 15,
                           seed + 707),
    ]
