"""Finite sets, pushouts, and the generic decorated-cospan engine."""

from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openrxnet import (ApexTooLargeError, BoundaryMismatchError, Cospan,
                       DecoratedCospan, FinFun, FinSet, NETWORK_DECORATION,
                       compose_open, coproduct, dagger, identity_open,
                       is_equivalent, pushout, tensor_open)
from openrxnet.finset import DecorationKind, empty_open

from tests.nets import splitting_stage, synthesis_stage


@dataclass(frozen=True)
class Marks:
    """Toy decoration: a set of (label, tag) marks on a carrier set."""

    carrier: FinSet
    marks: frozenset


class MarkKind(DecorationKind):
    def carrier(self, d):
        return d.carrier

    def map_along(self, f, d):
        return Marks(f.cod, frozenset((f(label), tag) for label, tag in d.marks))

    def combine(self, d, d2):
        union, inl, inr = coproduct(d.carrier, d2.carrier)
        return Marks(union,
                     frozenset((inl(l), t) for l, t in d.marks)
                     | frozenset((inr(l), t) for l, t in d2.marks))

    def empty(self):
        return Marks(FinSet(), frozenset())


MARKS = MarkKind()


def marked(labels, *marks, left=(), right=(), i=None, o=None):
    carrier = FinSet(tuple(labels))
    left_set, right_set = FinSet(tuple(left)), FinSet(tuple(right))
    cospan = Cospan(left_set, carrier, right_set,
                    FinFun.make(left_set, carrier, i or {}),
                    FinFun.make(right_set, carrier, o or {}))
    return DecoratedCospan(MARKS, cospan, Marks(carrier, frozenset(marks)))


class TestFinSet:
    def test_canonical_order(self):
        assert FinSet(("B", "A")).elements == ("A", "B")
        assert FinSet(("B", "A")) == FinSet(("A", "B"))

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            FinSet(("A", "A"))


class TestFinFun:
    def test_totality_enforced(self):
        dom, cod = FinSet(("a", "b")), FinSet(("x",))
        with pytest.raises(ValueError, match="domain"):
            FinFun.make(dom, cod, {"a": "x"})
        with pytest.raises(ValueError, match="codomain"):
            FinFun.make(dom, cod, {"a": "x", "b": "y"})

    def test_composition_and_fibers(self):
        dom, mid, cod = FinSet(("a", "b")), FinSet(("x", "y")), FinSet(("u",))
        f = FinFun.make(dom, mid, {"a": "x", "b": "y"})
        g = FinFun.make(mid, cod, {"x": "u", "y": "u"})
        assert f.then(g)("a") == "u"
        assert g.fiber("u") == ("x", "y")
        assert FinFun.identity(dom).is_bijection()


class TestCoproduct:
    def test_collisions_get_suffixes(self):
        union, inl, inr = coproduct(FinSet(("A", "B")), FinSet(("B", "C")))
        assert union.elements == ("A", "B·l", "B·r", "C")
        assert inl("B") == "B·l" and inr("B") == "B·r"
        assert inl("A") == "A" and inr("C") == "C"

    def test_empty_left_unit(self):
        union, inl, inr = coproduct(FinSet(), FinSet(("E", "F")))
        assert union == FinSet(("E", "F"))
        assert inl.mapping == ()
        assert inr("E") == "E"

    def test_disjoint_sides_unchanged(self):
        union, _, _ = coproduct(FinSet(("A", "B", "C", "D")), FinSet(("E", "F")))
        assert len(union) == 6

    def test_nested_collisions_stay_unique(self):
        union, _, _ = coproduct(FinSet(("B", "B·l")), FinSet(("B",)))
        assert len(union) == 3


class TestPushout:
    def test_merged_class_named_after_least_member(self):
        s = FinSet(("A", "B", "C", "D"))
        s2 = FinSet(("E", "F"))
        y = FinSet(("4", "5"))
        o = FinFun.make(y, s, {"4": "C", "5": "D"})
        i2 = FinFun.make(y, s2, {"4": "E", "5": "E"})
        po = pushout(o, i2)
        assert po.apex == FinSet(("A", "B", "C", "F"))
        assert po.j("C") == po.j("D") == po.j2("E") == "C"
        assert po.j("A") == "A" and po.j2("F") == "F"

    def test_empty_boundary_gives_coproduct(self):
        s, s2 = FinSet(("A",)), FinSet(("B",))
        empty = FinSet()
        po = pushout(FinFun.make(empty, s, {}), FinFun.make(empty, s2, {}))
        assert po.apex == FinSet(("A", "B"))

    def test_suffixed_copies_resolve_back_to_base_name(self):
        # Same label on both sides, merged through the boundary: the class
        # contains only suffixed copies but is named by the original label.
        s = FinSet(("S",))
        y = FinSet(("1",))
        o = FinFun.make(y, s, {"1": "S"})
        po = pushout(o, o)
        assert po.apex == FinSet(("S",))

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_bruteforce_closure(self, data):
        n1 = data.draw(st.integers(0, 4), label="n1")
        n2 = data.draw(st.integers(0, 4), label="n2")
        s = FinSet(tuple(f"a{k}" for k in range(n1)))
        s2 = FinSet(tuple(f"b{k}" for k in range(n2)))
        ny = data.draw(st.integers(0, 3), label="ny") if n1 and n2 else 0
        y = FinSet(tuple(f"y{k}" for k in range(ny)))
        o = FinFun.make(y, s, {p: data.draw(st.sampled_from(s.elements))
                               for p in y})
        i2 = FinFun.make(y, s2, {p: data.draw(st.sampled_from(s2.elements))
                                 for p in y})
        po = pushout(o, i2)

        # Oracle: transitive closure of the seeded relation by iteration.
        classes = [{x} for x in po.union]
        pairs = [(po.inl(o(p)), po.inr(i2(p))) for p in y]
        changed = True
        while changed:
            changed = False
            for a, b in pairs:
                ca = next(c for c in classes if a in c)
                cb = next(c for c in classes if b in c)
                if ca is not cb:
                    classes.remove(cb)
                    ca |= cb
                    changed = True
        expected = {frozenset(c) for c in classes}
        grouped = {}
        for x in po.union:
            grouped.setdefault(po.copair(x), set()).add(x)
        assert {frozenset(v) for v in grouped.values()} == expected


class TestComposition:
    def test_two_stage_gluing_merges_species(self):
        composite = compose_open(splitting_stage(), synthesis_stage())
        assert composite.apex == FinSet(("A", "B", "C", "E", "F"))
        by_name = {t.name: t for t in composite.decoration.transitions}
        assert by_name["alpha"].target.get("C") == 2
        assert by_name["beta"].source.get("C") == 1
        assert composite.left == FinSet(("1", "2", "3"))
        assert composite.right == FinSet(("5", "6"))

    def test_boundary_mismatch_raises(self):
        with pytest.raises(BoundaryMismatchError):
            compose_open(synthesis_stage(), splitting_stage())

    def test_identity_units(self):
        f = synthesis_stage()
        assert is_equivalent(
            compose_open(f, identity_open(NETWORK_DECORATION, f.left)), f)
        assert is_equivalent(
            compose_open(identity_open(NETWORK_DECORATION, f.right), f), f)

    def test_mark_decorations_compose_through_quotient(self):
        f = marked("ab", ("a", 1), right=("p",), o={"p": "a"})
        g = marked("cd", ("c", 2), left=("p",), i={"p": "c"}, right=())
        composite = compose_open(g, f)
        # a and c merge; the merged class keeps both marks.
        assert composite.decoration.marks == frozenset({("a", 1), ("a", 2)})


class TestTensor:
    def test_unit_is_empty_system(self):
        f = synthesis_stage()
        assert is_equivalent(tensor_open(f, empty_open(NETWORK_DECORATION)), f)

    def test_blocks_are_disjoint(self):
        t = tensor_open(synthesis_stage(), splitting_stage())
        assert len(t.apex) == 6
        assert len(t.decoration.transitions) == 2
        assert t.left == FinSet(("1", "2", "3", "4"))

    def test_colliding_points_get_suffixes(self):
        f = synthesis_stage()
        t = tensor_open(f, f)
        assert t.left == FinSet(("1·l", "1·r", "2·l", "2·r",
                                 "3·l", "3·r"))
        assert len(t.apex) == 6


class TestDagger:
    def test_involution_is_exact(self):
        f = synthesis_stage()
        assert dagger(dagger(f)) == f

    def test_identity_fixed(self):
        ident = identity_open(NETWORK_DECORATION, FinSet(("1", "2")))
        assert dagger(ident) == ident

    def test_contravariance(self):
        f, g = synthesis_stage(), splitting_stage()
        assert is_equivalent(dagger(compose_open(g, f)),
                             compose_open(dagger(f), dagger(g)))


class TestEquivalence:
    def test_transport_along_bijection(self):
        f = synthesis_stage()
        relabel = FinFun.make(f.apex, FinSet(("P", "Q", "R")),
                              {"A": "P", "B": "Q", "C": "R"})
        cospan = Cospan(f.left, relabel.cod, f.right,
                        f.cospan.i.then(relabel), f.cospan.o.then(relabel))
        transported = DecoratedCospan(
            NETWORK_DECORATION, cospan,
            NETWORK_DECORATION.map_along(relabel, f.decoration))
        assert is_equivalent(f, transported)

    def test_merged_species_name_is_immaterial(self):
        from fractions import Fraction
        from openrxnet import Complex, ReactionNetwork, Transition, open_network
        composite = compose_open(splitting_stage(), synthesis_stage())
        renamed = open_network(
            ReactionNetwork(FinSet(("A", "B", "E", "F", "Z")), (
                Transition("alpha", Complex({"A": 1, "B": 1}),
                           Complex({"Z": 2}), Fraction(1)),
                Transition("beta", Complex({"Z": 1}),
                           Complex({"E": 1, "F": 1}), Fraction(2)),
            )),
            inputs={"1": "A", "2": "B", "3": "B"},
            outputs={"5": "E", "6": "F"})
        assert is_equivalent(composite, renamed)

    def test_rate_mismatch_is_detected(self):
        from fractions import Fraction
        from openrxnet import Complex, ReactionNetwork, Transition, open_network

        def one_species(rate):
            net = ReactionNetwork(FinSet(("A",)), (
                Transition("t", Complex({"A": 1}), Complex({"A": 2}), rate),))
            return open_network(net, inputs={}, outputs={"1": "A"})

        assert not is_equivalent(one_species(Fraction(1)),
                                 one_species(Fraction(2)))

    def test_boundary_precondition(self):
        f = synthesis_stage()
        with pytest.raises(BoundaryMismatchError):
            is_equivalent(f, splitting_stage())

    def test_search_cap_raises(self):
        big = FinSet(tuple(f"s{k:02d}" for k in range(11)))
        other = FinSet(tuple(f"u{k:02d}" for k in range(11)))
        a = marked(big.elements)
        b = marked(other.elements)
        with pytest.raises(ApexTooLargeError):
            is_equivalent(a, b)


class TestMarkKindLaws:
    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_functor_laws(self, data):
        labels = FinSet(tuple(
            data.draw(st.sets(st.sampled_from("abcde"), min_size=1))))
        marks = Marks(labels, frozenset(
            (data.draw(st.sampled_from(labels.elements)), k)
            for k in range(data.draw(st.integers(0, 3)))))
        cod = FinSet(("x", "y"))
        f = FinFun.make(labels, cod,
                        {l: data.draw(st.sampled_from(cod.elements))
                         for l in labels})
        cod2 = FinSet(("u",))
        g = FinFun.make(cod, cod2, {"x": "u", "y": "u"})
        assert MARKS.map_along(FinFun.identity(labels), marks) == marks
        assert MARKS.map_along(f.then(g), marks) == \
            MARKS.map_along(g, MARKS.map_along(f, marks))

    def test_combine_naturality(self):
        # combine-then-map equals map-then-combine for coproduct maps.
        a = Marks(FinSet(("a", "b")), frozenset({("a", 1)}))
        b = Marks(FinSet(("c",)), frozenset({("c", 2)}))
        fa = FinFun.make(a.carrier, FinSet(("z",)), {"a": "z", "b": "z"})
        fb = FinFun.identity(b.carrier)
        union, inl, inr = coproduct(a.carrier, b.carrier)
        union2, inl2, inr2 = coproduct(fa.cod, fb.cod)
        sum_map = FinFun(union, union2,
                         tuple((inl(l), inl2(fa(l))) for l in a.carrier)
                         + tuple((inr(l), inr2(fb(l))) for l in b.carrier))
        assert MARKS.map_along(sum_map, MARKS.combine(a, b)) == \
            MARKS.combine(MARKS.map_along(fa, a), MARKS.map_along(fb, b))
