"""Hand-built networks reused across the test suite.

The SIRS epidemic model and a two-stage synthesis chain (A+B -> 2C fed
into C -> E+F) exercise every part of the library: composition with a
merged species, mass-action compilation, steady states and behavioral
composition.
"""

from __future__ import annotations

from fractions import Fraction

from openrxnet import (Complex, DecoratedCospan, FinSet, ReactionNetwork,
                       Transition, compose_open, open_network)

R_INFECTION = Fraction(1, 2)
R_RECOVERY = Fraction(1, 3)
R_RELAPSE = Fraction(1, 5)


def sirs_network(r_infection=R_INFECTION, r_recovery=R_RECOVERY,
                 r_relapse=R_RELAPSE) -> ReactionNetwork:
    """S + I -> 2I, I -> R, R -> S."""
    return ReactionNetwork(FinSet(("I", "R", "S")), (
        Transition("iota", Complex({"S": 1, "I": 1}), Complex({"I": 2}),
                   r_infection),
        Transition("rho", Complex({"I": 1}), Complex({"R": 1}), r_recovery),
        Transition("lam", Complex({"R": 1}), Complex({"S": 1}), r_relapse),
    ))


def sirs_infection_half(rate=R_INFECTION) -> DecoratedCospan:
    """The infection reaction alone, exposing I and S as outputs."""
    net = ReactionNetwork(FinSet(("I", "S")), (
        Transition("iota", Complex({"S": 1, "I": 1}), Complex({"I": 2}), rate),
    ))
    return open_network(net, inputs={}, outputs={"1": "I", "2": "S"})


def sirs_turnover_half(r_recovery=R_RECOVERY,
                       r_relapse=R_RELAPSE) -> DecoratedCospan:
    """Recovery and relapse, taking I and S as inputs."""
    net = ReactionNetwork(FinSet(("I", "R", "S")), (
        Transition("rho", Complex({"I": 1}), Complex({"R": 1}), r_recovery),
        Transition("lam", Complex({"R": 1}), Complex({"S": 1}), r_relapse),
    ))
    return open_network(net, inputs={"1": "I", "2": "S"}, outputs={})


def sirs_composite() -> DecoratedCospan:
    """The closed SIRS model, built by gluing the two halves."""
    return compose_open(sirs_turnover_half(), sirs_infection_half())


def synthesis_stage(rate=Fraction(1)) -> DecoratedCospan:
    """A + B -> 2C with inputs 1->A, 2->B, 3->B and output 4->C."""
    net = ReactionNetwork(FinSet(("A", "B", "C")), (
        Transition("alpha", Complex({"A": 1, "B": 1}), Complex({"C": 2}), rate),
    ))
    return open_network(net, inputs={"1": "A", "2": "B", "3": "B"},
                        outputs={"4": "C"})


def splitting_stage(rate=Fraction(2)) -> DecoratedCospan:
    """D -> E + F with input 4->D and outputs 5->E, 6->F."""
    net = ReactionNetwork(FinSet(("D", "E", "F")), (
        Transition("beta", Complex({"D": 1}), Complex({"E": 1, "F": 1}), rate),
    ))
    return open_network(net, inputs={"4": "D"}, outputs={"5": "E", "6": "F"})


def synthesis_chain(rate_alpha=Fraction(1),
                    rate_beta=Fraction(2)) -> DecoratedCospan:
    """The two stages composed; C and D merge into one species named C."""
    return compose_open(splitting_stage(rate_beta), synthesis_stage(rate_alpha))


def pair_reaction_open(rate=Fraction(1)) -> DecoratedCospan:
    """A + B -> C + D with inputs 1->A, 2->B, 3->B and output 4->C."""
    net = ReactionNetwork(FinSet(("A", "B", "C", "D")), (
        Transition("tau", Complex({"A": 1, "B": 1}), Complex({"C": 1, "D": 1}),
                   rate),
    ))
    return open_network(net, inputs={"1": "A", "2": "B", "3": "B"},
                        outputs={"4": "C"})
