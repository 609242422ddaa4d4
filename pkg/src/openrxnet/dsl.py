"""The ``.orn`` text format for open reaction networks.

A document is a sequence of lines::

    # comment
    species A B C
    transition alpha: A + B -> 2 C @ 1/2
    input 1 -> A
    output 4 -> C

Complexes are ``+``-separated terms, each an optional multiplicity
followed by a species name; the empty complex is written ``0``.  Rates
are positive integers, decimals, or fractions ``p/q``; decimals are read
exactly (``0.5`` is one half).  Input and output lines name boundary
points and the species they touch; point names may be bare numbers.

Species and transition names start with a letter or underscore and may
continue with letters, digits, ``_``, ``'`` and ``·`` (the label
disambiguator, so composed networks stay printable).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .dsl_tokens import Token, tokenize_line
from .errors import DslError
from .finset import DecoratedCospan
from .network import Complex, ReactionNetwork, Transition, open_network

_SPECIES_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_'·]*\Z")
_POINT_NAME = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_'·]*\Z")
_NAT = re.compile(r"[0-9]+\Z")
_NUMBER = re.compile(r"[0-9]+(\.[0-9]+)?\Z|[0-9]+/[0-9]+\Z")


@dataclass
class NetworkDocument:
    """Parsed form of one document, before conversion to an open network."""

    species: list[str] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def to_open(self) -> DecoratedCospan:
        from .finset import FinSet
        net = ReactionNetwork(FinSet(tuple(self.species)),
                              tuple(self.transitions))
        return open_network(net, self.inputs, self.outputs)


class _LineParser:
    def __init__(self, tokens: list[Token], line_no: int):
        self.tokens = tokens
        self.line_no = line_no
        self.pos = 0

    def error(self, message: str, token: Token | None = None) -> DslError:
        column = token.column if token is not None else (
            self.tokens[-1].column + len(self.tokens[-1].text)
            if self.tokens else 1)
        return DslError(message, self.line_no, column)

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str) -> Token:
        token = self.peek()
        if token is None:
            raise self.error(f"expected {expected} at end of line")
        self.pos += 1
        return token

    def expect(self, kind: str, expected: str) -> Token:
        token = self.next(expected)
        if token.kind != kind:
            raise self.error(f"expected {expected}, found {token.text!r}", token)
        return token

    def done(self) -> bool:
        return self.pos >= len(self.tokens)


def _parse_rate(token: Token, parser: _LineParser) -> Fraction:
    if not _NUMBER.match(token.text):
        raise parser.error(f"expected a rate constant, found {token.text!r}",
                           token)
    rate = Fraction(token.text)
    if rate <= 0:
        raise parser.error(f"rate constant must be positive, got {token.text}",
                           token)
    return rate


def _parse_complex(parser: _LineParser, declared: set[str],
                   stop_kinds: tuple[str, ...]) -> Complex:
    first = parser.peek()
    if first is not None and first.kind == "word" and first.text == "0":
        probe = parser.tokens[parser.pos + 1] if parser.pos + 1 < len(parser.tokens) else None
        if probe is None or probe.kind in stop_kinds:
            parser.pos += 1
            return Complex()
    counts: list[tuple[str, int]] = []
    while True:
        token = parser.next("a complex term")
        if token.kind != "word":
            raise parser.error(f"expected a complex term, found {token.text!r}",
                               token)
        if _NAT.match(token.text):
            multiplicity = int(token.text)
            if multiplicity == 0:
                raise parser.error("multiplicity must be at least 1", token)
            token = parser.next("a species name")
        else:
            multiplicity = 1
        if token.kind != "word" or not _SPECIES_NAME.match(token.text):
            raise parser.error(f"expected a species name, found {token.text!r}",
                               token)
        if token.text not in declared:
            raise parser.error(f"undeclared species {token.text!r}", token)
        counts.append((token.text, multiplicity))
        nxt = parser.peek()
        if nxt is None or nxt.kind in stop_kinds:
            return Complex(tuple(counts))
        if nxt.kind != "plus":
            raise parser.error(f"expected '+', found {nxt.text!r}", nxt)
        parser.pos += 1


def parse_document(text: str) -> NetworkDocument:
    """Parse a document into its declarations, validating as it goes."""
    doc = NetworkDocument()
    declared: set[str] = set()
    transition_names: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        parser = _LineParser(tokenize_line(line, line_no), line_no)
        head = parser.expect("word", "a declaration keyword")
        if head.text == "species":
            if parser.done():
                raise parser.error("expected at least one species name")
            while not parser.done():
                token = parser.expect("word", "a species name")
                if not _SPECIES_NAME.match(token.text):
                    raise parser.error(
                        f"invalid species name {token.text!r}", token)
                if token.text in declared:
                    raise parser.error(
                        f"duplicate species {token.text!r}", token)
                declared.add(token.text)
                doc.species.append(token.text)
        elif head.text == "transition":
            name = parser.expect("word", "a transition name")
            if not _SPECIES_NAME.match(name.text):
                raise parser.error(f"invalid transition name {name.text!r}", name)
            if name.text in transition_names:
                raise parser.error(f"duplicate transition {name.text!r}", name)
            parser.expect("colon", "':'")
            source = _parse_complex(parser, declared, ("arrow",))
            parser.expect("arrow", "'->'")
            target = _parse_complex(parser, declared, ("at",))
            parser.expect("at", "'@'")
            rate = _parse_rate(parser.expect("word", "a rate constant"), parser)
            if not parser.done():
                raise parser.error("unexpected input after rate", parser.peek())
            transition_names.add(name.text)
            doc.transitions.append(Transition(name.text, source, target, rate))
        elif head.text in ("input", "output"):
            point = parser.expect("word", "a point name")
            if not _POINT_NAME.match(point.text):
                raise parser.error(f"invalid point name {point.text!r}", point)
            parser.expect("arrow", "'->'")
            species = parser.expect("word", "a species name")
            if species.text not in declared:
                raise parser.error(
                    f"undeclared species {species.text!r}", species)
            if not parser.done():
                raise parser.error("unexpected input after species",
                                   parser.peek())
            table = doc.inputs if head.text == "input" else doc.outputs
            if point.text in table:
                raise parser.error(
                    f"duplicate {head.text} point {point.text!r}", point)
            table[point.text] = species.text
        else:
            raise parser.error(
                f"unknown declaration {head.text!r} "
                "(expected species, transition, input or output)", head)
    return doc


def parse(text: str) -> DecoratedCospan:
    """Parse a document straight into an open reaction network."""
    return parse_document(text).to_open()


def _rate_text(rate: Fraction) -> str:
    return str(rate.numerator) if rate.denominator == 1 else str(rate)


def render(open_net: DecoratedCospan) -> str:
    """Serialize an open network; ``parse`` reads the result back.

    Species are listed in canonical order, transitions in stored order,
    boundary points sorted, so rendering is deterministic.
    """
    net: ReactionNetwork = open_net.decoration
    lines = []
    if len(net.species):
        lines.append("species " + " ".join(net.species))
    for t in net.transitions:
        lines.append(f"transition {t.name}: {t.source} -> {t.target}"
                     f" @ {_rate_text(t.rate)}")
    for point in open_net.left:
        lines.append(f"input {point} -> {open_net.cospan.i(point)}")
    for point in open_net.right:
        lines.append(f"output {point} -> {open_net.cospan.o(point)}")
    return "\n".join(lines) + ("\n" if lines else "")
