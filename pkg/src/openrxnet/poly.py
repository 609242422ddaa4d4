"""Sparse multivariate polynomials with exact rational coefficients.

The functoriality results this library tests are exact polynomial
identities, so symbolic arithmetic stays in :class:`fractions.Fraction`
throughout; floating point only appears when a polynomial is *evaluated*.

A monomial is a sorted tuple of ``(variable, exponent)`` pairs with
positive exponents; the constant monomial is the empty tuple.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

Monomial = tuple[tuple[str, int], ...]


def _monomial(powers: Mapping[str, int] | Iterable[tuple[str, int]]) -> Monomial:
    merged: dict[str, int] = {}
    for var, exp in (powers.items() if isinstance(powers, Mapping) else powers):
        if exp < 0:
            raise ValueError(f"negative exponent for {var!r}")
        if exp:
            merged[var] = merged.get(var, 0) + exp
    return tuple(sorted(merged.items()))


def _exact(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("coefficients must be exact: pass Fraction, int or str")
    return Fraction(value)


@dataclass(frozen=True)
class Poly:
    """An immutable polynomial, stored as canonically sorted sparse terms."""

    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self):
        combined: dict[Monomial, Fraction] = {}
        for powers, coef in self.terms:
            mono = _monomial(powers)
            combined[mono] = combined.get(mono, Fraction(0)) + _exact(coef)
        object.__setattr__(
            self, "terms",
            tuple(sorted((m, c) for m, c in combined.items() if c)))

    @staticmethod
    def zero() -> Poly:
        return Poly()

    @staticmethod
    def constant(value) -> Poly:
        return Poly((((), _exact(value)),))

    @staticmethod
    def variable(name: str) -> Poly:
        return Poly(((((name, 1),), Fraction(1)),))

    @staticmethod
    def monomial(powers: Mapping[str, int], coefficient=1) -> Poly:
        return Poly(((tuple(powers.items()), _exact(coefficient)),))

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[str]:
        return {var for mono, _ in self.terms for var, _ in mono}

    def degree(self) -> int:
        """Largest total degree of any term (0 for constants and zero)."""
        return max((sum(e for _, e in mono) for mono, _ in self.terms), default=0)

    def coefficient(self, powers: Mapping[str, int]) -> Fraction:
        target = _monomial(powers)
        for mono, coef in self.terms:
            if mono == target:
                return coef
        return Fraction(0)

    def __add__(self, other: Poly) -> Poly:
        return Poly(self.terms + other.terms)

    def __neg__(self) -> Poly:
        return Poly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        out: list[tuple[Monomial, Fraction]] = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                out.append((m1 + m2, c1 * c2))
        return Poly(tuple(out))

    def scale(self, factor) -> Poly:
        q = _exact(factor)
        return Poly(tuple((m, c * q) for m, c in self.terms))

    def rename(self, f) -> Poly:
        """Substitute each variable by another variable.

        ``f`` may be a mapping or a :class:`~openrxnet.finset.FinFun`;
        variables may merge, in which case exponents add up.
        """
        lookup = f if isinstance(f, Mapping) else f.as_dict
        return Poly(tuple((tuple((lookup[v], e) for v, e in mono), coef)
                          for mono, coef in self.terms))

    def partial_eval(self, values: Mapping[str, Fraction]) -> Poly:
        """Substitute exact values for some variables."""
        out: list[tuple[Monomial, Fraction]] = []
        for mono, coef in self.terms:
            rest: list[tuple[str, int]] = []
            for var, exp in mono:
                if var in values:
                    coef = coef * _exact(values[var]) ** exp
                else:
                    rest.append((var, exp))
            out.append((tuple(rest), coef))
        return Poly(tuple(out))

    def diff(self, var: str) -> Poly:
        """Exact partial derivative with respect to ``var``."""
        out: list[tuple[Monomial, Fraction]] = []
        for mono, coef in self.terms:
            powers = dict(mono)
            exp = powers.get(var, 0)
            if exp:
                powers[var] = exp - 1
                out.append((_monomial(powers), coef * exp))
        return Poly(tuple(out))

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for mono, coef in self.terms:
            term = float(coef)
            for var, exp in mono:
                term *= values[var] ** exp
            total += term
        return total

    def evaluate_exact(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, coef in self.terms:
            term = coef
            for var, exp in mono:
                term *= _exact(values[var]) ** exp
            total += term
        return total

    def linear_parts(self) -> tuple[dict[str, Fraction], Fraction]:
        """Coefficient-per-variable and constant of a degree <= 1 polynomial."""
        linear: dict[str, Fraction] = {}
        constant = Fraction(0)
        for mono, coef in self.terms:
            if not mono:
                constant = coef
            elif len(mono) == 1 and mono[0][1] == 1:
                linear[mono[0][0]] = coef
            else:
                raise ValueError(f"term {mono} has degree > 1")
        return linear, constant

    def __str__(self) -> str:
        return render_poly(self)


def _coef_str(coef: Fraction) -> str:
    return str(coef)


def render_poly(poly: Poly, latex: bool = False) -> str:
    """Deterministic human-readable form, e.g. ``-1/2*A*B + C^2``."""
    if poly.is_zero():
        return "0"
    sorted_terms = sorted(poly.terms,
                          key=lambda t: (-sum(e for _, e in t[0]), t[0]))
    pieces: list[str] = []
    for index, (mono, coef) in enumerate(sorted_terms):
        if latex:
            factors = [v if e == 1 else f"{v}^{{{e}}}" for v, e in mono]
            body = " ".join(factors)
        else:
            factors = [v if e == 1 else f"{v}^{e}" for v, e in mono]
            body = "*".join(factors)
        magnitude = abs(coef)
        if not mono:
            core = _coef_str(magnitude)
        elif magnitude == 1:
            core = body
        elif latex:
            core = f"{_coef_str(magnitude)} {body}"
        else:
            core = f"{_coef_str(magnitude)}*{body}"
        if index == 0:
            pieces.append(core if coef > 0 else f"-{core}")
        else:
            pieces.append(f"+ {core}" if coef > 0 else f"- {core}")
    return " ".join(pieces)
