"""Polynomial vector fields, mass-action dynamics, and simulation.

The law of mass action compiles a reaction network into an algebraic
vector field: each transition contributes its rate constant times the
product of its input concentrations to every species it changes.  Open
networks gain inflow and outflow terms at their boundary points, giving
the open rate equation

    dc/dt = v(c) + i_*(inflows) - o_*(outflows).

Vector fields decorate cospans through :data:`FIELD_DECORATION`, so open
dynamical systems compose, tensor and compare exactly like open networks.
Gray-boxing (:func:`grey_box`) sends one decoration to the other and
commutes with all of that structure; the test suite checks this as exact
polynomial identities.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NonFiniteStateError
from .finset import (DecoratedCospan, DecorationKind, FinFun, FinSet,
                     coproduct)
from .network import NETWORK_DECORATION, ReactionNetwork
from .poly import Poly, render_poly

TIME_VAR = "t"


@dataclass(frozen=True)
class PolyField:
    """A vector field on the concentration space of a finite species set.

    One polynomial component per species; components absent from the
    constructor are zero.
    """

    vars: FinSet
    components: tuple[tuple[str, Poly], ...] = ()

    def __post_init__(self):
        table = dict(self.components) if not isinstance(self.components, Mapping) \
            else dict(self.components)
        for label, poly in table.items():
            if label not in self.vars:
                raise ValueError(f"component for unknown species {label!r}")
            for var in poly.variables():
                if var not in self.vars:
                    raise ValueError(
                        f"component of {label!r} uses unknown species {var!r}")
        object.__setattr__(
            self, "components",
            tuple((label, table.get(label, Poly.zero())) for label in self.vars))

    @staticmethod
    def zero(vars: FinSet) -> PolyField:
        return PolyField(vars)

    def component(self, label: str) -> Poly:
        return dict(self.components)[label]

    def is_zero(self) -> bool:
        return all(poly.is_zero() for _, poly in self.components)

    def evaluate(self, point: Mapping[str, float]) -> dict[str, float]:
        return {label: poly.evaluate(point) for label, poly in self.components}

    def evaluate_exact(self, point: Mapping[str, Fraction]) -> dict[str, Fraction]:
        return {label: poly.evaluate_exact(point)
                for label, poly in self.components}


def mass_action_field(net: ReactionNetwork) -> PolyField:
    """The mass-action vector field of a network, with exact coefficients.

    For each transition the firing rate is ``rate * prod(c_s^mult)`` over
    its source complex, and each species gains that rate times its net
    stoichiometric change.
    """
    table: dict[str, Poly] = {}
    for t in net.transitions:
        monomial = dict(t.source.items())
        touched = set(t.source.support()) | set(t.target.support())
        for label in touched:
            change = t.target.get(label) - t.source.get(label)
            if change:
                term = Poly.monomial(monomial, t.rate * change)
                table[label] = table.get(label, Poly.zero()) + term
    return PolyField(net.species, tuple(table.items()))


def pullback(f: FinFun, point: Mapping):
    """Precompose a point with a species map: coordinates are copied."""
    return {label: point[f(label)] for label in f.dom}


def pushforward(f: FinFun, vector: Mapping):
    """Sum a vector's coordinates over the fibers of a species map."""
    out: dict = {label: 0 for label in f.cod}
    for label in f.dom:
        out[f(label)] = out[f(label)] + vector[label]
    return out


def map_variables(f: FinFun, v: PolyField) -> PolyField:
    """Transport a field along a species map, symbolically.

    Inside every component each variable is replaced by its image (the
    pullback of coordinates), then components are summed over fibers (the
    pushforward of velocities).  Exact.
    """
    if f.dom != v.vars:
        raise ValueError("species map must be defined on the field's variables")
    table: dict[str, Poly] = {label: Poly.zero() for label in f.cod}
    for label, poly in v.components:
        table[f(label)] = table[f(label)] + poly.rename(f)
    return PolyField(f.cod, tuple(table.items()))


def disjoint_union(v: PolyField, v2: PolyField) -> PolyField:
    """Two fields side by side on the disjoint union of their variables."""
    union, inl, inr = coproduct(v.vars, v2.vars)
    table = {inl(label): poly.rename(inl) for label, poly in v.components}
    table.update({inr(label): poly.rename(inr) for label, poly in v2.components})
    return PolyField(union, tuple(table.items()))


class FieldDecoration(DecorationKind):
    """Polynomial vector fields as cospan decorations."""

    def carrier(self, decoration: PolyField) -> FinSet:
        return decoration.vars

    def map_along(self, f: FinFun, decoration: PolyField) -> PolyField:
        return map_variables(f, decoration)

    def combine(self, d: PolyField, d2: PolyField) -> PolyField:
        return disjoint_union(d, d2)

    def empty(self) -> PolyField:
        return PolyField.zero(FinSet())


FIELD_DECORATION = FieldDecoration()


def grey_box(open_net: DecoratedCospan) -> DecoratedCospan:
    """Compile an open network into its open mass-action system.

    The cospan is kept; only the decoration changes.  This commutes with
    composition and tensoring, which the law suites verify exactly.
    """
    if open_net.kind is not NETWORK_DECORATION:
        raise ValueError("grey_box expects an open reaction network")
    return DecoratedCospan(FIELD_DECORATION, open_net.cospan,
                           mass_action_field(open_net.decoration))


def open_field(field_: PolyField,
               inputs: Mapping[str, str],
               outputs: Mapping[str, str]) -> DecoratedCospan:
    """Wrap a vector field as an open dynamical system."""
    from .finset import Cospan
    left = FinSet(tuple(inputs))
    right = FinSet(tuple(outputs))
    cospan = Cospan(left, field_.vars, right,
                    FinFun.make(left, field_.vars, dict(inputs)),
                    FinFun.make(right, field_.vars, dict(outputs)))
    return DecoratedCospan(FIELD_DECORATION, cospan, field_)


@dataclass(frozen=True)
class Profile:
    """A piecewise-polynomial function of time.

    ``pieces`` is a sorted tuple of ``(start_time, polynomial)``; before
    the first start time the value is 0.  A single piece starting at
    ``-inf`` is an ordinary polynomial (or constant) profile.
    """

    pieces: tuple[tuple[float, Poly], ...]

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: p[0]))
        for _, poly in pieces:
            extra = poly.variables() - {TIME_VAR}
            if extra:
                raise ValueError(f"flow profiles may only use {TIME_VAR!r}, "
                                 f"found {sorted(extra)}")
        object.__setattr__(self, "pieces", pieces)

    @staticmethod
    def constant(value) -> Profile:
        return Profile(((float("-inf"), Poly.constant(Fraction(str(value)))),))

    @staticmethod
    def polynomial(poly: Poly) -> Profile:
        return Profile(((float("-inf"), poly),))

    def value(self, t: float) -> float:
        current = None
        for start, poly in self.pieces:
            if t >= start:
                current = poly
            else:
                break
        return current.evaluate({TIME_VAR: t}) if current is not None else 0.0


ZERO_PROFILE = Profile(((float("-inf"), Poly.zero()),))


@dataclass(frozen=True)
class FlowSpec:
    """Per-point inflow and outflow profiles for an open system.

    Points without an entry get zero flow.  Keys are validated against
    the system's boundary when the spec is used.
    """

    inflows: tuple[tuple[str, Profile], ...] = ()
    outflows: tuple[tuple[str, Profile], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inflows", tuple(
            self.inflows.items() if isinstance(self.inflows, Mapping)
            else self.inflows))
        object.__setattr__(self, "outflows", tuple(
            self.outflows.items() if isinstance(self.outflows, Mapping)
            else self.outflows))

    @staticmethod
    def constant(inflows: Mapping[str, float] | None = None,
                 outflows: Mapping[str, float] | None = None) -> FlowSpec:
        return FlowSpec(
            tuple((p, Profile.constant(v)) for p, v in (inflows or {}).items()),
            tuple((p, Profile.constant(v)) for p, v in (outflows or {}).items()))

    @staticmethod
    def zero() -> FlowSpec:
        return FlowSpec()

    def _check(self, sys: DecoratedCospan) -> None:
        for point, _ in self.inflows:
            if point not in sys.left:
                raise ValueError(f"inflow at unknown input point {point!r}")
        for point, _ in self.outflows:
            if point not in sys.right:
                raise ValueError(f"outflow at unknown output point {point!r}")

    def inflow_at(self, t: float, left: FinSet) -> dict[str, float]:
        table = dict(self.inflows)
        return {p: table.get(p, ZERO_PROFILE).value(t) for p in left}

    def outflow_at(self, t: float, right: FinSet) -> dict[str, float]:
        table = dict(self.outflows)
        return {p: table.get(p, ZERO_PROFILE).value(t) for p in right}


ZERO_FLOWS = FlowSpec()


def _require_field(sys: DecoratedCospan) -> PolyField:
    if sys.kind is not FIELD_DECORATION:
        raise ValueError("expected an open dynamical system "
                         "(apply grey_box to an open network first)")
    return sys.decoration


def open_rate_rhs(sys: DecoratedCospan, concentrations: Mapping[str, float],
                  flows: FlowSpec, t: float = 0.0) -> dict[str, float]:
    """Right-hand side of the open rate equation at one state and time."""
    v = _require_field(sys)
    flows._check(sys)
    velocity = v.evaluate(concentrations)
    inflow = pushforward(sys.cospan.i, flows.inflow_at(t, sys.left))
    outflow = pushforward(sys.cospan.o, flows.outflow_at(t, sys.right))
    return {s: velocity[s] + inflow[s] - outflow[s] for s in sys.apex}


@dataclass(frozen=True)
class Trajectory:
    """A simulated time series: ``states[k]`` holds ``species`` at ``times[k]``."""

    species: tuple[str, ...]
    times: np.ndarray = field(compare=False)
    states: np.ndarray = field(compare=False)

    def final(self) -> dict[str, float]:
        return dict(zip(self.species, self.states[-1]))

    def row(self, k: int) -> dict[str, float]:
        return dict(zip(self.species, self.states[k]))


def _compile_field(v: PolyField, order: tuple[str, ...]):
    index = {label: k for k, label in enumerate(order)}
    compiled = []
    for label in order:
        terms = [(float(coef), tuple((index[var], exp) for var, exp in mono))
                 for mono, coef in v.component(label).terms]
        compiled.append(terms)

    def rhs(state: np.ndarray) -> np.ndarray:
        out = np.zeros(len(order))
        for k, terms in enumerate(compiled):
            acc = 0.0
            for coef, powers in terms:
                term = coef
                for idx, exp in powers:
                    term *= state[idx] ** exp
                acc += term
            out[k] = acc
        return out

    return rhs


def simulate(sys: DecoratedCospan, c0: Mapping[str, float], flows: FlowSpec,
             t_end: float, dt: float,
             clamp_nonnegative: bool = False) -> Trajectory:
    """Integrate the open rate equation with fixed-step classical RK4.

    The state is sampled at every step.  Mass-action dynamics are only
    physical on nonnegative concentrations but remain well defined
    everywhere, so negative excursions are reported rather than prevented
    unless ``clamp_nonnegative`` is set.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    v = _require_field(sys)
    flows._check(sys)
    order = sys.apex.elements
    missing = [s for s in order if s not in c0]
    if missing:
        raise ValueError(f"initial concentrations missing for {missing}")

    field_rhs = _compile_field(v, order)
    index = {label: k for k, label in enumerate(order)}
    inflow_targets = [(index[sys.cospan.i(p)],
                       dict(flows.inflows).get(p, ZERO_PROFILE))
                      for p in sys.left]
    outflow_targets = [(index[sys.cospan.o(p)],
                        dict(flows.outflows).get(p, ZERO_PROFILE))
                       for p in sys.right]

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        out = field_rhs(state)
        for idx, profile in inflow_targets:
            out[idx] += profile.value(t)
        for idx, profile in outflow_targets:
            out[idx] -= profile.value(t)
        return out

    state = np.array([float(c0[s]) for s in order])
    t = 0.0
    times = [t]
    states = [state.copy()]
    while t < t_end - 1e-12:
        h = min(dt, t_end - t)
        k1 = rhs(t, state)
        k2 = rhs(t + h / 2, state + h / 2 * k1)
        k3 = rhs(t + h / 2, state + h / 2 * k2)
        k4 = rhs(t + h, state + h * k3)
        state = state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if clamp_nonnegative:
            state = np.maximum(state, 0.0)
        t += h
        if not np.all(np.isfinite(state)):
            raise NonFiniteStateError(f"state became non-finite at t={t:g}")
        times.append(t)
        states.append(state.copy())
    return Trajectory(order, np.array(times), np.array(states))


def emit_equations(sys: DecoratedCospan, format: str = "text") -> str:
    """Render the open rate equation, one sorted line per species.

    Inflow and outflow terms appear as symbols named after their boundary
    points (``I_1``, ``O_4``).  The empty system renders as the empty
    string.
    """
    if format not in ("text", "latex"):
        raise ValueError(f"unknown format {format!r}")
    v = _require_field(sys)
    latex = format == "latex"
    lines = []
    for label in sys.apex:
        poly = render_poly(v.component(label), latex=latex)
        inflow_points = [p for p in sys.left if sys.cospan.i(p) == label]
        outflow_points = [p for p in sys.right if sys.cospan.o(p) == label]
        if latex:
            body = poly
            for p in inflow_points:
                body += f" + I_{{{p}}}"
            for p in outflow_points:
                body += f" - O_{{{p}}}"
            lines.append(rf"\frac{{d{label}}}{{dt}} = {body}")
        else:
            body = poly
            for p in inflow_points:
                body += f" + I_{p}"
            for p in outflow_points:
                body += f" - O_{p}"
            lines.append(f"d{label}/dt = {body}")
    return "\n".join(lines)
