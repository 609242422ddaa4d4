"""Steady-state behavior of open dynamical systems.

A steady state of an open system with constant inflows ``I`` and outflows
``O`` is a concentration vector ``c`` with ``v(c) + i_*(I) - o_*(O) = 0``.
Black-boxing records only what is visible at the boundary: the set of
tuples ``(input concentrations, inflows, output concentrations,
outflows)`` realized by some steady state.

That set is semialgebraic but is not materialized here.  Instead this
module offers:

* :func:`sample_blackbox` draws boundary concentrations, solves the
  internal species by damped multi-start Newton, and completes each
  steady state with an exact rational flow solve;
* :func:`check_membership` is a semi-decision procedure: ``found`` comes
  with a witness, ``not_found`` only means the start budget ran out;
* :func:`check_functoriality` cross-checks that composing systems and
  then extracting behavior matches extracting and then joining, in both
  directions;
* :func:`linear_blackbox` / :func:`compose_linear` compute the relation
  exactly, as a rational subspace, when the field is linear (which is the
  case for networks whose transitions move one token to one token).

``STEADY_TOL`` is the single tolerance shared by steady-state residuals
and join matching.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BoundaryMismatchError, NonlinearFieldError
from .finset import DecoratedCospan, FinSet, compose_open, pushout
from .linalg import annihilator, nullspace, solve_particular, span_rref
from .dynamics import pullback, pushforward, _require_field

#: Steady-state residual bound, also used when joining tuples across a
#: shared boundary.
STEADY_TOL = 1e-9

#: Internal components of v(c) larger than this make a flow solve impossible.
INTERNAL_TOL = 1e-12

#: Newton refinement keeps iterating while the residual is above this.
NEWTON_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryPartition:
    """Species reachable from the boundary legs versus the rest."""

    boundary: FinSet
    internal: FinSet


@dataclass
class SteadyTuple:
    """One observable steady-state record.

    Concentrations are indexed by boundary *points* (so a species touched
    by two points appears twice, with equal values).  ``witness`` keeps
    the full concentration vector when the producer had one.
    """

    x_conc: dict[str, float]
    inflow: dict[str, float]
    y_conc: dict[str, float]
    outflow: dict[str, float]
    witness: dict[str, float] | None = None


@dataclass
class FlowSolution:
    """All constant flows making a given concentration steady.

    The solution set is affine: ``particular + span(kernel)``, with every
    kernel element leaving ``i_*(I) - o_*(O)`` unchanged.  Exact.
    """

    inflow: dict[str, Fraction]
    outflow: dict[str, Fraction]
    kernel: tuple[tuple[dict[str, Fraction], dict[str, Fraction]], ...]


@dataclass
class InternalSolve:
    """Roots of the internal equations for frozen boundary values."""

    roots: list[dict[str, float]]
    underdetermined: bool
    singular_starts: int


@dataclass(frozen=True)
class LinearRelation:
    """A rational subspace relating boundary data of two open systems.

    Coordinates run ``(x_conc, inflow, y_conc, outflow)`` with points in
    canonical order; ``basis`` is the reduced-echelon spanning set, so two
    relations are equal exactly when their bases are.
    """

    left_dim: int
    right_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def ambient_dim(self) -> int:
        return self.left_dim + self.right_dim

    def contains(self, vector: Sequence[float], tol: float = STEADY_TOL) -> bool:
        constraints = annihilator(list(self.basis), self.ambient_dim)
        vec = np.asarray(vector, dtype=float)
        return all(abs(float(np.dot([float(x) for x in row], vec))) <= tol
                   for row in constraints)


@dataclass
class FunctorialityReport:
    """Outcome of the two-direction behavioral composition check."""

    joined: int
    joined_found: int
    join_max_residual: float
    factored: int
    factor_max_residual: float

    @property
    def passed(self) -> bool:
        return (self.joined > 0 and self.joined_found == self.joined
                and self.factored > 0
                and self.factor_max_residual <= STEADY_TOL)


def residual(sys: DecoratedCospan, c: Mapping[str, float],
             inflow: Mapping[str, float],
             outflow: Mapping[str, float]) -> dict[str, float]:
    """``v(c) + i_*(I) - o_*(O)`` per species; zero exactly at steady states."""
    v = _require_field(sys)
    velocity = v.evaluate(c)
    inflow_full = {p: float(inflow.get(p, 0.0)) for p in sys.left}
    outflow_full = {p: float(outflow.get(p, 0.0)) for p in sys.right}
    pushed_in = pushforward(sys.cospan.i, inflow_full)
    pushed_out = pushforward(sys.cospan.o, outflow_full)
    return {s: velocity[s] + pushed_in[s] - pushed_out[s] for s in sys.apex}


def is_steady(sys: DecoratedCospan, c: Mapping[str, float],
              inflow: Mapping[str, float], outflow: Mapping[str, float],
              tol: float = STEADY_TOL) -> bool:
    return max(map(abs, residual(sys, c, inflow, outflow).values()),
               default=0.0) <= tol


def partition(sys: DecoratedCospan) -> BoundaryPartition:
    """Split the species into boundary (touched by a leg) and internal."""
    touched = sys.cospan.i.image() | sys.cospan.o.image()
    return BoundaryPartition(
        FinSet(tuple(s for s in sys.apex if s in touched)),
        FinSet(tuple(s for s in sys.apex if s not in touched)))


def _compile(poly, order: list[str]):
    index = {v: k for k, v in enumerate(order)}
    terms = [(float(coef), tuple((index[v], e) for v, e in mono))
             for mono, coef in poly.terms]

    def evaluate(x: np.ndarray) -> float:
        acc = 0.0
        for coef, powers in terms:
            t = coef
            for idx, exp in powers:
                t *= x[idx] ** exp
            acc += t
        return acc

    return evaluate


def solve_internal(sys: DecoratedCospan, boundary_vals: Mapping[str, float],
                   seeds: int = 16, damping: float = 0.5,
                   max_iter: int = 100, tol: float = NEWTON_TOL,
                   seed: int = 0,
                   start_range: tuple[float, float] = (0.0, 2.0)) -> InternalSolve:
    """Find internal concentrations steady for frozen boundary values.

    Inflows and outflows only touch boundary species, so a steady state
    must zero the internal components of ``v`` outright.  Those polynomial
    equations are solved by damped Newton from ``seeds`` deterministic
    start points; converged roots (residual below ``tol``) are
    deduplicated.  Multiple roots are expected and all are returned.

    Internal species constrained by no equation (for instance species
    mentioned in no transition) stay at their start values and flip the
    ``underdetermined`` flag.  Start points whose Jacobian turns singular
    are skipped, not fatal.
    """
    v = _require_field(sys)
    part = partition(sys)
    if set(boundary_vals) != set(part.boundary.elements):
        raise ValueError("boundary values must cover exactly the boundary "
                         f"species {list(part.boundary)}")
    if not part.internal:
        return InternalSolve([{s: float(boundary_vals[s]) for s in sys.apex}],
                             underdetermined=False, singular_starts=0)

    frozen = {s: Fraction(float(boundary_vals[s])) for s in part.boundary}
    internal = list(part.internal)
    equations = []
    for s in internal:
        poly = v.component(s).partial_eval(frozen)
        if not poly.is_zero():
            equations.append(poly)

    constrained = sorted({var for p in equations for var in p.variables()})
    free = [s for s in internal if s not in constrained]
    underdetermined = bool(free)
    rng = np.random.default_rng(seed)
    starts = rng.uniform(start_range[0], start_range[1],
                         size=(seeds, len(internal)))
    start_index = {s: k for k, s in enumerate(internal)}

    def full_point(start: np.ndarray, solved: np.ndarray | None) -> dict[str, float]:
        point = {s: float(boundary_vals[s]) for s in part.boundary}
        for s in internal:
            point[s] = float(start[start_index[s]])
        if solved is not None:
            for k, s in enumerate(constrained):
                point[s] = float(solved[k])
        return point

    if not equations:
        roots = [full_point(start, None) for start in starts]
        return InternalSolve(_dedup(roots, internal), underdetermined, 0)

    evals = [_compile(p, constrained) for p in equations]
    jac_rows = [[_compile(p.diff(var), constrained) for var in constrained]
                for p in equations]

    def g(x: np.ndarray) -> np.ndarray:
        return np.array([e(x) for e in evals])

    def jacobian(x: np.ndarray) -> np.ndarray:
        return np.array([[d(x) for d in row] for row in jac_rows])

    square = len(equations) == len(constrained)
    roots: list[dict[str, float]] = []
    singular = 0
    for start in starts:
        x = start[[start_index[s] for s in constrained]].astype(float)
        res = float(np.max(np.abs(g(x))))
        for _ in range(max_iter):
            if res <= 1e-14:
                break
            jac = jacobian(x)
            try:
                if square:
                    step = np.linalg.solve(jac, -g(x))
                else:
                    step = np.linalg.lstsq(jac, -g(x), rcond=None)[0]
            except np.linalg.LinAlgError:
                singular += 1
                break
            lam = 1.0
            accepted = False
            while lam >= 1e-10:
                trial = x + lam * step
                trial_res = float(np.max(np.abs(g(trial))))
                if trial_res < res or trial_res <= tol:
                    x, res = trial, trial_res
                    accepted = True
                    break
                lam *= damping
            if not accepted:
                break
        if res <= tol:
            roots.append(full_point(start, x))
    return InternalSolve(_dedup(roots, internal), underdetermined, singular)


def _dedup(points: list[dict[str, float]], keys: list[str],
           tol: float = 1e-8) -> list[dict[str, float]]:
    out: list[dict[str, float]] = []
    for point in sorted(points, key=lambda p: tuple(p[k] for k in keys)):
        duplicate = any(all(abs(point[k] - kept[k]) <= tol for k in keys)
                        for kept in out)
        if not duplicate:
            out.append(point)
    return out


def flows_for(sys: DecoratedCospan, c: Mapping[str, float],
              internal_tol: float = INTERNAL_TOL) -> FlowSolution | None:
    """Exactly solve ``i_*(I) - o_*(O) = -v(c)`` for constant flows.

    Returns ``None`` precisely when some internal component of ``v(c)``
    exceeds ``internal_tol`` in magnitude: no flow can reach an internal
    species.  Otherwise the affine solution set comes back as an exact
    particular solution plus a kernel basis (the flows that cancel out).
    """
    v = _require_field(sys)
    exact_c = {s: Fraction(float(c[s])) for s in sys.apex}
    velocity = v.evaluate_exact(exact_c)
    part = partition(sys)
    for s in part.internal:
        if abs(float(velocity[s])) > internal_tol:
            return None

    xs = list(sys.left)
    ys = list(sys.right)
    ncols = len(xs) + len(ys)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for s in part.boundary:
        row = [Fraction(0)] * ncols
        for k, x in enumerate(xs):
            if sys.cospan.i(x) == s:
                row[k] = Fraction(1)
        for k, y in enumerate(ys):
            if sys.cospan.o(y) == s:
                row[len(xs) + k] = Fraction(-1)
        rows.append(row)
        rhs.append(-velocity[s])

    particular = solve_particular(rows, rhs) if rows else tuple()
    if particular is None:
        return None
    kernel = nullspace(rows, ncols) if rows else \
        [tuple(Fraction(k == j) for k in range(ncols)) for j in range(ncols)]
    return FlowSolution(
        inflow={x: particular[k] for k, x in enumerate(xs)},
        outflow={y: particular[len(xs) + k] for k, y in enumerate(ys)},
        kernel=tuple(({x: vec[k] for k, x in enumerate(xs)},
                      {y: vec[len(xs) + k] for k, y in enumerate(ys)})
                     for vec in kernel))


def _resolve_box(box, labels) -> dict[str, tuple[float, float]]:
    if isinstance(box, Mapping):
        missing = [s for s in labels if s not in box]
        if missing:
            raise ValueError(f"sampling box missing species {missing}")
        return {s: box[s] for s in labels}
    lo, hi = box
    return {s: (lo, hi) for s in labels}


def sample_blackbox(sys: DecoratedCospan, n: int,
                    box=(0.25, 2.0), seed: int = 0,
                    tol: float = STEADY_TOL,
                    kernel_offsets: int = 3) -> list[SteadyTuple]:
    """Sample observable steady-state tuples of an open system.

    Boundary concentrations are drawn uniformly from ``box`` (a global
    ``(lo, hi)`` pair or a per-species mapping; a degenerate range pins a
    species).  Each draw is completed by the internal Newton solve and an
    exact flow solve; besides the particular flows, a few deterministic
    kernel offsets are emitted to exhibit flow trade-offs.  Every returned
    tuple is re-verified against :func:`residual` before being emitted.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    part = partition(sys)
    ranges = _resolve_box(box, list(part.boundary))
    rng = np.random.default_rng(seed)
    out: list[SteadyTuple] = []
    for _ in range(n):
        bvals = {s: float(rng.uniform(*ranges[s])) for s in part.boundary}
        solved = solve_internal(sys, bvals)
        for root in solved.roots:
            flows = flows_for(sys, root, internal_tol=tol)
            if flows is None:
                continue
            base_in = {p: float(q) for p, q in flows.inflow.items()}
            base_out = {p: float(q) for p, q in flows.outflow.items()}
            candidates = [(base_in, base_out)]
            for k_in, k_out in flows.kernel[:kernel_offsets]:
                w = float(rng.uniform(-1.0, 1.0))
                candidates.append((
                    {p: base_in[p] + w * float(k_in[p]) for p in base_in},
                    {p: base_out[p] + w * float(k_out[p]) for p in base_out}))
            for inflow, outflow in candidates:
                if is_steady(sys, root, inflow, outflow, tol):
                    out.append(SteadyTuple(
                        x_conc=pullback(sys.cospan.i, root),
                        inflow=inflow,
                        y_conc=pullback(sys.cospan.o, root),
                        outflow=outflow,
                        witness=dict(root)))
    return out


def _boundary_demands(sys: DecoratedCospan, t: SteadyTuple,
                      tol: float) -> dict[str, float] | None:
    """Boundary species values a tuple forces, or None on inconsistency."""
    demands: dict[str, float] = {}
    for point, value in list(t.x_conc.items()) + list(t.y_conc.items()):
        species = sys.cospan.i(point) if point in sys.left \
            else sys.cospan.o(point)
        if species in demands and abs(demands[species] - value) > tol:
            return None
        demands.setdefault(species, float(value))
    return demands


def check_membership(sys: DecoratedCospan, t: SteadyTuple,
                     starts: int = 16, tol: float = STEADY_TOL,
                     seed: int = 0) -> dict[str, float] | None:
    """Search for a steady state witnessing a boundary tuple.

    The tuple's concentrations must first be self-consistent: boundary
    points touching the same species have to agree (pullbacks copy).  Then
    the internal solver runs with the demanded boundary values, and each
    root is checked against the tuple's fixed flows.  A returned witness
    proves membership; ``None`` only means nothing was found within the
    start budget.
    """
    if set(t.x_conc) != set(sys.left.elements) \
            or set(t.y_conc) != set(sys.right.elements):
        raise ValueError("tuple points do not match the system boundary")
    demands = _boundary_demands(sys, t, tol)
    if demands is None:
        return None
    for root in solve_internal(sys, demands, seeds=starts, seed=seed).roots:
        if is_steady(sys, root, t.inflow, t.outflow, tol):
            return root
    return None


def _solve_remaining_outflows(g: DecoratedCospan, c2: Mapping[str, float],
                              middle_inflow: Mapping[str, float],
                              tol: float) -> dict[str, float] | None:
    """Outflows making ``c2`` steady in ``g`` under fixed inflows, or None."""
    v = _require_field(g)
    velocity = v.evaluate(c2)
    pushed_in = pushforward(g.cospan.i,
                            {p: float(middle_inflow[p]) for p in g.left})
    outflow: dict[str, float] = {z: 0.0 for z in g.right}
    for s in g.apex:
        zs = [z for z in g.right if g.cospan.o(z) == s]
        needed = velocity[s] + pushed_in[s]
        if not zs:
            if abs(needed) > tol:
                return None
            continue
        outflow[zs[0]] = needed
    return outflow


def check_functoriality(f: DecoratedCospan, g: DecoratedCospan,
                        n: int = 25, seed: int = 0,
                        box=(0.25, 2.0),
                        tol: float = STEADY_TOL) -> FunctorialityReport:
    """Verify, by sampling, that behavior extraction respects composition.

    Join direction: tuples of ``f`` are extended through ``g`` by reusing
    their output concentrations and outflows as ``g``'s input data; every
    joined tuple must be found in the composite's behavior.

    Factor direction: tuples of the composite are split back into a tuple
    of ``f`` and one of ``g`` by recovering the flow through the shared
    boundary, solving the linear system both steady conditions impose on
    it; the factor residuals must stay within tolerance.
    """
    if f.right != g.left:
        raise BoundaryMismatchError(
            f"cannot check composition: outputs {list(f.right)} vs "
            f"inputs {list(g.left)}")
    composite = compose_open(g, f)
    po = pushout(f.cospan.o, g.cospan.i)
    g_part = partition(g)

    joined = 0
    joined_found = 0
    join_max = 0.0
    rng = np.random.default_rng(seed + 1)
    for tf in sample_blackbox(f, n, box, seed, tol):
        demands: dict[str, float] = {}
        consistent = True
        for y in f.right:
            species = g.cospan.i(y)
            value = tf.y_conc[y]
            if species in demands and abs(demands[species] - value) > tol:
                consistent = False
                break
            demands.setdefault(species, value)
        if not consistent:
            continue
        ranges = _resolve_box(box, [s for s in g_part.boundary
                                    if s not in demands])
        for s, (lo, hi) in ranges.items():
            demands[s] = float(rng.uniform(lo, hi))
        success = None
        for root in solve_internal(g, demands).roots:
            outflow = _solve_remaining_outflows(g, root, tf.outflow, tol)
            if outflow is None:
                continue
            joined_tuple = SteadyTuple(
                x_conc=dict(tf.x_conc), inflow=dict(tf.inflow),
                y_conc=pullback(g.cospan.o, root), outflow=outflow)
            witness = check_membership(composite, joined_tuple, tol=tol)
            if witness is not None:
                res = residual(composite, witness,
                               joined_tuple.inflow, joined_tuple.outflow)
                join_max = max(join_max, max(map(abs, res.values()), default=0.0))
                success = joined_tuple
                break
        if success is not None:
            joined += 1
            joined_found += 1
        else:
            joined += 1

    factored = 0
    factor_max = 0.0
    ys = list(f.right)
    f_field = _require_field(f)
    g_field = _require_field(g)
    for tc in sample_blackbox(composite, n, box, seed + 2, tol):
        b = tc.witness
        c = {s: b[po.j(s)] for s in f.apex}
        c2 = {s: b[po.j2(s)] for s in g.apex}
        rows: list[list[float]] = []
        rhs: list[float] = []
        f_velocity = f_field.evaluate(c)
        f_in = pushforward(f.cospan.i, {p: tc.inflow[p] for p in f.left})
        for s in f.apex:
            rows.append([1.0 if f.cospan.o(y) == s else 0.0 for y in ys])
            rhs.append(f_velocity[s] + f_in[s])
        g_velocity = g_field.evaluate(c2)
        g_out = pushforward(g.cospan.o, {p: tc.outflow[p] for p in g.right})
        for s in g.apex:
            rows.append([1.0 if g.cospan.i(y) == s else 0.0 for y in ys])
            rhs.append(g_out[s] - g_velocity[s])
        a = np.array(rows)
        rhs_vec = np.array(rhs)
        if ys:
            middle = np.linalg.lstsq(a, rhs_vec, rcond=None)[0]
            gap = np.max(np.abs(a @ middle - rhs_vec))
        else:
            middle = np.zeros(0)
            gap = float(np.max(np.abs(rhs_vec))) if len(rhs_vec) else 0.0
        factored += 1
        factor_max = max(factor_max, float(gap))

    return FunctorialityReport(joined, joined_found, join_max,
                               factored, factor_max)


def _linear_rows(sys: DecoratedCospan) -> tuple[list[list[Fraction]], int, int, int]:
    v = _require_field(sys)
    svars = list(sys.apex)
    xs = list(sys.left)
    ys = list(sys.right)
    rows: list[list[Fraction]] = []
    for s in svars:
        try:
            linear, constant = v.component(s).linear_parts()
        except ValueError as exc:
            raise NonlinearFieldError(
                f"component of {s!r} is not linear: {exc}") from exc
        if constant:
            raise NonlinearFieldError(
                f"component of {s!r} has a constant term {constant}")
        row = [linear.get(w, Fraction(0)) for w in svars]
        row += [Fraction(1) if sys.cospan.i(x) == s else Fraction(0) for x in xs]
        row += [Fraction(-1) if sys.cospan.o(y) == s else Fraction(0) for y in ys]
        rows.append(row)
    return rows, len(svars), len(xs), len(ys)


def linear_blackbox(sys: DecoratedCospan) -> LinearRelation:
    """The steady-state relation of a linear system, as an exact subspace.

    Requires every field component to be homogeneous of degree one (as
    produced by gray-boxing a one-token-in, one-token-out network).  The
    nullspace of ``(c, I, O) -> v(c) + i_*(I) - o_*(O)`` is computed over
    the rationals and projected to the observable coordinates
    ``(i^*(c), I, o^*(c), O)``.
    """
    rows, ns, nx, ny = _linear_rows(sys)
    ncols = ns + nx + ny
    kernel = nullspace(rows, ncols) if rows else \
        [tuple(Fraction(k == j) for k in range(ncols)) for j in range(ncols)]
    svars = list(sys.apex)
    index = {s: k for k, s in enumerate(svars)}
    projected = []
    for vec in kernel:
        c_part = vec[:ns]
        i_part = vec[ns:ns + nx]
        o_part = vec[ns + nx:]
        projected.append(
            tuple(c_part[index[sys.cospan.i(x)]] for x in sys.left)
            + tuple(i_part)
            + tuple(c_part[index[sys.cospan.o(y)]] for y in sys.right)
            + tuple(o_part))
    return LinearRelation(2 * nx, 2 * ny,
                          span_rref(projected, 2 * (nx + ny)))


def identity_relation(dim: int) -> LinearRelation:
    """The relation ``{(v, v)}`` on a boundary of the given dimension."""
    basis = [tuple(Fraction(k == j) for k in range(dim))
             + tuple(Fraction(k == j) for k in range(dim))
             for j in range(dim)]
    return LinearRelation(dim, dim, span_rref(basis, 2 * dim))


def compose_linear(b: LinearRelation, a: LinearRelation) -> LinearRelation:
    """Relational composite ``b ∘ a``: eliminate the shared middle boundary.

    Both relations are turned into exact linear constraints, stacked over
    ``(left, middle, right)``, and the joint solution space is projected
    onto the outer coordinates.  All arithmetic is rational, so composites
    of matching relations compare equal on the nose.
    """
    if a.right_dim != b.left_dim:
        raise ValueError(
            f"dimension mismatch: {a.right_dim} outputs vs {b.left_dim} inputs")
    nu, nv, nw = a.left_dim, a.right_dim, b.right_dim
    constraints: list[list[Fraction]] = []
    for row in annihilator(list(a.basis), nu + nv):
        constraints.append(list(row) + [Fraction(0)] * nw)
    for row in annihilator(list(b.basis), nv + nw):
        constraints.append([Fraction(0)] * nu + list(row))
    joint = nullspace(constraints, nu + nv + nw) if constraints else \
        [tuple(Fraction(k == j) for k in range(nu + nv + nw))
         for j in range(nu + nv + nw)]
    projected = [vec[:nu] + vec[nu + nv:] for vec in joint]
    return LinearRelation(nu, nw, span_rref(projected, nu + nw))


def tuple_coordinates(sys: DecoratedCospan, t: SteadyTuple) -> list[float]:
    """Pack a tuple into the coordinate order used by linear relations."""
    return ([t.x_conc[x] for x in sys.left]
            + [t.inflow[x] for x in sys.left]
            + [t.y_conc[y] for y in sys.right]
            + [t.outflow[y] for y in sys.right])
