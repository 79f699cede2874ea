"""Exact rational linear programming.

A dense-tableau, two-phase primal simplex over ``Fraction`` with general
variable bounds.  Bland's rule guarantees termination: with exact
arithmetic, cycling is the only hazard, and Bland excludes it.  The
solver always returns a basic (vertex) solution together with a dual
vector whose objective equals the primal objective exactly.

Problems are stated as minimization with constraints ``<=``, ``=`` or
``>=`` and per-variable bounds ``lower <= x <= upper`` (``upper`` may be
None for unbounded above; lower bounds must be finite).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError, ValidationError
from .rational import Rat, ZERO

RELATIONS = ("<=", "=", ">=")

Constraint = tuple[dict[int, Rat], str, Rat]


class LinearProgram:
    """A minimization LP under construction.

    Variables are added first and referenced by index in constraints and
    the objective.
    """

    def __init__(self) -> None:
        self.lower: list[Rat] = []
        self.upper: list[Rat | None] = []
        self.names: list[str] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, Rat] = {}

    @property
    def num_variables(self) -> int:
        return len(self.lower)

    def add_variable(self, lower: Rat = ZERO, upper: Rat | None = None,
                     name: str | None = None) -> int:
        lower = Rat(lower)
        upper = None if upper is None else Rat(upper)
        if upper is not None and lower > upper:
            raise ValidationError(f"bounds [{lower}, {upper}] are empty")
        self.lower.append(lower)
        self.upper.append(upper)
        self.names.append(name or f"x{len(self.names)}")
        return len(self.lower) - 1

    def _check_coeffs(self, coeffs: dict[int, Rat]) -> dict[int, Rat]:
        for j in coeffs:
            if not 0 <= j < self.num_variables:
                raise ValidationError(f"coefficient references unknown "
                                      f"variable {j}")
        return {j: Rat(c) for j, c in coeffs.items() if c != 0}

    def add_constraint(self, coeffs: dict[int, Rat], relation: str,
                       rhs: Rat) -> int:
        if relation not in RELATIONS:
            raise ValidationError(f"relation must be one of {RELATIONS}")
        self.constraints.append((self._check_coeffs(coeffs), relation,
                                 Rat(rhs)))
        return len(self.constraints) - 1

    def set_objective(self, coeffs: dict[int, Rat]) -> None:
        self.objective = self._check_coeffs(coeffs)


@dataclass(frozen=True)
class LpSolution:
    """Result of a solve.

    For an optimal solution, ``values`` satisfy every constraint exactly
    and form a vertex of the feasible region; ``basis`` lists the basic
    column per row (structural variables first, then slack columns in
    constraint order); ``duals`` holds one multiplier per constraint and
    satisfies exact weak duality.
    """

    status: str
    values: tuple[Rat, ...] = ()
    objective_value: Rat | None = None
    basis: tuple[int, ...] = ()
    duals: tuple[Rat, ...] = ()
    reduced_costs: tuple[Rat, ...] = field(default=(), repr=False)

    def value_of(self, j: int) -> Rat:
        return self.values[j]


def dual_objective_value(lp: LinearProgram, solution: LpSolution) -> Rat:
    """Objective of the returned dual certificate (exact).

    Equals ``sum(y_i * b_i)`` plus the bound contributions of the
    structural reduced costs; weak duality makes it coincide with the
    primal objective at optimality.
    """
    total = ZERO
    for (_, _, rhs), y in zip(lp.constraints, solution.duals):
        total += y * rhs
    for j in range(lp.num_variables):
        d = solution.reduced_costs[j]
        if d > 0:
            total += d * lp.lower[j]
        elif d < 0:
            upper = lp.upper[j]
            if upper is not None:
                total += d * upper
    return total


class _Simplex:
    """One solve over an immutable snapshot of a LinearProgram."""

    def __init__(self, lp: LinearProgram) -> None:
        self.lp = lp
        n = lp.num_variables
        for j in range(n):
            if lp.lower[j] is None:
                raise PreconditionError("lower bounds must be finite")
        m = len(lp.constraints)
        self.m = m
        self.n_struct = n
        # Column layout: structural | one slack per inequality | one
        # artificial per row.  Rows are scaled so every artificial column
        # is +1, which makes the initial basis the identity.
        self.slack_col: dict[int, int] = {}
        cols = n
        for i, (_, rel, _) in enumerate(lp.constraints):
            if rel != "=":
                self.slack_col[i] = cols
                cols += 1
        self.art_col = list(range(cols, cols + m))
        self.num_cols = cols + m
        self.lo: list[Rat | None] = list(lp.lower)
        self.up: list[Rat | None] = list(lp.upper)
        for _ in range(len(self.slack_col)):
            self.lo.append(ZERO)
            self.up.append(None)
        for _ in range(m):
            self.lo.append(ZERO)
            self.up.append(None)

        # Nonbasic values: structural at lower bound, slacks at 0.
        self.val: list[Rat] = [self.lo[j] for j in range(self.num_cols)]
        self.row_sign: list[int] = []
        self.T: list[list[Rat]] = []
        self.basis: list[int] = []
        self.xB: list[Rat] = []
        for i, (coeffs, rel, rhs) in enumerate(lp.constraints):
            residual = rhs - sum((c * self.val[j] for j, c in coeffs.items()),
                                 ZERO)
            sign = -1 if residual < 0 else 1
            row = [ZERO] * self.num_cols
            for j, c in coeffs.items():
                row[j] = sign * c
            if rel == "<=":
                row[self.slack_col[i]] = Rat(sign)
            elif rel == ">=":
                row[self.slack_col[i]] = Rat(-sign)
            row[self.art_col[i]] = Rat(1)
            self.row_sign.append(sign)
            self.T.append(row)
            self.basis.append(self.art_col[i])
            self.xB.append(sign * residual)

    # -- tableau mechanics -------------------------------------------------

    def _recompute_reduced(self, cost: list[Rat]) -> list[Rat]:
        d = list(cost)
        for i in range(self.m):
            cb = cost[self.basis[i]]
            if cb:
                row = self.T[i]
                for j in range(self.num_cols):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def _pivot(self, r: int, q: int, d: list[Rat]) -> None:
        row = self.T[r]
        piv = row[q]
        if piv != 1:
            inv = 1 / piv
            self.T[r] = row = [a * inv if a else a for a in row]
        for i in range(self.m):
            if i == r:
                continue
            f = self.T[i][q]
            if f:
                target = self.T[i]
                self.T[i] = [a - f * b if b else a
                             for a, b in zip(target, row)]
        f = d[q]
        if f:
            d[:] = [a - f * b if b else a for a, b in zip(d, row)]

    def _run(self, cost: list[Rat], frozen: set[int]) -> str:
        """Bland-rule primal simplex on the current basis.

        ``frozen`` columns never enter.  Returns 'optimal' or 'unbounded'.
        """
        d = self._recompute_reduced(cost)
        basic_set = set(self.basis)
        while True:
            entering = -1
            direction = 0
            for j in range(self.num_cols):
                if j in basic_set or j in frozen:
                    continue
                lo, up = self.lo[j], self.up[j]
                if up is not None and lo == up:
                    continue
                if d[j] < 0 and self.val[j] == lo:
                    entering, direction = j, 1
                    break
                if d[j] > 0 and up is not None and self.val[j] == up:
                    entering, direction = j, -1
                    break
            if entering < 0:
                self.d = d
                return "optimal"

            q = entering
            # Ratio test: how far can val[q] move in `direction`.
            limit: Rat | None = None
            leave_row = -1
            leave_to_upper = False
            if self.up[q] is not None:
                limit = self.up[q] - self.lo[q]
            for i in range(self.m):
                coef = direction * self.T[i][q]
                if coef > 0:
                    lo_b = self.lo[self.basis[i]]
                    t = (self.xB[i] - lo_b) / coef
                    hits_upper = False
                elif coef < 0:
                    up_b = self.up[self.basis[i]]
                    if up_b is None:
                        continue
                    t = (up_b - self.xB[i]) / (-coef)
                    hits_upper = True
                else:
                    continue
                if limit is None or t < limit or (
                        t == limit and leave_row >= 0
                        and self.basis[i] < self.basis[leave_row]):
                    limit = t
                    leave_row = i
                    leave_to_upper = hits_upper
                elif t == limit and leave_row < 0:
                    # Tie between bound flip and a row: prefer the row
                    # (Bland needs a basis change to guarantee progress).
                    limit = t
                    leave_row = i
                    leave_to_upper = hits_upper
            if limit is None:
                return "unbounded"

            t = limit
            if t:
                step = direction * t
                for i in range(self.m):
                    coef = self.T[i][q]
                    if coef:
                        self.xB[i] -= step * coef
            if leave_row < 0:
                # Bound flip: q moves to its other bound, basis unchanged.
                self.val[q] = self.up[q] if direction > 0 else self.lo[q]
                continue
            leaving = self.basis[leave_row]
            self.val[leaving] = (self.up[leaving] if leave_to_upper
                                 else self.lo[leaving])
            new_value = self.val[q] + direction * t
            self.basis[leave_row] = q
            self.xB[leave_row] = new_value
            basic_set.discard(leaving)
            basic_set.add(q)
            self._pivot(leave_row, q, d)

    # -- public solve -------------------------------------------------------

    def solve(self) -> LpSolution:
        m, n = self.m, self.n_struct
        phase1_cost = [ZERO] * self.num_cols
        for j in self.art_col:
            phase1_cost[j] = Rat(1)
        status = self._run(phase1_cost, frozen=set())
        infeasibility = sum((self.xB[i] for i in range(m)
                             if self.basis[i] in set(self.art_col)), ZERO)
        if status != "optimal" or infeasibility != 0:
            return LpSolution(status="infeasible")

        # Freeze artificials at zero for phase 2.
        for j in self.art_col:
            self.up[j] = ZERO
            if self.val[j] != 0:
                self.val[j] = ZERO
        phase2_cost = [ZERO] * self.num_cols
        for j, c in self.lp.objective.items():
            phase2_cost[j] = c
        status = self._run(phase2_cost, frozen=set(self.art_col))
        if status != "optimal":
            return LpSolution(status="unbounded")

        values = [ZERO] * self.num_cols
        for j in range(self.num_cols):
            values[j] = self.val[j]
        for i in range(m):
            values[self.basis[i]] = self.xB[i]
        objective = sum((phase2_cost[j] * values[j]
                         for j in range(self.num_cols)), ZERO)
        # Row duals, unscaled back to the original constraint orientation.
        duals = tuple(-self.row_sign[i] * self.d[self.art_col[i]]
                      for i in range(m))
        return LpSolution(
            status="optimal",
            values=tuple(values[:n]),
            objective_value=objective,
            basis=tuple(self.basis),
            duals=duals,
            reduced_costs=tuple(self.d[:n]),
        )


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve to an exact optimal vertex, or report infeasible/unbounded.

    Deterministic: Bland's rule fixes the pivot sequence, so equal inputs
    produce identical solutions (including tie-breaking among optima).
    """
    return _Simplex(lp).solve()


def add_constraint_and_resolve(lp: LinearProgram, solution: LpSolution,
                               coeffs: dict[int, Rat], relation: str,
                               rhs: Rat) -> LpSolution:
    """Append a constraint and re-solve.

    ``solution`` (the optimum of ``lp`` before the addition) would permit
    a warm start; this implementation re-solves from scratch, which is
    trivially identical to a cold solve and fast at the problem sizes
    this package targets.
    """
    if solution.status != "optimal":
        raise PreconditionError("base solution must be optimal")
    lp.add_constraint(coeffs, relation, rhs)
    return solve_lp(lp)
