"""Independent oracles and instance builders shared by the tests.

Everything here is deliberately naive (enumeration, Gaussian
elimination, edge-deletion connectivity) so it cannot share a failure
mode with the production code paths it checks.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from matchgap.f2m import FractionalTwoMatching
from matchgap.graphs import MultiGraph
from matchgap.instances import MetricInstance, make_instance
from matchgap.lp import LinearProgram, solve_lp
from matchgap.twomo import TwoMOInstance

F = Fraction


def unit_support_instance(n: int, support: set[tuple[int, int]],
                          off_cost: int = 2) -> MetricInstance:
    """Cost 1 on ``support``, ``off_cost`` elsewhere (metric for cost 2)."""
    canon = {(min(i, j), max(i, j)) for i, j in support}
    return make_instance(
        n, lambda i, j: F(1) if (min(i, j), max(i, j)) in canon
        else F(off_cost))


def hand_cutpath_instance(length: int) -> tuple[MetricInstance,
                                                FractionalTwoMatching]:
    """Two chorded 5-cycles joined by one path: its removal disconnects.

    Returns the instance together with the hand-built fractional
    2-matching (value 1/2 on the two 5-cycles, 1 on the chords and the
    joining path), which is optimal (its cost equals the vertex count).
    """
    n = 10 + (length - 1)
    values: dict[tuple[int, int], Fraction] = {}
    for e in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
              (5, 6), (6, 7), (7, 8), (8, 9), (5, 9)]:
        values[e] = F(1, 2)
    for e in [(1, 3), (2, 4), (6, 8), (7, 9)]:
        values[e] = F(1)
    chain = [0] + list(range(10, 10 + length - 1)) + [5]
    for a, b in zip(chain, chain[1:]):
        values[(min(a, b), max(a, b))] = F(1)
    inst = unit_support_instance(n, set(values))
    objective = sum(inst.cost(i, j) * v for (i, j), v in values.items())
    return inst, FractionalTwoMatching(n, values, objective)


def adjacent_endpoint_instance() -> tuple[MetricInstance,
                                          FractionalTwoMatching]:
    """Two 5-cycles where two paths join *adjacent* cycle vertices.

    Paths 0-10-1 and 5-14-6 run parallel to cycle edges once contracted,
    so the auxiliary graph is a genuine multigraph; three paths cross
    between the cycles, so none is a cut path and every construction
    applies.
    """
    values: dict[tuple[int, int], Fraction] = {}
    for e in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
              (5, 6), (6, 7), (7, 8), (8, 9), (5, 9)]:
        values[e] = F(1, 2)
    for chain in ([0, 10, 1], [2, 11, 7], [3, 12, 8], [4, 13, 9],
                  [5, 14, 6]):
        for a, b in zip(chain, chain[1:]):
            values[(min(a, b), max(a, b))] = F(1)
    inst = unit_support_instance(15, set(values))
    objective = sum(inst.cost(i, j) * v for (i, j), v in values.items())
    return inst, FractionalTwoMatching(15, values, objective)


# -- exact linear algebra -------------------------------------------------------

def solve_linear_system(rows: list[list[Fraction]],
                        rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve a square system exactly; None if singular."""
    n = len(rows)
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [a * inv for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def matrix_rank(rows: list[list[Fraction]]) -> int:
    """Exact rank by Gaussian elimination."""
    work = [list(r) for r in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(work))
                      if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [a * inv for a in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[rank])]
        rank += 1
    return rank


def enumerate_lp_optimum(lp: LinearProgram) -> Fraction | None:
    """Optimal value by enumerating basic feasible points (tiny LPs only).

    Collects every constraint and finite bound as a hyperplane, tries
    all ways to make ``num_variables`` of them tight, solves exactly,
    filters by feasibility, and minimizes the objective.  Equality
    constraints are always tight.
    """
    n = lp.num_variables
    planes: list[tuple[list[Fraction], Fraction]] = []
    forced: list[int] = []
    for coeffs, rel, rhs in lp.constraints:
        row = [coeffs.get(j, F(0)) for j in range(n)]
        if rel == "=":
            forced.append(len(planes))
        planes.append((row, rhs))
    for j in range(n):
        row = [F(0)] * n
        row[j] = F(1)
        planes.append((row, lp.lower[j]))
        if lp.upper[j] is not None:
            row2 = [F(0)] * n
            row2[j] = F(1)
            planes.append((row2, lp.upper[j]))
    free = [k for k in range(len(planes)) if k not in forced]
    best: Fraction | None = None
    need = n - len(forced)
    if need < 0:
        need = 0
    for extra in combinations(free, need):
        chosen = forced + list(extra)
        rows = [planes[k][0] for k in chosen]
        rhs = [planes[k][1] for k in chosen]
        if len(rows) != n:
            continue
        point = solve_linear_system(rows, rhs)
        if point is None:
            continue
        if not _feasible(lp, point):
            continue
        value = sum((lp.objective.get(j, F(0)) * point[j]
                     for j in range(n)), F(0))
        if best is None or value < best:
            best = value
    return best


def _feasible(lp: LinearProgram, point: list[Fraction]) -> bool:
    for j in range(lp.num_variables):
        if point[j] < lp.lower[j]:
            return False
        if lp.upper[j] is not None and point[j] > lp.upper[j]:
            return False
    for coeffs, rel, rhs in lp.constraints:
        lhs = sum((c * point[j] for j, c in coeffs.items()), F(0))
        if rel == "=" and lhs != rhs:
            return False
        if rel == "<=" and lhs > rhs:
            return False
        if rel == ">=" and lhs < rhs:
            return False
    return True


# -- exhaustive graph oracles ----------------------------------------------------

def exhaustive_min_cut(vertices: list[int],
                       weights: dict[tuple[int, int], Fraction]
                       ) -> tuple[frozenset[int], Fraction]:
    """Minimum cut over all 2^(n-1) bipartitions."""
    anchor = vertices[0]
    others = vertices[1:]
    best_side, best_value = None, None
    for size in range(0, len(others) + 1):
        for side in combinations(others, size):
            s = set(side) | {anchor}
            value = sum((w for (i, j), w in weights.items()
                         if (i in s) != (j in s)), F(0))
            if len(s) == len(vertices):
                continue
            if best_value is None or value < best_value:
                best_side, best_value = frozenset(s), value
    return best_side, best_value


def naive_bridges(g: MultiGraph) -> list[int]:
    """Bridges by deleting each edge and checking connectivity."""

    def components_without(skip: int) -> int:
        seen: set = set()
        count = 0
        for start in g.vertices:
            if start in seen:
                continue
            count += 1
            stack = [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                for edge in g.incident_edges(v):
                    if edge.id == skip:
                        continue
                    w = edge.other(v)
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count

    base = components_without(-1)
    return [e.id for e in g.edges if components_without(e.id) > base]


def full_subtour_objective(inst: MetricInstance) -> Fraction:
    """Subtour optimum via one LP holding every subset constraint."""
    lp = LinearProgram()
    keys = []
    for i, j, _ in inst.edges():
        lp.add_variable(F(0), F(1))
        keys.append((i, j))
    for v in range(inst.n):
        lp.add_constraint({k: F(1) for k, (i, j) in enumerate(keys)
                           if v in (i, j)}, "=", F(2))
    for size in range(3, inst.n - 2):
        for subset in combinations(range(1, inst.n), size):
            s = set(subset)
            coeffs = {k: F(1) for k, (i, j) in enumerate(keys)
                      if (i in s) != (j in s)}
            lp.add_constraint(coeffs, ">=", F(2))
    lp.set_objective({k: inst.cost(i, j) for k, (i, j) in enumerate(keys)})
    solution = solve_lp(lp)
    assert solution.status == "optimal"
    return solution.objective_value


def enumerate_min_two_matching(inst: MetricInstance) -> Fraction | None:
    """Minimum-cost 2-matching by enumerating all edge subsets (tiny n)."""
    edges = list(inst.edges())
    best = None
    for mask in range(1 << len(edges)):
        degree = [0] * inst.n
        cost = F(0)
        for k, (i, j, c) in enumerate(edges):
            if mask & (1 << k):
                degree[i] += 1
                degree[j] += 1
                cost += c
        if all(d == 2 for d in degree):
            if best is None or cost < best:
                best = cost
    return best


def enumerate_min_2mo(tmi: TwoMOInstance) -> Fraction | None:
    """Minimum-cost integral 2MO solution by subset enumeration."""
    edges = list(tmi.edges)
    nodes = tmi.nodes()
    best = None
    for mask in range(1 << len(edges)):
        degree = {v: 0 for v in nodes}
        cost = F(0)
        for k, (u, v, c) in enumerate(edges):
            if mask & (1 << k):
                degree[u] += 1
                degree[v] += 1
                cost += c
        if all(degree[v] == 2 for v in tmi.mandatory) and all(
                degree[v] in (0, 2) for v in tmi.optional):
            if best is None or cost < best:
                best = cost
    return best
