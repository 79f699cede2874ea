"""Randomized verification suites, deterministic in their seeds.

These drive both the command-line ``verify`` subcommands and the
acceptance tests: oracle equivalence for the matching solver, polytope
membership of the scaled 2MO point, exact ratio certificates for the
three pipelines, and the one-third bound on cubic 2-edge-connected
graphs.  Every failure message carries the trial's seed so it can be
replayed directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import MatchgapError, NoPerfectMatchingError
from .graphs import MultiGraph, build_graph
from .instances import gen_random_metric
from .matching import (brute_force_perfect_matching,
                       check_matching_polytope_point,
                       min_cost_perfect_matching, np_bound_check)
from .pipeline import run_g2m43, run_g2m109
from .rational import Rat
from .subtour import solve_subtour_lp
from .twomo import (check_2mo_polytope, g2m_from_subtour, map_subtour_to_2mo,
                    split_graph)

ONE_THIRD = Rat(1, 3)


@dataclass
class VerifyOutcome:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        lines = [f"{self.name}: {self.trials - len(self.failures)}/"
                 f"{self.trials} {status}"]
        lines.extend(f"  counterexample: {msg}" for msg in self.failures)
        return "\n".join(lines)


def random_multigraph(seed: int, max_vertices: int = 12) -> MultiGraph:
    """A random costed multigraph: parallel edges, mixed-sign rationals."""
    rng = random.Random(seed)
    n = rng.randrange(2, max_vertices + 1)
    edges = []
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        if rng.random() < 0.55:
            edges.append((i, j, Rat(rng.randint(-24, 24), rng.randint(1, 6))))
    for _ in range(rng.randrange(0, 4)):
        if edges:
            i, j, _ = edges[rng.randrange(len(edges))]
            edges.append((i, j, Rat(rng.randint(-24, 24), rng.randint(1, 6))))
    return build_graph(n, edges)


def verify_oracles(max_vertices: int = 12, trials: int = 200,
                   seed: int = 0) -> VerifyOutcome:
    """Solver equals brute force on random multigraphs, edge for edge."""
    outcome = VerifyOutcome("oracle equivalence")
    for trial in range(trials):
        outcome.trials += 1
        g = random_multigraph(seed * 100003 + trial, max_vertices)
        try:
            fast = min_cost_perfect_matching(g)
        except NoPerfectMatchingError:
            fast = None
        try:
            slow = brute_force_perfect_matching(g)
        except NoPerfectMatchingError:
            slow = None
        if (fast is None) != (slow is None):
            outcome.failures.append(
                f"seed {seed}/trial {trial}: existence disagreement")
        elif fast is not None and (fast.total_cost != slow.total_cost
                                   or fast.edge_ids != slow.edge_ids):
            outcome.failures.append(
                f"seed {seed}/trial {trial}: {fast} vs {slow}")
    return outcome


def verify_polytopes(n: int = 5, trials: int = 20,
                     seed: int = 0) -> VerifyOutcome:
    """The 1/9-scaled subtour optimum lies in the 2MO polytope.

    Full odd-matching enumeration over the split instance, so n is
    capped at 6 (12 split nodes).
    """
    outcome = VerifyOutcome("2MO polytope membership")
    for trial in range(trials):
        outcome.trials += 1
        size = 4 + (trial % max(1, n - 3))
        inst = gen_random_metric(size, seed * 7919 + trial)
        sub = solve_subtour_lp(inst)
        tmi = split_graph(inst)
        point = map_subtour_to_2mo(sub.values)
        violation = check_2mo_polytope(tmi, point)
        if violation is not None:
            outcome.failures.append(
                f"seed {seed}/trial {trial} (n={size}): {violation}")
    return outcome


def verify_ratios(max_n: int = 9, trials: int = 50,
                  seed: int = 0) -> VerifyOutcome:
    """Exact 10/9 and 4/3 certificates on random metric instances."""
    outcome = VerifyOutcome("ratio certificates")
    for trial in range(trials):
        outcome.trials += 1
        size = 5 + (trial % (max_n - 4))
        inst = gen_random_metric(size, seed * 104729 + trial)
        try:
            run = g2m_from_subtour(inst)
            if not (run.g2m_within_bound and run.two_matching_within_bound):
                outcome.failures.append(
                    f"seed {seed}/trial {trial}: 10/9 subtour bound broken "
                    f"({run.g2m_cost} vs {run.bound})")
                continue
            r43 = run_g2m43(inst)
            if not r43.within_bound:
                outcome.failures.append(
                    f"seed {seed}/trial {trial}: 4/3 bound broken")
                continue
            r109 = run_g2m109(inst)
            if r109.applicable and not r109.within_bound:
                outcome.failures.append(
                    f"seed {seed}/trial {trial}: 10/9 bound broken")
        except MatchgapError as exc:
            outcome.failures.append(f"seed {seed}/trial {trial}: {exc}")
    return outcome


def random_cubic_two_edge_connected(seed: int,
                                    max_vertices: int = 14) -> MultiGraph:
    """Random cubic 2-edge-connected multigraph with mixed-sign costs.

    Configuration model with rejection: pair three stubs per vertex,
    discard pairings with self-loops, and retry until the result is
    connected and bridgeless.  Deterministic in the seed.
    """
    rng = random.Random(seed)
    n = 2 * rng.randrange(2, max_vertices // 2 + 1)
    while True:
        stubs = [v for v in range(n) for _ in range(3)]
        rng.shuffle(stubs)
        pairs = [(stubs[k], stubs[k + 1]) for k in range(0, len(stubs), 2)]
        if any(a == b for a, b in pairs):
            continue
        edges = [(min(a, b), max(a, b),
                  Rat(rng.randint(-30, 30), rng.randint(1, 8)))
                 for a, b in pairs]
        g = build_graph(n, edges)
        if g.two_edge_connectivity_witness() is None:
            return g


def verify_np_bound(trials: int = 100, seed: int = 0,
                    max_vertices: int = 14,
                    check_membership: bool = True) -> VerifyOutcome:
    """Matching cost at most one third of total cost on random cubic
    2-edge-connected graphs; the uniform 1/3 point is LP-feasible."""
    outcome = VerifyOutcome("one-third matching bound")
    for trial in range(trials):
        outcome.trials += 1
        g = random_cubic_two_edge_connected(seed * 31337 + trial,
                                            max_vertices)
        matching, holds = np_bound_check(g)
        if not holds:
            outcome.failures.append(
                f"seed {seed}/trial {trial}: matching {matching.total_cost} "
                f"exceeds a third of {g.total_cost()}")
            continue
        if check_membership:
            point = {e.id: ONE_THIRD for e in g.edges}
            violation = check_matching_polytope_point(g, point)
            if violation is not None:
                outcome.failures.append(
                    f"seed {seed}/trial {trial}: 1/3 point rejected: "
                    f"{violation}")
    return outcome
