"""Complete metric instances: construction, I/O and generators.

An instance is a complete undirected graph on ``n`` vertices with exact,
symmetric, positive rational costs.  The ``metric`` flag records whether
the triangle inequality holds; it is always computed by a full triple
scan rather than trusted from input.

Two interchange formats are supported:

* the canonical JSON format ``{"n": int, "costs": [[num, den], ...]}``
  with costs listed row-major over the upper triangle
  ``(0,1), (0,2), ..., (0,n-1), (1,2), ...``;
* a TSPLIB subset (``EDGE_WEIGHT_TYPE`` EXPLICIT with full/upper matrix,
  or EUC_2D with distances rounded to nearest integer, the usual TSPLIB
  convention, and then treated as exact integers).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import ParseError, PreconditionError, ValidationError
from .rational import Rat, rat_from_pair, rat_to_pair


def _edge_index(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class MetricInstance:
    """A complete graph with exact symmetric costs.

    ``costs`` stores the upper triangle row-major; use :meth:`cost` for
    access by vertex pair.  Instances are immutable and hashable.
    """

    n: int
    costs: tuple[Rat, ...]
    metric: bool

    def cost(self, i: int, j: int) -> Rat:
        if i == j:
            raise ValueError("cost undefined on the diagonal")
        return self.costs[_edge_index(self.n, i, j)]

    def edges(self) -> Iterator[tuple[int, int, Rat]]:
        """All vertex pairs ``i < j`` with their costs, in index order."""
        k = 0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                yield i, j, self.costs[k]
                k += 1


def make_instance(n: int, cost_of: Callable[[int, int], Rat]) -> MetricInstance:
    """Build and validate an instance from a cost function on pairs.

    Raises:
        ValidationError: On non-positive costs or fewer than 3 vertices.
    """
    if n < 3:
        raise ValidationError(f"need at least 3 vertices, got {n}")
    costs = []
    for i in range(n):
        for j in range(i + 1, n):
            c = Rat(cost_of(i, j))
            if c <= 0:
                raise ValidationError(f"cost({i},{j}) = {c} is not positive")
            costs.append(c)
    inst = MetricInstance(n, tuple(costs), metric=False)
    is_metric = not check_triangle_inequality(inst)
    return MetricInstance(n, tuple(costs), metric=is_metric)


def check_triangle_inequality(inst: MetricInstance) -> list[tuple[int, int, int]]:
    """All violating triples ``(i, k, j)`` with ``c(i,j) > c(i,k) + c(k,j)``.

    The list is empty exactly when the instance is metric.  Triples are
    canonicalized as ``i < j`` with the intermediate vertex ``k`` in the
    middle position, ordered by ``(i, j, k)``.
    """
    violations = []
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            cij = inst.cost(i, j)
            for k in range(inst.n):
                if k in (i, j):
                    continue
                if cij > inst.cost(i, k) + inst.cost(k, j):
                    violations.append((i, k, j))
    return violations


# -- canonical JSON format --------------------------------------------------

def serialize_instance(inst: MetricInstance) -> str:
    """Serialize to the canonical JSON format (deterministic bytes)."""
    doc = {"n": inst.n, "costs": [rat_to_pair(c) for c in inst.costs]}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _parse_json_instance(text: str) -> MetricInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 3:
        raise ParseError(f"'n' must be an integer >= 3, got {n!r}", field="n")
    raw = doc.get("costs")
    expected = n * (n - 1) // 2
    if not isinstance(raw, list) or len(raw) != expected:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise ParseError(f"'costs' must list {expected} pairs, got {got}",
                         field="costs")
    costs = [rat_from_pair(pair, field=f"costs[{k}]")
             for k, pair in enumerate(raw)]
    it = iter(costs)
    lookup = {}
    for i in range(n):
        for j in range(i + 1, n):
            lookup[(i, j)] = next(it)
    return make_instance(n, lambda i, j: lookup[(min(i, j), max(i, j))])


# -- TSPLIB subset ------------------------------------------------------------

def _nint_sqrt(value: Rat) -> int:
    """TSPLIB nearest-integer square root: ``(int)(sqrt(value) + 0.5)``.

    Computed exactly: no floating point, halves round up.
    """
    if value < 0:
        raise ValueError("negative distance")
    m = math.isqrt(int(value))
    while Rat((m + 1) * (m + 1)) <= value:
        m += 1
    # round up when value >= (m + 1/2)^2
    if 4 * value >= Rat(4 * m * m + 4 * m + 1):
        m += 1
    return m


def _parse_tsplib(text: str) -> MetricInstance:
    lines = text.splitlines()
    header: dict[str, str] = {}
    section = None
    weights: list[Rat] = []
    coords: dict[int, tuple[Rat, Rat]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line == "EOF":
            section = None
            continue
        upper = line.upper()
        if ":" in line and not section:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = value.strip()
            continue
        if upper in ("EDGE_WEIGHT_SECTION", "NODE_COORD_SECTION",
                     "DISPLAY_DATA_SECTION"):
            section = upper
            continue
        if section == "EDGE_WEIGHT_SECTION":
            for tok in line.split():
                try:
                    weights.append(Rat(tok))
                except ValueError as exc:
                    raise ParseError(f"bad weight {tok!r}", line=lineno) from exc
        elif section == "NODE_COORD_SECTION":
            toks = line.split()
            if len(toks) != 3:
                raise ParseError("node line must be 'index x y'", line=lineno)
            try:
                coords[int(toks[0])] = (Rat(toks[1]), Rat(toks[2]))
            except ValueError as exc:
                raise ParseError(f"bad coordinate in {line!r}",
                                 line=lineno) from exc
        elif section == "DISPLAY_DATA_SECTION":
            continue
        else:
            raise ParseError(f"unexpected line {line!r}", line=lineno)

    try:
        n = int(header["DIMENSION"])
    except (KeyError, ValueError):
        raise ParseError("missing or bad DIMENSION", field="DIMENSION")
    weight_type = header.get("EDGE_WEIGHT_TYPE", "").upper()

    if weight_type == "EUC_2D":
        if set(coords) != set(range(1, n + 1)):
            raise ParseError("NODE_COORD_SECTION must cover 1..DIMENSION",
                             field="NODE_COORD_SECTION")

        def euc(i: int, j: int) -> Rat:
            (xi, yi), (xj, yj) = coords[i + 1], coords[j + 1]
            return Rat(_nint_sqrt((xi - xj) ** 2 + (yi - yj) ** 2))

        return make_instance(n, euc)

    if weight_type != "EXPLICIT":
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {weight_type!r}",
                         field="EDGE_WEIGHT_TYPE")
    fmt = header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX").upper()
    lookup: dict[tuple[int, int], Rat] = {}
    if fmt == "FULL_MATRIX":
        if len(weights) != n * n:
            raise ParseError(f"FULL_MATRIX needs {n * n} entries, "
                             f"got {len(weights)}", field="EDGE_WEIGHT_SECTION")
        for i in range(n):
            for j in range(n):
                if weights[i * n + j] != weights[j * n + i]:
                    raise ValidationError(
                        f"asymmetric matrix: entry ({i},{j}) = "
                        f"{weights[i * n + j]} but ({j},{i}) = "
                        f"{weights[j * n + i]}")
                if i < j:
                    lookup[(i, j)] = weights[i * n + j]
    elif fmt in ("UPPER_ROW", "UPPER_DIAG_ROW"):
        it = iter(weights)
        try:
            for i in range(n):
                start = i if fmt == "UPPER_ROW" else i - 1
                for j in range(start + 1, n):
                    w = next(it)
                    if j > i:
                        lookup[(i, j)] = w
        except StopIteration:
            raise ParseError("EDGE_WEIGHT_SECTION ended early",
                             field="EDGE_WEIGHT_SECTION")
        if next(it, None) is not None:
            raise ParseError("trailing entries in EDGE_WEIGHT_SECTION",
                             field="EDGE_WEIGHT_SECTION")
    else:
        raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}",
                         field="EDGE_WEIGHT_FORMAT")
    return make_instance(n, lambda i, j: lookup[(min(i, j), max(i, j))])


def parse_instance(text: str) -> MetricInstance:
    """Parse the canonical JSON format or the TSPLIB subset.

    Raises:
        ParseError: Malformed text, with line/field information.
        ValidationError: Structural problems (asymmetry, bad costs).
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json_instance(text)
    return _parse_tsplib(text)


# -- generators ---------------------------------------------------------------

@dataclass(frozen=True)
class WorstCaseFamily:
    """A hard instance bundled with its fractional 2-matching certificate.

    ``f2m_values`` maps support edges ``(i, j)`` with ``i < j`` to their
    fractional value (1/2 on the two triangles, 1 on the three paths);
    it is an optimal fractional 2-matching of the instance.
    """

    instance: MetricInstance
    f2m_values: dict[tuple[int, int], Rat]
    path_length: int

    def f2m_cost(self) -> Rat:
        return sum((self.instance.cost(i, j) * x
                    for (i, j), x in self.f2m_values.items()), Rat(0))


def gen_worst_case_family(ell: int) -> WorstCaseFamily:
    """Two unit-cost triangles joined by three vertex-disjoint unit-cost
    paths of ``ell`` edges each; every non-edge costs 2.

    Vertices: the first triangle is 0,1,2 and the second 3,4,5; path ``i``
    joins ``i`` to ``3+i`` through ``ell - 1`` interior vertices.  The
    bundled certificate puts value 1/2 on the six triangle edges and 1 on
    all path edges, which is degree-2 feasible and (since every cost is
    at least 1 and the certificate costs ``n``) optimal.
    """
    if ell < 1:
        raise PreconditionError(f"path length must be >= 1, got {ell}")
    n = 6 + 3 * (ell - 1)
    half = Rat(1, 2)
    one = Rat(1)
    values: dict[tuple[int, int], Rat] = {}
    for a, b in ((0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)):
        values[(a, b)] = half
    next_interior = 6
    for i in range(3):
        chain = [i]
        for _ in range(ell - 1):
            chain.append(next_interior)
            next_interior += 1
        chain.append(3 + i)
        for a, b in zip(chain, chain[1:]):
            values[(min(a, b), max(a, b))] = one
    inst = make_instance(
        n, lambda i, j: Rat(1) if (min(i, j), max(i, j)) in values else Rat(2))
    return WorstCaseFamily(inst, values, ell)


def gen_random_metric(n: int, seed: int) -> MetricInstance:
    """A random metric instance, deterministic in ``seed``.

    Draws distinct integer points in a square, rounds pairwise Euclidean
    distances to nearest integers (exactly, without floating point) and
    closes the result under shortest paths, which repairs any rounding
    violations and guarantees the metric flag.
    """
    if n < 3:
        raise PreconditionError(f"need n >= 3, got {n}")
    rng = random.Random(seed)
    side = 6 * n
    points: list[tuple[int, int]] = []
    taken = set()
    while len(points) < n:
        p = (rng.randrange(side), rng.randrange(side))
        if p not in taken:
            taken.add(p)
            points.append(p)
    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            (xi, yi), (xj, yj) = points[i], points[j]
            d = _nint_sqrt(Rat((xi - xj) ** 2 + (yi - yj) ** 2))
            dist[i][j] = dist[j][i] = max(1, d)
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            for j in range(n):
                if dik + dist[k][j] < dist[i][j]:
                    dist[i][j] = dik + dist[k][j]
    return make_instance(n, lambda i, j: Rat(dist[i][j]))
