"""Report assembly and emission: JSON, CSV, and rendered figures.

Reports carry every cost as an exact ``[numerator, denominator]`` pair;
decimal strings are annotations rendered by integer arithmetic (round
half up at a fixed number of places), so byte-identical reruns are
guaranteed.  Pass/fail flags are computed from the exact values only.

The worst-case ratio experiment sweeps the hard family toward its
sharpest member: index ``k`` uses the two-triangle instance with paths
of ``7 - k`` edges, so the optimal-2-matching/subtour ratio climbs
monotonically through 22/21, 19/18, 16/15, 13/12 and tops out at the
extremal 10/9.  The report path writes the table as CSV and JSON and
renders the matching figure next to them.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass

from .errors import MatchgapError
from .f2m import decompose, decomposition_to_json_dict, f2m_to_json_dict, solve_f2m
from .g2m import g2m_to_json_dict, two_matching_to_json_dict
from .instances import MetricInstance, gen_worst_case_family, serialize_instance
from .pipeline import run_g2m43, run_g2m109, run_boydcarr
from .rational import Rat, rat_to_pair
from .subtour import solve_subtour_lp
from .twomo import ALPHA_DEFAULT, optimal_two_matching

BRUTE_FORCE_2M_LIMIT = 10
RATIO_TARGET = Rat(10, 9)

PIPELINES = ("f2m", "subtour", "g2m43", "g2m109", "boydcarr")


def decimal_string(value: Rat, places: int = 6) -> str:
    """Exact decimal rendering (round half up), no floating point."""
    negative = value < 0
    num, den = abs(value.numerator), value.denominator
    scaled, remainder = divmod(num * 10 ** places, den)
    if 2 * remainder >= den:
        scaled += 1
    whole, frac = divmod(scaled, 10 ** places)
    text = f"{whole}.{frac:0{places}d}" if places else str(whole)
    return "-" + text if negative else text


def _rat_entry(value: Rat) -> dict:
    return {"exact": rat_to_pair(value), "decimal": decimal_string(value)}


def instance_digest(inst: MetricInstance) -> str:
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()


@dataclass(frozen=True)
class RunReport:
    """Exact per-pipeline costs and bound checks for one instance."""

    digest: str
    n: int
    alpha: Rat
    sections: dict

    def all_passed(self) -> bool:
        for section in self.sections.values():
            if section.get("pass") is False:
                return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "schema": "matchgap.run_report/1",
            "instance": {"digest": self.digest, "n": self.n},
            "alpha": _rat_entry(self.alpha),
            "pipelines": self.sections,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["pipeline", "field", "numerator", "denominator",
                         "decimal"])
        for name in sorted(self.sections):
            for field, value in sorted(self.sections[name].items()):
                if isinstance(value, dict) and "exact" in value:
                    num, den = value["exact"]
                    writer.writerow([name, field, num, den,
                                     value["decimal"]])
                elif isinstance(value, (bool, int, str)):
                    writer.writerow([name, field, "", "", value])
                # Certificate payloads (edge lists, cycles) stay JSON-only.
        return buffer.getvalue()


def build_run_report(inst: MetricInstance, pipeline: str = "all",
                     alpha: Rat = ALPHA_DEFAULT) -> RunReport:
    """Run the requested pipelines and assemble their exact report.

    ``pipeline`` is one of f2m, subtour, g2m43, g2m109, boydcarr or all.
    Ratios are reported against the quantity each theorem bounds; the
    ``pass`` flag restates the recorded exact inequality.
    """
    wanted = PIPELINES if pipeline == "all" else (pipeline,)
    unknown = set(wanted) - set(PIPELINES)
    if unknown:
        raise MatchgapError(f"unknown pipeline {unknown.pop()!r}")
    sections: dict = {}
    f2m_cache = None

    def the_f2m():
        nonlocal f2m_cache
        if f2m_cache is None:
            f2m_cache = solve_f2m(inst)
        return f2m_cache

    if "f2m" in wanted:
        x = the_f2m()
        decomposition = decompose(x, inst)
        sections["f2m"] = {
            "objective": _rat_entry(x.objective),
            "certificate": f2m_to_json_dict(x),
            "decomposition": decomposition_to_json_dict(decomposition),
        }
    if "subtour" in wanted:
        sub = solve_subtour_lp(inst)
        sections["subtour"] = {
            "objective": _rat_entry(sub.objective),
            "values": [[i, j, rat_to_pair(v)]
                       for (i, j), v in sorted(sub.values.items())],
            "cut_pool": [sorted(s) for s in sub.cut_pool],
        }
    def _theorem_section(run) -> dict:
        section = {
            "applicable": True,
            "f2m_objective": _rat_entry(run.f2m.objective),
            "g2m_cost": _rat_entry(run.g2m_cost_value),
            "bound": _rat_entry(run.bound),
            "ratio": _rat_entry(run.g2m_cost_value / run.f2m.objective),
            "pass": bool(run.within_bound),
        }
        if run.two_matching_cost_value is not None:
            section["shortcut_cost"] = _rat_entry(run.two_matching_cost_value)
        return section

    if "g2m43" in wanted:
        sections["g2m43"] = _theorem_section(run_g2m43(inst, the_f2m()))
    if "g2m109" in wanted:
        run = run_g2m109(inst, the_f2m())
        if not run.applicable:
            sections["g2m109"] = {"applicable": False, "reason": run.reason}
        else:
            sections["g2m109"] = _theorem_section(run)
    if "boydcarr" in wanted:
        run = run_boydcarr(inst, alpha)
        sections["boydcarr"] = {
            "subtour_objective": _rat_entry(run.subtour.objective),
            "scaled_point_cost": _rat_entry(run.point_cost_value),
            "matching_cost": _rat_entry(run.matching_cost),
            "g2m_cost": _rat_entry(run.g2m_cost),
            "shortcut_cost": _rat_entry(run.two_matching_cost_value),
            "bound": _rat_entry(run.bound),
            "ratio": _rat_entry(run.g2m_cost / run.subtour.objective),
            "pass": bool(run.g2m_within_bound
                         and run.two_matching_within_bound),
            "g2m": g2m_to_json_dict(run.g2m),
            "two_matching": two_matching_to_json_dict(run.two_matching),
        }
        if inst.n <= BRUTE_FORCE_2M_LIMIT:
            _, best_cost = optimal_two_matching(inst)
            sections["boydcarr"]["optimal_2m_cost"] = _rat_entry(best_cost)
            sections["boydcarr"]["optimal_2m_ratio"] = _rat_entry(
                best_cost / run.subtour.objective)
    return RunReport(instance_digest(inst), inst.n, alpha, sections)


# -- worst-case family ratio experiment -----------------------------------------

@dataclass(frozen=True)
class RatioPoint:
    index: int
    path_length: int
    n: int
    subtour_value: Rat
    optimal_2m: Rat

    @property
    def ratio(self) -> Rat:
        return self.optimal_2m / self.subtour_value


def worst_case_ratio_experiment(count: int = 5) -> list[RatioPoint]:
    """Exact optimal-2-matching / subtour ratios along the hard family.

    Index ``k`` (1-based) uses paths of ``7 - k`` edges, walking the
    family toward its extremal member, so the ratio sequence increases
    with ``k`` and reaches 10/9 exactly at the last step.  The optimal
    2-matching is computed over the complete instance via the exact
    matching reduction (the largest member has 21 vertices).
    """
    points = []
    for index in range(1, count + 1):
        path_length = 7 - index
        if path_length < 1:
            raise MatchgapError("experiment defined for at most 6 members")
        family = gen_worst_case_family(path_length)
        sub = solve_subtour_lp(family.instance)
        _, best = optimal_two_matching(family.instance)
        points.append(RatioPoint(index, path_length, family.instance.n,
                                 sub.objective, best))
    return points


def ratio_points_to_json(points: list[RatioPoint]) -> str:
    doc = {
        "schema": "matchgap.ratio_experiment/1",
        "target": _rat_entry(RATIO_TARGET),
        "points": [
            {
                "index": p.index,
                "path_length": p.path_length,
                "n": p.n,
                "subtour": _rat_entry(p.subtour_value),
                "optimal_2m": _rat_entry(p.optimal_2m),
                "ratio": _rat_entry(p.ratio),
            }
            for p in points],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def ratio_points_to_csv(points: list[RatioPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index", "path_length", "n",
                     "subtour_num", "subtour_den",
                     "optimal_2m_num", "optimal_2m_den",
                     "ratio_num", "ratio_den", "ratio_decimal"])
    for p in points:
        writer.writerow([
            p.index, p.path_length, p.n,
            p.subtour_value.numerator, p.subtour_value.denominator,
            p.optimal_2m.numerator, p.optimal_2m.denominator,
            p.ratio.numerator, p.ratio.denominator,
            decimal_string(p.ratio),
        ])
    return buffer.getvalue()


def render_ratio_figure(points: list[RatioPoint], path: str) -> None:
    """Plot the ratio sequence against the 10/9 target line."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [p.index for p in points]
    ys = [p.ratio.numerator / p.ratio.denominator for p in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o", color="#1f77b4",
            label="optimal 2-matching / subtour optimum")
    ax.axhline(10 / 9, color="#d62728", linestyle="--", label="10/9")
    for p, y in zip(points, ys):
        ax.annotate(f"{p.ratio.numerator}/{p.ratio.denominator}",
                    (p.index, y), textcoords="offset points", xytext=(0, 8),
                    ha="center", fontsize=8)
    ax.set_xlabel("family index (paths shorten toward the extremal member)")
    ax.set_ylabel("cost ratio")
    ax.set_xticks(xs)
    ax.set_ylim(1.0, 1.125)
    ax.legend(loc="lower right")
    ax.set_title("Hard-family ratio approaching 10/9")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
