"""Exact certification of cost ratios between 2-matching relaxations.

The package builds graphical 2-matchings from fractional 2-matchings
and from subtour-relaxation optima through auxiliary cubic graphs and
exact minimum-cost perfect matchings, certifying the 4/3 and 10/9 cost
ratios with arbitrary-precision rational arithmetic throughout.
"""

from .errors import (InvariantError, MatchgapError, NoPerfectMatchingError,
                     ParseError, PreconditionError, ValidationError)
from .f2m import (F2MDecomposition, FractionalTwoMatching, decompose,
                  has_cut_edge, solve_f2m)
from .g2m import (GraphicalTwoMatching, TwoMatching, g2m_cost, shortcut,
                  two_matching_cost, validate_g2m)
from .gadgets import (GadgetGraph, Pattern, build_all_path_gadgets,
                      build_contracted, build_cutpath_gadgets, decode_g2m,
                      feasible_point_109, make_patterns, normalize_matching)
from .graphs import Edge, MultiGraph, build_graph
from .instances import (MetricInstance, check_triangle_inequality,
                        gen_random_metric, gen_worst_case_family,
                        make_instance, parse_instance, serialize_instance)
from .lp import LinearProgram, LpSolution, add_constraint_and_resolve, solve_lp
from .matching import (PerfectMatching, brute_force_perfect_matching,
                       check_matching_polytope_point,
                       min_cost_perfect_matching, np_bound_check)
from .pipeline import TheoremRun, run_boydcarr, run_g2m43, run_g2m109
from .rational import Rat
from .reports import RunReport, build_run_report, worst_case_ratio_experiment
from .subtour import (SubtourSolution, separate_min_cut, solve_subtour_lp,
                      stoer_wagner_min_cut, verify_subtour_feasible)
from .twomo import (TwoMOInstance, check_2mo_polytope, g2m_from_subtour,
                    map_subtour_to_2mo, optimal_two_matching,
                    reduce_2mo_to_matching, split_graph, twomo_to_g2m)

__version__ = "0.1.0"
