"""Bi-objective cutting stock toolkit.

Minimizes total objects against total saw cycles with column generation
embedded in three scalarization methods (lexicographic epsilon-constraint,
frontier partitioning, augmented weighted Chebyshev), over 1d lengths or
2d two-stage guillotine patterns.
"""

from .colgen import (ColgenConfig, ColgenTrace, LexResult, generate_columns,
                     initial_columns, lexicographic_points)
from .front import (Front, FrontPoint, MetricsReport, hypervolume, metrics,
                    nondominated_filter, performance_profile, union_fronts)
from .instances import (Gen1DParams, Gen2DParams, GenerationError, ParseError,
                        SplitMix64, generate_1d, generate_2d, read_instance,
                        write_instance)
from .model import (ExtraRow, Instance, IntegerSolution, MasterModel, Pattern,
                    Strip, build_master, build_mono_master, check_feasible,
                    evaluate_point, make_1d, make_2d, saw_capacity,
                    validate_pattern)
from .pricing import (PricedPattern, PricingTooLarge, capped_demand,
                      enumerate_patterns_1d, homogeneous_patterns, knapsack_1d,
                      price_2d, reduced_cost_threshold)
from .scalarize import (FrontResult, MethodConfig, awt_parameters, cws_weights,
                        solve_awt, solve_fpa, solve_lec, solve_method)
from .solver import (LinearProgram, LpResult, MilpResult, NumericFailure,
                     SolveLimits, solve_lp, solve_milp)

__version__ = "0.1.0"
