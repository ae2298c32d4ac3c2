"""Polynomial surrogates with statistical guarantees for parametric Markov
chains, plus an exact state-elimination oracle for validation."""

from . import errors
from .analysis import (CexResult, LinearSafetyResult, MaxBound, NearBetaVerdict,
                       ProbabilityEstimate, RewardBoundVerdict, SafetyVerdict,
                       TaylorReport, counterexample_search, linear_safety_check,
                       near_beta_check, poly_integral_box, poly_lp_norm,
                       poly_max_upper_bound, reward_expectation_bound,
                       safe_region_check, superlevel_probability,
                       taylor_compare, taylor_polynomial)
from .elimination import eliminate_reachability, eliminate_reward, ratfun_agrees
from .estimator import PacPolynomialRegressor
from .expr import Expr, expr_eval, expr_eval_interval
from .intervals import Interval
from .mc import CheckResult, check, expected_reward_to, formula_oracle, prob_bounded_until, prob_next, prob_until
from .model import Dtmc, PDtmc, PDtmrm, instantiate, validate_assumption1
from .parser import parse_expr, parse_formula, parse_model, parse_point
from .poly import MPoly, RatFun, ratfun_of_expr
from .scenario import (DEFAULT_SEED, PacPolynomial, PolyTemplate, SampleSet,
                       approximate, draw_samples, evaluate_samples, fit_pac,
                       poly_eval, sample_count, solve_minimax)
from .simplex import LpSolution, solve_lp
from .space import ParamSpace, box_volume

__version__ = "0.1.0"
