"""Exact order conditions for exponential splitting and Magnus-type integrators.

The package computes coefficients of words in noncommutative expressions
built from sums, products, powers, commutators and exponentials, generates
the minimal Lyndon-word order conditions for splitting and commutator-free
Magnus-type schemes, extracts leading error terms, and solves and verifies
the resulting polynomial systems in exact or arbitrary-precision arithmetic.
"""

from .conditions import (
    LeadingErrorTerm,
    OrderConditionSystem,
    SingularMatrixError,
    SymmetryViolationError,
    leading_error_term,
    lyndon_coefficient_matrix,
    order_conditions,
    residual_of_scheme,
    solve_rational_system,
)
from .magnus import (
    PositivityResult,
    QuadratureRule,
    QuadratureScheme,
    SchemeParameters,
    assemble_scheme_expression,
    eighth_order_condition_sets,
    gauss_rule_order8,
    inverse_quadrature_map,
    legendre_poly_eval,
    magnus_alphabet,
    magnus_rhs_for_word,
    magnus_series_fixture,
    magnus_word_coefficient,
    positivity_check,
    quadrature_map,
)
from .ncexpr import (
    Commutator,
    Exponential,
    ExpressionSyntaxError,
    IntegerPower,
    NCExpression,
    NonzeroConstantTermError,
    Product,
    Scalar,
    ScalarMultiple,
    SchemeAnsatz,
    ShapeError,
    Sum,
    Symbol,
    UnknownIdentifierError,
    build_self_adjoint_ansatz,
    commutator,
    exponential,
    expression_of_bracketing,
    is_self_adjoint,
    parse_expression,
    parse_polynomial,
    print_expression,
    substitute_parameters,
    symbols,
    to_json_dict,
)
from .oracle import TruncatedSeries, TruncationError, series_coeff, series_of
from .poly import (
    PolyRational,
    PolyRing,
    UnboundVariableError,
    differentiate,
    poly_evaluate,
    poly_substitute,
)
from .rings import (
    DEFAULT_DIGITS,
    MPComplexRing,
    NotRationalError,
    Rational,
    RationalRing,
    ScalarRing,
    default_digits,
    mpc_from_str,
    mpc_str,
    rat_from_str,
    rat_str,
    rationalize,
    to_fraction,
)
from .solver import (
    NewtonDivergenceError,
    NewtonMaxIterError,
    NewtonResult,
    PolySystem,
    RationalizationError,
    SingularJacobianError,
    Solution,
    SolveReport,
    SolverError,
    StagedResult,
    StageSingularError,
    build_magnus8_stage1,
    magnus8_stage1_variables,
    multistart_search,
    newton_solve,
    solve_splitting_example,
    staged_solve_magnus8,
)
from .wcoeff import constant_term, infer_ring, phiv, wcoeff
from .words import (
    BasisElement,
    GradedAlphabet,
    InvalidWordError,
    Word,
    grade_of,
    is_lyndon,
    lyndon_bracketing,
    lyndon_words_of_grade,
    lyndon_words_of_odd_grade_up_to,
)

__version__ = "0.1.0"
