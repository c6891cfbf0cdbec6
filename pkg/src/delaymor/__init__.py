"""delaymor: interpolation and H2-suboptimal reduction of linear dynamical
systems by single-delay finite-dimensional descriptor models.

The package takes systems that are only evaluable (state-space matrices,
closed-form expressions, or tabulated frequency data), interpolates them with
models of the form E x'(t) = A x(t - tau) + B u(t) through a substitution-map
Loewner construction, and drives the interpolation points to first-order
H2 optimality with a Lambert-function fixed-point iteration.
"""

__version__ = "0.1.0"

from .delay_loewner import (build_delay_loewner, build_hermite_delay_loewner,
                            check_injectivity, substitution_map,
                            substitution_map_derivative)
from .errors import (DelaymorError, EvaluationAtPoleError, ExpressionParseError,
                     InjectivityError, LambertWConvergenceError, LoewnerDataError,
                     NotInH2Error, PencilError, PointNotTabulatedError,
                     RankDeficiencyWarning, RealificationError,
                     SemisimplicityWarning)
from .expression import Expression, parse_expression
from .h2metrics import (FrequencyResponse, H2Result, QuadratureOptions,
                        frequency_response, h2_distance, h2_error, h2_norm)
from .irka import (IrkaOptions, IrkaReport, IrkaState, OptimalityReport,
                   OptimalityRow, check_delay_optimality, check_optimality,
                   dtf_irka, initial_state, tf_irka)
from .io import (load_model, load_model_metadata, load_samples, save_model,
                 save_samples, write_report)
from .lambertw import delay_pole_from_eigenvalue, lambert_w
from .loewner import (LoewnerPencil, TangentialData, build_hermite_loewner,
                      build_loewner, conjugate_sort_key, hermite_model_from_data,
                      is_conjugate_closed, realify, reduce_order,
                      tangential_data_from_oracle)
from .model import DelayDescriptorModel
from .oracle import (SystemOracle, from_callable, from_expression, from_model,
                     from_samples, from_state_space)
from .spectral import SpectralDecomposition, decompose, delay_poles

__all__ = [
    "__version__",
    "DelayDescriptorModel",
    "SystemOracle",
    "from_state_space", "from_model", "from_expression", "from_samples",
    "from_callable",
    "Expression", "parse_expression",
    "TangentialData", "LoewnerPencil", "tangential_data_from_oracle",
    "build_loewner", "build_hermite_loewner", "hermite_model_from_data",
    "realify", "reduce_order", "conjugate_sort_key", "is_conjugate_closed",
    "substitution_map", "substitution_map_derivative", "check_injectivity",
    "build_delay_loewner", "build_hermite_delay_loewner",
    "lambert_w", "delay_pole_from_eigenvalue",
    "SpectralDecomposition", "decompose", "delay_poles",
    "IrkaOptions", "IrkaState", "IrkaReport", "OptimalityRow",
    "OptimalityReport", "initial_state", "tf_irka", "dtf_irka",
    "check_optimality", "check_delay_optimality",
    "QuadratureOptions", "H2Result", "h2_distance", "h2_error", "h2_norm",
    "FrequencyResponse", "frequency_response",
    "save_model", "load_model", "load_model_metadata", "save_samples",
    "load_samples", "write_report",
    "DelaymorError", "EvaluationAtPoleError", "PointNotTabulatedError",
    "ExpressionParseError", "LoewnerDataError", "InjectivityError",
    "RealificationError", "LambertWConvergenceError", "PencilError",
    "NotInH2Error", "RankDeficiencyWarning", "SemisimplicityWarning",
]
