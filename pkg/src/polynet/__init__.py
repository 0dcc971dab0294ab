"""polynet: polynomial views of small feedforward networks.

Networks whose activations are polynomials expand into explicit
multivariate polynomials; conversely, weights realizing a target
polynomial (or dataset) can be synthesized by solving the coefficient
matching equations.  funcapprox builds polynomial stand-ins for the usual
activations so the same machinery covers them approximately.
"""

from .errors import (
    ConfigurationError,
    DimensionError,
    Error,
    NumericError,
    ParseError,
    StructuralError,
    UsageError,
)
from .funcapprox import (
    ApproxError,
    FourierSeries,
    SampledFunction,
    UniPoly,
    approx_error,
    builtin,
    fourier_eval,
    fourier_fit,
    fourier_to_poly,
    lsq_poly_fit,
    maclaurin_trig,
    trig_term_budget,
    unipoly_from_text,
    unipoly_to_text,
)
from .multipoly import (
    AffineForm,
    MultiPoly,
    affine_power,
    apply_univariate,
    apply_univariate_to_affine,
    coefficient,
    poly_add,
    poly_eval,
    poly_from_text,
    poly_mul,
    poly_pow,
    poly_to_text,
    truncate_degree,
)
from .network import (
    Dataset,
    Identity,
    LayerSpec,
    MonomialPower,
    NetworkSpec,
    PolyActivation,
    classify,
    dataset_from_csv,
    dataset_to_csv,
    expand_network,
    expansion_degree,
    forward,
    load_dataset,
    load_network,
    network_from_json,
    network_to_json,
    save_dataset,
    save_network,
)
from .synthesis import (
    GivenVector,
    Ones,
    RandomRestarts,
    ResidualSystem,
    SolveReport,
    SolverConfig,
    UnknownLayout,
    build_coefficient_system,
    build_data_system,
    class_target_poly,
    compress_network,
    residual_jacobian,
    solve_system,
)

__version__ = "0.1.0"
