"""Selective inference after Lasso, forward stepwise and LARS selection."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .inference import (  # noqa: F401
    InferenceReport,
    estimate_sigma,
    omega,
    selective_ci,
    selective_pvalue,
    significance_pvalue,
    significance_test,
    spacing_report,
    spacing_test,
)
from .lars import LarsPath, lars_c, lars_path, lars_polyhedron  # noqa: F401
from .lasso import kkt_check, lasso_fit, lasso_model_region, lasso_polyhedron  # noqa: F401
from .linmodel import (  # noqa: F401
    DesignMatrix,
    least_squares,
    pinv_transpose_apply,
    project,
    standardize,
)
from .polytope import Polyhedron, TruncationRegion, line_search_region, slice, slice_union  # noqa: F401
from .stepwise import FSPath, fs_path, fs_polyhedron, r_stat  # noqa: F401
from .truncnorm import TruncatedGaussian, tn_cdf, tn_quantile, tn_root_mu  # noqa: F401
