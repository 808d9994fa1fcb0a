"""Renyi-Ingarden-Urbanik entanglement entropy toolkit.

Compute the entropy of the probability vector of a multipartite pure
state, minimized over local unitary rotations, together with the tensor
decompositions (HOSVD, PARAFAC) that bound it, polynomial entanglement
invariants, exact Haar moments of the 3-tangle, and Monte Carlo ensemble
studies. The minimization walk runs on a compiled kernel when the
extension is available; set RIUENT_BACKEND=pyref to force the pure
NumPy path.
"""

from .catalog import named_state
from .decomp import (
    CPModel,
    HosvdResult,
    closest_product_state,
    hosvd,
    parafac_als,
    rank_estimate,
)
from .entropy import INF, renyi, support_size
from .haar import RngStream, as_stream, haar_state, haar_unitary
from .moments import beta_fit, tangle_even_moment
from .polyinv import det3, det4, hyper_t, tangle
from .riu import (
    LocalUnitarySet,
    RiuResult,
    WalkOptions,
    analytic_riu,
    lambda_max_sep,
    riu_minimize,
    riu_symmetric,
)
from .studies import (
    EnsembleReport,
    ScalingReport,
    beta_fit_report,
    ensemble_stat,
    riu_table,
    sample_stat,
    scaling_study,
    schmidt_bound,
)
from .tensor import StateTensor, load_state, save_state

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "StateTensor",
    "save_state",
    "load_state",
    "renyi",
    "support_size",
    "INF",
    "RngStream",
    "as_stream",
    "haar_state",
    "haar_unitary",
    "named_state",
    "HosvdResult",
    "hosvd",
    "CPModel",
    "parafac_als",
    "closest_product_state",
    "rank_estimate",
    "WalkOptions",
    "LocalUnitarySet",
    "RiuResult",
    "riu_minimize",
    "riu_symmetric",
    "lambda_max_sep",
    "analytic_riu",
    "det3",
    "det4",
    "tangle",
    "hyper_t",
    "tangle_even_moment",
    "beta_fit",
    "EnsembleReport",
    "sample_stat",
    "ensemble_stat",
    "riu_table",
    "ScalingReport",
    "scaling_study",
    "schmidt_bound",
    "beta_fit_report",
]
