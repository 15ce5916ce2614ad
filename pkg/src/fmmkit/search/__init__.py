from .als import (
    DEFAULT_GRID,
    DESK_LIMIT,
    FactorSet,
    SearchConfig,
    SearchResult,
    als_block_solve,
    als_objective,
    als_sweep,
    brent_residual,
    classical_dense,
    factor_set_from_tensor,
    rationalize,
    search,
    snap_models,
)
from .kernels import BACKEND, HAVE_NUMBA
