"""Natural-mode (quasinormal-mode) analysis of 1D stratified optical media."""

__version__ = "0.1.0"

from .dispersion import (
    Material,
    branch_points,
    eval_n,
    high_freq_coefficient,
    pole_frequencies,
)
from .transfer import (
    LayerParams,
    Spectrum,
    Stack,
    TransferResult,
    layer_params,
    reflection,
    spectrum,
    transmission,
    wolter_recursion,
)
from .modefinder import (
    Mode,
    ModeSet,
    SearchRegion,
    count_zeros,
    find_modes,
    langer_parameters,
    quarterwave_modes,
    quarterwave_stack,
)
from .analysis import (
    AsymptoticFamily,
    CensusTable,
    NearResonanceFamily,
    asymptotic_modes,
    cluster_census,
    near_resonance_modes_slab,
    rarified_residual,
    two_layer_near_resonance,
)
from .completeness import (
    CanonicalProduct,
    CompletenessReport,
    LConstancyResult,
    asymptotic_lambdas,
    classify,
    eval_canonical_product,
    lambert_w,
    verify_L_constancy,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
