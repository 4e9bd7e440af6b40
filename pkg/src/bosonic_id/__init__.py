"""Identification coding over noisy bosonic broadcast channels.

Truncated-Fock-space numerics, achievable identification rate regions,
numeric verification of the supporting concentration bounds, and Monte
Carlo simulation of random-binning identification codes with typical
projector decoders.
"""

from .channel import BroadcastParams, Codeword, broadcast_output, energy_check, marginal
from .fock import (
    BinaryPovm,
    DensityOperator,
    hermitian_eig,
    povm_probability,
    tensor,
    trace_norm,
    von_neumann_entropy,
)
from .idcode import (
    IdCodebook,
    IdCodeParams,
    assign_bins,
    build_decoder,
    estimate_errors,
    generate_pool,
    run_simulation,
    select_transmit,
    theoretical_error_bounds,
    verify_binning,
)
from .rates import (
    Constellation,
    RateRegionPoint,
    capacity_p2p,
    convergence_study,
    discretize_gaussian,
    gordon_g,
    holevo_quantity,
    id_rate_corner,
    rate_region_sweep,
)
from .states import (
    TruncationSpec,
    coherent_state,
    displaced_thermal,
    displacement_matrix,
    gentle_operator_check,
    thermal_state,
    truncation_channel,
    truncation_mass_bound_check,
)
from .typicality import TypicalProjector, detection_probability, typical_projector, verify_typicality_bounds

__version__ = "0.1.0"
