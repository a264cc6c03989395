"""Split-step quantum walk simulator.

Single- and two-particle discrete-time walks on a 1D lattice with split-step
coins, site/step angle disorder, topological boundary fields, coin-space
entanglement entropy, and momentum-space winding numbers, plus a reproducible
experiment driver and CLI.
"""

from ._version import __version__
from .errors import ConfigError, NumericalError, TopowalkError, WindowOverflowError
from .states import (
    LatticeWindow,
    SingleParticleState,
    TwoParticleState,
    distribution_sigma,
    make_single_state,
    position_distribution,
    reduce_to_coin,
    tensor_pair,
    von_neumann_entropy,
    window_for_steps,
)
from .walk import (
    AngleField,
    BoundarySpec,
    DisorderSpec,
    STRONG_HALF_WIDTH,
    WEAK_HALF_WIDTH,
    apply_coin,
    boundary_angle_field,
    constant_angle_field,
    evolve,
    hadamard_coin,
    hadamard_step,
    randomize_field,
    rotation_coin,
    sample_angle_field,
    shift_coin0_right,
    shift_coin1_left,
    split_step,
)
from .pair import (
    EntropySeries,
    InitialPairState,
    JointDistribution,
    evolve_pair,
    iter_pair_trajectory,
    joint_distribution_direct,
    joint_distribution_interference,
    make_pair_state,
    marginals,
    pair_coin_density_from_singles,
    pair_entropy_series,
    pair_split_step,
    product_terms,
)
from .topology import (
    BandPoint,
    PhaseDiagram,
    PhaseVerdict,
    band_point,
    momentum_unitary,
    phase_diagram,
    winding_number,
)
from .experiments import (
    RunArtifacts,
    RunConfig,
    SweepAxis,
    config_from_dict,
    config_to_dict,
    derive_seed,
    entropy_sweep,
    load_config,
    run,
    write_artifacts,
)

__all__ = [name for name in dir() if not name.startswith("_")]
