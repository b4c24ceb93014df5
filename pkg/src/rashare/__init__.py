"""Spectrum sharing with rotatable antennas: joint beamforming and boresight steering."""

from .beamforming import interference_power, optimal_beamformer, sinr
from .channel import (
    GainPattern,
    Scenario,
    channel_coeff,
    dbm_to_watts,
    default_scenario,
    directional_gain,
    fixed_pointing,
    pt_beamformer,
    pt_channels,
    st_channel_vector,
    watts_to_dbm,
)
from .config import AlgoConfig
from .driver import SCHEMES, AOTrace, alternating_optimize, evaluate_scheme
from .geometry import (
    ArrayGeometry,
    Orientation,
    factor_antennas,
    orientation_to_pointing,
    pointing_to_orientation,
    unit_direction,
    upa_positions,
)
from .pointing import (
    CosineCache,
    build_cosine_cache,
    leakage_grad,
    leakage_power,
    lipschitz_bound,
    sca_pointing_opt,
    signal_grad,
    signal_power,
)

__version__ = "0.1.0"
