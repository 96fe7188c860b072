"""Coverage simulator for sectorized base stations built around a passive
reflecting panel, with fixed-pattern and conjugate-beamforming benchmarks."""

from .config import ConfigError, ScenarioConfig, parse_config, serialize
from .fading import (
    FadingStats,
    ScattererSpectrum,
    aerial_rician_k,
    e_nlos,
    erp_modified_stats,
    ground_rician_k,
    multipath_channel_samples,
    sample_fading_analytic,
)
from .geometry import IrsPanel, LocalAngles, boresight_angles, vec3, vertical_frame_angles
from .link import (
    ElementWeights,
    LinkRealization,
    beamform_phases,
    beamformed_power,
    draw_link_realization,
    element_weights,
    mean_interference_bounds,
    mean_signal_bounds,
    random_scatter_power,
    received_power,
    rician_sum_moments,
)
from .network import CoverageEngine, bounds_report, run_coverage
from .pathloss import LinkState, PathlossModel, reference_gain, sample_link_state
from .patterns import (
    CosinePattern,
    IrsElementPattern,
    ThreeGppElementPattern,
    exponent_for_hpbw,
    footprint_design,
    hpbw,
    max_gain_numeric,
    pattern_gain,
)

__version__ = "0.1.0"
