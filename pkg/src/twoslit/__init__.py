"""Two-slit interference with a quantum path detector and UQSD which-path readout."""

from .analysis import (
    DualityReport,
    FringeEstimate,
    distinguishability_q,
    duality_report,
    englert_d,
    visibility_analytic,
    visibility_born,
    visibility_phasor,
)
from .detector import (
    AncillaOutcome,
    DetectorPair,
    PathVerdict,
    UqsdUnitary,
    apply_uqsd,
    build_uqsd,
    correlated_state,
    discriminate,
    make_detector_pair,
    project_ancilla,
    uqsd_success_probability,
)
from .montecarlo import RunConfig, run_experiment, sample_quanton
from .optics import (
    DensityCurve,
    QuantonEnvironmentState,
    SlitGeometry,
    density_curve,
    screen_density,
    slit_amplitude,
)

__version__ = "0.1.0"
