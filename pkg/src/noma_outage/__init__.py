"""Two-user NOMA/OMA rate-outage analysis for terrestrial and aerial links.

Closed-form outage probabilities (Rayleigh terrestrial, Rician aerial,
uplink and downlink, NOMA and OMA), a seedable Monte-Carlo oracle for all
of them, order-statistics placement averaging, and a CSV sweep harness.
"""

from .channel import (
    EnvironmentParams,
    Geometry,
    aerial_gain,
    aerial_path_loss_db,
    channel_gain,
    p_los,
    terrestrial_gain,
    terrestrial_path_loss_db,
)
from .fading import FadingSpec, cdf, pdf, sample
from .mc_oracle import (
    McConfig,
    simulate_alpha_event,
    simulate_outage,
    simulate_outage_random_positions,
)
from .outage import (
    LinkScenario,
    OutageResult,
    dl_noma_outage,
    interference_outage_quadrature,
    interference_outage_series,
    noma_gain,
    noma_outage,
    oma_outage,
    ul_noma_outage_far,
    ul_noma_outage_near,
    ul_noma_outage_near_aerial,
    ul_noma_outage_near_terrestrial,
)
from .placement import (
    PlacementAverage,
    PlacementModel,
    QuadratureControl,
    QuadratureError,
    expected_outage,
    pdf_rmax,
    pdf_rmin,
)
from .specfun import (
    SeriesControl,
    SeriesTruncationError,
    bessel_i0,
    log_bessel_i0,
    log_gamma,
    marcum_q1,
    tricomi_u,
)

__all__ = [
    "EnvironmentParams",
    "FadingSpec",
    "Geometry",
    "LinkScenario",
    "McConfig",
    "OutageResult",
    "PlacementAverage",
    "PlacementModel",
    "QuadratureControl",
    "QuadratureError",
    "SeriesControl",
    "SeriesTruncationError",
    "aerial_gain",
    "aerial_path_loss_db",
    "bessel_i0",
    "cdf",
    "channel_gain",
    "dl_noma_outage",
    "expected_outage",
    "interference_outage_quadrature",
    "interference_outage_series",
    "log_bessel_i0",
    "log_gamma",
    "marcum_q1",
    "noma_gain",
    "noma_outage",
    "oma_outage",
    "p_los",
    "pdf",
    "pdf_rmax",
    "pdf_rmin",
    "sample",
    "simulate_alpha_event",
    "simulate_outage",
    "simulate_outage_random_positions",
    "terrestrial_gain",
    "terrestrial_path_loss_db",
    "tricomi_u",
    "ul_noma_outage_far",
    "ul_noma_outage_near",
    "ul_noma_outage_near_aerial",
    "ul_noma_outage_near_terrestrial",
]

__version__ = "0.1.0"
