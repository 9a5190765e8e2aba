"""regulab: a deterministic testbed for regulating autonomous agent ecologies.

Two scenarios — a tolled road network of self-routing cars and a
water-constrained robotic building — are steered only through validated
monetary interventions (tolls, prices).  Runs are bit-reproducible from
(config, seed, intervention log); offline oracles supply the percent-of-
optimal denominators for scoring.
"""

from .config import RunConfig, ConfigError
from .engine import Engine, run_headless, replay
from .records import RunRecord
from .regulator import Intervention

__version__ = "0.1.0"

__all__ = ["RunConfig", "ConfigError", "Engine", "run_headless", "replay",
           "RunRecord", "Intervention", "__version__"]
