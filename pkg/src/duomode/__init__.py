"""Two bosonic modes with simultaneous photon-exchange and two-mode-squeezing coupling."""

from .analytic import SteadyStateReport, steady_state_report
from .dynamics import report_from_covariance, steady_state_lyapunov
from .errors import (
    DegeneratePopulationError,
    DuomodeError,
    InstabilityError,
    UnphysicalReservoirError,
)
from .model import (
    Regime,
    RegimeInfo,
    ReservoirSpec,
    SystemParams,
    classify_regime,
    diffusion_matrix,
    drift_matrix,
    stability,
)

__version__ = "0.1.0"
