"""Projection evolution of a free particle and its detection probability."""

from .detection import (DetectionResult, DetectorBox, PeakScan, detection_path_probability, peak_scan,
                        pi_d_1d, pi_d_box, pi_d_box_grid, pi_d_numeric)
from .engine import (Carry, DensityState, ProjectionFamily, Projector, TrajectoryRecord, apply_projection,
                     outcome_probability, run_trajectory, shift_family, step, validate_family)
from .errors import (ConfigError, ConvergenceError, DomainError, InvalidStateError, NonUnitaryError, ProjEvoError,
                     StructuralError, TrajectoryStepError, UnsupportedRepresentationError,
                     ZeroProbabilityBranchError)
from .kernels import BACKEND
from .propagation import FreePropagator, group_velocity
from .specfun import QuadratureSpec, quadratic_phase_integral, sine_integral
from .timeobs import (FactorizedState, TimeDistribution, TimeGrid, joint_trigger_probability,
                      potential_probability, probc_density, time_norm)
from .wavepacket import CoherentPacket, RectPacket, TimeProfile

__version__ = "0.1.0"
