"""Mixed-state geometric phases (Uhlmann and interferometric) of the
finite-temperature Kitaev chain."""

__version__ = "0.1.0"

from .bloch import (BlochVector, Purification, QubitState, fidelity, from_bloch,
                    spectral, sqrt_lift, to_bloch)
from .errors import *  # noqa: F401,F403
from .interferometric import (ClosedCurve, InterferometricResult, NodeRay,
                              gauge_fix, gibbs_curve, interferometric_phase,
                              node_ray, phase_from_overlaps, solid_angle_phase,
                              winding_invariant)
from .kitaev import (ChainParams, MomentumSample, band_gap, gibbs_state,
                     polar_angle, pure_state, winding_number)
from .numerics import QuadratureSpec, RootSpec, find_root, integrate, unwrap
from .uhlmann import (CriticalTemperature, NodeRecord, TransportState,
                      accumulate_A, connection_angle_rate, critical_temperature,
                      critical_temperatures, find_nodes, holonomy_trace,
                      parallel_lift, uhlmann_phase_factor)
