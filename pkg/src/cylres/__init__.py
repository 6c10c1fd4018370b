"""Resonance toolkit for Schrodinger operators on an infinite cylinder.

Computes scattering resonances of -Laplacian + V(x, theta) on R x S^1 by
two independent routes: a direct coupled-channel matching determinant and
closed-form / perturbative predictions near the channel thresholds.
"""

from .asymptotics import (example_logl, example_near_threshold, lambert_w,
                          leading_correction, threshold_prediction)
from .channels import (ChannelWindow, ResonanceHit, conjugate_potential,
                       determinant_evaluator, find_cylinder_resonances,
                       matching_determinant, truncation_study)
from .potential import (CylinderPotential, ModeProfile, builtin_potential,
                        load_potential, step_profile)
from .scatter1d import (find_resonances_1d, jost_wronskian, resolvent_kernel,
                        resonance_state)
from .surface import SurfacePoint, channel_momenta, chart_radius
from .zeros import (Rect, ZeroReport, locate_zeros, locate_zeros_with_retries,
                    winding_count, winding_count_circle)

__version__ = "0.1.0"
