"""Verification lab for energy diffusion of strongly magnetized particles
in a stochastic electric potential.

The package computes the limiting energy diffusion coefficient a(e) three
independent ways (quadrature of the defining formula, the closed form for
power-law correlations, a Monte Carlo work-integral estimator), solves the
limiting diffusion equation in energy, simulates the underlying rescaled
particle dynamics, and demonstrates numerically that the gyro-averaged
kinetic ensemble converges to the limit solution as the scale separation
shrinks.
"""

__version__ = "0.1.0"

from .correlation import (CorrelationModel, GaussianBump, PowerLaw,
                          TemporalEnvelope, angular_average,
                          block_induced_envelope, d2tt_tilde, general,
                          raised_cosine_envelope, separable, validate)
from .dcoeff import (DiffusionCoefficientTable, NonConvergedQuadrature,
                     QuadratureOptions, coefficient_profile,
                     diffusion_coefficient, mc_work_oracle,
                     richardson_coefficient, scaling_exponent)
from .field import (FieldRealization, FieldSpec, empirical_correlation,
                    gaussian_bump_spec, synthesize)
from .harness import (GYRO_MEASURE_FACTOR, ConvergenceReport,
                      ExperimentConfig, compare, run_convergence_study)
from .kinetics import (DeltaInit, ParticleEnsemble, PushConfig,
                       SmoothBumpInit, free_flow, gyro_average_histogram,
                       simulate_ensemble, strang_step)
from .she import (EnergyGrid, EnergyProfile, SheState, gaussian_profile,
                  median_energy, self_similar_fit, solve, step_implicit)
