"""Sums of nearly affine Cantor sets: symbolic coding, covers, dimensions and transversality checks."""

from .config import Config, SweepSpec
from .errors import (BinMismatch, CantorSumError, CapExceeded, ConfigError, DegenerateFit, GridTooCoarse,
                     IdenticalSequences, InfeasibleTriple, NoGaps, NoRoot, ParameterOutOfRange,
                     ResolutionMismatch, ResolutionTooCoarse, SeparationViolated)
from .geometry import (decay_hint, gap_lemma_predicate, middle_alpha_classify, middle_alpha_dimension,
                       middle_alpha_thickness, minkowski_sum, region_grid, sum_cover_analysis, thickness)
from .ifs import (AffineMap, CantorFamily, Ifs, PerturbationField, coding_point, cylinder_intervals, family_at,
                  generation_cover, monotonicity_check, validate_separation)
from .intervals import IntervalUnion
from .measures import (BernoulliWeights, MeasureHistogram, box_dimension_estimate, convolution_density,
                       cylinder_masses, entropy, equilibrium_weights, frostman_check, lyapunov_exponent,
                       moran_dimension, pushforward_histogram)
from .sweep import run_sweep, sweep_csv
from .symbolic import SymbolPath, Word, cylinder_count, cylinder_enumerate, wedge
from .transversality import (EtaMeasure, ExponentTriple, OmegaEpsilonSet, TransversalityReport, VerifySettings,
                             assemble_report, birkhoff_window_check, blackbox1_check, blackbox2_check,
                             blackbox3_check, distortion_check, dphi_dlambda, multipliers, phi, select_omega_epsilon,
                             smb_check, transversality_lower_bound)

__all__ = [name for name in dir() if not name.startswith("_")]
