"""Random walks on surface mapping class groups: drift, Lyapunov exponent and partition entropy."""
__version__ = "0.1.0"

from .walk import ProbabilityMeasure, SamplePath, ShiftedPath, cylinder_probability
from .rsft import RandomSFT, CylinderSpec, count_cylinders, enumerate_cylinders, shift
from .torus import MCGElement, SL2Z, NotConverged
from .braid import BraidGroup, BraidWord, MulticurveCoord
from .flat import GeometryError
from .partition import (build_sequence, exact_sequence, check_semi_markov,
                        transition_matrices, partition_defects)
from .cover import OpenCover, CoverError
from .estimators import (EstimatorReport, estimate_drift, estimate_lyapunov,
                         estimate_entropy_sigma, equality_report, cover_entropy_bound)
from .diagnostics import coding_decay, sublinear_terms
from .presets import PRESETS, get_preset
from .config import ConfigError, ExperimentConfig, load_config
