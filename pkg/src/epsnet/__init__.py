"""Epsilon-net landmark selection and lazy witness persistence."""
from .complexes import Filtration, lazy_witness_filtration, rips_filtration
from .diagnostics import bootstrap_band, bottleneck, landscape, wasserstein1
from .errors import (
    EpsNetError,
    FiltrationError,
    InputFormatError,
    ParameterError,
    ResourceLimitError,
    ValidationFailure,
)
from .landmarks import (
    LandmarkSet,
    eps_2eps_net,
    eps_net_maxmin,
    eps_net_rand,
    maxmin_landmarks,
    random_landmarks,
    verify_net,
)
from .metric import distance_matrix, hausdorff
from .persistence import PersistenceDiagram, betti_at, compute_persistence, flag_persistence

__version__ = "0.1.0"
