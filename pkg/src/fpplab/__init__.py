"""First-passage percolation laboratory: lattice shortest-path simulation
and certified shape bounds for Z^d."""

from .certifier import (
    BoundParams,
    ShapeCertificate,
    admissible_A,
    alpha_star,
    find_threshold,
    lower_bound_mu,
    mu_star_lower,
    optimize_upper,
    shape_certificate,
    upsilon,
)
from .distributions import (
    DistributionSpec,
    deterministic,
    exponential,
    expected_min,
    parse_distribution,
    shifted,
    uniform,
)
from .engine import (
    DiagonalTarget,
    HyperplaneTarget,
    PassageSample,
    PointTarget,
    SearchCaps,
    SlabTarget,
    first_passage,
)
from .estimators import (
    EstimateRecord,
    estimate_mu_e1,
    estimate_mu_star,
    greedy_diagonal_bound,
)
from .lattice import EdgeKey, Restriction, Vertex

__version__ = "0.1.0"
