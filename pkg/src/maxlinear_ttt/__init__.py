"""Max-linear Bayesian networks on trees of transitive tournaments (ttts).

Graph validation, coefficient matrices, angular measures, conditional tail
limits, identifiability under latent nodes and Monte Carlo checks.
"""

from .errors import TttError
from .graph import Tournament, Trail, TttGraph, build_ttt, sources, v_structures
from .identify import (
    exit_path,
    identifiability_check,
    match_subatoms,
    non_identifiability_witness,
    recover_theta,
)
from .laws import DiscreteLaw, laws_equal, tv_distance
from .limits import (
    direct_limit,
    factorized_limit,
    increment_block,
    is_global_markov,
    marginal_limit,
)
from .model import (
    MaxLinearModel,
    bvv_path_sum,
    bvv_via_tournament,
    coefficient_matrix,
    joint_cdf,
    scale_witness,
    stdf,
    validate_theta,
)
from .montecarlo import empirical_angular, empirical_conditional, sample, tv_to_law
from .spectral import (
    AngularMeasure,
    angular_measure,
    match_atoms_full,
    stdf_from_measure,
    subvector_measure,
    weights_from_full_measure,
)

__version__ = "0.1.0"
