"""Exact combinatorics of grid posets.

Width and dimension of finite posets, level profiles and chain
decompositions of grids, multidimensional pattern containment, exact
maximum P-free subsets with block-decomposition upper-bound
certificates, and Lubell-mass reports; everything desk-scale, exact,
and cross-checked against independent brute-force oracles in the test
suite.
"""

__version__ = "0.1.0"

from .chains import (ChainPartition, balanced_partition, corollary_window,
                     cut_chain, scd, verify_partition, verify_symmetric)
from .errors import (BudgetExceeded, ConstructionFailed, CycleError,
                     DimensionMismatch, DomainError, GridPosetError,
                     InfeasibleCut, InvalidRealizer, NotAntichain, NotPFree,
                     ShapeMismatch, SizeMismatch)
from .extremal import (BoundCertificate, erdos_bound, is_p_free,
                       max_l_chain_free, max_p_free, pipeline_bound,
                       verify_certificate)
from .grid import (Comparison, GridShape, LevelProfile, Subset, compare,
                   check_normalized_matching, factor, level_profile, rank,
                   theta_ratio, width_grid)
from .lubell import (MassReport, chain_mass_formula, claim1_construct,
                     claim2_blocks, conjecture_ratio, lubell_mass, lym_check)
from .patterns import (ContainmentWitness, Pattern, contains_pattern,
                       extremal_weight, is_permutation_pattern,
                       poset_to_pattern, subset_to_pattern)
from .poset import (Embedding, Poset, Realizer, antichain_poset, chain_poset,
                    contains_induced_copy, dimension, height, k_poset,
                    make_poset, max_antichain, named_poset, realizer_valid,
                    standard_example, v_poset, width_poset)
