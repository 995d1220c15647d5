"""Schreier decorations of even-degree multigraphs.

Balanced orientations, bipartite double covers, Kőnig edge colorings,
budgeted almost-proper colorings, and canonical rooted-ball statistics for
checking the invariance and density claims on finite graphs.
"""

from ._kernels import NUMBA_ENABLED
from .coloring import (BipartiteGraph, CoverMap, EdgeColoring, almost_proper_color,
                       bipartition, budgeted_color, color_finite_components,
                       divisibility_witness, double_cover, konig_color,
                       konig_color_by_matching, max_matching, min_pairwise_distance,
                       peel_matching, purple_eliminate, verify_proper)
from .decorate import (SchreierDecoration, forget, from_permutations,
                       schreier_decorate, verify_decoration)
from .graph import (GraphSpec, MultiGraph, ball, build, components, degree,
                    generate, read_edge_list, relabel_vertices, rng_for,
                    write_edge_list)
from .labeling import SparseLabeling, sparse_labeling, verify_sparse
from .localstats import (BallCode, NeighborhoodDistribution, WorkBudgetExceeded,
                         ball_code, birooted_code, canonical_form,
                         dump_distribution, generator_shift_check,
                         generator_shift_report, involution_invariance_check,
                         neighborhood_distribution, tv_distance)
from .orientation import (Orientation, TreeWindow, canonical_random_orientation,
                          canonical_tree_orientation, eulerian_orientation,
                          is_balanced, root_invariance_test,
                          sample_tree_orientations, tree_orientation_law)

__version__ = "0.1.0"
