"""Graph induced complexes on point data."""

from .builders import (
    GicPair,
    GicResult,
    SimplicialityError,
    VertexMap,
    build_gic,
    build_gic_pair,
    build_rips,
    induced_vertex_map,
    rips_on_subsample,
)
from .core import (
    MetricChoice,
    PointCloud,
    SimplexTree,
    Z2Matrix,
    load_complex,
    load_points,
    save_complex,
    z2_rank,
)
from .graph import NeighborhoodGraph, build_neighborhood_graph, graph_distances
from .homology import (
    HomologyResult,
    InducedMapRank,
    betti_numbers,
    boundary_matrix,
    hlfs_bruteforce,
    induced_map_rank,
    six_term_rank_check,
)
from .recon import (
    TriangleMesh,
    extract_manifold,
    prune_by_circumradius,
    prune_intersections,
    reconstruct,
    triangles_intersect,
)
from .sampling import Subsample, greedy_subsample, verify_subsample

__version__ = "0.1.0"
