"""Geometry on point sets that can only be reached through nearest-neighbour probes.

Modules
-------
geometry   points, balls, cones, cells and shared predicates
oracles    exact / approximate / adversarial nearest-neighbour oracles
explorer   greedy permutation by probing, diameter estimate
hull       approximate convex-hull membership
density    k-density (balanced Voronoi) clustering
reference  brute-force ground truth
cli        command-line front end
"""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .geometry import Ball, Cell, Cone, UsageError, dist, dist_to_set
from .oracles import (
    AdversarialAnnOracle, BallUnionOracle, BoxBoundaryOracle, FiniteSetOracle, SphereOracle,
    adversarial_ann_query, load_points, oracle_from_config, save_points,
)
from .explorer import CarvedDomain, GreedyTrace, estimate_diameter, explore, spread
from .hull import (
    ExactExtremalOracle, HullConfig, WorstLegalExtremalOracle, ann_extremal, membership,
    membership_ann, membership_approx_extremal, membership_exact,
)
from .density import (
    build_cone_cover, counterexample_set, k_density_centers, voronoi_partition,
)

__all__ = [
    "BACKEND", "Ball", "Cell", "Cone", "UsageError", "dist", "dist_to_set",
    "AdversarialAnnOracle", "BallUnionOracle", "BoxBoundaryOracle", "FiniteSetOracle",
    "SphereOracle", "adversarial_ann_query", "load_points", "oracle_from_config", "save_points",
    "CarvedDomain", "GreedyTrace", "estimate_diameter", "explore", "spread",
    "ExactExtremalOracle", "HullConfig", "WorstLegalExtremalOracle", "ann_extremal",
    "membership", "membership_ann", "membership_approx_extremal", "membership_exact",
    "build_cone_cover", "counterexample_set", "k_density_centers", "voronoi_partition",
]
