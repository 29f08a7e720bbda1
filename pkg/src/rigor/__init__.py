"""Generic rigidity of graphs via randomized rank over GF(2**61 - 1)."""

from .ffield import MODULUS, RowBasis
from .graph import Graph, gnp_sample, min_degree
from .rigidity import (Embedding, closure, contracted_closure, generic_rank_formula,
                       is_d_rigid, max_rigid_dim, rigidity_rank)
from .rng import RngStream
from .thresholds import a_of_c, c_star, phi, predicted_dmax

__all__ = [
    "MODULUS", "RowBasis", "Graph", "gnp_sample", "min_degree", "Embedding", "closure",
    "contracted_closure", "generic_rank_formula", "is_d_rigid", "max_rigid_dim",
    "rigidity_rank", "RngStream", "a_of_c", "c_star", "phi", "predicted_dmax",
]

__version__ = "0.1.0"
