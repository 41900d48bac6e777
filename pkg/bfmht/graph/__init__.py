# -*- coding: utf-8 -*-
"""
Sparse symmetric graphs and eigensolvers.

Example:
    from bfmht.graph import eigenmaps_operator, heat_kernel_graph, lanczos_smallest

    K = heat_kernel_graph(cloud, t, 1e-4)
    op, degree = eigenmaps_operator(K)
    band = lanczos_smallest(op, 200)
"""

from bfmht.graph.eigen import (
    BandedEigenProvider,
    DeflatedOperator,
    EigenBand,
    banded_eigen_provider,
    fiedler_vector,
    lanczos_smallest,
    norm_bound,
    read_eigenbands,
    write_eigenbands,
)
from bfmht.graph.sparse import (
    check_symmetric,
    default_heat_scale,
    eigenmaps_operator,
    graph_laplacian,
    grid_graph,
    heat_kernel_graph,
    read_matrix_market,
    restricted_laplacian,
    write_matrix_market,
)

__all__ = [
    "BandedEigenProvider",
    "DeflatedOperator",
    "EigenBand",
    "banded_eigen_provider",
    "check_symmetric",
    "default_heat_scale",
    "eigenmaps_operator",
    "fiedler_vector",
    "graph_laplacian",
    "grid_graph",
    "heat_kernel_graph",
    "lanczos_smallest",
    "norm_bound",
    "read_eigenbands",
    "read_matrix_market",
    "restricted_laplacian",
    "write_eigenbands",
    "write_matrix_market",
]
