"""Signal processing for generalized graph signals f: V -> H."""
from ._kernels import BACKEND
from .errors import *  # noqa: F401,F403
from .graph import Graph, build_shift, delta, partition_vertices, select_vertex_subset
from .hilbert import HilbertBasis, eval_basis, make_basis, project
from .signal import (GeneralizedSignal, f_transform, frequency_range, g_transform,
                     h_transform, inner_product, inverse_f_transform)

__version__ = "0.1.0"
