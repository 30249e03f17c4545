"""foliage: numerical verification of foliated Riemannian geometry.

Jets (truncated Taylor arithmetic) power adapted orthonormal frames, the
Riemannian and basic connections, transverse curvature, foliated-map
differentials, and the bound checks built on them.  See the README for the
expression grammar and the scenario file schema.
"""

from .chart import FoliatedChart, adapted_frame, load_chart
from .errors import FoliageError
from .expr import eval_jet, eval_real, parse
from .jets import Jet, fd_derivative, jet_apply, jet_constant, jet_variable
from .maps import FoliatedMap, load_map, map_jet

__all__ = [
    "FoliatedChart", "FoliatedMap", "FoliageError", "Jet",
    "adapted_frame", "eval_jet", "eval_real", "fd_derivative",
    "jet_apply", "jet_constant", "jet_variable", "load_chart", "load_map",
    "map_jet", "parse",
]

__version__ = "0.1.0"
