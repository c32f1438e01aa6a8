from .base import FunctionProblem, Problem
from .external import ExternalCommand, external_eval
from .maxcut import (
    MaxCut,
    WeightedGraph,
    cut_weight,
    maxcut_bruteforce,
    maxcut_eval,
    maxcut_generate,
)
from .rosenbrock import Rosenbrock, rosenbrock, rosenbrock_eval
from .tsp import ATSPInstance, PerturbedTSP, encoding_bounds, tour_length, tsp_decode, tsp_eval
from .wrappers import Binarized, Shuffled, binarize_wrap, shuffle_wrap

__all__ = [
    "ATSPInstance",
    "Binarized",
    "ExternalCommand",
    "FunctionProblem",
    "MaxCut",
    "PerturbedTSP",
    "Problem",
    "Rosenbrock",
    "Shuffled",
    "WeightedGraph",
    "binarize_wrap",
    "cut_weight",
    "encoding_bounds",
    "external_eval",
    "maxcut_bruteforce",
    "maxcut_eval",
    "maxcut_generate",
    "rosenbrock",
    "rosenbrock_eval",
    "shuffle_wrap",
    "tour_length",
    "tsp_decode",
    "tsp_eval",
]
