"""Utility modules for the stochastic contraction toolkit"""

from .export import to_jsonable, write_json, write_frame
from .sampling import halton_points, harvest_points, merge_points

__all__ = [
    "halton_points",
    "harvest_points",
    "merge_points",
    "to_jsonable",
    "write_json",
    "write_frame",
]
