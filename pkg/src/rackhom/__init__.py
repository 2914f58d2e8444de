"""Rack and quandle homology, graphic quandles, extensions and knot colorings."""

from .census import CensusResult, census_structure_report, enumerate_quandles
from .constructors import (INF, GraphicSpec, alexander, conjugation, dihedral, format_gq,
                           gq_uniform, graphic_from_spec, parse_gq, recognize_example13,
                           takasaki, trivial)
from .extensions import Cocycle2, extend, is_2_cocycle, orbit_indicator_cocycle, verify_prop_213
from .homology import (ChainSpec, boundary_matrix, cocycle_space_2, homology,
                       orbit_homology_sum, predict_h2_graphic)
from .intlin import HomologyGroup, SmithForm, SparseIntMat, smith_normal_form
from .knots import LinkDiagram, cocycle_invariant, colorings, parse_pd
from .magma import (AlgebraClass, MagmaTable, classify, find_quasigroup_subspindles,
                    is_distributive_pair, is_isomorphic, orbits)

__version__ = "0.1.0"

__all__ = [
    "CensusResult",
    "census_structure_report",
    "enumerate_quandles",
    "INF",
    "GraphicSpec",
    "alexander",
    "conjugation",
    "dihedral",
    "format_gq",
    "gq_uniform",
    "graphic_from_spec",
    "parse_gq",
    "recognize_example13",
    "takasaki",
    "trivial",
    "Cocycle2",
    "extend",
    "is_2_cocycle",
    "orbit_indicator_cocycle",
    "verify_prop_213",
    "ChainSpec",
    "boundary_matrix",
    "cocycle_space_2",
    "homology",
    "orbit_homology_sum",
    "predict_h2_graphic",
    "HomologyGroup",
    "SmithForm",
    "SparseIntMat",
    "smith_normal_form",
    "LinkDiagram",
    "cocycle_invariant",
    "colorings",
    "parse_pd",
    "AlgebraClass",
    "MagmaTable",
    "classify",
    "find_quasigroup_subspindles",
    "is_distributive_pair",
    "is_isomorphic",
    "orbits",
]
