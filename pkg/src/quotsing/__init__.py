"""Exact computations for abelian quotient singularities.

The package builds McKay quivers, the skew group algebras attached to the
polynomial and exterior sides, graded free resolutions over the invariant
ring, and numerical checks of the tilting and duality statements for the
objects T and U built from modules of covariants and Koszul syzygies.
"""

from quotsing.weights import WeightGroup, validate_group, parse_group

__all__ = ["WeightGroup", "validate_group", "parse_group"]
__version__ = "0.1.0"
