"""Resolutions, Ext and stable Hom over the invariant ring."""

from quotsing.resolve.modules import (
    GradedModule,
    covariant_module,
    free_module,
    koszul_summand,
    residue_field,
)
from quotsing.resolve.ext import (
    ExtEngine,
    ExtTable,
    ext_dims,
    shifted_stable_hom,
    stable_grid,
    stable_hom,
)
from quotsing.resolve.resolution import Resolution, minimal_resolution

__all__ = [
    "ExtEngine",
    "ExtTable",
    "GradedModule",
    "Resolution",
    "covariant_module",
    "ext_dims",
    "free_module",
    "koszul_summand",
    "minimal_resolution",
    "residue_field",
    "shifted_stable_hom",
    "stable_grid",
    "stable_hom",
]
