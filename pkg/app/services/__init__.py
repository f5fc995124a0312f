"""
Services Package

Contains the deformation-theory computations behind the CLI.
"""

from app.services.deformation import kuranishi, preferred_gm_product
from app.services.dgla_core import cohomology, make_dgla
from app.services.group_cohomology import rep_cohomology, to_formal_dgla
from app.services.mc_vmhs import build_formality_model, gauge_compare

__all__ = [
    'kuranishi',
    'preferred_gm_product',
    'cohomology',
    'make_dgla',
    'rep_cohomology',
    'to_formal_dgla',
    'build_formality_model',
    'gauge_compare',
]
