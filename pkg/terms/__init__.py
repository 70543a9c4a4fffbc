# Property terms package

from typing import Dict, Optional, Sequence, Type

from models import PropertyKind, PropertySpec

from .base_term import PropertyTerm, SupportViolation, merge_changes
from .edge_terms import EdgesTerm, DensityTerm, TrianglesTerm
from .degree_terms import DegreeDistTerm, DegMixingTerm, DegreeDistByGroupTerm
from .mixing_term import MixingTerm

TERM_REGISTRY: Dict[PropertyKind, Type[PropertyTerm]] = {
    PropertyKind.EDGES: EdgesTerm,
    PropertyKind.DENSITY: DensityTerm,
    PropertyKind.TRIANGLES: TrianglesTerm,
    PropertyKind.DEGREEDIST: DegreeDistTerm,
    PropertyKind.DEGMIXING: DegMixingTerm,
    PropertyKind.DEGREEDIST_BY_GROUP: DegreeDistByGroupTerm,
    PropertyKind.MIXING: MixingTerm,
}


def create_term(spec: PropertySpec, n: int, covariate: Optional[Sequence[int]] = None) -> PropertyTerm:
    """Instantiate the term class registered for spec.kind"""
    return TERM_REGISTRY[spec.kind](spec, n, covariate)


__all__ = [
    "PropertyTerm",
    "SupportViolation",
    "merge_changes",
    "EdgesTerm",
    "DensityTerm",
    "TrianglesTerm",
    "DegreeDistTerm",
    "DegMixingTerm",
    "DegreeDistByGroupTerm",
    "MixingTerm",
    "TERM_REGISTRY",
    "create_term"
]
