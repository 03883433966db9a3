"""zzlab: conductor-ordered families of tame abelian extensions of F_q(x),
their L-polynomials and zero angles, exact counting series, and the
Gaussian fluctuation statistics of zero counts."""

__version__ = "0.1.0"

from .field import FiniteField
from .groups import GroupSpec, DualChar, dual_group, conjugate_representatives
from .family import (FamilySpec, FamilyMember, make_member, validate_member,
                     enumerate_members, sample_members, count_members,
                     frobenius_value, twist_conductor_degree, is_constant_type,
                     image_subgroup, ResourceLimitError)
from .poly import Place, INFINITY, places_up_to, place_count

__all__ = [
    "FiniteField", "GroupSpec", "DualChar", "dual_group",
    "conjugate_representatives", "FamilySpec", "FamilyMember", "make_member",
    "validate_member", "enumerate_members", "sample_members", "count_members",
    "frobenius_value", "twist_conductor_degree", "is_constant_type",
    "image_subgroup", "ResourceLimitError", "Place", "INFINITY",
    "places_up_to", "place_count",
]
