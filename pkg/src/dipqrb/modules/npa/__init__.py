"""NPA hierarchy: projector algebra and moment relaxations."""

from dipqrb.modules.npa.algebra import Polynomial, adjoint, canonicalize, moment_key, projector
from dipqrb.modules.npa.hierarchy import (
    MomentConstraint,
    MomentIndex,
    MomentRelaxation,
    build_moment_sdp,
    generate_monomials,
    parse_level,
)
from dipqrb.modules.npa.schemas import (
    IDENTITY,
    ZERO,
    Letter,
    Measurement,
    Monomial,
    Scenario,
)

__all__ = [
    "IDENTITY",
    "ZERO",
    "Letter",
    "Measurement",
    "MomentConstraint",
    "MomentIndex",
    "MomentRelaxation",
    "Monomial",
    "Polynomial",
    "Scenario",
    "adjoint",
    "build_moment_sdp",
    "canonicalize",
    "generate_monomials",
    "moment_key",
    "parse_level",
    "projector",
]
