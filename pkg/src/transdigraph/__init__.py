"""Transfinite digraphs: ranked vertices built from ditips, walks, and connectedness."""

from .model import (
    ARROW, OMEGA, Arc, DigraphBundle, Direction, Ditip, RankTag, TipRef, TransfiniteError,
    ValidationReport, Vertex, finite, rank_compare, validate_bundle,
)
from .present import (
    CellTemplate, ModeMismatch, PeriodicRef, TemplateArc, WalkPresentation, eventually_identical,
    is_extended, normalize, unfold,
)
from .document import SpecDocument, Structure, UnknownId
from .walk import Incidence, Termination, incidence, traverses, validate_diwalk, validate_semiwalk
from .connect import Connectivity, components, connected, periodic_reach
from .elevate import EmptyTipSet, NotAPartition, PartitionSpec, elevate, partition_tips, underlying_graph
from .omega import (
    ArrowWalkPresentation, BaseMismatch, TemplateInstantiationError, arrow_ditips, assemble_arrow,
    elevate_to_omega, is_extended_arrow, join_endless, validate_omega_diwalk,
)

__version__ = "0.1.0"

__all__ = [
    "ARROW",
    "OMEGA",
    "Arc",
    "DigraphBundle",
    "Direction",
    "Ditip",
    "RankTag",
    "TipRef",
    "TransfiniteError",
    "ValidationReport",
    "Vertex",
    "finite",
    "rank_compare",
    "validate_bundle",
    "CellTemplate",
    "ModeMismatch",
    "PeriodicRef",
    "TemplateArc",
    "WalkPresentation",
    "eventually_identical",
    "is_extended",
    "normalize",
    "unfold",
    "SpecDocument",
    "Structure",
    "UnknownId",
    "Incidence",
    "Termination",
    "incidence",
    "traverses",
    "validate_diwalk",
    "validate_semiwalk",
    "Connectivity",
    "components",
    "connected",
    "periodic_reach",
    "EmptyTipSet",
    "NotAPartition",
    "PartitionSpec",
    "elevate",
    "partition_tips",
    "underlying_graph",
    "ArrowWalkPresentation",
    "BaseMismatch",
    "TemplateInstantiationError",
    "arrow_ditips",
    "assemble_arrow",
    "elevate_to_omega",
    "is_extended_arrow",
    "join_endless",
    "validate_omega_diwalk",
]
