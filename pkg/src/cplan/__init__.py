"""Decision support for quality-control planning.

Recommends control scenarios for process-quality situations: a case base
answers recurring situations automatically, and an AHP + Choquet evaluation
engine supports the manual choice when no similar case exists. Sessions walk
an explicit workflow with revision (threshold repair or re-opened judgment
elicitation) and retention.
"""

from . import cbr, mcdm, store, workflow
from .errors import (
    CplanError,
    DomainError,
    IllegalTransition,
    IntegrityError,
    NotFoundError,
    StoreError,
    UnsupportedVersion,
    ValidationFailed,
)

__version__ = "0.1.0"

__all__ = [
    "cbr",
    "mcdm",
    "store",
    "workflow",
    "CplanError",
    "DomainError",
    "IllegalTransition",
    "IntegrityError",
    "NotFoundError",
    "StoreError",
    "UnsupportedVersion",
    "ValidationFailed",
    "__version__",
]
