"""Numerics for Marcinkiewicz, Lorentz, Orlicz and Musielak-Orlicz sequence spaces.

Modules
-------
seqvec        finitely supported sequences, index maps, disjoint families
weights       weights and weight criteria
marcinkiewicz Marcinkiewicz/Lorentz norms and the block construction
orlicz        Orlicz functions, Luxemburg norms, indices
l1probe       lower l1-constants of disjoint families
cli           the ``seqspace`` command
"""
from .errors import HypothesisViolated, PreconditionError, SeqSpaceError
from .report import CriterionReport
from .seqvec import BlockFamily, IndexMap, IndexSetSpec, SeqVec

__version__ = "0.1.0"

__all__ = ["BlockFamily", "CriterionReport", "HypothesisViolated", "IndexMap", "IndexSetSpec",
           "PreconditionError", "SeqSpaceError", "SeqVec", "__version__"]
