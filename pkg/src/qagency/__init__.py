"""Quantum agency circuits: deliberate on copies or clones of an unknown
qubit, then act on the last one."""
from .agency import (AgencyCircuitSpec, EvaluationReport, builtin_circuits, evaluate,
                     get_builtin)
from .cloning import symmetric_clone, universal_clone_fidelity
from .qstate import BlochVector, DensityMatrix, PureState

__version__ = "0.1.0"
