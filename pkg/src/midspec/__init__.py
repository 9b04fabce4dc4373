"""Multiplicity-induced dominance for single-delay quasipolynomials."""
from ._core import BACKEND
from .errors import (
    BoundaryRootError,
    BranchCutError,
    ConvergenceError,
    InfeasibleError,
    InputError,
    MidspecError,
    NeutralTypeError,
    SingularityError,
)
from .quasipoly import Quasipolynomial, RealPolynomial, SearchBox, denormalize, normalize
from .midcore import Certificate, MidDesign, certify_dominance, design_from_quasi, force_multiplicity, plant_root
from .freqbound import frequency_bound
from .roots import find_roots, verify_dominance_numeric, winding_count
from .simulate import DdeProblem, fit_decay_rate, integrate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MidspecError",
    "InputError",
    "NeutralTypeError",
    "SingularityError",
    "BranchCutError",
    "ConvergenceError",
    "BoundaryRootError",
    "InfeasibleError",
    "Quasipolynomial",
    "RealPolynomial",
    "SearchBox",
    "normalize",
    "denormalize",
    "MidDesign",
    "Certificate",
    "force_multiplicity",
    "design_from_quasi",
    "plant_root",
    "certify_dominance",
    "frequency_bound",
    "find_roots",
    "winding_count",
    "verify_dominance_numeric",
    "DdeProblem",
    "integrate",
    "fit_decay_rate",
]
