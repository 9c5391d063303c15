"""Constructive ReLU / sine / 2^x networks approximating continuous functions on [0,1]^d."""

from .builder import (
    DigitTable,
    HolderBudget,
    InfeasibleError,
    assemble,
    build_bit_extractor,
    extend_linf,
    sample_digits,
    solve_hyperparams,
)
from .core import (
    ActivationKind,
    AffineLayer,
    CapabilityError,
    DomainError,
    Hyperparams,
    Network,
    RegionError,
    StructureError,
    TargetFunction,
    audit_architecture,
)
from .evaluator import forward, forward_detailed, gradient
from .targets import builtin_target

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "AffineLayer",
    "CapabilityError",
    "DigitTable",
    "DomainError",
    "HolderBudget",
    "Hyperparams",
    "InfeasibleError",
    "Network",
    "RegionError",
    "StructureError",
    "TargetFunction",
    "assemble",
    "audit_architecture",
    "build_bit_extractor",
    "builtin_target",
    "extend_linf",
    "forward",
    "forward_detailed",
    "gradient",
    "sample_digits",
    "solve_hyperparams",
]
