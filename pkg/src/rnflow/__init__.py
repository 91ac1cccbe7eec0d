"""Simulation of the Tikhonov-regularized Newton dynamic through its prox reformulation."""
from .convex_atoms import (
    AbsValue,
    AddLinear,
    ConvexFunction,
    HalfSqDistToBox,
    IndicatorAffine,
    IndicatorBox,
    IndicatorHalfspace,
    NormOne,
    Quadratic,
    Scale,
    SeparableSum,
    ShiftValue,
    Sum,
    Translate,
    conjugate,
    evaluate,
    prox,
    shift_to_zero_min,
    subgradient_check,
)
from .diagnostics import Report, convergence_report, limit_dependence_probe, min_norm_oracle
from .dynamics import DynamicSpec, Trajectory, integrate, residual_original, rhs_rn, rhs_sdc
from .moreau import EnvelopeContext, envelope, grad_psi_discrepancy, psi, yosida
from .schedules import Constant, PowerLaw, Zero, h1_model_check

__version__ = "0.1.0"
