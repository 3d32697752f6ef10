"""Singular-value/curvature machinery for area non-increasing maps and
desk-scale graphical flow experiments."""

__version__ = "0.1.0"

from .curvature import (
    CurvatureBounds,
    CurvatureTensor,
    SymBilinear,
    bounds_of,
    chi_ic1,
    constant_curvature_tensor,
    kulkarni_nomizu,
    pic1_defect,
    product_curvature,
    ric3_min,
    sectional,
)
from .profile import (
    GraphFrame,
    SingularProfile,
    classify,
    graph_frame,
    hopf_profile,
    m_monitor,
    singular_bases,
    singular_profile,
)
from .spaces import BackgroundPath, ModelSpace, at_time, curvature_at, scalar_hypothesis
from .conditions import ConditionReport, audit_conditions
from .evolution import PointState, positivity_gap, terms_I_II_III, term_II_bruteforce
from .flow import EquivariantFlowState, FlowConfig, FlowSeries, TorusFlowState, run
from .reduction import reduction_residual
