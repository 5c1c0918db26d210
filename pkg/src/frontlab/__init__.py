"""Traveling-front construction and transversal stability toolkit for
singularly perturbed two-component reaction-diffusion systems."""
from __future__ import annotations

from .criteria import (
    REPORT_COLUMNS,
    CriterionReport,
    Verdict,
    criterion_report,
    fhn_bifurcating_wave_report,
    lambda2c,
    lambda2c_small_tau,
    report_csv_header,
    report_csv_row,
    report_text,
)
from .geometry import (
    FastJump,
    FrontSkeleton,
    JumpPoint,
    SlowOrbit,
    TWBifurcation,
    build_front,
    fast_speed_shoot,
    find_jump_point,
    tw_bifurcation,
    write_skeleton_bundle,
)
from .models import (
    HomogeneousState,
    ModelSpec,
    TauRegime,
    branch_solve,
    catalog_names,
    eval_reaction,
    homogeneous_stability,
    homogeneous_states,
    make_model,
    stability_conditions,
)
from .spectral import (
    GridSpec,
    SpectralCurve,
    assemble,
    critical_eigenvalue,
    eigenvalue_curve,
    write_curve_bundle,
)

__all__ = [
    "REPORT_COLUMNS",
    "CriterionReport",
    "Verdict",
    "criterion_report",
    "fhn_bifurcating_wave_report",
    "lambda2c",
    "lambda2c_small_tau",
    "report_csv_header",
    "report_csv_row",
    "report_text",
    "FastJump",
    "FrontSkeleton",
    "JumpPoint",
    "SlowOrbit",
    "TWBifurcation",
    "build_front",
    "fast_speed_shoot",
    "find_jump_point",
    "tw_bifurcation",
    "write_skeleton_bundle",
    "HomogeneousState",
    "ModelSpec",
    "TauRegime",
    "branch_solve",
    "catalog_names",
    "eval_reaction",
    "homogeneous_stability",
    "homogeneous_states",
    "make_model",
    "stability_conditions",
    "GridSpec",
    "SpectralCurve",
    "assemble",
    "critical_eigenvalue",
    "eigenvalue_curve",
    "write_curve_bundle",
]

__version__ = "0.1.0"
