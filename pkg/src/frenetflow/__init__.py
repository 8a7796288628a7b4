"""Space-curve flows, their integrable wave transforms, and diagnostics.

The package has three layers: a geometric core (curves, moving frames,
curvature/torsion profiles, a coefficient expression language, extrinsic
evolution), a wave-side core (the curve-to-wave transform and spectral time
steppers for the transformed equations), and a service/CLI layer that runs
both and writes reproducible artifacts.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (AperiodicExpression, BlowUp, ConfigError,
                     DegenerateFrame, DivisionNearZero, FlowSyntaxError,
                     FrenetFlowError, InvalidFlowExpression, NonGeometricFlow,
                     NumericalError, SelfIntersectionSuspected,
                     UnboundConstant)
from .geometry import (DiscreteCurve, FrenetFrame, GeometryProfile,
                       frames_from_curve, integrate_frame, profile_from_curve,
                       reconstruct_curve, reparameterize)
from .flows import (FlowClassification, FlowSpec, GRAMMAR_HELP, classify_flow,
                    evaluate_flow, parse_expression, parse_flow)
from .presets import circle, helix, perturbed_circle
from .evolver import EvolutionConfig, Trajectory, evolve_curve, stability_cap
from .hasimoto import (CubicNLS, GeneralIntegroDifferential, Hirota,
                       PowerSeriesNLS, WaveFunction, WaveTrajectory,
                       evolve_wave, forward_transform, inverse_transform,
                       plane_wave, potential_term, soliton_wave)
from .diagnostics import (DiagnosticsReport, bending_energy,
                          bending_energy_rate, build_report, closure_defect,
                          length, length_rate)
from .config import RunConfig, load_run_config, parse_run_config

__all__ = [
    "__version__",
    # errors
    "FrenetFlowError", "ConfigError", "FlowSyntaxError", "UnboundConstant",
    "InvalidFlowExpression", "AperiodicExpression", "NonGeometricFlow",
    "NumericalError", "DegenerateFrame", "SelfIntersectionSuspected",
    "DivisionNearZero", "BlowUp",
    # geometry
    "DiscreteCurve", "FrenetFrame", "GeometryProfile", "frames_from_curve",
    "profile_from_curve", "integrate_frame", "reconstruct_curve",
    "reparameterize",
    # flows
    "FlowSpec", "FlowClassification", "GRAMMAR_HELP", "parse_expression",
    "parse_flow", "evaluate_flow", "classify_flow",
    # presets
    "circle", "helix", "perturbed_circle",
    # evolver
    "EvolutionConfig", "Trajectory", "evolve_curve", "stability_cap",
    # wave side
    "WaveFunction", "WaveTrajectory", "CubicNLS", "Hirota", "PowerSeriesNLS",
    "GeneralIntegroDifferential", "forward_transform", "inverse_transform",
    "potential_term", "evolve_wave", "soliton_wave", "plane_wave",
    # diagnostics
    "DiagnosticsReport", "length", "length_rate", "bending_energy",
    "bending_energy_rate", "closure_defect", "build_report",
    # config
    "RunConfig", "parse_run_config", "load_run_config",
]
