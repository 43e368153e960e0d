"""Robertson-Walker metrics that share their unparametrized geodesics.

The deformed family ``g~ = -dt^2/(1 - sR^2)^2 + R^2 (spatial)/(1 - sR^2)`` is
projectively equivalent to the dust RW metric ``g`` for every ``s``; read as a
solution of Einstein's equations it carries an extra Lambda-like term.
"""
from .cosmology import (NormalForm, Reinterpretation, ScaleHistory, dust_density,
                        einstein_residual, friedmann_state, history_table, reinterpret,
                        rw_normal_form, solve_friedmann)
from .errors import (DegenerateDirection, DomainError, EmptyOverlap, FriedmannViolation,
                     GeometryError, MetricSingular, NotProjectivelyRelated, PatchExit,
                     PatchViolation, SingularFrame, SingularInput, StepFailure, TurningPoint)
from .frame import (DEFORMED, STANDARD, CurvatureBundle, RWConnection, connection_deformed,
                    connection_standard, curvature_bundle, einstein_closed_form, eval_coframe,
                    frame_metric, rw_curvature, scalar_invariants)
from .geodesics import (GeodesicPath, GeodesicState, compare_geodesics, init_geodesic,
                        integrate_geodesic, integrate_reparametrized, path_distance,
                        reparametrization_check)
from .oracle import OracleConfig, SamplePlan, analytic_scale, oracle_connection, run_suite
from .projective import OneForm, apply_projective, extract_projective, projective_one_form
from .types import CosmologyParams, ScaleState, SpacetimePoint

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
