"""
Cross-checking everything
=========================

The suite compares the closed-form connections with a finite-difference
solution of the structure equations, the Einstein tensors with curvature
computed from those connections, the solver with analytic dust solutions,
and both geodesic families with each other. A fixed seed makes it
reproducible. Equivalent to ``projrw verify --seed 42``.
"""
import time

from projrw import SamplePlan, run_suite

t0 = time.perf_counter()
report = run_suite(plan=SamplePlan(seed=42))
print(report.to_text())
print("elapsed %.1f s" % (time.perf_counter() - t0))
