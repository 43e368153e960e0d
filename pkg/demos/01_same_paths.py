"""
Same paths, different clocks
============================

Shoot a geodesic of the dust RW metric g and one of the deformed metric g~
through the same point and the same initial direction. The curves trace the
same set of points; only the parameter along them differs.
"""
import numpy as np

from projrw import (CosmologyParams, SpacetimePoint, compare_geodesics, friedmann_state,
                    init_geodesic, reparametrization_check)

# a flat dust universe, R = 1 at t = 0, and a deformation s = 0.2
params = CosmologyParams(kappa=0, M=0.045, s=0.2)
st = friedmann_state(0.0, 1.0, params)
print("background: R = %.3f, Rdot = %.3f, 1 - sR^2 = %.3f" % (st.R, st.Rdot, 1 - 0.2 * st.R**2))

p = SpacetimePoint(0.0, 0.1, 0.0, -0.1)
for cls, direction in [("timelike", [0.4, 0.1, 0.2]), ("null", [1, 0, 0]),
                       ("spacelike", [1.6, -0.3, 0.0])]:
    init = init_geodesic(p, direction, cls, "standard", st, params)
    c = compare_geodesics(init, st, params, lambda_max=1.0)
    # at the common end point, how far apart are the two affine parameters?
    print(f"{cls:>9}: path distance {c.distance:.1e}, "
          f"affine length g {c.standard.lam[-1]:.4f} vs g~ {c.other.lam[-1]:.4f}")

# The standard connection plus the drive -2 (A.v) v, with A = sRRdot/(1-sR^2) dt,
# reproduces the g~ path directly.
init = init_geodesic(p, [0.4, 0.1, 0.2], "timelike", "standard", st, params)
rep = reparametrization_check(init, st, params, lambda_max=1.0)
print("driven vs affine g~ path: %.1e" % rep.deviation)

# A spatial push that is not of projective type does move the path.
from projrw import OneForm
bad = reparametrization_check(init, st, params, 1.0, perturbation=OneForm([0, 0.05, 0, 0]))
print("with a non-projective force: %.1e" % bad.deviation)

# coordinates of a few points on each curve, matched by arc length
c = compare_geodesics(init, st, params, 1.0)
idx = np.linspace(0, len(c.standard.lam) - 1, 4).astype(int)
print("g  path samples (t, x, y, z):\n", np.round(c.standard.coords[idx], 5))
