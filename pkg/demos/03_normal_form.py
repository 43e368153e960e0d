"""
The deformed metric is again Robertson-Walker
=============================================

With dt~ = dt / (1 - sR^2) and R~ = R / sqrt(1 - sR^2), the deformed metric
takes the standard RW form. Both metrics are conformally flat. Their
curvature scalars differ along the same history, which hints that they are
not isometric. This is only a heuristic, not a proof.
"""
import numpy as np

from projrw import (CosmologyParams, SpacetimePoint, frame_metric, rw_curvature,
                    rw_normal_form, scalar_invariants, solve_friedmann)

params = CosmologyParams(kappa=0, M=2.0 / 9.0)
hist = solve_friedmann(params, 1.0, (1.0, 5.0))

for s in (-1.0, -0.2, 0.02):
    nf = rw_normal_form(hist, s)
    print(f"s = {s:+.2f}: t~(5) = {nf.t_tilde(5.0):.5f}, R~(5) = {nf.R_tilde(5.0):.5f}, "
          f"metric rebuilt to {nf.certify():.1e}")

# s = 1 would put the shell at R = 1, so compare with s = -1 instead
deformed = params.replace(s=-1.0)
print("\n    t     S(g)      S(g~)     Ric^2(g)   Ric^2(g~)   max|Weyl g~|")
for t in np.linspace(1.0, 5.0, 5):
    st = hist.state_at(t)
    p = SpacetimePoint(t)
    S, Q = scalar_invariants(rw_curvature(p, st, params, "standard"),
                             frame_metric("standard", 0.0, st.R))
    cb = rw_curvature(p, st, deformed, "deformed")
    St, Qt = scalar_invariants(cb, frame_metric("deformed", -1.0, st.R))
    print(f"{t:5.2f} {S:9.5f} {St:9.5f} {Q:10.5f} {Qt:11.5f}   {np.abs(cb.weyl).max():.1e}")
