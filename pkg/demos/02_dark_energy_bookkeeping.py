"""
Reading the deformed metric as dust plus Lambda
===============================================

Along a dust Friedmann history, the deformed metric satisfies Einstein's
equations with a rescaled dust density rho~ and an extra term Lambda~ g~.
Lambda~ follows the expansion rate, so it is not constant.
"""
import numpy as np

from projrw import CosmologyParams, einstein_residual, history_table, solve_friedmann

params = CosmologyParams(kappa=0, M=2.0 / 9.0)           # R = t^(2/3)
hist = solve_friedmann(params, 1.0, (1.0, 3.0), tol=1e-12)
print("status:", hist.status, " samples:", len(hist.samples))

for s in (-1.0, -0.1, 0.1):
    tab = history_table(hist, s=s)
    print(f"\ns = {s}")
    print("     t        R      Lambda~      rho~/rho")
    for k in np.linspace(0, len(tab["t"]) - 1, 5).astype(int):
        print(f"{tab['t'][k]:7.3f} {tab['R'][k]:7.3f} {tab['lambda_tilde'][k]:+11.5f}"
              f" {tab['rho_tilde'][k] / tab['rho'][k]:11.5f}")
    worst = max(np.abs(einstein_residual(st, params.replace(s=s), "deformed")).max()
                for st in hist.samples if abs(1 - s * st.R**2) > 0.05)
    print("worst Einstein residual:", "%.1e" % worst)

# The formulas as first written, Lambda~ = s(kappa - 2GM/R), leave a residual.
st = hist.samples[len(hist.samples) // 2]
p = params.replace(s=-0.1)
print("\nprinted-variant residual:",
      "%.3e" % np.abs(einstein_residual(st, p, "deformed", printed=True)).max(),
      " corrected:", "%.1e" % np.abs(einstein_residual(st, p, "deformed")).max())

# Past the shell s R^2 = 1 the history stops: g~ is degenerate there.
stopped = solve_friedmann(params.replace(s=0.1), 1.0, (1.0, 20.0))
print("s = 0.1 history:", stopped.status, "at t = %.3f, R = %.4f" % (stopped.t[-1], stopped.R[-1]))
