"""How a time delay enlarges the stationary tumor.

Computes the delay-free radius R0, the first-order correction R1 and the
full delayed radius R*(tau) from the fixed-point solver, then shows that
R*(tau) - (R0 + tau R1) shrinks like tau^2.
"""

from fbtumor import ModelParams, build_zeroth, compute_tau_expansion, fixed_point_solve

params = ModelParams(mu=1.0, sigma_tilde=0.5)
zeroth = build_zeroth(params)
expansion = compute_tau_expansion(params, zeroth)
print(f"R0 = {zeroth.R0:.12f}")
print(f"R1 = {expansion.R1:.12f}  (A = {expansion.A_value:.6f}, B = {expansion.B_value:.6f})")

print(f"\n{'tau':>8} {'R*(tau)':>16} {'R0 + tau R1':>16} {'gap':>11} {'ratio':>7}")
previous = None
for tau in (0.04, 0.02, 0.01, 0.005):
    sol = fixed_point_solve(params.with_(tau=tau))
    gap = abs(sol.R_star - expansion.radius(tau))
    ratio = f"{previous / gap:7.3f}" if previous else ""
    print(f"{tau:8.3f} {sol.R_star:16.12f} {expansion.radius(tau):16.12f} {gap:11.3e} {ratio}")
    previous = gap
