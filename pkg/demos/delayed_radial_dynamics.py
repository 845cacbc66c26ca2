"""Radial dynamics with a genuine delay settle on the stationary radius.

Starts the delayed simulator above and below R*(tau) and prints the
approach, together with the characteristic endpoint check
|xi(t - tau; R(t), t) - R(t - tau)|.
"""

from fbtumor import ModelParams, SimConfig, fixed_point_solve, mu_star, run_to_steady, solve_R0

tau = 0.1
params = ModelParams(mu=2 * mu_star(solve_R0(0.5)), sigma_tilde=0.5, tau=tau)
R_star = fixed_point_solve(params).R_star
cfg = SimConfig(dt=tau / 8, t_end=200.0)
print(f"R*(tau={tau}) = {R_star:.12f}\n")

for factor in (0.5, 1.5):
    traj = run_to_steady(factor * R_star, params, cfg, R_reference=R_star)
    print(f"R(0) = {factor} R*")
    for t_mark in (0.0, 1.0, 5.0, 10.0, 20.0):
        k = min(int(round(t_mark / cfg.dt)), len(traj.times) - 1)
        print(f"  t={traj.times[k]:6.2f}  R={traj.R_values[k]:.10f}  R-R*={traj.R_values[k] - R_star:+.3e}")
    print(f"  stopped at t={traj.t:.2f}, |R-R*|={abs(traj.R - R_star):.1e}, "
          f"max endpoint error {traj.max_endpoint_error():.1e}\n")
