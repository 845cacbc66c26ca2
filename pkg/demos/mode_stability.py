"""Which boundary modes grow, and does the delay move the threshold?

Tabulates the neutral intensities mu_n for the first few modes, classifies
each mode at a few multiples of mu*, and locates the switch of the
combined amplitude rho0 + tau rho1 with and without delay.
"""

from fbtumor import ModelParams, build_zeroth, classify, growth_rate, mode_threshold, mu_star
from fbtumor.perturbation import stability_switch

params = ModelParams(mu=1.0, sigma_tilde=0.5)
zeroth = build_zeroth(params)
R0 = zeroth.R0
critical = mu_star(R0)

print("neutral intensities")
for n in range(0, 7):
    print(f"  n={n}: {mode_threshold(n, R0):.10g}")
print(f"mu* = {critical:.12f}\n")

for factor in (0.5, 0.99, 1.01, 3.0):
    mu = factor * critical
    classes = [classify(growth_rate(n, params.with_(mu=mu), R0), scale=mu) for n in range(0, 7)]
    print(f"mu = {factor:4.2f} mu*: " + " ".join(f"{n}:{c}" for n, c in enumerate(classes)))

print()
for tau in (0.0, 0.01):
    s = stability_switch(params, zeroth, tau, 0.9 * critical, 1.1 * critical)
    print(f"switch of rho0 + tau rho1 at tau={tau}: mu = {s:.10f} ({(s - critical) / critical:+.1e} relative)")
