"""Small-scale versions of the scaling diagnostics (under a minute).

The acceptance suite runs the full-size versions.
Run: python3 demos/scaling_quicklook.py
"""

from triperc.scaling import diameter_experiment, jumps_experiment, markov_experiment, moments_experiment

m, _ = moments_experiment(count=100, min_edges=50_000, split=(150, 150), seed=1)
print(f"increment correlation {m.correlation:.3f} +- {m.stderr['correlation']:.3f}"
      f" (var_L {m.var_L:.2f}, var_R {m.var_R:.2f})")

est, _ = jumps_experiment(count=150, min_edges=50_000, split=(400, 400), seed=1)
print(f"interface jump tail index {est.index:.3f} +- {est.stderr:.3f} from {est.used} jumps")

fit, _ = diameter_experiment(sizes=tuple(2 ** k for k in range(8, 15)), per_size=8, seed=1)
print(f"diameter log-log slope {fit.slope:.3f}, 95% CI {fit.ci95[0]:.3f}..{fit.ci95[1]:.3f}")

print(f"split-off vs fresh KS p-value {markov_experiment(seed=1).pvalue:.3f}")
