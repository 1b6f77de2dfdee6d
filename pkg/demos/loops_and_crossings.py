"""Loops, pivotal points and crossing frequencies on one sampled map.

Run: python3 demos/loops_and_crossings.py
"""

import numpy as np

from triperc.observables import cardy_probabilities, epsilon_pivotal, loop_ensemble
from triperc.sampler import sample_map, substream

rng = substream(7)
t = sample_map(9, rng, max_steps=20_000)
while not 30 <= t.n_inner <= 200:
    t = sample_map(9, rng, max_steps=20_000)
print(f"map: boundary {t.boundary_len}, {t.n_inner} inner vertices")

loops = loop_ensemble(t)
areas = sorted((lp.area for lp in loops.loops), reverse=True)
print(f"{len(loops)} loops; largest areas {np.round(areas[:5], 4).tolist()}")

piv = epsilon_pivotal(t, eps=0.02)
print(f"{piv.vertices.shape[0]} vertices are 0.02-pivotal, total mass {piv.total_mass:.3f}")

inner = np.setdiff1d(np.arange(t.n_vertices), t.boundary_vertices())
est = cardy_probabilities(t, (0.0, 1 / 3, 2 / 3), int(inner[0]), samples=2000, seed=1)
print("crossing frequencies:", np.round(est.p, 3).tolist(), "+-", np.round(est.stderr, 3).tolist())
