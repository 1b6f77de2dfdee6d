"""Encode a small percolated triangulation as a walk and back.

Run: python3 demos/walk_and_map.py
"""

from triperc import combmap
from triperc.matebij import interface, peel, peel_z, phi, phi_inverse, space_filling_exploration
from triperc.sampler import iter_walks
from triperc.walkcore import Walk, ancestor_free_times

w = Walk.from_word("abcc")
p = phi_inverse(w)
t = p.triangulation
print(f"walk {w.word!r} from {w.start}: {t.n_vertices} vertices, {t.n_edges} edges, boundary {t.boundary_len}")
print("colors (0 red, 1 blue):", t.colors.tolist())
print("decoded back:", phi(p).word)

rec = space_filling_exploration(p)
print("edges in exploration order:", rec.edge_order.tolist())
print("interface times:", rec.interface_times.tolist(),
      "= ancestor-free times:", ancestor_free_times(w, len(w) - 1).tolist())
print("interface steps m =", interface(p).m)

# one peeling step on the map agrees with one peeling step on the walk
r = peel(p)
print(f"peeled a {r.step}-step; primary encodes {phi(r.primary).word!r},"
      f" walk side gives {peel_z(w)[0].word!r}")

# every walk of length <= 10 with boundary (1, 1) gives a different map
maps = {combmap.canonical_form(phi_inverse(v).triangulation) for v in iter_walks(1, 1, 10)}
print(f"{len(list(iter_walks(1, 1, 10)))} walks with start (1, 1) and <= 10 steps, {len(maps)} distinct maps")
