"""Nested bubble decomposition of a sampled map, read from the map and from its walk.

Run: python3 demos/bubbles.py
"""

from triperc.nested import decompose, walk_bubble_tree
from triperc.sampler import sample_map, substream

t = sample_map(12, substream(2024), max_steps=50_000)
print(f"map with boundary {t.boundary_len}, {t.n_inner} inner vertices, {t.n_edges} edges")

tree = decompose(t, depth_max=3, width_max=6)
same = walk_bubble_tree(tree.walk, 3, 6)
print("walk-side tree identical:", all(a.times == same.nodes[k].times for k, a in tree.nodes.items()))

for idx, node in sorted(tree.nodes.items()):
    pad = "  " * len(idx)
    print(f"{pad}{idx or '()'} {node.type:<4} ell={node.boundary_len:<3}"
          f" S={node.S:<5} T_hat={node.T_hat:<5} T={node.T}")
