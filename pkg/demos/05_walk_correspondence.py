"""
The self-repelling walk and its urn decomposition
=================================================

The walk steps toward the neighboring edge with the smaller local time
(crossing count), weight w applied.  Remarkably, the same path law is a
composition of independent urns, one per site, with the site's sign
deciding which parity convention ("side") its urn uses.  Both
constructions are implemented; here they are compared path by path.
"""

import math

import numpy as np

from urnlab.rng import RngStream
from urnlab.walk import sample_walk, side_for_site, walk_path_prob
from urnlab.weights import constant_weights, specific_power

wf = specific_power(1.0)

# ---- path-law equality --------------------------------------------------
print("P(path) under both constructions, a few 6-step paths:")
for path in ([1, 1, 1, 1, 1, 1], [1, -1, 1, -1, 1, -1], [1, 1, -1, -1, 1, 1]):
    direct = walk_path_prob(path, wf, "direct")
    urn = walk_path_prob(path, wf, "urn")
    arrows = "".join("R" if s > 0 else "L" for s in path)
    print(f"  {arrows}:  direct {direct:.8f}   urn {urn:.8f}   gap {abs(direct - urn):.1e}")

paths = [[1 if (word >> t) & 1 else -1 for t in range(8)] for word in range(256)]
worst = max(
    abs(walk_path_prob(p, wf, "direct") - walk_path_prob(p, wf, "urn")) for p in paths
)
print(f"  worst gap over all 2^8 paths: {worst:.2e}")

print()
print("site -> urn side:", {x: side_for_site(x) for x in (-2, -1, 0, 1, 2)})

# ---- sampled walks ------------------------------------------------------
positions, state = sample_walk(wf, 200, RngStream(5, 0))
print()
print("one 200-step self-repelling walk:")
print("  final position", state.position, " span",
      int(positions.max() - positions.min()))
lt = state.edge_local_times
edges = sorted(lt)
print("  edge local times", [lt[e] for e in edges], "on edges", edges[0], "..", edges[-1])

# self-repulsion spreads the walk faster than the simple random walk
spans_rep, spans_srw = [], []
for r in range(200):
    p, _ = sample_walk(specific_power(2.0), 400, RngStream(99, 2 * r))
    q, _ = sample_walk(constant_weights(1024), 400, RngStream(99, 2 * r + 1))
    spans_rep.append(p.max() - p.min())
    spans_srw.append(q.max() - q.min())
print()
print(f"mean 400-step span: repelling (alpha=2) {np.mean(spans_rep):.1f}"
      f"  vs simple walk {np.mean(spans_srw):.1f}")
