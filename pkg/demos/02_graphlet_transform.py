"""
Graphlet frequencies per vertex
===============================

Count the five small patterns at every vertex of a collaboration network and
check the counting identities by hand.
"""

from math import comb

import numpy as np

from glepoch import build_epoch_collab, extract_triad, generate_synthetic, parse_epoch, septa_partition
from glepoch.graph_core import collab_from_edges
from glepoch.graphlet import spectrogram, transform
from glepoch.report import display_order

# start tiny: a triangle with a pendant vertex
g = collab_from_edges(np.arange(4), [0, 1, 2, 2], [1, 2, 0, 3])
f = transform(g)
print("columns: singleton, edge, bi-fork, 2-path, triangle")
print(f)

# vertex 2 has degree 3 and sits in one triangle, so two of its three
# neighbor pairs are open forks
assert f[2, 2] + f[2, 4] == comb(3, 2)

# now a real-sized epoch network
lg = generate_synthetic(5000, span_years=10, seed=2)
t = extract_triad(lg, parse_epoch("e=2005:2006"))
net = build_epoch_collab(lg, t, septa_partition(lg, t))
f = transform(net.graph)
print("vertices:", f.shape[0], "triangles:", f[:, 4].sum() // 3)

# the spectrogram lays the field out column by column in display order:
# cohorts left to right, bandwidth-reducing order inside each
order = display_order(net.graph, net.cohort)
spec = spectrogram(f, order, net.boundaries)
print("spectrogram shape:", spec.matrix.shape)

# summary per cohort
for label in range(1, 8):
    rows = f[net.cohort == label]
    if rows.size:
        print(f"cohort {label}: mean degree {rows[:, 1].mean():.1f}, "
              f"mean triangles {rows[:, 4].mean():.1f}")
