"""
Triad citation networks and author cohorts
==========================================

Build a small synthetic corpus, cut an epoch out of it, and look at how the
authors fall into the seven cohorts.
"""

import numpy as np

from glepoch import build_epoch_collab, extract_triad, generate_synthetic, parse_epoch, septa_partition
from glepoch.temporal import EMPTY_BLOCKS

# a corpus of 3000 articles published 2000-2009
lg = generate_synthetic(3000, span_years=10, seed=1)
print(lg.summary())

# the epoch: core articles are those published inside the window,
# cout the ones they cite, cin the ones citing them
epoch = parse_epoch("mid=2004:2005")
triad = extract_triad(lg, epoch)
print("core/cout/cin:", triad.sizes())

# every author of a triad article lands in exactly one cohort,
# by which of the three article sets they wrote for
part = septa_partition(lg, triad)
for label, size in enumerate(part.sizes(), start=1):
    print(f"cohort {label}: {size} authors")

# the collaboration network keeps vertices grouped by cohort
net = build_epoch_collab(lg, triad, part)
print("vertices, edges:", net.graph.n_vertices, net.graph.n_edges)
print("cohort offsets:", net.boundaries.tolist())

# cohorts with no article set in common never share an edge
e = net.graph.edge_list()
pairs = {tuple(sorted(p)) for p in zip(net.cohort[e[:, 0]].tolist(), net.cohort[e[:, 1]].tolist())}
print("edges inside empty blocks:", len(pairs & set(EMPTY_BLOCKS)))

# a block count matrix makes the same point
blocks = np.zeros((7, 7), dtype=np.int64)
np.add.at(blocks, (net.cohort[e[:, 0]] - 1, net.cohort[e[:, 1]] - 1), 1)
print(blocks + blocks.T - np.diag(np.diag(blocks)))
