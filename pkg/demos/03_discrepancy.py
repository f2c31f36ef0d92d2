"""
Comparing epoch networks
========================

Measure how much of each network's local topology survives in its
intersection with another, per vertex, per cohort and overall.
"""

import math

import numpy as np

from glepoch import build_epoch_collab, extract_triad, generate_synthetic, parse_epoch, septa_partition
from glepoch.discrepancy import DiscrepancyConfig, network_eta, pairwise_table

lg = generate_synthetic(6000, span_years=12, seed=3)

nets = []
for spec in ("early=2002:2003", "mid=2005:2006", "late=2008:2009", "recent=2010:2011"):
    t = extract_triad(lg, parse_epoch(spec))
    nets.append(build_epoch_collab(lg, t, septa_partition(lg, t)))

# one pair in detail
r = network_eta(nets[0].graph, nets[1].graph, nets[0].cohort, nets[1].cohort)
print(f"eta = {r.eta:.4f}, agreement = {r.agreement:.4f}")
print("shared authors:", r.intersection_size)
print("cohort weights (x side):", np.round(r.weights_x, 3).tolist())
print("cohort agreement (x side):", np.round(1 - r.cohort_eta_x, 3).tolist())

# a network compared with itself has nothing to lose
same = network_eta(nets[2].graph, nets[2].graph, nets[2].cohort, nets[2].cohort)
print("self comparison eta:", same.eta)

# the order of the Holder mean changes how single large losses count
for p in (1.0, 2.0, math.inf):
    r = network_eta(nets[0].graph, nets[1].graph, nets[0].cohort, nets[1].cohort,
                    DiscrepancyConfig(holder_p=p))
    print(f"p = {p}: agreement {r.agreement:.4f}")

# the full table: agreement above the diagonal, shared authors below
agree, inter, _ = pairwise_table(nets)
labels = [n.label for n in nets]
print("".ljust(8) + "".join(x.rjust(9) for x in labels))
for i, a in enumerate(labels):
    cells = ["-" if i == j else f"{agree[i, j]:.3f}" if j > i else str(inter[i, j])
             for j in range(len(labels))]
    print(a.ljust(8) + "".join(c.rjust(9) for c in cells))
