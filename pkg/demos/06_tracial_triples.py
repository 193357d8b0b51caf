"""Tracial-source isometries: decomposition into (J, w, B), the trace
condition, and the Jordan/multiplicative dichotomy under amplification.

Run:  python3 demos/06_tracial_triples.py
"""

import numpy as np

from nclp import build_yeadon_map, jordan_dichotomy_report, yeadon_decompose
from nclp.samples import random_yeadon_triple, transpose_triple

p = 3.0

# A generated triple: block embeddings with multiplicities, a commuting
# positive part, and trace weights that close the matching condition.
triple, weights = random_yeadon_triple(seed=2, p=p)
print("source blocks:", triple.J.source.blocks, "weights:", [round(w, 4) for w in weights])
T = build_yeadon_map(triple, p, weights)
back = yeadon_decompose(T, p, weights)
print("roundtrip distances:",
      np.max(np.abs(back.J.matrix - triple.J.matrix)),
      (back.w - triple.w).frobenius())

# The transpose triple is isometric at every p but its amplification is not;
# the grid witness takes the exact textbook value.
for q in (1.0, 3.0, 4.0):
    tri, w = transpose_triple(2)
    rep = jordan_dichotomy_report(tri, q, w)
    print(f"p={q}: kind={rep.kind:12s} base defect={rep.isometry_defect:.1e} "
          f"witness defect={rep.witness_defect:.6f} (|4^(1/p) - 2| = {abs(4**(1/q)-2):.6f})")

# A multiplicative control passes the amplified test.
ctrl, cw = random_yeadon_triple(seed=2, p=p, spec=[(2, "mult", 1, 0)])
crep = jordan_dichotomy_report(ctrl, p, cw)
print("control:", crep.kind, "amplified defect:", f"{crep.two_isometry_defect:.1e}",
      "biconditional held:", crep.biconditional_holds)
