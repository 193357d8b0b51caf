"""L_p norms, polar decompositions, orthogonality via the parallelogram law,
and Mazur maps between exponents.

Run:  python3 demos/02_lp_norms_polar_clarkson.py
"""

import numpy as np

from nclp import (
    LpVector,
    clarkson_defect,
    lp_norm,
    make_algebra,
    mazur_map,
    polar_decompose,
    random_faithful_state,
    state_power,
    trace_pairing,
)

m2 = make_algebra([2])
phi = random_faithful_state(m2, seed=3)

# The p-th root of a state is the canonical unit vector of L_p.
for p in (1, 1.5, 3, 4):
    print(f"|rho^(1/{p})|_{p} =", lp_norm(state_power(phi, 1 / p)))

# Polar data: h = w |h| with supports on both sides.
h = LpVector(m2, 3.0, [np.array([[0, 2.0], [0, 0]])])
pol = polar_decompose(h)
print("partial isometry:\n", pol.w.data[0].real)
print("modulus:\n", pol.modulus.data[0].real)

# Orthogonal vectors (disjoint supports on both sides) make the p-th power
# parallelogram law an equality; overlapping vectors break it.
e11 = LpVector(m2, 3.0, [np.diag([1.0, 0.0])])
e22 = LpVector(m2, 3.0, [np.diag([0.0, 1.0])])
print("disjoint pair:", clarkson_defect(e11, e22))
print("same vector twice:", clarkson_defect(e11, e11))

# Mazur maps move positive vectors between exponents by functional calculus.
cube_root = state_power(phi, 1 / 3)
moved = mazur_map(cube_root, 4.0)
print("Mazur image matches rho^(1/4):",
      (moved - state_power(phi, 1 / 4)).frobenius() < 1e-12)

# Trace duality pairs conjugate exponents.
print("pairing <rho^(1/3), rho^(2/3)> =",
      trace_pairing(state_power(phi, 1 / 3), state_power(phi, 2 / 3)).real)
