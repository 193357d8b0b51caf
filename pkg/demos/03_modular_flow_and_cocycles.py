"""Modular flow of a faithful state, cocycles between states, and density
transport between exponents.

Run:  python3 demos/03_modular_flow_and_cocycles.py
"""

import numpy as np

from nclp import (
    AlgebraElement,
    State,
    connes_cocycle,
    density_transport,
    lp_norm,
    make_algebra,
    modular_automorphism,
    random_faithful_state,
    selfpolar_form,
    state_power,
)

m2 = make_algebra([2])

# For a diagonal density the flow multiplies off-diagonal entries by phases.
phi = State(m2, [np.diag([0.7, 0.3])])
e12 = AlgebraElement(m2, [np.array([[0, 1], [0, 0]])])
for t in (0.5, 2.0):
    moved = modular_automorphism(phi, t, e12)
    print(f"t={t}: flow phase {moved.data[0][0, 1]:.6f} "
          f"(expected {(0.7 / 0.3) ** (1j * t):.6f})")

# The cocycle comparing two states satisfies the chain rule through the flow.
psi = random_faithful_state(m2, 5)
s, t = 0.4, 0.9
lhs = connes_cocycle(psi, phi, s) @ modular_automorphism(phi, s, connes_cocycle(psi, phi, t))
rhs = connes_cocycle(psi, phi, s + t)
print("cocycle chain rule residual:", (lhs - rhs).frobenius())

# Analytic continuation transports one density's p-th root onto another's.
d = density_transport(phi, psi, p=3.0)
moved = state_power(phi, 1 / 3) @ d
print("transport residual:", lp_norm(moved - state_power(psi, 1 / 3)))

# The self-polar form is the state-symmetrized inner product.
x = AlgebraElement(m2, [np.array([[1.0, 2.0], [0.0, -1.0]])])
print("s(x, x) =", selfpolar_form(phi, x, x).real, " (always >= 0)")
