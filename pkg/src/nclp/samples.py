"""Seeded generators for test instances: random elements, structured
embeddings with invariant states, subalgebra inclusions, and tracial-source
triples.

Everything is driven by an integer seed through numpy Generators, so any
instance can be reproduced exactly from its seed.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    Algebra,
    AlgebraElement,
    AlgebraMap,
    State,
    matrix_units,
)
from .errors import DataInvalid
from .expectation import Subalgebra, construct_expectation, takesaki_invariant
from .isometry import IsometryData
from .lp import LpVector
from .yeadon import YeadonTriple


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_element(algebra: Algebra, rng, hermitian: bool = False) -> AlgebraElement:
    blocks = []
    for n in algebra.blocks:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if hermitian:
            g = (g + g.conj().T) / 2
        blocks.append(g)
    return AlgebraElement(algebra, blocks)


def random_positive(algebra: Algebra, rng, floor: float = 0.05) -> AlgebraElement:
    """Positive definite element with eigenvalues bounded away from zero."""
    blocks = []
    for n in algebra.blocks:
        v = haar_unitary(n, rng)
        eigs = rng.uniform(floor, 1.0 + floor, size=n)
        blocks.append((v * eigs) @ v.conj().T)
    return AlgebraElement(algebra, blocks)


def random_lp_vector(algebra: Algebra, p: float, rng) -> LpVector:
    return LpVector.from_element(random_element(algebra, rng), p)


def random_unitary_element(algebra: Algebra, rng) -> AlgebraElement:
    return AlgebraElement(algebra, [haar_unitary(n, rng) for n in algebra.blocks])


def well_conditioned_state(algebra: Algebra, rng) -> State:
    """Faithful state with moderate condition number, for tight tolerances."""
    blocks = []
    for n in algebra.blocks:
        v = haar_unitary(n, rng)
        eigs = rng.uniform(0.35, 1.8, size=n)
        blocks.append((v * eigs) @ v.conj().T)
    return State(algebra, blocks, normalize=True)


# -- structured embeddings with invariant corner states --------------------------

# plans: (source blocks, [per target block: ([(source index, multiplicity)...], pad)])
_EMBED_MENU: list[tuple[tuple[int, ...], list]] = [
    ((2,), [([(0, 1)], 0)]),
    ((2,), [([(0, 1)], 1)]),
    ((2,), [([(0, 2)], 0)]),
    ((2,), [([(0, 1)], 0), ([(0, 1)], 1)]),
    ((1, 1), [([(0, 1), (1, 1)], 0)]),
    ((1, 1), [([(0, 1), (1, 2)], 1)]),
    ((2, 1), [([(0, 1)], 0), ([(1, 1)], 1)]),
    ((3,), [([(0, 1)], 1)]),
    ((2, 1), [([(0, 1), (1, 1)], 1)]),
    ((1, 1, 2), [([(2, 1)], 0), ([(0, 1), (1, 1)], 0)]),
    ((2,), [([(0, 1)], 0), ([(0, 1)], 0)]),
    ((2, 2), [([(0, 1)], 0), ([(1, 1)], 2)]),
]


def _plan_layout(source: Algebra, plan):
    """Per target block: the slot layout [(source index or None, copies)] and size."""
    sizes = []
    for assignments, pad in plan:
        m = sum(source.blocks[b] * mult for b, mult in assignments) + pad
        sizes.append(m)
    return tuple(sizes)


def random_isometry_data(
    seed: int,
    source_blocks: tuple[int, ...] | None = None,
    *,
    plan=None,
    w_positive: bool | None = None,
) -> IsometryData:
    """A seeded canonical-isometry instance.

    The embedding places each source block into target blocks with chosen
    multiplicities and optional unused corners, conjugated by Haar unitaries.
    The preserved state is assembled on the image's support so that the image
    is stable under its modular flow; the reference state is its restriction
    through the embedding.
    """
    rng = rng_for(seed)
    if plan is None:
        menu_src, plan = _EMBED_MENU[seed % len(_EMBED_MENU)]
        if source_blocks is None:
            source_blocks = menu_src
    source = Algebra(tuple(source_blocks))
    target = Algebra(_plan_layout(source, plan))
    if w_positive is None:
        w_positive = bool(seed % 3 == 0)

    conjugators = [haar_unitary(m, rng) for m in target.blocks]
    # positive factors shared across every occurrence of a source block, so
    # that flow commutators land back in the image
    a_factors = []
    for n in source.blocks:
        v = haar_unitary(n, rng)
        eigs = rng.uniform(0.35, 1.8, size=n)
        a_factors.append((v * eigs) @ v.conj().T)

    def embed_element(x: AlgebraElement) -> AlgebraElement:
        blocks = []
        for cidx, (assignments, pad) in enumerate(plan):
            m = target.blocks[cidx]
            mat = np.zeros((m, m), dtype=complex)
            off = 0
            for b, mult in assignments:
                n = source.blocks[b]
                piece = np.kron(np.eye(mult), x.data[b])
                mat[off : off + mult * n, off : off + mult * n] = piece
                off += mult * n
            u = conjugators[cidx]
            blocks.append(u @ mat @ u.conj().T)
        return AlgebraElement(target, blocks)

    pi = AlgebraMap.from_callable(source, target, embed_element)

    density_blocks = []
    for cidx, (assignments, pad) in enumerate(plan):
        m = target.blocks[cidx]
        mat = np.zeros((m, m), dtype=complex)
        off = 0
        for b, mult in assignments:
            n = source.blocks[b]
            vd = haar_unitary(mult, rng)
            d_eigs = rng.uniform(0.35, 1.8, size=mult)
            d_factor = (vd * d_eigs) @ vd.conj().T
            mat[off : off + mult * n, off : off + mult * n] = np.kron(d_factor, a_factors[b])
            off += mult * n
        u = conjugators[cidx]
        density_blocks.append(u @ mat @ u.conj().T)
    phibar = State(target, density_blocks, normalize=True)

    image = Subalgebra.from_map_image(pi)
    expectation = construct_expectation(image, phibar)

    units = matrix_units(source)
    rho_blocks = source.zero_blocks()
    idx = 0
    for b, n in enumerate(source.blocks):
        for i in range(n):
            for j in range(n):
                rho_blocks[b][j, i] = phibar(pi(units[idx]))
                idx += 1
    phi = State(source, rho_blocks, normalize=True)

    pi_one = pi(AlgebraElement.identity(source))
    if w_positive:
        w = pi_one
    else:
        u0 = random_unitary_element(target, rng)
        w = u0 @ pi_one
    return IsometryData(
        source=source,
        target=target,
        pi=pi,
        w=w,
        expectation=expectation,
        reference_state=phi,
    )


# -- subalgebra inclusions ---------------------------------------------------------


def diagonal_subalgebra(parent: Algebra, conjugator: AlgebraElement | None = None) -> Subalgebra:
    basis = []
    for b, n in enumerate(parent.blocks):
        for k in range(n):
            blocks = parent.zero_blocks()
            blocks[b][k, k] = 1.0
            basis.append(AlgebraElement(parent, blocks))
    if conjugator is not None:
        basis = [conjugator @ a @ conjugator.adjoint() for a in basis]
    return Subalgebra(parent, basis, validate=False)


def _pattern_basis(m: int, pattern: str) -> list[np.ndarray]:
    """Unital *-subalgebra patterns inside one full block M_m."""
    mats = []
    if pattern == "diagonal":
        for k in range(m):
            e = np.zeros((m, m), dtype=complex)
            e[k, k] = 1.0
            mats.append(e)
    elif pattern == "split":
        a = m // 2
        for block, (lo, hi) in enumerate(((0, a), (a, m))):
            for i in range(lo, hi):
                for j in range(lo, hi):
                    e = np.zeros((m, m), dtype=complex)
                    e[i, j] = 1.0
                    mats.append(e)
    elif pattern == "tensor":
        # x (x) identity over a divisor split m = a * k
        a = 2
        k = m // a
        if a * k != m:
            raise DataInvalid(f"tensor pattern needs an even dimension, got {m}")
        for i in range(a):
            for j in range(a):
                e = np.zeros((a, a), dtype=complex)
                e[i, j] = 1.0
                mats.append(np.kron(e, np.eye(k)))
    elif pattern == "scalars":
        mats.append(np.eye(m, dtype=complex))
    elif pattern == "full":
        for i in range(m):
            for j in range(m):
                e = np.zeros((m, m), dtype=complex)
                e[i, j] = 1.0
                mats.append(e)
    else:
        raise DataInvalid(f"unknown pattern {pattern!r}")
    return mats


_INCLUSION_MENU = [
    (2, "diagonal"),
    (3, "diagonal"),
    (4, "diagonal"),
    (3, "split"),
    (4, "split"),
    (4, "tensor"),
    (2, "scalars"),
    (3, "scalars"),
]


def patterned_inclusion(seed: int, pattern: str | None = None, m: int | None = None):
    """A unital subalgebra of one full block, conjugated by a Haar unitary.

    Returns (subalgebra, pattern, m, conjugator).
    """
    rng = rng_for(seed)
    if pattern is None or m is None:
        m, pattern = _INCLUSION_MENU[seed % len(_INCLUSION_MENU)]
    parent = Algebra((m,))
    u = AlgebraElement(parent, [haar_unitary(m, rng)])
    basis = [u @ AlgebraElement(parent, [mat]) @ u.adjoint() for mat in _pattern_basis(m, pattern)]
    return Subalgebra(parent, basis, validate=False), pattern, m, u


def random_invariant_inclusion(seed: int):
    """A unital inclusion together with a faithful state whose modular flow
    preserves it."""
    A, pattern, m, u = patterned_inclusion(seed)
    rng = rng_for(seed + 10_000)
    parent = A.parent
    if pattern == "diagonal":
        mat = np.diag(rng.uniform(0.35, 1.8, size=m)).astype(complex)
    elif pattern == "split":
        a = m // 2
        mat = np.zeros((m, m), dtype=complex)
        for lo, hi in ((0, a), (a, m)):
            k = hi - lo
            v = haar_unitary(k, rng)
            mat[lo:hi, lo:hi] = (v * rng.uniform(0.35, 1.8, size=k)) @ v.conj().T
    elif pattern == "tensor":
        a, k = 2, m // 2
        va = haar_unitary(a, rng)
        vk = haar_unitary(k, rng)
        pa = (va * rng.uniform(0.35, 1.8, size=a)) @ va.conj().T
        pk = (vk * rng.uniform(0.35, 1.8, size=k)) @ vk.conj().T
        mat = np.kron(pa, pk)
    else:  # scalars or full: every faithful state works
        v = haar_unitary(m, rng)
        mat = (v * rng.uniform(0.35, 1.8, size=m)) @ v.conj().T
    rho = u.data[0] @ mat @ u.data[0].conj().T
    state = State(parent, [rho], normalize=True)
    check = takesaki_invariant(A, state)
    if not check.invariant:
        raise DataInvalid(f"constructed state failed invariance ({check.defect:.3e})")
    return A, state


def random_noninvariant_inclusion(seed: int, min_defect: float = 0.3):
    """A unital inclusion with a generic faithful state that moves it."""
    for attempt in range(8):
        idx = (seed + attempt) % len(_INCLUSION_MENU)
        m, pattern = _INCLUSION_MENU[idx]
        if pattern in ("scalars", "full"):
            continue  # always invariant
        A, _, m, _ = patterned_inclusion(seed + attempt, pattern, m)
        rng = rng_for(seed + 20_000 + attempt)
        state = well_conditioned_state(A.parent, rng)
        check = takesaki_invariant(A, state)
        if check.defect > min_defect:
            return A, state
    raise DataInvalid("could not find a noninvariant inclusion for this seed")


# -- tracial-source triples ----------------------------------------------------------


def transpose_triple(n: int = 2, seed: int | None = None) -> tuple[YeadonTriple, tuple]:
    """The transpose on one full block: Jordan but not multiplicative.

    Uses the plain trace (unit weights) and B = 1 so that amplified norm
    defects take their textbook values.
    """
    source = Algebra((n,))
    target = Algebra((n,))

    def transpose(x: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(target, [x.data[0].T])

    J = AlgebraMap.from_callable(source, target, transpose)
    one = AlgebraElement.identity(target)
    w = one
    if seed is not None:
        w = random_unitary_element(target, rng_for(seed))
    B = LpVector.from_element(one, 1.0)
    return YeadonTriple(J=J, w=w, B=B), (1.0,)


_YEADON_MENU = [
    # per source block: (size, branch, multiplicity, pad)
    [(2, "mult", 1, 0)],
    [(2, "transpose", 1, 0)],
    [(2, "mult", 2, 0)],
    [(2, "transpose", 1, 1)],
    [(1, "mult", 2, 0), (2, "transpose", 1, 0)],
    [(2, "mult", 1, 1), (1, "mult", 1, 0)],
    [(3, "transpose", 1, 0)],
    [(2, "transpose", 2, 0)],
]


def random_yeadon_triple(seed: int, p: float, spec=None):
    """A seeded triple with one target block per source block.

    Each branch embeds the source block with a multiplicity (transposed or
    not), a commuting positive part acting on the multiplicity factor, and an
    optional unused corner.  Returns (triple, trace_weights) where the
    weights close the trace-matching condition at the given exponent.
    """
    rng = rng_for(seed)
    if spec is None:
        spec = _YEADON_MENU[seed % len(_YEADON_MENU)]
    source = Algebra(tuple(s[0] for s in spec))
    target = Algebra(tuple(s[0] * s[2] + s[3] for s in spec))
    conjugators = [haar_unitary(m, rng) for m in target.blocks]
    d_factors = [rng.uniform(0.5, 1.5, size=mult) for _, _, mult, _ in spec]

    def jmap(x: AlgebraElement) -> AlgebraElement:
        blocks = []
        for bidx, (size, branch, mult, pad) in enumerate(spec):
            m = target.blocks[bidx]
            mat = np.zeros((m, m), dtype=complex)
            piece = x.data[bidx].T if branch == "transpose" else x.data[bidx]
            mat[: size * mult, : size * mult] = np.kron(np.eye(mult), piece)
            u = conjugators[bidx]
            blocks.append(u @ mat @ u.conj().T)
        return AlgebraElement(target, blocks)

    J = AlgebraMap.from_callable(source, target, jmap)
    b_blocks = []
    for bidx, (size, branch, mult, pad) in enumerate(spec):
        m = target.blocks[bidx]
        mat = np.zeros((m, m), dtype=complex)
        mat[: size * mult, : size * mult] = np.kron(np.diag(d_factors[bidx]), np.eye(size))
        u = conjugators[bidx]
        b_blocks.append(u @ mat @ u.conj().T)
    B = LpVector.from_element(AlgebraElement(target, b_blocks), float(p))
    j_one = J(AlgebraElement.identity(source))
    u0 = random_unitary_element(target, rng)
    w = u0 @ j_one if seed % 2 else j_one
    weights = tuple(float(np.sum(d**p)) for d in d_factors)
    return YeadonTriple(J=J, w=w, B=B), weights
