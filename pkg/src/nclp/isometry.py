"""Canonical 2-isometries between L_p spaces and their classification.

A canonical map is assembled from a triple: an injective *-homomorphism pi
into the target algebra, a state-preserving conditional expectation E onto
its image, and a partial isometry w whose initial projection is pi(1).  With
a faithful reference state phi on the source, the map sends phi^{1/p} x to
w phibar^{1/p} pi(x) where phibar extends phi through pi and E.

Classification runs the reverse direction: right supports of the images of
spectral projections recover pi, polar data recovers w and phibar, modular
invariance recovers E, and a rebuild closes the loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Sequence

import numpy as np

from .algebra import (
    Algebra,
    AlgebraElement,
    AlgebraMap,
    State,
    hermitian_basis,
    homomorphism_kind,
    left_mult_matrix,
    matrix_units,
)
from .errors import (
    DataInvalid,
    ExponentUnsupported,
    NonFaithful,
    NotAnIsometry,
    NotInvariant,
    ZeroImage,
)
from .expectation import (
    ConditionalExpectation,
    Subalgebra,
    construct_expectation,
    takesaki_invariant,
)
from .lp import (
    LpMap,
    LpVector,
    amplify_map,
    conjugate_exponent,
    lp_norm,
    mazur_map,
    polar_decompose,
    state_power,
    tensor_embed,
)

METRIC_TOL = 1e-7  # accept threshold for sampled metric defects
WARN_TOL = 1e-4  # defects between these two are reported as a warn band
INJECTIVITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class IsometryData:
    """The classification data of a canonical 2-isometry."""

    source: Algebra
    target: Algebra
    pi: AlgebraMap
    w: AlgebraElement
    expectation: ConditionalExpectation
    reference_state: State

    @property
    def phibar(self) -> State:
        return self.expectation.state

    def validate(self, tol: float = 1e-6) -> None:
        if self.pi.source != self.source or self.pi.target != self.target:
            raise DataInvalid("homomorphism does not match the declared algebras")
        if not self.reference_state.faithful:
            raise NonFaithful("reference state must be faithful")
        report = homomorphism_kind(self.pi)
        if report.kind != "star_homomorphism" or not report.injective:
            raise DataInvalid(f"pi is not an injective *-homomorphism ({report.kind})")
        pi_one = self.pi(AlgebraElement.identity(self.source))
        if (self.w.adjoint() @ self.w - pi_one).frobenius() > tol:
            raise DataInvalid("w* w differs from pi(1)")
        # the preserved state must restrict through pi to the reference state
        defect = verify_state_restriction(self.phibar, self.pi, self.reference_state)
        if defect > tol:
            raise DataInvalid(f"state restriction defect {defect:.3e}")


def build_isometry(data: IsometryData, p: float) -> LpMap:
    """Assemble the canonical map phi^{1/p} x -> w phibar^{1/p} pi(x).

    The matrix is the composition of left multiplication by w phibar^{1/p},
    the homomorphism, and the inverse of left multiplication by phi^{1/p}.
    The module property T(h x) = T(h) pi(x) holds by construction.
    """
    p = float(p)
    if not (1.0 <= p < np.inf):
        raise ExponentUnsupported(f"p must lie in [1, inf), got {p}")
    data.validate()
    phi = data.reference_state
    rho_pow_inv = phi.power_element(-1.0 / p)
    out_factor = data.w @ data.phibar.power_element(1.0 / p)
    matrix = left_mult_matrix(out_factor) @ data.pi.matrix @ left_mult_matrix(rho_pow_inv)
    return LpMap(data.source, data.target, p, matrix)


def transfer_exponent(
    pi: AlgebraMap, phi: State, phibar: State, w: AlgebraElement, q: float
) -> LpMap:
    """The companion map at exponent q, phi^{1/q} x -> w phibar^{1/q} pi(x)."""
    q = float(q)
    if not (1.0 <= q < np.inf):
        raise ExponentUnsupported(f"q must lie in [1, inf), got {q}")
    if not phi.faithful:
        raise NonFaithful("reference state must be faithful")
    out_factor = w @ phibar.power_element(1.0 / q)
    matrix = left_mult_matrix(out_factor) @ pi.matrix @ left_mult_matrix(phi.power_element(-1.0 / q))
    return LpMap(pi.source, pi.target, q, matrix)


# -- extraction ----------------------------------------------------------------


def _spectral_projections(x: AlgebraElement, cluster_tol: float = 1e-8):
    """Spectral pairs (eigenvalue, projection) of a Hermitian element, with
    eigenvalue clusters merged within the tolerance."""
    alg = x.algebra
    pairs = []
    for bidx, blk in enumerate(x.data):
        w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        for i in range(w.size):
            pairs.append((float(w[i]), bidx, v[:, i]))
    pairs.sort(key=lambda t: t[0])
    scale = max(1.0, max(abs(t[0]) for t in pairs))
    groups = []
    for val, bidx, vec in pairs:
        if groups and val - groups[-1][-1][0] <= cluster_tol * scale:
            groups[-1].append((val, bidx, vec))
        else:
            groups.append([(val, bidx, vec)])
    out = []
    for g in groups:
        mean = float(np.mean([t[0] for t in g]))
        blocks = alg.zero_blocks()
        for _, bidx, vec in g:
            blocks[bidx] += np.outer(vec, vec.conj())
        out.append((mean, AlgebraElement(alg, blocks)))
    return out


def extract_pi(T: LpMap, phi: State, p: float) -> AlgebraMap:
    """Recover the underlying homomorphism from right supports.

    Each spectral projection e of each Hermitian basis element is sent to the
    right support of T(phi^{1/p} e); the map extends first real-linearly over
    spectral decompositions, then complex-linearly.  The module relation
    T(phi^{1/p} x) = T(phi^{1/p}) pi(x) is verified on the basis afterwards.
    """
    p = float(p)
    if p == 2.0:
        raise ExponentUnsupported("extraction is undefined at p = 2")
    if not phi.faithful:
        raise NonFaithful("extraction needs a faithful reference state")
    src, tgt = T.source, T.target
    if phi.algebra != src:
        raise DataInvalid("state lives on a different algebra than the map source")
    rho_pow = phi.power_element(1.0 / p)

    def image_of_projection(e: AlgebraElement) -> AlgebraElement:
        h = T(LpVector.from_element(rho_pow @ e, p))
        return polar_decompose(h).s_right

    herm_images: dict[int, AlgebraElement] = {}
    herm = hermitian_basis(src)
    for idx, x in enumerate(herm):
        img = AlgebraElement.zero(tgt)
        for val, proj in _spectral_projections(x):
            if abs(val) < 1e-12:
                continue
            img = img + val * image_of_projection(proj)
        herm_images[idx] = img

    # hermitian basis order per block: diagonals first, then (sym, asym) pairs
    cols: dict[int, np.ndarray] = {}
    pos = 0
    unit_pos = {}
    upos = 0
    for b, n in enumerate(src.blocks):
        for i in range(n):
            for j in range(n):
                unit_pos[(b, i, j)] = upos
                upos += 1
    for b, n in enumerate(src.blocks):
        diag_idx = {i: pos + i for i in range(n)}
        pos += n
        pair_idx = {}
        for i in range(n):
            for j in range(i + 1, n):
                pair_idx[(i, j)] = pos
                pos += 2
        for i in range(n):
            cols[unit_pos[(b, i, i)]] = herm_images[diag_idx[i]].vec()
        for i in range(n):
            for j in range(i + 1, n):
                sym = herm_images[pair_idx[(i, j)]]
                asym = herm_images[pair_idx[(i, j)] + 1]
                cols[unit_pos[(b, i, j)]] = ((sym - 1j * asym) * 0.5).vec()
                cols[unit_pos[(b, j, i)]] = ((sym + 1j * asym) * 0.5).vec()
    matrix = np.column_stack([cols[i] for i in range(src.total_dim)])
    pi = AlgebraMap(src, tgt, matrix)

    # verify the module relation on the unit basis
    base_image = T(LpVector.from_element(rho_pow, p))
    defect = 0.0
    for u in matrix_units(src):
        lhs = T(LpVector.from_element(rho_pow @ u, p))
        rhs = base_image @ pi(u)
        defect = max(defect, (lhs - rhs).frobenius())
    if defect > WARN_TOL:
        raise NotAnIsometry(f"module relation fails on the basis (defect {defect:.3e})")
    return pi


def extract_polar_data(T: LpMap, phi: State, p: float):
    """Polar data of the image of the reference vector: the partial isometry
    and the state carried by the modulus' p-th power."""
    h = T(state_power(phi, 1.0 / p))
    if h.frobenius() < 1e-12:
        raise ZeroImage("the image of the reference vector vanished")
    pol = polar_decompose(h)
    density = mazur_map(pol.modulus, 1.0)
    phibar = State(T.target, list(density.data), normalize=True)
    return pol.w, phibar


def verify_state_restriction(phibar: State, pi: AlgebraMap, phi: State) -> float:
    """Largest deviation of phibar(pi(x)) from phi(x) over the unit basis."""
    defect = 0.0
    for u in matrix_units(pi.source):
        defect = max(defect, abs(phibar(pi(u)) - phi(u)))
    return float(defect)


# -- metric defects --------------------------------------------------------------


def _sample_vectors(algebra: Algebra, p: float, count: int, rng) -> list[LpVector]:
    out = []
    for _ in range(count):
        blocks = [
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for n in algebra.blocks
        ]
        out.append(LpVector(algebra, p, blocks))
    return out


def isometry_defect(
    T: LpMap,
    p: float,
    *,
    sample_count: int = 60,
    seed: int = 0,
    source_weights: Sequence[float] | None = None,
    relative: bool = True,
) -> float:
    """Largest deviation |  ||T h||_p - ||h||_p  | over the unit basis and a
    seeded sample of vectors."""
    rng = np.random.default_rng(seed)
    samples = [LpVector.from_element(u, p) for u in matrix_units(T.source)]
    samples += _sample_vectors(T.source, p, sample_count, rng)
    defect = 0.0
    for h in samples:
        nh = lp_norm(h, weights=source_weights)
        if nh < 1e-14:
            continue
        d = abs(lp_norm(T(h)) - nh)
        defect = max(defect, d / nh if relative else d)
    return float(defect)


def structured_witnesses(algebra: Algebra, p: float, n: int = 2) -> list[LpVector]:
    """Matrix-unit grid witnesses Sigma e_ij (x) u_ij in the n-fold
    amplification; these detect maps that preserve norms but not the
    multiplicative structure."""
    out = []
    for b, nb in enumerate(algebra.blocks):
        if nb < 2:
            continue
        for k in range(nb):
            for l in range(k + 1, nb):
                big = None
                for a, qa in enumerate((k, l)):
                    for c, qc in enumerate((k, l)):
                        e = np.zeros((n, n), dtype=complex)
                        e[a, c] = 1.0
                        blocks = algebra.zero_blocks()
                        blocks[b][qa, qc] = 1.0
                        term = tensor_embed(e, AlgebraElement(algebra, blocks), n, p)
                        big = term if big is None else big + term
                out.append(big)
    # row and column witnesses across blocks, for abelian parts
    units = matrix_units(algebra)
    cap = 12
    for i in range(min(len(units), cap)):
        for j in range(i + 1, min(len(units), cap)):
            e11 = np.zeros((n, n), dtype=complex)
            e11[0, 0] = 1.0
            e12 = np.zeros((n, n), dtype=complex)
            e12[0, 1] = 1.0
            out.append(tensor_embed(e11, units[i], n, p) + tensor_embed(e12, units[j], n, p))
            e21 = np.zeros((n, n), dtype=complex)
            e21[1, 0] = 1.0
            out.append(tensor_embed(e11, units[i], n, p) + tensor_embed(e21, units[j], n, p))
    return out


def two_isometry_defect(
    T: LpMap,
    p: float,
    *,
    n: int = 2,
    sample_count: int = 60,
    seed: int = 0,
    source_weights: Sequence[float] | None = None,
    relative: bool = False,
) -> float:
    """Largest norm defect of the n-fold amplification over the structured
    matrix-unit witnesses and a seeded sample."""
    big = amplify_map(T, n)
    rng = np.random.default_rng(seed)
    samples = structured_witnesses(T.source, p, n)
    samples += _sample_vectors(big.source, p, sample_count, rng)
    defect = 0.0
    for X in samples:
        nx = lp_norm(X, weights=source_weights)
        if nx < 1e-14:
            continue
        d = abs(lp_norm(big(X)) - nx)
        defect = max(defect, d / nx if relative else d)
    return float(defect)


def amplified_norm_defect(
    T: LpMap, X: LpVector, *, n: int = 2, source_weights: Sequence[float] | None = None
) -> float:
    """Norm defect |  ||(id (x) T) X|| - ||X||  | at one amplified vector."""
    big = amplify_map(T, n)
    return float(abs(lp_norm(big(X)) - lp_norm(X, weights=source_weights)))


# -- star adjoint duals -----------------------------------------------------------


def star_adjoint_dual(T: LpMap, p: float) -> LpMap:
    """The star adjoint of the trace dual, k -> T'(k*)*, as a map at the
    conjugate exponent.  In the fixed vectorization this is the Hermitian
    adjoint of the matrix."""
    p = float(p)
    if p <= 1.0:
        raise ExponentUnsupported("the dual at p = 1 lands in the algebra, not in an L_p space")
    return LpMap(T.target, T.source, conjugate_exponent(p), T.matrix.conj().T)


# -- classification ---------------------------------------------------------------


@dataclass
class ClassificationReport:
    """Result of the classification pipeline with its named defects."""

    verdict: str  # accept | reject
    defects: dict
    data: IsometryData | None = None
    failing_stage: str | None = None
    warnings: list = dataclass_field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"


def classify(
    T: LpMap,
    phi: State,
    p: float,
    *,
    metric_tol: float = METRIC_TOL,
    warn_tol: float = WARN_TOL,
    seed: int = 0,
) -> ClassificationReport:
    """Decide whether a map is a canonical 2-isometry and recover its data.

    Pipeline: sampled isometry and amplified-isometry defects; homomorphism
    extraction and certification; polar data; state restriction; modular
    invariance and the expectation on the image; rebuild and compare.
    The verdict is accept exactly when every defect clears its threshold.
    """
    p = float(p)
    if p == 2.0:
        raise ExponentUnsupported("classification is undefined at p = 2")
    if not phi.faithful:
        raise NonFaithful("classification needs a faithful reference state")
    defects: dict = {}
    warnings: list = []

    def reject(stage: str) -> ClassificationReport:
        return ClassificationReport(
            verdict="reject", defects=defects, data=None, failing_stage=stage, warnings=warnings
        )

    # stage 1: metric defects; only a failed base isometry rejects here, a
    # bad amplified defect is diagnosed by the multiplicativity certificate
    defects["isometry"] = isometry_defect(T, p, seed=seed)
    defects["two_isometry"] = two_isometry_defect(T, p, n=2, seed=seed, relative=True)
    algebraic_tol = max(T.source.atol, T.target.atol) * 10
    if defects["isometry"] > metric_tol:
        if defects["isometry"] < warn_tol:
            warnings.append(f"isometry defect {defects['isometry']:.3e} in the warn band")
        return reject("isometry")

    # stage 2: homomorphism extraction and certification
    try:
        pi = extract_pi(T, phi, p)
    except NotAnIsometry:
        defects["multiplicativity"] = float("inf")
        return reject("multiplicativity")
    report = homomorphism_kind(pi)
    defects["multiplicativity"] = report.mult_defect
    if report.kind != "star_homomorphism" or not report.injective:
        return reject("multiplicativity")

    # stage 3: polar data
    try:
        w, phibar = extract_polar_data(T, phi, p)
    except ZeroImage:
        return reject("polar")

    # stage 4: state restriction
    defects["state_restriction"] = verify_state_restriction(phibar, pi, phi)
    if defects["state_restriction"] > algebraic_tol:
        return reject("state_restriction")

    # stage 5: invariance of the image and the expectation
    image = Subalgebra.from_map_image(pi)
    inv = takesaki_invariant(image, phibar)
    defects["invariance"] = inv.defect
    try:
        E = construct_expectation(image, phibar)
    except (NotInvariant, NonFaithful):
        return reject("expectation")

    # stage 6: rebuild and compare on the reference basis
    data = IsometryData(
        source=T.source,
        target=T.target,
        pi=pi,
        w=w,
        expectation=E,
        reference_state=phi,
    )
    try:
        rebuilt = build_isometry(data, p)
    except DataInvalid:
        return reject("reconstruction")
    rho_pow = phi.power_element(1.0 / p)
    recon = 0.0
    for u in matrix_units(T.source):
        h = LpVector.from_element(rho_pow @ u, p)
        scale = max(lp_norm(h), 1e-14)
        recon = max(recon, lp_norm(T(h) - rebuilt(h)) / scale)
    defects["reconstruction"] = recon
    if recon > metric_tol:
        if recon < warn_tol:
            warnings.append(f"reconstruction defect {recon:.3e} in the warn band")
        return reject("reconstruction")

    if defects["two_isometry"] > metric_tol:
        if defects["two_isometry"] < warn_tol:
            warnings.append(
                f"two_isometry defect {defects['two_isometry']:.3e} in the warn band"
            )
        return reject("two_isometry")

    return ClassificationReport(
        verdict="accept", defects=defects, data=data, failing_stage=None, warnings=warnings
    )
