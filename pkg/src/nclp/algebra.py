"""Finite-dimensional von Neumann algebras as direct sums of matrix blocks.

An algebra is a direct sum of full complex matrix blocks M_{n_1} + ... + M_{n_B}.
Elements, states, and linear maps are stored blockwise.  The normative
vectorization used by every dense map matrix in this package concatenates the
blocks in order, each flattened row-major.

All values are immutable after construction and all operations are pure, so
everything here is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyBlocks,
    NonPositiveDensity,
    NonPositiveDim,
    ShapeMismatch,
)

ATOL_BASE = 1e-9
EPS_FAITHFUL = 1e-8


@dataclass(frozen=True)
class Algebra:
    """Direct sum of full matrix blocks, given by the block dimensions."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise EmptyBlocks("an algebra needs at least one block")
        if any((not isinstance(n, (int, np.integer))) or n < 1 for n in self.blocks):
            raise NonPositiveDim(f"block dimensions must be positive integers: {self.blocks}")
        object.__setattr__(self, "blocks", tuple(int(n) for n in self.blocks))

    @property
    def total_dim(self) -> int:
        """Dimension of the algebra as a vector space, sum of n_b^2."""
        return int(sum(n * n for n in self.blocks))

    @property
    def matrix_dim(self) -> int:
        """Size of the underlying Hilbert space, sum of n_b."""
        return int(sum(self.blocks))

    @property
    def atol(self) -> float:
        """Absolute tolerance used for algebraic identities at this size."""
        return ATOL_BASE * max(1, self.total_dim)

    def offsets(self) -> list[int]:
        offs, acc = [], 0
        for n in self.blocks:
            offs.append(acc)
            acc += n * n
        return offs

    def zero_blocks(self) -> list[np.ndarray]:
        return [np.zeros((n, n), dtype=complex) for n in self.blocks]


def make_algebra(blocks: Sequence[int]) -> Algebra:
    """Build the direct sum of full matrix blocks with the given dimensions."""
    return Algebra(tuple(blocks))


def _as_block_data(algebra: Algebra, data: Iterable[np.ndarray]) -> tuple[np.ndarray, ...]:
    mats = []
    data = list(data)
    if len(data) != len(algebra.blocks):
        raise ShapeMismatch(f"expected {len(algebra.blocks)} blocks, got {len(data)}")
    for n, mat in zip(algebra.blocks, data):
        arr = np.array(mat, dtype=complex)
        if arr.shape != (n, n):
            raise ShapeMismatch(f"block of shape {arr.shape} does not match dimension {n}")
        arr.setflags(write=False)
        mats.append(arr)
    return tuple(mats)


class AlgebraElement:
    """A blockwise matrix, the generic element of an algebra.

    The same storage carries bounded operators and L_p vectors; only the role
    differs.  Instances are immutable.
    """

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: Algebra, data: Iterable[np.ndarray]):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "data", _as_block_data(algebra, data))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, algebra: Algebra) -> "AlgebraElement":
        return cls(algebra, algebra.zero_blocks())

    @classmethod
    def identity(cls, algebra: Algebra) -> "AlgebraElement":
        return cls(algebra, [np.eye(n, dtype=complex) for n in algebra.blocks])

    @classmethod
    def from_vec(cls, algebra: Algebra, vec: np.ndarray) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.size != algebra.total_dim:
            raise ShapeMismatch(f"vector length {vec.size} != total_dim {algebra.total_dim}")
        blocks = []
        for off, n in zip(algebra.offsets(), algebra.blocks):
            blocks.append(vec[off : off + n * n].reshape(n, n))
        return cls(algebra, blocks)

    def vec(self) -> np.ndarray:
        """Normative vectorization: blocks in order, each row-major."""
        return np.concatenate([b.reshape(-1) for b in self.data])

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, AlgebraElement):
            if other.algebra != self.algebra:
                raise ShapeMismatch("elements live on different algebras")
            return other
        return None

    def __add__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return type(self)._raw(self.algebra, [a + b for a, b in zip(self.data, rhs.data)])

    def __sub__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return type(self)._raw(self.algebra, [a - b for a, b in zip(self.data, rhs.data)])

    def __neg__(self):
        return type(self)._raw(self.algebra, [-a for a in self.data])

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return type(self)._raw(self.algebra, [scalar * a for a in self.data])
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return AlgebraElement._raw(self.algebra, [a @ b for a, b in zip(self.data, rhs.data)])

    @classmethod
    def _raw(cls, algebra, blocks):
        # internal fast path; blocks already well-shaped ndarrays
        inst = object.__new__(AlgebraElement)
        object.__setattr__(inst, "algebra", algebra)
        mats = []
        for arr in blocks:
            arr = np.asarray(arr, dtype=complex)
            arr.setflags(write=False)
            mats.append(arr)
        object.__setattr__(inst, "data", tuple(mats))
        return inst

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement._raw(self.algebra, [b.conj().T for b in self.data])

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    # -- functionals --------------------------------------------------------

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.data))

    def frobenius(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(b) ** 2 for b in self.data)))

    def sup_norm(self) -> float:
        return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in self.data)

    def is_hermitian(self, tol: float | None = None) -> bool:
        tol = self.algebra.atol if tol is None else tol
        return (self - self.adjoint()).frobenius() <= tol

    def allclose(self, other: "AlgebraElement", tol: float | None = None) -> bool:
        tol = self.algebra.atol if tol is None else tol
        return (self - other).frobenius() <= tol

    def __repr__(self):
        return f"AlgebraElement(blocks={self.algebra.blocks})"


class Projection(AlgebraElement):
    """An element that is idempotent and self-adjoint within tolerance."""

    def __init__(self, algebra: Algebra, data, tol: float | None = None):
        super().__init__(algebra, data)
        tol = algebra.atol if tol is None else tol
        if (self @ self - self).frobenius() > tol:
            raise ShapeMismatch("not idempotent within tolerance")
        if (self - self.adjoint()).frobenius() > tol:
            raise ShapeMismatch("not self-adjoint within tolerance")

    def rank(self) -> int:
        return int(round(self.trace().real))

    def leq(self, other: AlgebraElement, tol: float | None = None) -> bool:
        """Projection order: self <= other iff other @ self == self."""
        tol = self.algebra.atol if tol is None else tol
        return (other @ self - self).frobenius() <= 10 * tol


def matrix_units(algebra: Algebra) -> list[AlgebraElement]:
    """All matrix units e_ij per block, in vectorization order."""
    units = []
    for b, n in enumerate(algebra.blocks):
        for i in range(n):
            for j in range(n):
                blocks = algebra.zero_blocks()
                blocks[b][i, j] = 1.0
                units.append(AlgebraElement(algebra, blocks))
    return units


def hermitian_basis(algebra: Algebra) -> list[AlgebraElement]:
    """A real-spanning family of Hermitian elements, blockwise."""
    basis = []
    for b, n in enumerate(algebra.blocks):
        for i in range(n):
            blocks = algebra.zero_blocks()
            blocks[b][i, i] = 1.0
            basis.append(AlgebraElement(algebra, blocks))
        for i in range(n):
            for j in range(i + 1, n):
                sym = algebra.zero_blocks()
                sym[b][i, j] = 1.0
                sym[b][j, i] = 1.0
                basis.append(AlgebraElement(algebra, sym))
                asym = algebra.zero_blocks()
                asym[b][i, j] = 1.0j
                asym[b][j, i] = -1.0j
                basis.append(AlgebraElement(algebra, asym))
    return basis


# -- states ------------------------------------------------------------------


class State:
    """A positive blockwise density matrix with unit trace.

    The eigendecomposition is computed once at construction; all functional
    calculus (powers, logs, complex powers) reuses it.
    """

    __slots__ = ("algebra", "_data", "_eigvals", "_eigvecs", "faithful")

    def __init__(self, algebra: Algebra, data, *, normalize: bool = False):
        mats = _as_block_data(algebra, data)
        herm_defect = max(float(np.linalg.norm(m - m.conj().T)) for m in mats)
        if herm_defect > 100 * algebra.atol:
            raise NonPositiveDensity(f"density not Hermitian, defect {herm_defect:.3e}")
        mats = tuple((m + m.conj().T) / 2 for m in mats)
        eigvals, eigvecs = [], []
        for m in mats:
            w, v = np.linalg.eigh(m)
            eigvals.append(w)
            eigvecs.append(v)
        low = min(float(w.min()) for w in eigvals)
        if low < -100 * algebra.atol:
            raise NonPositiveDensity(f"negative eigenvalue {low:.3e}")
        eigvals = [np.clip(w, 0.0, None) for w in eigvals]
        total = float(sum(w.sum() for w in eigvals))
        if normalize:
            if total <= 0:
                raise NonPositiveDensity("density has zero trace")
            eigvals = [w / total for w in eigvals]
            mats = tuple(m / total for m in mats)
        else:
            if abs(total - 1.0) > 100 * algebra.atol:
                raise NonPositiveDensity(f"trace {total} != 1")
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "_data", mats)
        object.__setattr__(self, "_eigvals", tuple(w for w in eigvals))
        object.__setattr__(self, "_eigvecs", tuple(v for v in eigvecs))
        object.__setattr__(self, "faithful", bool(min(float(w.min()) for w in eigvals) > EPS_FAITHFUL))

    def __setattr__(self, name, value):
        raise AttributeError("State is immutable")

    @property
    def density(self) -> AlgebraElement:
        return AlgebraElement._raw(self.algebra, list(self._data))

    def __call__(self, x: AlgebraElement) -> complex:
        """Evaluate the state: phi(x) = Tr(rho x)."""
        if x.algebra != self.algebra:
            raise ShapeMismatch("element lives on a different algebra")
        return complex(sum(np.trace(r @ b) for r, b in zip(self._data, x.data)))

    def _apply_eig(self, fn: Callable[[np.ndarray], np.ndarray]) -> list[np.ndarray]:
        out = []
        for w, v in zip(self._eigvals, self._eigvecs):
            out.append((v * fn(w)) @ v.conj().T)
        return out

    def _support_threshold(self) -> float:
        top = max(float(w.max()) for w in self._eigvals)
        return EPS_FAITHFUL * top

    def power_element(self, alpha: float) -> AlgebraElement:
        """rho^alpha by spectral calculus (0^alpha = 0 for alpha > 0)."""
        thr = self._support_threshold()

        def f(w):
            out = np.zeros_like(w)
            mask = w > thr
            out[mask] = w[mask] ** alpha
            if alpha <= 0:
                return out  # pseudo-inverse flavor on the support
            out[~mask] = np.clip(w[~mask], 0, None) ** alpha
            return out

        return AlgebraElement._raw(self.algebra, self._apply_eig(f))

    def complex_power(self, z: complex) -> AlgebraElement:
        """rho^z on the support of rho, zero on its kernel."""
        thr = self._support_threshold()

        def f(w):
            out = np.zeros(w.shape, dtype=complex)
            mask = w > thr
            out[mask] = np.exp(z * np.log(w[mask]))
            return out

        return AlgebraElement._raw(self.algebra, self._apply_eig(f))

    def log_pseudo(self) -> AlgebraElement:
        """log(rho) on the support, zero on the kernel."""
        thr = self._support_threshold()

        def f(w):
            out = np.zeros_like(w)
            mask = w > thr
            out[mask] = np.log(w[mask])
            return out

        return AlgebraElement._raw(self.algebra, self._apply_eig(f))

    def support(self) -> Projection:
        thr = self._support_threshold()
        blocks = [
            (v[:, w > thr] @ v[:, w > thr].conj().T)
            for w, v in zip(self._eigvals, self._eigvecs)
        ]
        return Projection(self.algebra, blocks)

    def min_eig(self) -> float:
        return min(float(w.min()) for w in self._eigvals)

    def __repr__(self):
        return f"State(blocks={self.algebra.blocks}, faithful={self.faithful})"


def random_faithful_state(algebra: Algebra, seed: int, min_eig: float = EPS_FAITHFUL) -> State:
    """Deterministic faithful state: square a seeded Hermitian Gaussian,
    shift by the faithfulness floor, and normalize.

    `min_eig` can be raised to produce better-conditioned densities.
    """
    rng = np.random.default_rng(seed)
    blocks = []
    for n in algebra.blocks:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2
        blocks.append(h @ h + min_eig * np.eye(n))
    state = State(algebra, blocks, normalize=True)
    if state.min_eig() <= EPS_FAITHFUL:
        # normalization can in principle push the floor below the faithfulness
        # threshold; blend with the trace state until it clears
        mix = 100 * EPS_FAITHFUL * algebra.matrix_dim
        blocks = [
            (1 - mix) * b + mix * np.eye(n) / algebra.matrix_dim
            for b, n in zip(state._data, algebra.blocks)
        ]
        state = State(algebra, blocks, normalize=True)
    return state


# -- linear maps --------------------------------------------------------------


class AlgebraMap:
    """A linear map between algebras, stored as a dense matrix acting on the
    normative vectorization."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Algebra, target: Algebra, matrix: np.ndarray):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (target.total_dim, source.total_dim):
            raise ShapeMismatch(
                f"map matrix shape {matrix.shape} != "
                f"({target.total_dim}, {source.total_dim})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraMap is immutable")

    @classmethod
    def identity(cls, algebra: Algebra) -> "AlgebraMap":
        return cls(algebra, algebra, np.eye(algebra.total_dim, dtype=complex))

    @classmethod
    def from_callable(
        cls, source: Algebra, target: Algebra, fn: Callable[[AlgebraElement], AlgebraElement]
    ) -> "AlgebraMap":
        cols = []
        for u in matrix_units(source):
            cols.append(fn(u).vec())
        return cls(source, target, np.column_stack(cols))

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        if x.algebra != self.source:
            raise ShapeMismatch("element does not live on the source algebra")
        return AlgebraElement.from_vec(self.target, self.matrix @ x.vec())

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """self after other."""
        if other.target != self.source:
            raise ShapeMismatch("composition shapes do not match")
        return AlgebraMap(other.source, self.target, self.matrix @ other.matrix)

    def min_singular_value(self) -> float:
        return float(np.linalg.svd(self.matrix, compute_uv=False)[-1])

    def __repr__(self):
        return f"AlgebraMap({self.source.blocks} -> {self.target.blocks})"


def left_mult_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of x -> a x on vectorized coordinates (row-major blocks)."""
    mats = [np.kron(b, np.eye(n)) for b, n in zip(a.data, a.algebra.blocks)]
    return _block_diag(mats)


def right_mult_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of x -> x a on vectorized coordinates."""
    mats = [np.kron(np.eye(n), b.T) for b, n in zip(a.data, a.algebra.blocks)]
    return _block_diag(mats)


def transpose_permutation(algebra: Algebra) -> np.ndarray:
    """Permutation matrix S with S vec(x) = vec(x^T); also the matrix of the
    bilinear trace pairing tr(xy) = vec(x)^T S vec(y)."""
    dim = algebra.total_dim
    S = np.zeros((dim, dim))
    for off, n in zip(algebra.offsets(), algebra.blocks):
        for i in range(n):
            for j in range(n):
                S[off + i * n + j, off + j * n + i] = 1.0
    return S


def _block_diag(mats: list[np.ndarray]) -> np.ndarray:
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total), dtype=complex)
    acc = 0
    for m in mats:
        k = m.shape[0]
        out[acc : acc + k, acc : acc + k] = m
        acc += k
    return out


def conjugation_map(u: AlgebraElement) -> AlgebraMap:
    """Ad_u : x -> u x u* as an AlgebraMap on u's algebra."""
    alg = u.algebra
    return AlgebraMap(alg, alg, left_mult_matrix(u) @ right_mult_matrix(u.adjoint()))


# -- homomorphism classification ----------------------------------------------


@dataclass(frozen=True)
class HomomorphismReport:
    """Defect report for the algebraic classification of a linear map."""

    kind: str  # star_homomorphism | jordan_only | neither
    star_defect: float
    jordan_defect: float
    mult_defect: float
    injectivity: float  # smallest singular value of the map matrix

    @property
    def injective(self) -> bool:
        return self.injectivity > 1e-6


def homomorphism_kind(F: AlgebraMap, tol: float | None = None) -> HomomorphismReport:
    """Classify a linear map as *-homomorphism, Jordan-only, or neither.

    Multiplicativity and the Jordan identity are bilinear in their arguments,
    so checking all pairs of matrix units decides them on the whole algebra.
    The Jordan identity on squares is recovered from the symmetrized product
    by polarization.
    """
    if F.matrix.shape != (F.target.total_dim, F.source.total_dim):
        raise ShapeMismatch("map matrix does not match its algebras")
    tol = max(F.source.atol, F.target.atol) if tol is None else tol
    units = matrix_units(F.source)
    images = [F(u) for u in units]

    star_defect = 0.0
    for u, fu in zip(units, images):
        star_defect = max(star_defect, (F(u.adjoint()) - fu.adjoint()).frobenius())

    jordan_defect = 0.0
    mult_defect = 0.0
    for u, fu in zip(units, images):
        for v, fv in zip(units, images):
            prod = u @ v
            fprod = F(prod)
            mult_defect = max(mult_defect, (fprod - fu @ fv).frobenius())
            sym = F(prod + v @ u)
            jordan_defect = max(jordan_defect, (sym - (fu @ fv + fv @ fu)).frobenius())

    injectivity = F.min_singular_value()
    if star_defect <= tol and mult_defect <= tol:
        kind = "star_homomorphism"
    elif star_defect <= tol and jordan_defect <= tol:
        kind = "jordan_only"
    else:
        kind = "neither"
    return HomomorphismReport(kind, star_defect, jordan_defect, mult_defect, injectivity)
