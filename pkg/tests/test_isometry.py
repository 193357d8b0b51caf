import numpy as np
import pytest

from nclp.algebra import (
    AlgebraElement,
    AlgebraMap,
    State,
    homomorphism_kind,
    left_mult_matrix,
    make_algebra,
    matrix_units,
    random_faithful_state,
    transpose_permutation,
)
from nclp.errors import DataInvalid, ExponentUnsupported
from nclp.expectation import Subalgebra, construct_expectation
from nclp.isometry import (
    build_isometry,
    classify,
    extract_pi,
    extract_polar_data,
    isometry_defect,
    star_adjoint_dual,
    transfer_exponent,
    two_isometry_defect,
    verify_state_restriction,
)
from nclp.lp import LpMap, LpVector, lp_norm, state_power
from nclp.samples import (
    haar_unitary,
    random_element,
    random_isometry_data,
    random_lp_vector,
    rng_for,
)

M2 = make_algebra([2])


def _identity_data(seed=3):
    phi = random_faithful_state(M2, seed)
    A = Subalgebra(M2, matrix_units(M2), validate=False)
    E = construct_expectation(A, phi)
    return phi, A, E


def test_build_identity_map():
    from nclp.isometry import IsometryData

    phi, A, E = _identity_data()
    data = IsometryData(
        source=M2,
        target=M2,
        pi=AlgebraMap.identity(M2),
        w=AlgebraElement.identity(M2),
        expectation=E,
        reference_state=phi,
    )
    T = build_isometry(data, 3.0)
    assert np.max(np.abs(T.matrix - np.eye(4))) < 1e-10


def test_build_unitary_left_multiplication():
    from nclp.isometry import IsometryData

    phi, A, E = _identity_data(9)
    u = AlgebraElement(M2, [haar_unitary(2, rng_for(4))])
    data = IsometryData(
        source=M2,
        target=M2,
        pi=AlgebraMap.identity(M2),
        w=u,
        expectation=E,
        reference_state=phi,
    )
    T = build_isometry(data, 3.0)
    assert np.max(np.abs(T.matrix - left_mult_matrix(u))) < 1e-10
    assert isometry_defect(T, 3.0) < 1e-12


def test_build_rejects_bad_w():
    from nclp.isometry import IsometryData

    phi, A, E = _identity_data(2)
    bad_w = AlgebraElement(M2, [np.diag([1.0, 0.0])])
    data = IsometryData(
        source=M2,
        target=M2,
        pi=AlgebraMap.identity(M2),
        w=bad_w,
        expectation=E,
        reference_state=phi,
    )
    with pytest.raises(DataInvalid):
        build_isometry(data, 3.0)


def test_factory_maps_isometric_all_exponents():
    for seed in (1, 8):
        data = random_isometry_data(seed)
        for p in (1.0, 1.5, 3.0, 4.0, 7.0):
            T = build_isometry(data, p)
            assert isometry_defect(T, p, sample_count=40) < 1e-9
            assert two_isometry_defect(T, p, n=2, sample_count=30, relative=True) < 1e-9


def test_module_property():
    data = random_isometry_data(2)
    p = 3.0
    T = build_isometry(data, p)
    rng = rng_for(6)
    rho_pow = state_power(data.reference_state, 1 / p)
    for _ in range(15):
        x = random_element(data.source, rng)
        y = random_element(data.source, rng)
        h = LpVector.from_element(rho_pow @ x, p)
        lhs = T(h @ y)
        rhs = T(h) @ data.pi(y)
        assert (lhs - rhs).frobenius() < 1e-9 * max(1.0, lhs.frobenius())


def test_extract_pi_identity_and_roundtrip():
    phi = random_faithful_state(M2, 12)
    T = LpMap.identity(M2, 3.0)
    pi = extract_pi(T, phi, 3.0)
    assert np.max(np.abs(pi.matrix - np.eye(4))) < 1e-10

    data = random_isometry_data(7)
    Tf = build_isometry(data, 3.0)
    pi_rec = extract_pi(Tf, data.reference_state, 3.0)
    assert np.max(np.abs(pi_rec.matrix - data.pi.matrix)) < 1e-9


def test_extract_pi_transpose_is_jordan_only():
    phi = State(M2, [np.eye(2) / 2])
    T = LpMap(M2, M2, 3.0, transpose_permutation(M2))
    pi = extract_pi(T, phi, 3.0)
    assert homomorphism_kind(pi).kind == "jordan_only"


def test_extract_pi_rejects_p2():
    phi = random_faithful_state(M2, 1)
    with pytest.raises(ExponentUnsupported):
        extract_pi(LpMap.identity(M2, 2.0), phi, 2.0)


def test_extract_pi_rejects_structureless_map():
    from nclp.errors import NotAnIsometry

    phi = random_faithful_state(M2, 1)
    rng = rng_for(3)
    garbage = LpMap(M2, M2, 3.0, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    with pytest.raises(NotAnIsometry):
        extract_pi(garbage, phi, 3.0)


def test_extract_polar_data_zero_image():
    from nclp.errors import ZeroImage

    phi = random_faithful_state(M2, 1)
    with pytest.raises(ZeroImage):
        extract_polar_data(LpMap(M2, M2, 3.0, np.zeros((4, 4))), phi, 3.0)


def test_build_isometry_needs_faithful_reference():
    from nclp.errors import NonFaithful
    from nclp.isometry import IsometryData

    data = random_isometry_data(1)
    singular = State(data.source, [np.diag([1.0, 0.0]) if n == 2 else np.zeros((n, n)) for n in data.source.blocks])
    bad = IsometryData(
        source=data.source,
        target=data.target,
        pi=data.pi,
        w=data.w,
        expectation=data.expectation,
        reference_state=singular,
    )
    with pytest.raises(NonFaithful):
        build_isometry(bad, 3.0)


def test_extract_pi_state_independent():
    data = random_isometry_data(4)
    T = build_isometry(data, 3.0)
    pi1 = extract_pi(T, data.reference_state, 3.0)
    pi2 = extract_pi(T, random_faithful_state(data.source, 77), 3.0)
    assert np.max(np.abs(pi1.matrix - pi2.matrix)) < 1e-8


def test_extract_polar_data():
    phi = random_faithful_state(M2, 3)
    T = LpMap.identity(M2, 3.0)
    w, phibar = extract_polar_data(T, phi, 3.0)
    assert (w - AlgebraElement.identity(M2)).frobenius() < 1e-10
    assert (phibar.density - phi.density).frobenius() < 1e-10

    u = AlgebraElement(M2, [haar_unitary(2, rng_for(8))])
    Tu = LpMap(M2, M2, 3.0, left_mult_matrix(u))
    wu, phibar_u = extract_polar_data(Tu, phi, 3.0)
    assert (wu - u).frobenius() < 1e-10
    assert (phibar_u.density - phi.density).frobenius() < 1e-10
    assert np.isclose(lp_norm(Tu(state_power(phi, 1 / 3))), 1.0)


def test_verify_state_restriction_detects_perturbation():
    data = random_isometry_data(3)
    phibar = data.phibar
    assert verify_state_restriction(phibar, data.pi, data.reference_state) < 1e-10

    rng = rng_for(15)
    g = random_element(data.source, rng, hermitian=True)
    drift = data.pi(g)
    drift = drift * (0.1 / drift.frobenius())
    blocks = []
    for blk in (phibar.density + drift).data:
        w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        blocks.append((v * np.clip(w, 1e-8, None)) @ v.conj().T)
    perturbed = State(data.target, blocks, normalize=True)
    assert verify_state_restriction(perturbed, data.pi, data.reference_state) > 1e-3


@pytest.mark.parametrize("p", [1.0, 3.0])
def test_classify_roundtrip(p):
    data = random_isometry_data(5)
    T = build_isometry(data, p)
    report = classify(T, data.reference_state, p)
    assert report.accepted
    assert np.max(np.abs(report.data.pi.matrix - data.pi.matrix)) < 1e-7
    assert (report.data.w - data.w).frobenius() < 1e-7
    assert np.max(np.abs(report.data.expectation.map.matrix - data.expectation.map.matrix)) < 1e-7
    assert (report.data.phibar.density - data.phibar.density).frobenius() < 1e-7


def test_classify_rejects_transpose_at_multiplicativity():
    phi = State(M2, [np.eye(2) / 2])
    T = LpMap(M2, M2, 3.0, transpose_permutation(M2))
    report = classify(T, phi, 3.0)
    assert report.verdict == "reject"
    assert report.failing_stage == "multiplicativity"
    assert report.defects["isometry"] < 1e-10
    assert report.defects["two_isometry"] > 1e-3


def test_classify_rejects_contraction_at_stage_one():
    phi = random_faithful_state(M2, 2)
    T = LpMap(M2, M2, 3.0, 0.5 * np.eye(4))
    report = classify(T, phi, 3.0)
    assert report.verdict == "reject"
    assert report.failing_stage == "isometry"


def test_classify_rejects_p2():
    phi = random_faithful_state(M2, 2)
    with pytest.raises(ExponentUnsupported):
        classify(LpMap.identity(M2, 2.0), phi, 2.0)


def test_star_adjoint_dual_examples():
    T = LpMap.identity(M2, 3.0)
    dual = star_adjoint_dual(T, 3.0)
    assert np.allclose(dual.matrix, np.eye(4))
    assert np.isclose(dual.p, 1.5)

    u = AlgebraElement(M2, [haar_unitary(2, rng_for(3))])
    Tu = LpMap(M2, M2, 3.0, left_mult_matrix(u))
    dual_u = star_adjoint_dual(Tu, 3.0)
    assert np.max(np.abs(dual_u.matrix - left_mult_matrix(u.adjoint()))) < 1e-12

    with pytest.raises(ExponentUnsupported):
        star_adjoint_dual(LpMap.identity(M2, 1.0), 1.0)


def test_star_adjoint_dual_pairing_identity():
    # sesquilinear identity tr(dual(k)* h) = tr(k* T(h)) for a generic map
    rng = rng_for(23)
    T = LpMap(M2, M2, 3.0, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    dual = star_adjoint_dual(T, 3.0)
    for _ in range(10):
        h = random_lp_vector(M2, 3.0, rng)
        k = random_lp_vector(M2, 1.5, rng)
        lhs = sum(np.trace(a.conj().T @ b) for a, b in zip(dual(k).data, h.data))
        rhs = sum(np.trace(a.conj().T @ b) for a, b in zip(k.data, T(h).data))
        assert abs(lhs - rhs) < 1e-10 * max(1, abs(lhs))


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_dual_composition_is_identity(p):
    pp = p / (p - 1)
    data = random_isometry_data(6)
    Tp = build_isometry(data, p)
    Tpp = build_isometry(data, pp)
    comp = star_adjoint_dual(Tpp, pp).matrix @ Tp.matrix
    assert np.max(np.abs(comp - np.eye(Tp.source.total_dim))) < 1e-9


def test_transfer_exponent_rebuild_and_extrapolation():
    data = random_isometry_data(9)
    T3 = build_isometry(data, 3.0)
    again = transfer_exponent(data.pi, data.reference_state, data.phibar, data.w, 3.0)
    assert np.max(np.abs(T3.matrix - again.matrix)) < 1e-10
    assert isometry_defect(T3, 3.0) < 1e-9
    for q in (2.5, 4.0, 7.0):
        Tq = transfer_exponent(data.pi, data.reference_state, data.phibar, data.w, q)
        assert isometry_defect(Tq, q, sample_count=40) < 1e-9


def test_l2_identity_at_exponent_four():
    data = random_isometry_data(10)
    phi, phibar, pi = data.reference_state, data.phibar, data.pi
    rng = rng_for(40)
    r4 = state_power(phi, 0.25)
    rb4 = state_power(phibar, 0.25)
    for _ in range(30):
        x = random_element(data.source, rng)
        lhs = lp_norm(LpVector.from_element(rb4 @ pi(x) @ rb4, 2.0))
        rhs = lp_norm(LpVector.from_element(r4 @ x @ r4, 2.0))
        assert abs(lhs - rhs) < 1e-9 * max(1.0, rhs)


def test_two_isometry_defect_witness_values():
    T = LpMap(M2, M2, 1.0, transpose_permutation(M2))
    # absolute defect at the grid witness: trace norms 4 against 2
    assert two_isometry_defect(T, 1.0, n=2, sample_count=0) >= 2.0 - 1e-12
    assert two_isometry_defect(LpMap.identity(M2, 3.0), 3.0, n=2) < 1e-12


def test_positive_factory_maps_preserve_positivity():
    data = random_isometry_data(0, w_positive=True)
    T = build_isometry(data, 3.0)
    rng = rng_for(33)
    for _ in range(15):
        g = random_element(data.source, rng)
        h = LpVector.from_element(g @ g.adjoint(), 3.0)
        out = T(h)
        low = min(float(np.linalg.eigvalsh((b + b.conj().T) / 2).min()) for b in out.data)
        assert low > -1e-9


def test_factory_three_fold_amplification():
    data = random_isometry_data(11)
    T = build_isometry(data, 4.0)
    assert two_isometry_defect(T, 4.0, n=3, sample_count=20, relative=True) < 1e-9
