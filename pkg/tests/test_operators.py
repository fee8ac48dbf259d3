"""Unit tests for the dense operator-algebra kernel."""

import math

import numpy as np
import pytest
import scipy.linalg

from timebins.operators import (
    Operator,
    StateVector,
    basis_state,
    commutator,
    dagger,
    expm,
    identity,
    kron,
    partial_trace,
    vn_entropy,
)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def random_operator(rng, dims):
    side = math.prod(dims)
    m = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    return Operator(m, dims)


def test_operator_validates_shape_and_dims():
    with pytest.raises(ValueError):
        Operator(np.zeros((2, 3)), (2,))
    with pytest.raises(ValueError):
        Operator(np.zeros((4, 4)), (2, 3))
    with pytest.raises(ValueError):
        Operator(np.zeros((2, 2)), (2, 0))


def test_statevector_validates_length():
    with pytest.raises(ValueError):
        StateVector(np.zeros(3), (2, 2))
    assert basis_state(4, 2).norm() == 1.0


def test_kron_identities():
    lhs = kron(identity((2,)), identity((3,)))
    np.testing.assert_array_equal(lhs.data, np.eye(6))
    assert lhs.dims == (2, 3)

    lifted = kron(Operator(SIGMA_Z, (2,)), identity((2,)))
    np.testing.assert_array_equal(lifted.data, np.diag([1.0, 1.0, -1.0, -1.0]))


def test_kron_trace_factorizes():
    rng = np.random.default_rng(7)
    a = random_operator(rng, (2,))
    b = random_operator(rng, (2,))
    # independent oracle: explicit four-index expansion
    direct = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    direct[2 * i + k, 2 * j + l] = a.data[i, j] * b.data[k, l]
    np.testing.assert_allclose(kron(a, b).data, direct, atol=0)
    np.testing.assert_allclose(
        kron(a, b).trace(), a.trace() * b.trace(), rtol=1e-13
    )


def test_kron_associativity():
    rng = np.random.default_rng(11)
    a = random_operator(rng, (2,))
    b = random_operator(rng, (3,))
    c = random_operator(rng, (2,))
    lhs = kron(kron(a, b), c)
    rhs = kron(a, kron(b, c))
    assert lhs.dims == rhs.dims == (2, 3, 2)
    np.testing.assert_allclose(lhs.data, rhs.data, atol=1e-15)


def test_dagger_involution_and_ladder():
    rng = np.random.default_rng(3)
    a = random_operator(rng, (3,))
    np.testing.assert_array_equal(dagger(dagger(a)).data, a.data)
    np.testing.assert_array_equal(dagger(identity((3,))).data, np.eye(3))

    lower = np.diag(np.sqrt([1.0, 2.0]), 1).astype(complex)
    raised = dagger(Operator(lower, (3,)))
    np.testing.assert_allclose(raised.data, np.diag(np.sqrt([1.0, 2.0]), -1))


def test_dagger_antihomomorphism():
    rng = np.random.default_rng(5)
    a = random_operator(rng, (4,))
    b = random_operator(rng, (4,))
    lhs = dagger(a @ b)
    rhs = dagger(b) @ dagger(a)
    np.testing.assert_allclose(lhs.data, rhs.data, atol=1e-13)


def test_commutator_cases():
    rng = np.random.default_rng(13)
    a = random_operator(rng, (3,))
    assert commutator(a, a).max_abs() == 0.0

    sigma = Operator(np.array([[0, 1], [0, 0]], dtype=complex), (2,))
    np.testing.assert_allclose(
        commutator(sigma, dagger(sigma)).data, np.diag([1.0, -1.0])
    )

    with pytest.raises(ValueError):
        commutator(a, random_operator(rng, (2,)))


def test_commutator_truncated_ladder():
    # [dB, dB^dag] on a 4-level truncation: identity except the edge artifact.
    lower = Operator(np.diag(np.sqrt([1.0, 2.0, 3.0]), 1).astype(complex), (4,))
    got = commutator(lower, dagger(lower))
    np.testing.assert_allclose(got.data, np.diag([1.0, 1.0, 1.0, -3.0]), atol=1e-14)


def test_expm_zero_and_rotation():
    np.testing.assert_array_equal(expm(Operator(np.zeros((3, 3)), (3,))).data, np.eye(3))

    # closed form: exp(-i theta sigma_x) = cos(theta) I - i sin(theta) sigma_x
    theta = math.pi / 2
    got = expm(Operator(-1j * theta * SIGMA_X, (2,)))
    np.testing.assert_allclose(got.data, -1j * SIGMA_X, atol=1e-13)


def test_expm_excitation_block_rotation():
    # 0.1 (sigma x dB^dag - sigma^dag x dB) rotates the {|e,0>, |g,1>} pair.
    sigma = np.array([[0, 1], [0, 0]], dtype=complex)
    db = np.array([[0, 1], [0, 0]], dtype=complex)
    gen = 0.1 * (np.kron(sigma, db.conj().T) - np.kron(sigma.conj().T, db))
    u = expm(Operator(gen, (2, 2)))
    np.testing.assert_allclose(u.data[2, 2], math.cos(0.1), atol=1e-12)
    np.testing.assert_allclose(u.data[1, 2], math.sin(0.1), atol=1e-12)


def test_expm_matches_scipy():
    rng = np.random.default_rng(17)
    for n in (2, 3, 6):
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m *= 10.0 / np.linalg.norm(m, 1)
        got = expm(Operator(m, (n,))).data
        ref = scipy.linalg.expm(m)
        assert np.max(np.abs(got - ref)) <= 1e-12 * np.linalg.norm(ref, 1)


def test_expm_unitary_for_antihermitian():
    rng = np.random.default_rng(19)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    gen = m - m.conj().T
    u = expm(Operator(gen, (6,))).data
    np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)


def test_expm_rejects_nonfinite():
    bad = np.array([[0.0, np.inf], [0.0, 0.0]])
    with pytest.raises(ValueError):
        expm(Operator(bad, (2,)))


def test_partial_trace_product_state():
    rng = np.random.default_rng(23)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    joint = Operator(np.kron(a, b), (2, 3))
    got = partial_trace(joint, 0)
    np.testing.assert_allclose(got.data, a * np.trace(b), atol=1e-13)
    assert got.dims == (2,)


def test_partial_trace_bell_state():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / math.sqrt(2.0)
    rho = Operator(np.outer(bell, bell.conj()), (2, 2))
    np.testing.assert_allclose(partial_trace(rho, 0).data, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_preserves_trace_and_is_linear():
    rng = np.random.default_rng(29)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    psd = Operator(m @ m.conj().T, (2, 2))
    reduced = partial_trace(psd, 1)
    # oracle: direct index summation
    direct = np.zeros((2, 2), dtype=complex)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                direct[i, j] += psd.data[2 * k + i, 2 * k + j]
    np.testing.assert_allclose(reduced.data, direct, atol=1e-13)
    assert abs(reduced.trace() - psd.trace()) <= 1e-12 * psd.dim

    a = random_operator(rng, (2, 2))
    b = random_operator(rng, (2, 2))
    lhs = partial_trace(a * 0.3 + b * (-2.0), 0)
    rhs = 0.3 * partial_trace(a, 0) + (-2.0) * partial_trace(b, 0)
    np.testing.assert_allclose(lhs.data, rhs.data, atol=1e-13)


def test_partial_trace_middle_factor_oracle():
    rng = np.random.default_rng(31)
    op = random_operator(rng, (2, 3, 2))
    got = partial_trace(op, (0, 2))
    # oracle: loop over the traced middle index
    tensor = op.data.reshape(2, 3, 2, 2, 3, 2)
    direct = np.zeros((2, 2, 2, 2), dtype=complex)
    for m in range(3):
        direct += tensor[:, m, :, :, m, :]
    np.testing.assert_allclose(got.data, direct.reshape(4, 4), atol=1e-13)
    assert got.dims == (2, 2)


def test_partial_trace_rejects_bad_indices():
    rng = np.random.default_rng(37)
    op = random_operator(rng, (2, 2))
    with pytest.raises(ValueError):
        partial_trace(op, 2)
    with pytest.raises(ValueError):
        partial_trace(op, (0, 0))
    with pytest.raises(ValueError):
        partial_trace(op, ())


def test_vn_entropy_values():
    pure = Operator(np.diag([1.0, 0.0]).astype(complex), (2,))
    assert vn_entropy(pure) == 0.0

    mixed = Operator(np.eye(2, dtype=complex) / 2, (2,))
    np.testing.assert_allclose(vn_entropy(mixed), math.log(2.0), rtol=1e-13)

    # scalar oracle evaluated in place
    p = math.exp(-1.0)
    rho = Operator(np.diag([p, 1.0 - p]).astype(complex), (2,))
    expected = -(p * math.log(p) + (1 - p) * math.log(1 - p))
    np.testing.assert_allclose(vn_entropy(rho), expected, rtol=1e-12)
    np.testing.assert_allclose(expected, 0.657817, atol=5e-7)


def test_vn_entropy_bounds_and_errors():
    rng = np.random.default_rng(41)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    s = vn_entropy(Operator(rho, (4,)))
    assert -1e-12 <= s <= math.log(4.0) + 1e-12

    with pytest.raises(ValueError):
        vn_entropy(Operator(m, (4,)))
