"""Unit tests for system models and the coarse-grained one-bin map."""

import math

import numpy as np
import pytest

from timebins.model import (
    BinSpace,
    CoarseParams,
    bin_generator,
    coarse_map,
    dephasing_variant,
    lowering_matrix,
    ordering_residual,
    truncated_oscillator,
    two_level_system,
)
from timebins.operators import commutator, dagger, identity, kron


def test_two_level_system_hamiltonians():
    free = two_level_system(0.0, 0.0)
    assert free.hamiltonian.max_abs() == 0.0
    np.testing.assert_array_equal(free.lowering.data, [[0, 1], [0, 0]])

    detuned = two_level_system(1.0, 0.0)
    np.testing.assert_array_equal(detuned.hamiltonian.data, np.diag([0.0, 1.0]))

    driven = two_level_system(0.0, 0.5)
    np.testing.assert_array_equal(
        driven.hamiltonian.data, 0.5 * np.array([[0, 1], [1, 0]])
    )


def test_dephasing_variant_coupling():
    deph = dephasing_variant(two_level_system(0.3, 0.0))
    np.testing.assert_array_equal(deph.lowering.data, np.diag([0.0, 1.0]))
    np.testing.assert_array_equal(
        deph.lowering.data, dagger(deph.lowering).data
    )
    np.testing.assert_array_equal(
        deph.hamiltonian.data, two_level_system(0.3, 0.0).hamiltonian.data
    )


def test_bin_space_ladder():
    space = BinSpace(3)
    assert space.dim == 4
    db = space.annihilate.data
    for m in range(1, 4):
        ket = np.zeros(4)
        ket[m] = 1.0
        out = db @ ket
        expect = np.zeros(4)
        expect[m - 1] = math.sqrt(m)
        np.testing.assert_allclose(out, expect)
    np.testing.assert_array_equal(db @ np.eye(4)[:, 0], np.zeros(4))

    with pytest.raises(ValueError):
        BinSpace(0)


def test_coarse_params_validation():
    with pytest.raises(ValueError):
        CoarseParams(-1.0, 0.1, 1)
    with pytest.raises(ValueError):
        CoarseParams(1.0, 0.0, 1)
    with pytest.raises(ValueError):
        CoarseParams(1.0, 0.1, 0)


def test_bin_generator_decoupled_limit():
    system = two_level_system(0.7, 0.2)
    params = CoarseParams(0.0, 0.05, 2)
    gen = bin_generator(system, params)
    expected = (-1j * 0.05) * kron(system.hamiltonian, identity((3,)))
    np.testing.assert_allclose(gen.data, expected.data, atol=1e-15)


def test_bin_generator_hand_built_matrix():
    # gamma=1, dt=0.01, n_max=1: only |e,0> <-> |g,1> couple, amplitude 0.1.
    system = two_level_system()
    gen = bin_generator(system, CoarseParams(1.0, 0.01, 1))
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = 0.1  # <g,1| G |e,0>
    expected[2, 1] = -0.1
    np.testing.assert_allclose(gen.data, expected, atol=1e-15)
    assert gen.dims == (2, 2)


def test_bin_generator_antihermitian():
    rng = np.random.default_rng(2)
    for _ in range(20):
        omega0, drive = rng.uniform(-2, 2, size=2)
        gamma, dt = rng.uniform(0.01, 3.0, size=2)
        gen = bin_generator(
            two_level_system(omega0, drive), CoarseParams(gamma, dt, 3)
        )
        assert (gen + dagger(gen)).max_abs() <= 1e-12


def test_excitation_conservation_for_diagonal_hamiltonian():
    system = two_level_system(1.3, 0.0)
    params = CoarseParams(0.8, 0.05, 3)
    gen = bin_generator(system, params)
    number_sys = dagger(system.lowering) @ system.lowering
    db = BinSpace(3).annihilate
    number_bin = dagger(db) @ db
    total = kron(number_sys, identity((4,))) + kron(identity((2,)), number_bin)
    assert commutator(gen, total).max_abs() <= 1e-12


def test_coarse_map_identity_and_rotation():
    system = two_level_system()
    u = coarse_map(system, CoarseParams(0.0, 0.1, 1))
    np.testing.assert_array_equal(u.data, np.eye(4))

    u = coarse_map(system, CoarseParams(1.0, 0.01, 1))
    np.testing.assert_allclose(u.data[2, 2], math.cos(0.1), atol=1e-12)
    np.testing.assert_allclose(u.data[1, 2], math.sin(0.1), atol=1e-12)


def test_coarse_map_unitary():
    rng = np.random.default_rng(4)
    for _ in range(10):
        system = two_level_system(rng.uniform(-1, 1), rng.uniform(-1, 1))
        params = CoarseParams(rng.uniform(0.1, 2.0), rng.uniform(0.01, 0.5), 2)
        u = coarse_map(system, params)
        udu = dagger(u) @ u
        assert (udu - identity(u.dims)).max_abs() <= 1e-12


def test_coarse_map_depends_only_on_gamma_dt_product_without_hamiltonian():
    system = two_level_system()
    u1 = coarse_map(system, CoarseParams(2.0, 0.05, 2))
    u2 = coarse_map(system, CoarseParams(0.5, 0.2, 2))
    np.testing.assert_allclose(u1.data, u2.data, atol=1e-14)


def test_coarse_map_block_is_planar_rotation():
    system = two_level_system()
    for gamma, dt in [(1.0, 0.01), (0.5, 0.3), (2.0, 0.8)]:
        theta = math.sqrt(gamma * dt)
        u = coarse_map(system, CoarseParams(gamma, dt, 2))
        # n_max=2: states ordered |g0 g1 g2 e0 e1 e2>; block {|e,0>, |g,1>}
        np.testing.assert_allclose(u.data[3, 3], math.cos(theta), atol=1e-12)
        np.testing.assert_allclose(u.data[1, 3], math.sin(theta), atol=1e-12)
        np.testing.assert_allclose(u.data[3, 1], -math.sin(theta), atol=1e-12)
        np.testing.assert_allclose(u.data[0, 0], 1.0, atol=1e-12)


def test_truncated_oscillator_shape():
    osc = truncated_oscillator(3, 0.4)
    assert osc.dim == 3
    np.testing.assert_allclose(osc.lowering.data, lowering_matrix(3))
    np.testing.assert_allclose(osc.hamiltonian.data, np.diag([0.0, 0.4, 0.8]))


def test_ordering_residual_free_system_closed_form():
    # With H = 0 the populations obey pure cosine products, so the residual is
    # cos^(2s)(sqrt(g dt / s)) - cos^2(sqrt(g dt)) exactly.
    system = two_level_system()
    for dt, subs in [(0.1, 8), (0.05, 4)]:
        got = ordering_residual(system, CoarseParams(1.0, dt, 2), subs)
        theta = math.sqrt(dt)
        expected = math.cos(math.sqrt(dt / subs)) ** (2 * subs) - math.cos(theta) ** 2
        np.testing.assert_allclose(got, expected, rtol=1e-9)


def test_ordering_residual_free_system_is_second_order():
    system = two_level_system()
    values = [
        ordering_residual(system, CoarseParams(1.0, dt, 2), 8)
        for dt in (0.1, 0.05, 0.025)
    ]
    for coarse, fine in zip(values, values[1:]):
        assert coarse / fine >= 2.0**1.9


def test_ordering_residual_driven_ratios():
    system = two_level_system(0.0, 1.0)
    values = [
        ordering_residual(system, CoarseParams(1.0, dt, 2), 8)
        for dt in (0.1, 0.05, 0.025)
    ]
    for coarse, fine in zip(values, values[1:]):
        assert coarse / fine >= 2.0**1.4


def test_ordering_residual_converges_in_subdivisions():
    system = two_level_system(0.0, 1.0)
    params = CoarseParams(1.0, 0.05, 2)
    values = [ordering_residual(system, params, s) for s in (2, 4, 8, 16, 32, 64)]
    gaps = [abs(b - a) for a, b in zip(values, values[1:])]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    # the subdivided reference is a Cauchy sequence: the tail gap is tiny
    assert gaps[-1] <= 0.05 * values[-1]


def test_ordering_residual_rejects_bad_subdivisions():
    with pytest.raises(ValueError):
        ordering_residual(two_level_system(), CoarseParams(1.0, 0.1, 2), 1)
