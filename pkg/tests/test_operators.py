import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from angular_ur import gridpath as gp
from angular_ur import operators as ops
from angular_ur.errors import BasisMismatchError, OrderOverflowError
from angular_ur.numerics import phi_moment_integral
from angular_ur.states import (
    CircularEigenstate,
    DegenerateRotation,
    ExplicitFourier,
    FockPhase,
    FourierCircle,
    HermiteLine,
    Oscillator,
    RandomPeriodic,
    SphericalShell,
    boundary_density,
    make_state,
)

PI_OVER_SQRT3 = math.pi / math.sqrt(3)
EQUAL_SUP = ExplicitFourier((1, 0, 1))


def random_states(count, seed=0):
    seeds = np.random.SeedSequence(seed).generate_state(count)
    return [make_state(RandomPeriodic(1 + i % 8, int(s))) for i, s in enumerate(seeds)]


def test_matrix_structure_on_circle():
    b = FourierCircle(3)
    k = np.arange(-3, 4)
    assert_allclose(ops.lz(b, 2.0).matrix(), np.diag(2.0 * k))
    assert_allclose(ops.number_op(b).matrix(), np.diag(-k.astype(float)))
    phi = ops.phi(b).matrix()
    for i, ki in enumerate(k):
        for j, kj in enumerate(k):
            assert abs(phi[i, j] - phi_moment_integral(1, kj - ki) / (2 * math.pi)) < 1e-14
    phi2 = ops.phi_squared(b).matrix()
    assert abs(phi2[0, 2] - phi_moment_integral(2, 2) / (2 * math.pi)) < 1e-14


def test_phi_on_shell_uses_theta_overlap():
    b = SphericalShell(2)
    o = ops.theta_overlap(2)
    phi = ops.phi(b).matrix()
    m = np.arange(-2, 3)
    for i in range(5):
        for j in range(5):
            assert abs(phi[i, j] - o[i, j] * phi_moment_integral(1, m[j] - m[i]) / (2 * math.pi)) < 1e-14
    assert_allclose(np.diag(o), 1.0, atol=1e-13)


@pytest.mark.parametrize("basis", [FourierCircle(5), SphericalShell(3), HermiteLine(30, 0.8)], ids=str)
def test_multiplication_matrices_hermitian(basis):
    mats = [ops.phi(basis).matrix(), ops.phi_squared(basis).matrix()]
    if isinstance(basis, HermiteLine):
        mats.append(ops.position_line(basis).matrix())
    for m in mats:
        assert_allclose(m, m.conj().T, atol=1e-12)


def test_number_op_only_on_circle():
    with pytest.raises(BasisMismatchError):
        ops.number_op(SphericalShell(1))


def test_basis_mismatch():
    s = make_state(CircularEigenstate(1))
    with pytest.raises(BasisMismatchError):
        ops.expectation(ops.phi(FourierCircle(4)), s)


@pytest.mark.parametrize("m", range(-3, 4))
def test_circular_moments(m):
    s = make_state(CircularEigenstate(m))
    r = ops.moment(ops.lz(s.basis, 1.5), s)
    assert r.mean == pytest.approx(1.5 * m, abs=1e-14)
    assert r.stddev == 0.0
    assert abs(ops.moment(ops.phi(s.basis), s).stddev - PI_OVER_SQRT3) < 1e-12


@pytest.mark.parametrize("n", range(6))
def test_fock_phase_dphi(n):
    s = make_state(FockPhase(n))
    assert abs(ops.moment(ops.phi(s.basis), s).stddev - PI_OVER_SQRT3) < 1e-12


@pytest.mark.parametrize("n, inertia, omega, hbar", [(0, 1, 1, 1), (3, 2, 0.5, 1), (5, 0.5, 3, 0.7)])
def test_oscillator_lz_spread(n, inertia, omega, hbar):
    s = make_state(Oscillator(n, inertia, omega, hbar))
    d = ops.moment(ops.lz(s.basis, hbar), s).stddev
    assert abs(d - math.sqrt(hbar * inertia * omega * (n + 0.5))) < 1e-12


def test_cross_correlation_examples():
    s = make_state(CircularEigenstate(2))
    assert abs(ops.cross_correlation(ops.lz(s.basis), ops.phi(s.basis), s)) < 1e-14
    r = random_states(1, 3)[0]
    ph = ops.phi(r.basis)
    c = ops.cross_correlation(ph, ph, r)
    assert abs(c.imag) < 1e-13
    assert abs(c.real - ops.moment(ph, r).variance) < 1e-12
    e = make_state(EQUAL_SUP)
    lz, ph = ops.lz(e.basis), ops.phi(e.basis)
    assert abs(ops.cross_correlation(lz, ph, e) - gp.grid_cross_correlation(lz, ph, e)) < 1e-8


def test_residual_examples():
    for m in range(-3, 4):
        s = make_state(CircularEigenstate(m))
        r = ops.symmetry_residual(ops.lz(s.basis), ops.phi(s.basis), s)
        assert abs(r.real) < 1e-12 and abs(abs(r) - 1.0) < 1e-12
    for n in range(5):
        s = make_state(FockPhase(n))
        r = ops.symmetry_residual(ops.number_op(s.basis), ops.phi(s.basis), s)
        assert abs(r.real) < 1e-12 and abs(abs(r) - 1.0) < 1e-12
    for n in range(21):
        s = make_state(Oscillator(n, 1.3, 0.9))
        assert abs(ops.symmetry_residual(ops.lz(s.basis), ops.phi(s.basis), s)) < 1e-10


def test_residual_follows_boundary_density_over_random_states():
    hbar = 0.8
    for s in random_states(1000, 42):
        r = ops.symmetry_residual(ops.lz(s.basis, hbar), ops.phi(s.basis), s)
        assert abs(r.real) < 1e-9
        assert abs(abs(r) - 2 * math.pi * hbar * boundary_density(s)) < 1e-9


def test_residual_matches_grid_evaluation():
    for s in random_states(20, 5):
        lz, ph = ops.lz(s.basis), ops.phi(s.basis)
        assert abs(ops.symmetry_residual(lz, ph, s) - gp.grid_symmetry_residual(lz, ph, s)) < 1e-9


def test_commutator_examples():
    for m in range(-3, 4):
        s = make_state(CircularEigenstate(m))
        assert ops.commutator_mean(ops.lz(s.basis, 2.0), ops.phi(s.basis), s) == pytest.approx(-2j, abs=1e-13)
    for n in range(5):
        s = make_state(FockPhase(n))
        assert ops.commutator_mean(ops.number_op(s.basis), ops.phi(s.basis), s) == pytest.approx(1j, abs=1e-13)
    r = random_states(1, 9)[0]
    assert abs(ops.commutator_mean(ops.phi(r.basis), ops.phi(r.basis), r)) < 1e-14


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_cross_correlation_conjugate_symmetry(K, seed):
    s = make_state(RandomPeriodic(K, seed))
    pairs = [(ops.lz(s.basis), ops.phi(s.basis)), (ops.number_op(s.basis), ops.phi_squared(s.basis))]
    for a, b in pairs:
        assert abs(ops.cross_correlation(a, b, s) - np.conj(ops.cross_correlation(b, a, s))) < 1e-12


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_hermitian_means_are_real(K, seed):
    s = make_state(RandomPeriodic(K, seed))
    for op in (ops.lz(s.basis), ops.phi(s.basis), ops.phi_squared(s.basis), ops.number_op(s.basis)):
        r = ops.moment(op, s)
        assert abs(r.mean.imag) < 1e-10
        assert r.variance >= 0.0


def test_hermitian_means_real_on_other_families():
    states = [make_state(Oscillator(4, 2, 0.5)), make_state(DegenerateRotation(3, tuple(np.arange(7) + 1j)))]
    for s in states:
        for op in (ops.lz(s.basis), ops.phi(s.basis), ops.phi_squared(s.basis)):
            assert abs(ops.expectation(op, s).imag) < 1e-10


def test_higher_correlation_examples():
    s = random_states(1, 2)[0]
    lz, ph = ops.lz(s.basis), ops.phi(s.basis)
    assert abs(ops.higher_correlation(lz, ph, 1, 1, s) - ops.cross_correlation(lz, ph, s)) < 1e-14
    c = make_state(CircularEigenstate(1))
    lzc = ops.lz(c.basis)
    assert abs(ops.higher_correlation(lzc, lzc, 1, 2, c)) < 1e-14
    shell = make_state(DegenerateRotation(1, (1, 1, 1)))
    a, b = ops.lz(shell.basis), ops.phi(shell.basis)
    assert abs(ops.higher_correlation(a, b, 2, 1, shell) - gp.grid_higher_correlation(a, b, 2, 1, shell)) < 1e-8
    with pytest.raises(OrderOverflowError):
        ops.higher_correlation(a, b, 5, 4, shell)


def test_multiply_by_callable_against_grid():
    s = random_states(1, 17)[0]
    f = ops.multiply_by(s.basis, np.cos, lambda x: -np.sin(x), "cos")
    assert abs(ops.moment(f, s).stddev - gp.grid_moment(f, s).stddev) < 1e-10
    assert abs(ops.cross_correlation(ops.lz(s.basis), f, s) - gp.grid_cross_correlation(ops.lz(s.basis), f, s)) < 1e-10


FAMILIES = [
    CircularEigenstate(2),
    FockPhase(3),
    Oscillator(4, 2.0, 0.5),
    DegenerateRotation(2, (0.2, 1j, 0.5, -0.3, 0.1 + 0.4j)),
    RandomPeriodic(5, 99),
]


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: type(s).__name__)
def test_dual_path_agreement(spec):
    s = make_state(spec)
    b = s.basis
    opset = [ops.lz(b), ops.phi(b), ops.phi_squared(b)]
    if isinstance(b, FourierCircle):
        opset.append(ops.number_op(b))
    for op in opset:
        a, g = ops.moment(op, s), gp.grid_moment(op, s)
        assert abs(a.mean - g.mean) < 1e-8
        assert abs(a.stddev - g.stddev) < 1e-8
    for x in opset:
        for y in opset:
            assert abs(ops.cross_correlation(x, y, s) - gp.grid_cross_correlation(x, y, s)) < 1e-8
            assert abs(ops.composite_mean(x, y, s) - gp.grid_composite_mean(x, y, s)) < 1e-8
    for r, t in [(2, 1), (1, 3), (2, 2)]:
        x, y = opset[0], opset[1]
        assert abs(ops.higher_correlation(x, y, r, t, s) - gp.grid_higher_correlation(x, y, r, t, s)) < 1e-8
