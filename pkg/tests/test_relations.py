import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from angular_ur import numerics as nm
from angular_ur import operators as ops
from angular_ur import relations as rel
from angular_ur.errors import DomainError, InvalidSpecError, LengthMismatchError
from angular_ur.search import SearchConfig, optimize_coefficients, random_shell_coeffs
from angular_ur.states import (
    CircularEigenstate,
    DegenerateRotation,
    ExplicitFourier,
    FockPhase,
    Oscillator,
    RandomPeriodic,
    make_state,
    random_shell_state,
)

PI_OVER_SQRT3 = math.pi / math.sqrt(3)


def test_verdict_status_rules():
    assert rel.verdict("x", 0.0, 0.0).status == rel.DEGENERATE
    assert rel.verdict("x", 5e-13, 1e-13).status == rel.DEGENERATE
    assert rel.verdict("x", 1.0, 1.0 + 5e-11).status == rel.HOLDS
    assert rel.verdict("x", 1.0, 1.0 + 2e-10).status == rel.VIOLATED
    assert rel.verdict("x", 1.0, 1.5, tol=1.0).status == rel.HOLDS


@pytest.mark.parametrize("m", range(-3, 4))
def test_schwarz_and_rsur_on_circular_states(m):
    s = make_state(CircularEigenstate(m))
    lz, ph = ops.lz(s.basis), ops.phi(s.basis)
    sv = rel.eval_schwarz(lz, ph, s)
    assert (sv.lhs, sv.status) == (0.0, rel.DEGENERATE)
    rv = rel.eval_rsur(lz, ph, s)
    assert rv.relation == "Bound4"
    assert rv.status == rel.VIOLATED
    assert rv.lhs == 0.0 and rv.rhs == pytest.approx(0.5, abs=1e-13)
    assert rv.details["condition24"] is False


@pytest.mark.parametrize("n", range(6))
def test_rsur_on_fock_phase_states(n):
    s = make_state(FockPhase(n))
    rv = rel.eval_rsur(ops.number_op(s.basis), ops.phi(s.basis), s)
    assert rv.relation == "Bound17"
    assert rv.status == rel.VIOLATED
    assert rv.rhs == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", range(8))
def test_oscillator_satisfies_rsur_and_condition(n):
    s = make_state(Oscillator(n, 1, 1, 1))
    lz, ph = ops.lz(s.basis), ops.phi(s.basis)
    rv = rel.eval_rsur(lz, ph, s)
    assert rv.status == rel.HOLDS
    assert rv.lhs == pytest.approx(n + 0.5, abs=1e-12)
    assert rv.details["condition24"] is True
    sv = rel.eval_schwarz(lz, ph, s)
    assert sv.status == rel.HOLDS and sv.rhs <= 0.5 + 1e-12
    d = rel.eval_decomposition(lz, ph, s)
    assert d.consistent


def test_decomposition_breaks_on_circular_state():
    s = make_state(CircularEigenstate(1))
    d = rel.eval_decomposition(ops.lz(s.basis), ops.phi(s.basis), s)
    assert not d.consistent
    assert d.mismatch == pytest.approx(1.0, abs=1e-12)
    r = make_state(RandomPeriodic(4, 1))
    dd = rel.eval_decomposition(ops.phi(r.basis), ops.phi(r.basis), r)
    assert dd.consistent and abs(dd.imag_part) < 1e-12


def _random_pair(rng, state):
    b = state.basis
    pool = [ops.lz(b, 0.7), ops.phi(b), ops.phi_squared(b)]
    if hasattr(b, "K"):
        pool += [ops.number_op(b), ops.multiply_by(b, np.cos, lambda x: -np.sin(x), "cos")]
    i, j = rng.integers(len(pool), size=2)
    return pool[i], pool[j]


def test_schwarz_never_violated_over_randomized_trials():
    rng = np.random.default_rng(2024)
    seeds = np.random.SeedSequence(7).generate_state(10_000)
    worst = math.inf
    for i, sd in enumerate(seeds):
        if i % 5 == 4:
            state = random_shell_state(1 + i % 4, rng)
        else:
            state = make_state(RandomPeriodic(1 + i % 8, int(sd)))
        a, b = _random_pair(rng, state)
        v = rel.eval_schwarz(a, b, state)
        assert v.status != rel.VIOLATED
        worst = min(worst, v.gap)
    assert worst >= -1e-10


def test_rsur_holds_when_symmetry_residuals_vanish():
    found = optimize_coefficients(SearchConfig(l=2, objective="zero_residual", restarts=3, seed=4))
    s = make_state(DegenerateRotation(2, tuple(found.coeffs)))
    v = rel.eval_rsur(ops.lz(s.basis), ops.phi(s.basis), s)
    assert v.details["condition24"]
    assert v.status == rel.HOLDS


def test_boundary_relation_examples():
    for m in range(-2, 3):
        v = rel.eval_boundary_relation(make_state(CircularEigenstate(m)))
        assert v.status == rel.DEGENERATE and abs(v.rhs) < 1e-14
    const = rel.eval_boundary_relation(make_state(ExplicitFourier((0, 1, 0))))
    assert const.lhs < 1e-12 and const.rhs < 1e-12
    with pytest.raises(DomainError):
        rel.eval_boundary_relation(make_state(Oscillator(0)))


def test_boundary_relation_holds_over_random_states():
    seeds = np.random.SeedSequence(77).generate_state(1000)
    for i, sd in enumerate(seeds):
        s = make_state(RandomPeriodic(1 + i % 8, int(sd)))
        hbar = 0.5 + (i % 3)
        assert rel.eval_boundary_relation(s, hbar).status != rel.VIOLATED
        assert rel.eval_bound9(s, hbar).status != rel.VIOLATED


def test_boundary_cross_correlation_identity():
    # Im (dLz psi, dphi psi) = -(hbar / 2) (1 - 2 pi |psi(2 pi)|^2)
    for sd in range(20):
        s = make_state(RandomPeriodic(5, sd))
        c = ops.cross_correlation(ops.lz(s.basis), ops.phi(s.basis), s)
        bd = rel.boundary_density(s)
        assert abs(c.imag + 0.5 * (1 - 2 * math.pi * bd)) < 1e-10


def test_adjusted_with_sin_cos_on_circular_state():
    s = make_state(CircularEigenstate(2))
    v = rel.eval_adjusted(np.sin, np.cos, s, grid=nm.periodic_grid())
    assert v.status == rel.DEGENERATE
    grid = nm.periodic_grid(512)
    va = rel.eval_adjusted(np.sin(grid.nodes), np.cos(grid.nodes), s, grid=grid)
    assert va.status == rel.DEGENERATE


def test_adjusted_reduces_to_bound4():
    phi_fn = ops.AngleFunction.polynomial([0.0, 1.0], "phi")
    half = ops.AngleFunction.polynomial([0.5], "1/2")
    for spec in (CircularEigenstate(1), RandomPeriodic(4, 3), ExplicitFourier((1, 2, 0, 1j, 0.5))):
        s = make_state(spec)
        a = rel.eval_adjusted(phi_fn, half, s)
        b = rel.eval_rsur(ops.lz(s.basis), ops.phi(s.basis), s)
        assert a.lhs == pytest.approx(b.lhs, abs=1e-12)
        assert a.rhs == pytest.approx(b.rhs, abs=1e-12)
        assert a.status == b.status


def test_adjusted_domain_and_length_errors():
    with pytest.raises(DomainError):
        rel.eval_adjusted(np.sin, np.cos, make_state(Oscillator(1)))
    s = make_state(CircularEigenstate(0))
    with pytest.raises(LengthMismatchError):
        rel.eval_adjusted(np.zeros(10), np.zeros(10), s, grid=nm.periodic_grid(12))


def test_adjusted_sum_with_periodic_functions_holds():
    for sd in range(50):
        s = make_state(RandomPeriodic(1 + sd % 6, sd))
        assert rel.eval_adjusted_sum(np.sin, np.cos, s).status != rel.VIOLATED


def test_classical_examples():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(1000)
    v = rel.classical_fluctuation_relation(a, 2 * a)
    assert abs(v.gap) < 1e-12
    c = rel.classical_fluctuation_relation(np.ones(50), a[:50])
    assert c.status == rel.DEGENERATE
    x, y = rng.standard_normal((2, 100_000))
    ind = rel.classical_fluctuation_relation(x, y)
    assert ind.status == rel.HOLDS and ind.gap > 0
    with pytest.raises(LengthMismatchError):
        rel.classical_fluctuation_relation(a, a[:-1])


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=2, max_size=200))
@settings(max_examples=100, deadline=None)
def test_classical_relation_never_violated(pairs):
    a, b = np.array(pairs).T
    v = rel.classical_fluctuation_relation(a, b, tol=1e-9 * (1 + np.abs(a).max() * np.abs(b).max()))
    assert v.status != rel.VIOLATED


def test_oracle_circular_and_qtp_examples():
    c = rel.analytic_oracle("Circular6")
    assert c["dLz"] == 0.0 and c["dphi"] == pytest.approx(1.8137993642342178, abs=1e-15)
    q = rel.analytic_oracle("QTP11", n=3, I=2, omega=0.5, hbar=1)
    assert q["dLz"] == pytest.approx(math.sqrt(3.5), rel=1e-15)
    assert q["dphi"] == pytest.approx(math.sqrt(3.5), rel=1e-15)
    assert q["product"] == pytest.approx(3.5, rel=1e-15)


def test_oracle_degenerate_example():
    c = np.array([1, 0, 1]) / math.sqrt(2)
    o = rel.analytic_oracle("Degenerate13_14", l=1, c=c, hbar=1.0)
    assert o["dLz"] == pytest.approx(1.0, abs=1e-14)
    s = make_state(DegenerateRotation(1, tuple(c)))
    assert abs(o["dphi"] - ops.moment(ops.phi(s.basis), s).stddev) < 1e-9


def test_oracle_matches_computational_path_on_shells():
    rng = np.random.default_rng(8)
    for l in range(1, 5):
        for c in random_shell_coeffs(l, 25, rng):
            s = make_state(DegenerateRotation(l, tuple(c)))
            lz, ph = ops.lz(s.basis, 1.3), ops.phi(s.basis)
            o = rel.analytic_oracle("Degenerate13_14", l=l, c=c, hbar=1.3)
            assert abs(o["dLz"] - ops.moment(lz, s).stddev) < 1e-9
            assert abs(o["dphi"] - ops.moment(ph, s).stddev) < 1e-9
            assert abs(o["residual"] - ops.symmetry_residual(lz, ph, s)) < 1e-9


def test_oracle_residual_families():
    s = make_state(CircularEigenstate(1))
    got = ops.symmetry_residual(ops.lz(s.basis, 2.0), ops.phi(s.basis), s)
    assert abs(got - rel.analytic_oracle("Residual27_30", family="circular", hbar=2.0)["residual"]) < 1e-12
    f = make_state(FockPhase(2))
    got = ops.symmetry_residual(ops.number_op(f.basis), ops.phi(f.basis), f)
    assert abs(got - rel.analytic_oracle("Residual27_30", family="fock_phase")["residual"]) < 1e-12
    assert rel.analytic_oracle("Residual27_30", family="oscillator")["residual"] == 0
    with pytest.raises(InvalidSpecError):
        rel.analytic_oracle("Residual27_30", family="nope")
    with pytest.raises(InvalidSpecError):
        rel.analytic_oracle("Nope")
