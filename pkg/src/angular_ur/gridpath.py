"""Independent quadrature evaluation of the scalar products in ``operators``.

The wave function is sampled together with its angle derivatives on a grid
(Gauss-Legendre on ``[0, 2 pi]`` for the circle, a Gauss-Legendre product grid
on the sphere, Gauss-Hermite on the line). Operators then act pointwise on
these jets: a derivative shifts the jet, a multiplication uses the Leibniz
rule. No Gram matrix, ladder matrix or closed-form moment is used, so the
results serve as an oracle for the coefficient-space path.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OrderOverflowError, UnsupportedOperationError
from .operators import MAX_CORRELATION_ORDER, MomentReport, OperatorRep, _check, _clip_variance
from .states import QuantumState, default_grid, sample_derivatives


def _function_jet(op: OperatorRep, x: np.ndarray, order: int) -> list[np.ndarray]:
    f = op.func
    out = [f(x)]
    while len(out) <= order:
        try:
            f = f.derivative()
        except UnsupportedOperationError:
            break
        out.append(f(x))
    return out


class SampledState:
    """Derivative jet of a state on a quadrature grid."""

    def __init__(self, state: QuantumState, grid=None, order: int = MAX_CORRELATION_ORDER + 2):
        self.state = state
        self.grid = grid if grid is not None else default_grid(state.basis)
        self.x = self.grid.nodes
        self.weights = self.grid.weights
        self.jet = sample_derivatives(state, self.grid, order)

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(self.weights * np.conj(u) * v))

    def apply(self, op: OperatorRep, jet: list[np.ndarray]) -> list[np.ndarray]:
        if op.is_derivative:
            if len(jet) < 2:
                raise OrderOverflowError("jet too short for another derivative")
            return [op.coef * u for u in jet[1:]]
        fj = _function_jet(op, self.x, len(jet) - 1)
        n = min(len(jet), len(fj))
        return [
            sum(math.comb(j, i) * fj[i] * jet[j - i] for i in range(j + 1)) for j in range(n)
        ]

    def shifted_apply(self, op: OperatorRep, mu: complex, jet: list[np.ndarray]) -> list[np.ndarray]:
        """Jet of ``(A - mu) u`` where ``jet`` samples ``u``."""
        out = self.apply(op, jet)
        return [v - mu * u for v, u in zip(out, jet)]


def _sampled(state: QuantumState, *ops: OperatorRep, grid=None) -> SampledState:
    _check(state, *ops)
    return SampledState(state, grid)


def grid_expectation(op: OperatorRep, state: QuantumState, grid=None) -> complex:
    s = _sampled(state, op, grid=grid)
    return s.inner(s.jet[0], s.apply(op, s.jet)[0])


def grid_pair_product(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, grid=None) -> complex:
    s = _sampled(state, op_a, op_b, grid=grid)
    return s.inner(s.apply(op_a, s.jet)[0], s.apply(op_b, s.jet)[0])


def grid_composite_mean(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, grid=None) -> complex:
    s = _sampled(state, op_a, op_b, grid=grid)
    return s.inner(s.jet[0], s.apply(op_a, s.apply(op_b, s.jet))[0])


def grid_moment(op: OperatorRep, state: QuantumState, grid=None) -> MomentReport:
    s = _sampled(state, op, grid=grid)
    mean = s.inner(s.jet[0], s.apply(op, s.jet)[0])
    dev = s.shifted_apply(op, mean, s.jet)[0]
    var = _clip_variance(s.inner(dev, dev).real)
    return MomentReport(mean, var, math.sqrt(var))


def grid_cross_correlation(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, grid=None) -> complex:
    return grid_higher_correlation(op_a, op_b, 1, 1, state, grid=grid)


def grid_symmetry_residual(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, grid=None) -> complex:
    s = _sampled(state, op_a, op_b, grid=grid)
    pair = s.inner(s.apply(op_a, s.jet)[0], s.apply(op_b, s.jet)[0])
    comp = s.inner(s.jet[0], s.apply(op_a, s.apply(op_b, s.jet))[0])
    return pair - comp


def grid_commutator_mean(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, grid=None) -> complex:
    s = _sampled(state, op_a, op_b, grid=grid)
    ab = s.inner(s.jet[0], s.apply(op_a, s.apply(op_b, s.jet))[0])
    ba = s.inner(s.jet[0], s.apply(op_b, s.apply(op_a, s.jet))[0])
    return ab - ba


def grid_higher_correlation(
    op_a: OperatorRep, op_b: OperatorRep, r: int, s_: int, state: QuantumState, grid=None
) -> complex:
    if r < 1 or s_ < 1 or r + s_ > MAX_CORRELATION_ORDER:
        raise OrderOverflowError(f"unsupported correlation orders r={r}, s={s_}")
    s = _sampled(state, op_a, op_b, grid=grid)
    mu_a = s.inner(s.jet[0], s.apply(op_a, s.jet)[0])
    mu_b = s.inner(s.jet[0], s.apply(op_b, s.jet)[0])
    left, right = s.jet, s.jet
    for _ in range(r):
        left = s.shifted_apply(op_a, mu_a, left)
    for _ in range(s_):
        right = s.shifted_apply(op_b, mu_b, right)
    return s.inner(left[0], right[0])
