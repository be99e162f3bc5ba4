"""Observables, their exact actions and all moment-type scalar products.

Every operator is one of two kinds:

* ``derivative``: ``coef * d/dphi`` (``L_z = -i hbar d/dphi``, ``N = i d/dphi``,
  the line momentum);
* ``multiply``: multiplication by a real function of the angle (``phi``,
  ``phi**2``, the line position, caller-supplied adjusting functions).

On the circle and on a spherical shell a derivative is diagonal in the modes
and maps the finite span to itself; a multiplication does not, but every
scalar product it enters is a finite quadratic form in the Gram matrix
``G_kk' = (e_k, f e_k')``, which for polynomial ``f`` follows from the
closed-form azimuthal moments. Composite actions ``D (f psi)`` use the product
rule on the open interval ``(0, 2 pi)``:

    D (f psi) = f (D psi) + coef * f' psi

which is what makes ``(L_z psi, phi psi)`` differ from ``(psi, L_z phi psi)``
whenever ``psi(2 pi) != 0``. Feeding ``phi psi`` through the Fourier derivative
instead would differentiate the seam jump as a delta function and hide the
effect completely.

On the Hermite line both kinds are banded matrices built from the ladder
operators, applied to coefficient vectors padded by ``PAD`` modes so that
products of up to ``PAD`` factors are exact.

Scalar products are conjugate-linear in the first slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from . import numerics
from .errors import (
    BasisMismatchError,
    NumericalError,
    OrderOverflowError,
    UnsupportedOperationError,
)
from .numerics import TWO_PI
from .states import BasisId, FourierCircle, HermiteLine, QuantumState, SphericalShell

MAX_CORRELATION_ORDER = 8
PAD = MAX_CORRELATION_ORDER + 2
VARIANCE_TOL = 1e-12


# ------------------------------------------------------------ angle functions


@dataclass(frozen=True, eq=False)
class AngleFunction:
    """A real function of the angle, either a polynomial or a callable.

    Callables may carry their derivative (itself an ``AngleFunction``); it is
    only needed where a derivative operator acts after the multiplication.
    """

    poly: Polynomial | None = None
    func: Callable | None = None
    deriv: AngleFunction | None = None
    name: str = "f"

    @classmethod
    def polynomial(cls, coef, name: str | None = None) -> AngleFunction:
        p = Polynomial(np.asarray(coef, dtype=float))
        return cls(poly=p, name=name or f"poly{tuple(p.coef)}")

    @classmethod
    def from_callable(cls, func: Callable, deriv: Callable | None = None, name: str = "f"):
        d = cls(func=deriv, name=f"{name}'") if deriv is not None else None
        return cls(func=func, deriv=d, name=name)

    @property
    def is_polynomial(self) -> bool:
        return self.poly is not None

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.poly is not None:
            return self.poly(phi)
        return np.broadcast_to(np.asarray(self.func(phi), dtype=float), phi.shape)

    def derivative(self) -> AngleFunction:
        if self.poly is not None:
            return AngleFunction(poly=self.poly.deriv(), name=f"{self.name}'")
        if self.deriv is None:
            raise UnsupportedOperationError(
                f"derivative of adjusting function {self.name!r} was not supplied"
            )
        return self.deriv

    def __mul__(self, other: AngleFunction) -> AngleFunction:
        if self.poly is not None and other.poly is not None:
            return AngleFunction(poly=self.poly * other.poly, name=f"{self.name}*{other.name}")
        f, g = self, other
        deriv = None
        if _has_derivative(f) and _has_derivative(g):
            fp, gp = f.derivative(), g.derivative()
            deriv = AngleFunction(func=lambda x: fp(x) * g(x) + f(x) * gp(x))
        return AngleFunction(func=lambda x: f(x) * g(x), deriv=deriv, name=f"{f.name}*{g.name}")

    def shifted(self, mu: float) -> AngleFunction:
        """``f - mu``."""
        if self.poly is not None:
            return AngleFunction(poly=self.poly - mu, name=f"({self.name}-mu)")
        f = self
        return AngleFunction(func=lambda x: f(x) - mu, deriv=f.deriv, name=f"({f.name}-mu)")

    def power(self, s: int) -> AngleFunction:
        out = AngleFunction.polynomial([1.0], name="1")
        for _ in range(s):
            out = out * self
        return out


def _has_derivative(f: AngleFunction) -> bool:
    return f.poly is not None or f.deriv is not None


# ----------------------------------------------------------------- operators


@dataclass(frozen=True, eq=False)
class OperatorRep:
    """An observable acting in a fixed basis."""

    id: str
    basis: BasisId
    kind: str  # "derivative" | "multiply"
    coef: complex = 0j
    func: AngleFunction | None = None

    @property
    def hermitian(self) -> bool:
        if self.kind == "derivative":
            return abs(complex(self.coef).real) == 0.0
        return True

    @property
    def is_derivative(self) -> bool:
        return self.kind == "derivative"

    def matrix(self) -> np.ndarray:
        """Dense representation restricted to the basis (for inspection)."""
        b = self.basis
        if isinstance(b, HermiteLine):
            eye = np.eye(b.N + PAD, dtype=complex)[:, : b.N]
            return _line_apply(self, eye)[: b.N]
        if self.is_derivative:
            return np.diag(_diag(self))
        return gram(b, self.func)


def lz(basis: BasisId, hbar: float = 1.0) -> OperatorRep:
    """``L_z = -i hbar d/dphi``."""
    return OperatorRep("Lz", basis, "derivative", coef=-1j * hbar)


def number_op(basis: BasisId) -> OperatorRep:
    """``N = i d/dphi`` in the phase representation; mode ``exp(-i n phi)`` has eigenvalue ``n``."""
    if not isinstance(basis, FourierCircle):
        raise BasisMismatchError("the number operator is defined on the phase circle only")
    return OperatorRep("NumberOp", basis, "derivative", coef=1j)


def phi(basis: BasisId) -> OperatorRep:
    return OperatorRep("Phi", basis, "multiply", func=AngleFunction.polynomial([0.0, 1.0], "phi"))


def phi_squared(basis: BasisId) -> OperatorRep:
    return OperatorRep(
        "PhiSquared", basis, "multiply", func=AngleFunction.polynomial([0.0, 0.0, 1.0], "phi^2")
    )


def position_line(basis: BasisId) -> OperatorRep:
    if not isinstance(basis, HermiteLine):
        raise BasisMismatchError("PositionLine needs a HermiteLine basis")
    return OperatorRep("PositionLine", basis, "multiply", func=AngleFunction.polynomial([0.0, 1.0], "x"))


def momentum_line(basis: BasisId, hbar: float = 1.0) -> OperatorRep:
    if not isinstance(basis, HermiteLine):
        raise BasisMismatchError("MomentumLine needs a HermiteLine basis")
    return OperatorRep("MomentumLine", basis, "derivative", coef=-1j * hbar)


def multiply_by(
    basis: BasisId, func: Callable | AngleFunction, deriv: Callable | None = None, name: str = "f"
) -> OperatorRep:
    """Multiplication by a real adjusting function of the angle."""
    f = func if isinstance(func, AngleFunction) else AngleFunction.from_callable(func, deriv, name)
    if isinstance(basis, HermiteLine) and not f.is_polynomial:
        raise BasisMismatchError("adjusting functions of the angle need a circle or shell basis")
    return OperatorRep(f"MultiplyByFunction({f.name})", basis, "multiply", func=f)


# ---------------------------------------------------------- basis machinery


def _modes(basis) -> np.ndarray:
    return basis.modes


def _diag(op: OperatorRep) -> np.ndarray:
    """Eigenvalues of ``coef * d/dphi`` on ``exp(i k phi)``."""
    return op.coef * 1j * _modes(op.basis)


@lru_cache(maxsize=64)
def _moment_table(K: int, pmax: int) -> np.ndarray:
    """``I_p(d) / (2 pi)`` for ``p = 0..pmax`` and ``d = -2K..2K``."""
    d = np.arange(-2 * K, 2 * K + 1)
    out = np.empty((pmax + 1, d.size), dtype=complex)
    for j, dd in enumerate(d):
        high = numerics.phi_power_moments(pmax, int(dd)) if pmax > 2 else None
        for p in range(pmax + 1):
            out[p, j] = numerics.phi_moment_integral(p, int(dd)) if p <= 2 else high[p]
    out /= TWO_PI
    out.setflags(write=False)
    return out


def _toeplitz_gram(K: int, f: AngleFunction) -> np.ndarray:
    """``(e_k, f e_k')`` for circle modes ``k, k' in -K..K``."""
    k = np.arange(-K, K + 1)
    diff = k[None, :] - k[:, None] + 2 * K
    if f.is_polynomial:
        coef = f.poly.coef
        t = coef @ _moment_table(K, coef.size - 1)
    else:
        nodes, basis_w = _callable_quadrature(K)
        t = basis_w @ f(nodes) / TWO_PI
    return t[diff]


@lru_cache(maxsize=64)
def _callable_quadrature(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weighted exponentials ``w_j exp(i d x_j)`` for Gram rows of callables."""
    grid = numerics.gauss_legendre_grid(max(256, 16 * K + 64), (0.0, TWO_PI))
    d = np.arange(-2 * K, 2 * K + 1)
    basis_w = np.exp(1j * np.outer(d, grid.nodes)) * grid.weights
    basis_w.setflags(write=False)
    return grid.nodes, basis_w


@lru_cache(maxsize=128)
def theta_overlap(l: int) -> np.ndarray:
    """``O_mm' = integral Theta_lm Theta_lm' dx`` over the polar angle."""
    grid = numerics.gauss_legendre_grid(max(numerics.DEFAULT_LEGENDRE_ORDER, l + 16))
    th = np.array([numerics.assoc_legendre_norm(l, m, grid.nodes) for m in range(-l, l + 1)])
    o = (th * grid.weights) @ th.T
    o.setflags(write=False)
    return o


def gram(basis: BasisId, f: AngleFunction) -> np.ndarray:
    """Matrix of ``(b_i, f b_j)`` in a circle or shell basis."""
    if isinstance(basis, FourierCircle):
        return _toeplitz_gram(basis.K, f)
    if isinstance(basis, SphericalShell):
        return theta_overlap(basis.l) * _toeplitz_gram(basis.l, f)
    raise UnsupportedOperationError("Gram matrices are built for circle and shell bases only")


@lru_cache(maxsize=32)
def _line_ladders(basis: HermiteLine) -> tuple[np.ndarray, np.ndarray]:
    """Padded position ``X`` and derivative ``D = d/dphi`` matrices."""
    n = basis.N + PAD
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    x = basis.scale * (a + a.T) / math.sqrt(2.0)
    d = (a - a.T) / (math.sqrt(2.0) * basis.scale)
    x.setflags(write=False)
    d.setflags(write=False)
    return x, d


def _line_apply(op: OperatorRep, v: np.ndarray) -> np.ndarray:
    x, d = _line_ladders(op.basis)
    if op.is_derivative:
        return op.coef * (d @ v)
    coef = op.func.poly.coef
    out = coef[-1] * v
    for c in coef[-2::-1]:
        out = x @ out + c * v
    return out


def _line_vector(state: QuantumState) -> np.ndarray:
    return np.concatenate([state.coeffs, np.zeros(PAD, dtype=complex)])


def _check(state: QuantumState, *ops: OperatorRep) -> None:
    for op in ops:
        if op.basis != state.basis:
            raise BasisMismatchError(f"operator {op.id} lives in {op.basis}, state in {state.basis}")


# ------------------------------------------------------------ scalar products


def expectation(op: OperatorRep, state: QuantumState) -> complex:
    """``(psi, A psi)``."""
    _check(state, op)
    a = state.coeffs
    if isinstance(state.basis, HermiteLine):
        v = _line_vector(state)
        return complex(np.vdot(v, _line_apply(op, v)))
    if op.is_derivative:
        return complex(np.vdot(a, _diag(op) * a))
    return complex(np.vdot(a, gram(state.basis, op.func) @ a))


def pair_product(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> complex:
    """``(A psi, B psi)``."""
    _check(state, op_a, op_b)
    a = state.coeffs
    if isinstance(state.basis, HermiteLine):
        v = _line_vector(state)
        return complex(np.vdot(_line_apply(op_a, v), _line_apply(op_b, v)))
    basis = state.basis
    if op_a.is_derivative and op_b.is_derivative:
        return complex(np.vdot(_diag(op_a) * a, _diag(op_b) * a))
    if op_a.is_derivative:
        return complex(np.vdot(_diag(op_a) * a, gram(basis, op_b.func) @ a))
    if op_b.is_derivative:
        return complex(np.vdot(a, gram(basis, op_a.func) @ (_diag(op_b) * a)))
    return complex(np.vdot(a, gram(basis, op_a.func * op_b.func) @ a))


def composite_mean(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> complex:
    """``(psi, A B psi)``: apply ``B`` first, then ``A``."""
    _check(state, op_a, op_b)
    a = state.coeffs
    if isinstance(state.basis, HermiteLine):
        v = _line_vector(state)
        return complex(np.vdot(v, _line_apply(op_a, _line_apply(op_b, v))))
    basis = state.basis
    if op_a.is_derivative and op_b.is_derivative:
        return complex(np.vdot(a, _diag(op_a) * _diag(op_b) * a))
    if op_b.is_derivative:
        return complex(np.vdot(a, gram(basis, op_a.func) @ (_diag(op_b) * a)))
    if op_a.is_derivative:
        f = op_b.func
        value = np.vdot(a, gram(basis, f) @ (_diag(op_a) * a))
        value += op_a.coef * np.vdot(a, gram(basis, f.derivative()) @ a)
        return complex(value)
    return complex(np.vdot(a, gram(basis, op_a.func * op_b.func) @ a))


@dataclass(frozen=True)
class MomentReport:
    mean: complex
    variance: float
    stddev: float


def _clip_variance(value: float) -> float:
    if value < -VARIANCE_TOL:
        raise NumericalError(f"negative variance {value!r}")
    return max(value, 0.0)


def moment(op: OperatorRep, state: QuantumState) -> MomentReport:
    """Mean ``(psi, A psi)`` and variance ``(dA psi, dA psi)``."""
    mean = expectation(op, state)
    var = _clip_variance(pair_product(op, op, state).real - abs(mean) ** 2)
    return MomentReport(mean, var, math.sqrt(var))


def cross_correlation(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> complex:
    """``(dA psi, dB psi)`` with ``dA = A - <A>``."""
    mu_a = expectation(op_a, state)
    mu_b = expectation(op_b, state)
    return pair_product(op_a, op_b, state) - np.conj(mu_a) * mu_b


def symmetry_residual(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> complex:
    """``S = (A psi, B psi) - (psi, A B psi)``; zero when the pair obeys the symmetry condition."""
    return pair_product(op_a, op_b, state) - composite_mean(op_a, op_b, state)


def condition24_residuals(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> dict:
    """Residuals for the four ordered pairs (A,A), (A,B), (B,A), (B,B)."""
    ops = {"A": op_a, "B": op_b}
    return {
        f"{j}{k}": symmetry_residual(ops[j], ops[k], state) for j in "AB" for k in "AB"
    }


def commutator_mean(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState) -> complex:
    """``(psi, A B psi) - (psi, B A psi)``."""
    return composite_mean(op_a, op_b, state) - composite_mean(op_b, op_a, state)


def higher_correlation(
    op_a: OperatorRep,
    op_b: OperatorRep,
    r: int,
    s: int,
    state: QuantumState,
    max_order: int = MAX_CORRELATION_ORDER,
) -> complex:
    """``((dA)^r psi, (dB)^s psi)``."""
    if r < 1 or s < 1:
        raise OrderOverflowError("correlation orders must be positive")
    if r + s > max_order:
        raise OrderOverflowError(f"r + s = {r + s} exceeds maximum {max_order}")
    if max_order > MAX_CORRELATION_ORDER:
        raise OrderOverflowError(f"orders above {MAX_CORRELATION_ORDER} are not padded for")
    mu_a = expectation(op_a, state)
    mu_b = expectation(op_b, state)
    a = state.coeffs

    if isinstance(state.basis, HermiteLine):
        v = _line_vector(state)

        def powered(op, mu, n):
            w = v
            for _ in range(n):
                w = _line_apply(op, w) - mu * w
            return w

        return complex(np.vdot(powered(op_a, mu_a, r), powered(op_b, mu_b, s)))

    basis = state.basis
    left = (_diag(op_a) - mu_a) ** r * a if op_a.is_derivative else op_a.func.shifted(mu_a.real).power(r)
    right = (_diag(op_b) - mu_b) ** s * a if op_b.is_derivative else op_b.func.shifted(mu_b.real).power(s)
    if op_a.is_derivative and op_b.is_derivative:
        return complex(np.vdot(left, right))
    if op_a.is_derivative:
        return complex(np.vdot(left, gram(basis, right) @ a))
    if op_b.is_derivative:
        return complex(np.vdot(a, gram(basis, left) @ right))
    return complex(np.vdot(a, gram(basis, left * right) @ a))
