"""State families and their sampled representations.

Three bases are used:

* ``FourierCircle(K)``: modes ``e_k(phi) = exp(i k phi) / sqrt(2 pi)`` for
  ``k = -K .. K`` on the circle ``phi in [0, 2 pi)``; coefficient index ``k + K``.
* ``HermiteLine(N, scale)``: Hermite functions ``scale^{-1/2} h_n(phi / scale)``
  for ``n = 0 .. N-1`` on the whole real line (torsion pendulum, rectilinear
  oscillator).
* ``SphericalShell(l)``: the spherical harmonics ``Y_lm`` of one orbital number,
  coefficient index ``m + l``.

Normalization constants live in the basis functions, so every coefficient
vector is unit-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import hermite as H

from . import numerics
from .errors import DomainError, InvalidSpecError
from .numerics import TWO_PI, QuadratureGrid, SphereGrid

NORM_TOL = 1e-12


@dataclass(frozen=True)
class FourierCircle:
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise InvalidSpecError("FourierCircle needs K >= 1")

    @property
    def dim(self) -> int:
        return 2 * self.K + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)


@dataclass(frozen=True)
class HermiteLine:
    N: int
    scale: float

    def __post_init__(self):
        if self.N < 1:
            raise InvalidSpecError("HermiteLine needs N >= 1")
        if not self.scale > 0:
            raise InvalidSpecError("HermiteLine length scale must be positive")

    @property
    def dim(self) -> int:
        return self.N


@dataclass(frozen=True)
class SphericalShell:
    l: int

    def __post_init__(self):
        if self.l < 0:
            raise InvalidSpecError("SphericalShell needs l >= 0")
        if self.l > numerics.MAX_LEGENDRE_DEGREE:
            raise InvalidSpecError(f"l must not exceed {numerics.MAX_LEGENDRE_DEGREE}")

    @property
    def dim(self) -> int:
        return 2 * self.l + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.l, self.l + 1)


BasisId = Union[FourierCircle, HermiteLine, SphericalShell]


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Immutable pure state: a unit-norm coefficient vector in a basis."""

    basis: BasisId
    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size != self.basis.dim:
            raise InvalidSpecError(
                f"basis {self.basis} needs {self.basis.dim} coefficients, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidSpecError("coefficients must be finite")
        norm = np.linalg.norm(c)
        if abs(norm * norm - 1.0) > NORM_TOL:
            raise InvalidSpecError(f"coefficients are not normalized (|c|^2 = {norm * norm!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def with_coeffs(self, coeffs, label: str | None = None) -> QuantumState:
        return QuantumState(self.basis, normalized(coeffs), self.label if label is None else label)


def normalized(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    norm = np.linalg.norm(c)
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidSpecError("coefficient vector must be finite and non-zero")
    return c / norm


# ---------------------------------------------------------------- state specs


@dataclass(frozen=True)
class CircularEigenstate:
    m: int
    K: int | None = None


@dataclass(frozen=True)
class FockPhase:
    n: int
    K: int | None = None


@dataclass(frozen=True)
class Oscillator:
    n: int
    I: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    N: int | None = None


@dataclass(frozen=True)
class DegenerateRotation:
    l: int
    c: tuple[complex, ...]


@dataclass(frozen=True)
class RandomPeriodic:
    K: int
    seed: int


@dataclass(frozen=True)
class ExplicitFourier:
    a: tuple[complex, ...] = field(default_factory=tuple)


StateSpec = Union[
    CircularEigenstate, FockPhase, Oscillator, DegenerateRotation, RandomPeriodic, ExplicitFourier
]


def oscillator_scale(inertia: float, omega: float, hbar: float) -> float:
    """Length scale ``sqrt(hbar / (I omega))`` of the oscillator ground state."""
    if not (inertia > 0 and omega > 0 and hbar > 0):
        raise InvalidSpecError("I, omega and hbar must all be positive")
    return math.sqrt(hbar / (inertia * omega))


def _single_mode(basis, index: int, label: str) -> QuantumState:
    c = np.zeros(basis.dim, dtype=complex)
    c[index] = 1.0
    return QuantumState(basis, c, label)


def make_state(spec: StateSpec) -> QuantumState:
    """Build the normalized state described by ``spec``."""
    if isinstance(spec, CircularEigenstate):
        m = int(spec.m)
        K = spec.K if spec.K is not None else max(abs(m), 1)
        if abs(m) > K:
            raise InvalidSpecError(f"|m| = {abs(m)} exceeds K = {K}")
        return _single_mode(FourierCircle(K), m + K, f"circular(m={m})")

    if isinstance(spec, FockPhase):
        n = int(spec.n)
        if n < 0:
            raise InvalidSpecError("Fock-phase quantum number n must be >= 0")
        K = spec.K if spec.K is not None else max(n, 1)
        if n > K:
            raise InvalidSpecError(f"n = {n} exceeds K = {K}")
        # the phase-representation eigenfunction is exp(-i n phi)
        return _single_mode(FourierCircle(K), -n + K, f"fock_phase(n={n})")

    if isinstance(spec, Oscillator):
        n = int(spec.n)
        if n < 0:
            raise InvalidSpecError("oscillator quantum number n must be >= 0")
        N = spec.N if spec.N is not None else max(numerics.DEFAULT_HERMITE_ORDER, n + 1)
        if n >= N:
            raise InvalidSpecError(f"n = {n} does not fit a truncation of {N} modes")
        scale = oscillator_scale(spec.I, spec.omega, spec.hbar)
        return _single_mode(
            HermiteLine(N, scale),
            n,
            f"oscillator(n={n}, I={spec.I!r}, omega={spec.omega!r}, hbar={spec.hbar!r})",
        )

    if isinstance(spec, DegenerateRotation):
        basis = SphericalShell(int(spec.l))
        c = np.asarray(spec.c, dtype=complex)
        if c.size != basis.dim:
            raise InvalidSpecError(f"l = {spec.l} needs {basis.dim} coefficients, got {c.size}")
        return QuantumState(basis, normalized(c), f"degenerate(l={spec.l})")

    if isinstance(spec, RandomPeriodic):
        basis = FourierCircle(int(spec.K))
        rng = np.random.default_rng(spec.seed)
        z = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        return QuantumState(basis, normalized(z), f"random(K={spec.K}, seed={spec.seed})")

    if isinstance(spec, ExplicitFourier):
        a = np.asarray(spec.a, dtype=complex)
        if a.size < 3 or a.size % 2 == 0:
            raise InvalidSpecError("Fourier amplitudes need odd length 2K+1 with K >= 1")
        return QuantumState(FourierCircle(a.size // 2), normalized(a), f"fourier(K={a.size // 2})")

    raise InvalidSpecError(f"unknown state spec {spec!r}")


def random_shell_state(l: int, rng: np.random.Generator) -> QuantumState:
    """Uniformly distributed unit vector in the ``2l+1`` dimensional shell."""
    basis = SphericalShell(l)
    z = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    return QuantumState(basis, normalized(z), f"random_shell(l={l})")


# ---------------------------------------------------------- boundary and grids


def boundary_value(state: QuantumState) -> complex:
    """``psi(2 pi^-)``, the left limit at the seam, as the exact coefficient sum."""
    if not isinstance(state.basis, FourierCircle):
        raise DomainError("boundary value is only defined for states on the circle")
    return complex(np.sum(state.coeffs)) / math.sqrt(TWO_PI)


def boundary_density(state: QuantumState) -> float:
    """``|psi(2 pi)|^2 = |sum_k a_k|^2 / (2 pi)``."""
    return abs(boundary_value(state)) ** 2


def _check_domain(state: QuantumState, grid) -> None:
    basis = state.basis
    if isinstance(basis, FourierCircle):
        ok = isinstance(grid, QuadratureGrid) and grid.kind in ("periodic-uniform", "gauss-legendre")
        if ok:
            lo, hi = grid.domain
            ok = lo >= -1e-12 and hi <= TWO_PI + 1e-12 and abs(hi - lo - TWO_PI) < 1e-12
    elif isinstance(basis, HermiteLine):
        ok = isinstance(grid, QuadratureGrid) and grid.kind == "hermite-line"
    else:
        ok = isinstance(grid, SphereGrid)
    if not ok:
        raise DomainError(f"grid of kind {getattr(grid, 'kind', grid)!r} does not cover basis {basis}")


def sample_derivatives(state: QuantumState, grid, order: int = 0) -> list[np.ndarray]:
    """Samples of ``d^j psi / dphi^j`` for ``j = 0 .. order`` on the grid nodes.

    Derivatives are taken analytically term by term in each basis, so the
    returned arrays are exact pointwise values (no finite differences).
    """
    _check_domain(state, grid)
    basis = state.basis
    c = state.coeffs
    if isinstance(basis, FourierCircle):
        k = basis.modes
        phase = np.exp(1j * np.outer(grid.nodes, k)) / math.sqrt(TWO_PI)
        return [phase @ (c * (1j * k) ** j) for j in range(order + 1)]

    if isinstance(basis, SphericalShell):
        l = basis.l
        m = basis.modes
        theta = np.array([numerics.assoc_legendre_norm(l, int(mm), grid.x_grid.nodes) for mm in m])
        azim = np.exp(1j * np.outer(grid.phi_grid.nodes, m)) / math.sqrt(TWO_PI)
        out = []
        for j in range(order + 1):
            cj = c * (1j * m) ** j
            # psi[x_i, phi_j] = sum_m theta[m, x_i] cj[m] azim[phi_j, m]
            out.append(np.einsum("mx,m,pm->xp", theta, cj, azim).ravel())
        return out

    # Hermite line: psi(xi) = exp(-xi^2/2) P(xi), with d/dxi acting as P -> P' - xi P
    scale = basis.scale
    xi = grid.nodes / scale
    n = np.arange(basis.N)
    norms = np.exp(-0.5 * (n * math.log(2.0) + np.array([math.lgamma(v + 1.0) for v in n])
                           + 0.5 * math.log(math.pi)))
    poly = H.hermtrim(c * norms, tol=0.0)
    gauss = np.exp(-0.5 * xi * xi) / math.sqrt(scale)
    out = []
    for j in range(order + 1):
        out.append(gauss * H.hermval(xi, poly) / scale**j)
        poly = H.hermsub(H.hermder(poly), H.hermmulx(poly))
    return out


def sample_on_grid(state: QuantumState, grid) -> np.ndarray:
    """Pointwise values of the wave function on the grid nodes."""
    return sample_derivatives(state, grid, 0)[0]


def default_grid(basis: BasisId, nodes: int | None = None):
    """A quadrature grid on which sampled integrals of this basis are exact.

    Circle states integrate over ``[0, 2 pi]`` with Gauss-Legendre rather than
    the periodic rule because the integrands carry powers of the angle.
    """
    if isinstance(basis, FourierCircle):
        n = max(nodes or numerics.DEFAULT_LEGENDRE_ORDER, 8 * basis.K + 64)
        return numerics.gauss_legendre_grid(n, (0.0, TWO_PI))
    if isinstance(basis, SphericalShell):
        n_phi = max(nodes or numerics.DEFAULT_LEGENDRE_ORDER, 8 * basis.l + 64)
        return numerics.sphere_grid(max(numerics.DEFAULT_LEGENDRE_ORDER, basis.l + 16), n_phi)
    return numerics.hermite_line_grid(max(nodes or numerics.DEFAULT_HERMITE_ORDER, basis.N + 24),
                                      basis.scale)
