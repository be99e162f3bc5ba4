"""Inequalities and identities between fluctuations, as structured verdicts.

Every evaluator returns a :class:`RelationVerdict` with the two sides of the
relation, their gap ``lhs - rhs`` and a status:

* ``degenerate-equality`` when both sides vanish (below ``DEGENERATE_TOL``);
* ``holds`` when ``gap >= -tol``;
* ``violated`` otherwise.

The analytic oracle collects closed forms per state family; it is computed by
direct summation and is independent of the operator engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import lpmv

from . import numerics
from . import operators as ops
from .errors import DomainError, InvalidSpecError, LengthMismatchError
from .numerics import TWO_PI, QuadratureGrid
from .operators import AngleFunction, OperatorRep
from .states import FourierCircle, QuantumState, boundary_density, normalized, sample_on_grid

DEFAULT_TOL = 1e-10
DEGENERATE_TOL = 1e-12
RESIDUAL_TOL = 1e-9

HOLDS = "holds"
VIOLATED = "violated"
DEGENERATE = "degenerate-equality"


@dataclass(frozen=True)
class RelationVerdict:
    relation: str
    lhs: float
    rhs: float
    gap: float
    status: str
    details: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self) -> bool:
        return self.status != VIOLATED


def verdict(relation: str, lhs: float, rhs: float, tol: float = DEFAULT_TOL, **details) -> RelationVerdict:
    lhs, rhs = float(lhs), float(rhs)
    gap = lhs - rhs
    if abs(lhs) < DEGENERATE_TOL and abs(rhs) < DEGENERATE_TOL:
        status = DEGENERATE
    elif gap >= -tol:
        status = HOLDS
    else:
        status = VIOLATED
    return RelationVerdict(relation, lhs, rhs, gap, status, details)


def _rsur_id(op_a: OperatorRep, op_b: OperatorRep) -> str:
    pair = (op_a.id, op_b.id)
    if pair == ("Lz", "Phi"):
        return "Bound4"
    if pair == ("NumberOp", "Phi"):
        return "Bound17"
    return "RSUR"


def eval_schwarz(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, tol: float = DEFAULT_TOL):
    """``Delta A * Delta B >= |(dA psi, dB psi)|``; holds for every state."""
    da = ops.moment(op_a, state).stddev
    db = ops.moment(op_b, state).stddev
    c = ops.cross_correlation(op_a, op_b, state)
    return verdict("Schwarz23", da * db, abs(c), tol, pair=[op_a.id, op_b.id], correlation=c)


def eval_rsur(
    op_a: OperatorRep,
    op_b: OperatorRep,
    state: QuantumState,
    tol: float = DEFAULT_TOL,
    residual_tol: float = RESIDUAL_TOL,
):
    """``Delta A * Delta B >= |<[A, B]>| / 2`` plus the symmetry-condition check."""
    da = ops.moment(op_a, state).stddev
    db = ops.moment(op_b, state).stddev
    comm = ops.commutator_mean(op_a, op_b, state)
    residuals = ops.condition24_residuals(op_a, op_b, state)
    cond = max(abs(v) for v in residuals.values()) < residual_tol
    return verdict(
        _rsur_id(op_a, op_b),
        da * db,
        0.5 * abs(comm),
        tol,
        pair=[op_a.id, op_b.id],
        commutator=comm,
        condition24=cond,
        residuals=residuals,
    )


@dataclass(frozen=True)
class Decomposition:
    correlation: complex
    real_part: float
    imag_part: float
    anticommutator_half: complex
    commutator_half: complex
    mismatch: float
    consistent: bool


def eval_decomposition(op_a: OperatorRep, op_b: OperatorRep, state: QuantumState, tol: float = RESIDUAL_TOL):
    """Split ``(dA psi, dB psi)`` into anticommutator and commutator halves.

    The split is an identity exactly when the symmetry condition holds;
    ``mismatch`` measures how far it fails.
    """
    c = ops.cross_correlation(op_a, op_b, state)
    mu_a = ops.expectation(op_a, state)
    mu_b = ops.expectation(op_b, state)
    ab = ops.composite_mean(op_a, op_b, state)
    ba = ops.composite_mean(op_b, op_a, state)
    anti = 0.5 * (ab + ba) - mu_a * mu_b
    comm = 0.5 * (ab - ba)
    mismatch = abs(c - (anti + comm))
    return Decomposition(c, c.real, c.imag, anti, comm, mismatch, mismatch < tol)


def eval_boundary_relation(state: QuantumState, hbar: float = 1.0, tol: float = DEFAULT_TOL):
    """``|(dLz psi, dphi psi)| >= (hbar / 2) |1 - 2 pi |psi(2 pi)|^2|`` on the circle."""
    if not isinstance(state.basis, FourierCircle):
        raise DomainError("the boundary relation needs a state on the circle")
    c = ops.cross_correlation(ops.lz(state.basis, hbar), ops.phi(state.basis), state)
    bd = boundary_density(state)
    return verdict("Boundary31", abs(c), 0.5 * hbar * abs(1.0 - TWO_PI * bd), tol, boundary_density=bd)


def eval_bound9(state: QuantumState, hbar: float = 1.0, tol: float = DEFAULT_TOL):
    """``Delta Lz * Delta phi >= (hbar / 2) |1 - 2 pi |psi(2 pi)|^2|`` on the circle."""
    if not isinstance(state.basis, FourierCircle):
        raise DomainError("the seam-corrected bound needs a state on the circle")
    da = ops.moment(ops.lz(state.basis, hbar), state).stddev
    db = ops.moment(ops.phi(state.basis), state).stddev
    bd = boundary_density(state)
    return verdict("Bound9", da * db, 0.5 * hbar * abs(1.0 - TWO_PI * bd), tol, boundary_density=bd)


# ------------------------------------------------------- adjusted relations


def _angle_moments(fn, state: QuantumState, grid: QuadratureGrid | None) -> tuple[float, float]:
    """Mean and standard deviation of a function of the angle in ``state``."""
    if isinstance(fn, np.ndarray) or isinstance(fn, (list, tuple)):
        values = np.asarray(fn, dtype=float)
        if grid is None:
            grid = numerics.periodic_grid(values.size)
        if grid.kind != "periodic-uniform" or values.shape != (grid.size,):
            raise LengthMismatchError(
                f"sampled adjusting functions must match a periodic grid of {grid.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise LengthMismatchError("sampled adjusting function is not finite")
        density = np.abs(sample_on_grid(state, grid)) ** 2
        mean = float(np.sum(grid.weights * density * values))
        var = float(np.sum(grid.weights * density * (values - mean) ** 2))
        return mean, math.sqrt(max(var, 0.0))
    op = ops.multiply_by(state.basis, fn)
    m = ops.moment(op, state)
    return m.mean.real, m.stddev


def _require_circle(state: QuantumState) -> None:
    if not isinstance(state.basis, FourierCircle):
        raise DomainError("adjusted relations are defined for states on the circle")


def eval_adjusted(f, g, state: QuantumState, hbar: float = 1.0, tol: float = DEFAULT_TOL,
                  grid: QuadratureGrid | None = None):
    """``Delta Lz * Delta f(phi) >= hbar |<g(phi)>|``.

    ``f`` and ``g`` are callables of the angle (or :class:`AngleFunction`) or
    arrays sampled on a periodic grid.
    """
    _require_circle(state)
    d_lz = ops.moment(ops.lz(state.basis, hbar), state).stddev
    _, d_f = _angle_moments(f, state, grid)
    mean_g, _ = _angle_moments(g, state, grid)
    return verdict("Adjusted7", d_lz * d_f, hbar * abs(mean_g), tol)


def eval_adjusted_sum(u, v, state: QuantumState, hbar: float = 1.0, tol: float = DEFAULT_TOL,
                      grid: QuadratureGrid | None = None):
    """``(Delta Lz)^2 + hbar^2 (Delta u)^2 >= hbar^2 <v>^2``."""
    _require_circle(state)
    d_lz = ops.moment(ops.lz(state.basis, hbar), state).stddev
    _, d_u = _angle_moments(u, state, grid)
    mean_v, _ = _angle_moments(v, state, grid)
    return verdict("Adjusted8", d_lz**2 + hbar**2 * d_u**2, hbar**2 * mean_v**2, tol)


# ---------------------------------------------------------- classical analogue


def classical_fluctuation_relation(samples_a, samples_b, tol: float = DEFAULT_TOL):
    """Sample version ``std(A) std(B) >= |cov(A, B)|`` with divisor ``n``."""
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise LengthMismatchError(f"sample shapes {a.shape} and {b.shape} differ")
    if a.size < 2:
        raise LengthMismatchError("need at least two samples")
    da = a - a.mean()
    db = b - b.mean()
    cov = float(np.mean(da * db))
    return verdict("Classical35", a.std() * b.std(), abs(cov), tol, covariance=cov)


# ------------------------------------------------------------ analytic oracle


@lru_cache(maxsize=32)
def _oracle_overlap(l: int) -> np.ndarray:
    # scipy's lpmv with explicit factorial normalization, on its own quadrature order
    x, w = np.polynomial.legendre.leggauss(max(200, 2 * l + 8))
    rows = []
    for m in range(-l, l + 1):
        am = abs(m)
        norm = math.sqrt((2 * l + 1) / 2 * math.factorial(l - am) / math.factorial(l + am))
        t = norm * lpmv(am, l, x)
        rows.append(t * (-1) ** am if m < 0 else t)
    th = np.array(rows)
    return (th * w) @ th.T


def _oracle_phi_element(p: int, m: int, mp: int) -> complex:
    """``(e^{i m phi}, phi^p e^{i m' phi}) / (2 pi)``."""
    return numerics.phi_moment_integral(p, mp - m) / TWO_PI


def _degenerate_oracle(l: int, c, hbar: float) -> dict:
    c = normalized(c)
    if c.size != 2 * l + 1:
        raise InvalidSpecError(f"l = {l} needs {2 * l + 1} coefficients")
    o = _oracle_overlap(l)
    ms = range(-l, l + 1)
    w = np.abs(c) ** 2
    mean_m = sum(w[i] * m for i, m in enumerate(ms))
    mean_m2 = sum(w[i] * m * m for i, m in enumerate(ms))
    phi1 = phi2 = t = 0j
    for i, m in enumerate(ms):
        for j, mp in enumerate(ms):
            cc = np.conj(c[i]) * c[j] * o[i, j]
            e1 = _oracle_phi_element(1, m, mp)
            phi1 += cc * e1
            phi2 += cc * _oracle_phi_element(2, m, mp)
            t += cc * m * e1
    correction = 1.0 + 2.0 * t.imag
    var_lz = hbar**2 * (mean_m2 - mean_m**2)
    var_phi = phi2.real - phi1.real**2
    return {
        "mean_Lz": hbar * mean_m,
        "dLz": math.sqrt(max(var_lz, 0.0)),
        "mean_phi": phi1.real,
        "dphi": math.sqrt(max(var_phi, 0.0)),
        "correction": correction,
        "residual": 1j * hbar * correction,
    }


def analytic_oracle(case: str, **params) -> dict:
    """Closed-form fluctuations and residuals for the named state family.

    Residual values use this package's conjugation convention,
    ``S = (A psi, B psi) - (psi, A B psi)``.

    * ``Circular6``: single-mode circle states (also the phase-circle Fock states).
    * ``QTP11``: ``n, I, omega, hbar`` for the torsion pendulum.
    * ``Degenerate13_14``: ``l, c, hbar`` for a spherical superposition.
    * ``Residual27_30``: ``family`` in {circular, fock_phase, oscillator,
      degenerate} plus that family's parameters.
    """
    hbar = float(params.get("hbar", 1.0))
    if case == "Circular6":
        return {"dLz": 0.0, "dN": 0.0, "dphi": math.pi / math.sqrt(3.0)}
    if case == "QTP11":
        n = int(params.get("n", 0))
        inertia = float(params.get("I", 1.0))
        omega = float(params.get("omega", 1.0))
        d_lz = math.sqrt(hbar * inertia * omega * (n + 0.5))
        d_phi = math.sqrt(hbar / (inertia * omega) * (n + 0.5))
        return {"dLz": d_lz, "dphi": d_phi, "product": d_lz * d_phi, "residual": 0j}
    if case == "Degenerate13_14":
        return _degenerate_oracle(int(params["l"]), params["c"], hbar)
    if case == "Residual27_30":
        family = params.get("family")
        if family == "circular":
            return {"residual": 1j * hbar}
        if family == "fock_phase":
            return {"residual": -1j}
        if family == "oscillator":
            return {"residual": 0j}
        if family == "degenerate":
            out = _degenerate_oracle(int(params["l"]), params["c"], hbar)
            return {"residual": out["residual"], "correction": out["correction"]}
        raise InvalidSpecError(f"unknown residual family {family!r}")
    raise InvalidSpecError(f"unknown oracle case {case!r}")
