"""Coefficient-space search over degenerate-rotation states of one shell.

A state ``psi = sum_m c_m Y_lm`` is parameterized by ``x in R^{2(2l+1)}`` with
``c = (x_re + i x_im) / |x|``, which projects every simplex vertex onto the
unit sphere. Each restart runs Nelder-Mead from its own seeded start point;
restarts draw independent sub-seeds from one ``SeedSequence``, so the merged
result does not depend on scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import gridpath
from . import operators as ops
from .errors import InvalidSpecError
from .relations import DEFAULT_TOL, analytic_oracle
from .states import QuantumState, SphericalShell

log = logging.getLogger(__name__)

OBJECTIVES = ("minimize_product", "maximize_product", "target_gap", "zero_residual")
SATISFIES = "satisfies-bound4"
VIOLATES = "violates-bound4"


@dataclass(frozen=True)
class SearchConfig:
    l: int
    objective: str = "minimize_product"
    target_gap: float = 0.0
    restarts: int = 32
    max_iter: int = 2000
    tol: float = 1e-12
    seed: int = 0
    hbar: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if self.l < 1:
            raise InvalidSpecError("search needs l >= 1; an l = 0 shell has a single coefficient")
        if self.objective not in OBJECTIVES:
            raise InvalidSpecError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.restarts < 1:
            raise InvalidSpecError("restarts must be >= 1")
        if self.max_iter < 1:
            raise InvalidSpecError("max_iter must be >= 1")
        if not self.tol > 0:
            raise InvalidSpecError("tol must be positive")
        if not self.hbar > 0:
            raise InvalidSpecError("hbar must be positive")


@dataclass(frozen=True)
class SearchResult:
    coeffs: np.ndarray
    objective: str
    objective_value: float
    product: float
    classification: str
    residual_recheck: complex
    residual_direct: complex
    certificate_product: float
    iterations: int
    converged: bool
    converged_restarts: int
    best_restart: int
    seed: int
    message: str


class ShellObjective:
    """Fast quadratic-form evaluation of fluctuations in one shell."""

    def __init__(self, l: int, hbar: float = 1.0):
        self.l = l
        self.hbar = hbar
        self.basis = SphericalShell(l)
        self.m = self.basis.modes.astype(float)
        self.g1 = ops.gram(self.basis, ops.phi(self.basis).func)
        self.g2 = ops.gram(self.basis, ops.phi_squared(self.basis).func)
        self.overlap = np.asarray(ops.theta_overlap(l))

    def variances(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Variances of ``L_z`` and ``phi`` for one vector or a batch (rows)."""
        c = np.atleast_2d(c)
        w = np.abs(c) ** 2
        var_lz = self.hbar**2 * (w @ self.m**2 - (w @ self.m) ** 2)
        e1 = np.einsum("ni,ij,nj->n", c.conj(), self.g1, c).real
        e2 = np.einsum("ni,ij,nj->n", c.conj(), self.g2, c).real
        return np.clip(var_lz, 0.0, None), np.clip(e2 - e1**2, 0.0, None)

    def products(self, c: np.ndarray) -> np.ndarray:
        var_lz, var_phi = self.variances(c)
        return np.sqrt(var_lz * var_phi)

    def correction(self, c: np.ndarray) -> float:
        """Seam term ``c^H O c``, the braces of the shell residual ``i hbar {...}``."""
        return float(np.vdot(c, self.overlap @ c).real)

    def loss(self, c: np.ndarray, objective: str, target_gap: float) -> float:
        """Smooth quantity actually minimized."""
        if objective == "zero_residual":
            return self.correction(c)
        var_lz, var_phi = self.variances(c)
        p2 = float(var_lz[0] * var_phi[0])
        if objective == "minimize_product":
            return p2
        if objective == "maximize_product":
            return -p2
        return (math.sqrt(p2) - 0.5 * self.hbar - target_gap) ** 2

    def reported(self, c: np.ndarray, objective: str, target_gap: float) -> float:
        if objective == "zero_residual":
            return abs(self.correction(c))
        p = float(self.products(c)[0])
        if objective == "target_gap":
            return abs(p - 0.5 * self.hbar - target_gap)
        return p


def _to_coeffs(x: np.ndarray) -> np.ndarray:
    d = x.size // 2
    c = x[:d] + 1j * x[d:]
    return c / np.linalg.norm(c)


def canonical_phase(c: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest coefficient is real and positive."""
    c = np.asarray(c, dtype=complex)
    idx = int(np.argmax(np.abs(c)))
    return c * (abs(c[idx]) / c[idx])


def _restart(obj: ShellObjective, cfg: SearchConfig, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    x0 = rng.standard_normal(2 * obj.basis.dim)

    def fun(x):
        n = np.linalg.norm(x)
        if n == 0.0:
            return math.inf
        return obj.loss(_to_coeffs(x), cfg.objective, cfg.target_gap)

    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={"maxiter": cfg.max_iter, "xatol": 1e-10, "fatol": cfg.tol, "adaptive": True},
    )
    c = _to_coeffs(res.x)
    return c, float(fun(res.x)), int(res.nit), bool(res.success), str(res.message)


def _snap_to_mode(obj: ShellObjective, c: np.ndarray, cfg: SearchConfig) -> np.ndarray:
    # a minimizer that has concentrated on one m is compared with the exact basis vector
    idx = int(np.argmax(np.abs(c)))
    if abs(c[idx]) ** 2 < 1.0 - 1e-6:
        return c
    e = np.zeros_like(c)
    e[idx] = 1.0
    if obj.loss(e, cfg.objective, cfg.target_gap) <= obj.loss(c, cfg.objective, cfg.target_gap):
        return e
    return c


def optimize_coefficients(cfg: SearchConfig) -> SearchResult:
    """Multi-start Nelder-Mead on the coefficient sphere of shell ``cfg.l``."""
    obj = ShellObjective(cfg.l, cfg.hbar)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(lambda s: _restart(obj, cfg, s), seeds))
    else:
        runs = [_restart(obj, cfg, s) for s in seeds]

    best = min(range(len(runs)), key=lambda i: (runs[i][1], i))
    c, _, nit, success, message = runs[best]
    if cfg.objective == "minimize_product":
        c = _snap_to_mode(obj, c, cfg)
    c = canonical_phase(c / np.linalg.norm(c))
    n_conv = sum(r[3] for r in runs)
    if not success:
        log.warning("best restart %d did not converge: %s", best, message)

    product = float(obj.products(c)[0])
    state = QuantumState(obj.basis, c, f"search(l={cfg.l}, {cfg.objective})")
    lz = ops.lz(obj.basis, cfg.hbar)
    ph = ops.phi(obj.basis)
    certificate = gridpath.grid_moment(lz, state).stddev * gridpath.grid_moment(ph, state).stddev
    oracle = analytic_oracle("Degenerate13_14", l=cfg.l, c=c, hbar=cfg.hbar)
    return SearchResult(
        coeffs=c,
        objective=cfg.objective,
        objective_value=obj.reported(c, cfg.objective, cfg.target_gap),
        product=product,
        classification=SATISFIES if product - 0.5 * cfg.hbar >= -DEFAULT_TOL else VIOLATES,
        residual_recheck=oracle["residual"],
        residual_direct=ops.symmetry_residual(lz, ph, state),
        certificate_product=certificate,
        iterations=nit,
        converged=success,
        converged_restarts=n_conv,
        best_restart=best,
        seed=cfg.seed,
        message=message,
    )


def random_shell_coeffs(l: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` rows uniformly distributed on the unit sphere of ``C^{2l+1}``."""
    d = 2 * l + 1
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def scan_random(
    l: int,
    count: int,
    seed: int,
    hbar: float = 1.0,
    bins: int = 20,
    tol: float = DEFAULT_TOL,
    chunk: int = 100_000,
) -> dict:
    """Classify ``count`` uniform random shell states against the bound ``hbar / 2``."""
    if l < 0:
        raise InvalidSpecError("l must be >= 0")
    if count < 1:
        raise InvalidSpecError("count must be >= 1")
    obj = ShellObjective(l, hbar)
    rng = np.random.default_rng(seed)
    products = np.empty(count)
    argmin = argmax = None
    for start in range(0, count, chunk):
        rows = random_shell_coeffs(l, min(chunk, count - start), rng)
        p = obj.products(rows)
        products[start : start + p.size] = p
        i, j = int(np.argmin(p)), int(np.argmax(p))
        if argmin is None or p[i] < argmin[0]:
            argmin = (p[i], rows[i])
        if argmax is None or p[j] > argmax[0]:
            argmax = (p[j], rows[j])
    ok = products - 0.5 * hbar >= -tol
    counts, edges = np.histogram(products, bins=bins, range=(0.0, float(products.max())))
    return {
        "l": l,
        "count": count,
        "seed": seed,
        "hbar": hbar,
        "fraction_satisfying": float(ok.mean()),
        "min_product": float(products.min()),
        "max_product": float(products.max()),
        "argmin_coeffs": canonical_phase(argmin[1]),
        "argmax_coeffs": canonical_phase(argmax[1]),
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
        "classes_found": sorted({SATISFIES if v else VIOLATES for v in ok}),
    }
