"""ADMM solver for the low-tubal-rank plus sparse decomposition.

Solves ``min nuclear_norm(low_rank) + lam * l1(sparse)`` subject to
``low_rank + sparse = x`` by alternating the tensor SVT step, entrywise soft
thresholding, and a dual ascent step under a geometrically growing penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .prox import soft_threshold_array, tsvt_array
from .tensor3 import Tensor3
from .transform import Transform


class NonFiniteIterateError(RuntimeError):
    """An ADMM iterate went non-finite; carries the iteration index."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite iterate at iteration {iteration}")
        self.iteration = iteration


@dataclass
class SolverConfig:
    """ADMM schedule. ``lam=None`` selects ``1/sqrt(max(n1, n2) * ell)``."""

    lam: float | None = None
    mu0: float = 1e-3
    rho: float = 1.1
    mu_max: float = 1e10
    tol: float = 1e-8
    max_iters: int = 500

    def __post_init__(self):
        if self.lam is not None and self.lam <= 0:
            raise ValueError("lam must be positive (or None for auto)")
        if self.mu0 <= 0 or self.mu_max <= 0 or self.mu0 > self.mu_max:
            raise ValueError("need 0 < mu0 <= mu_max")
        if self.rho < 1:
            raise ValueError("rho must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class TraceRow:
    """One ADMM iteration: residual inf-norms, penalty, and objective value."""

    iteration: int
    primal_inf: float
    dl_inf: float
    ds_inf: float
    mu: float
    objective: float


@dataclass
class TrpcaSolution:
    low_rank: Tensor3
    sparse: Tensor3
    iterations: int
    converged: bool
    trace: list[TraceRow] = field(repr=False)


def default_lambda(n1: int, n2: int, t: Transform) -> float:
    """The parameter-free sparsity weight ``1/sqrt(max(n1, n2) * ell)``."""
    if n1 < 1 or n2 < 1:
        raise ValueError("dims must be positive")
    return 1.0 / math.sqrt(max(n1, n2) * t.ell)


def solve(x: Tensor3, t: Transform, cfg: SolverConfig | None = None) -> TrpcaSolution:
    """Recover the low-tubal-rank and sparse parts of ``x``.

    Starting from zero tensors, each iteration runs

        low_rank <- tsvt(x - sparse + dual/mu, 1/mu)
        sparse   <- soft_threshold(x - low_rank + dual/mu, lam/mu)
        dual     <- dual + mu * (low_rank + sparse - x)
        mu       <- min(rho * mu, mu_max)

    and stops when the largest of the two iterate changes and the primal
    residual (all in the entrywise max norm) drops to ``cfg.tol``, or after
    ``cfg.max_iters`` iterations (``converged=False``, not an error).
    """
    if cfg is None:
        cfg = SolverConfig()
    if x.n3 != t.size:
        raise ValueError(f"tensor n3={x.n3} does not match transform size {t.size}")
    lam = cfg.lam if cfg.lam is not None else default_lambda(x.n1, x.n2, t)

    data = x.data
    low = np.zeros_like(data)
    sparse = np.zeros_like(data)
    dual = np.zeros_like(data)
    mu = cfg.mu0
    trace: list[TraceRow] = []
    converged = False
    iteration = 0

    for iteration in range(1, cfg.max_iters + 1):
        low_new, tnn = tsvt_array(data - sparse + dual / mu, 1.0 / mu, t)
        sparse_new = soft_threshold_array(data - low_new + dual / mu, lam / mu)
        if not (np.isfinite(low_new).all() and np.isfinite(sparse_new).all()):
            raise NonFiniteIterateError(iteration)
        residual = low_new + sparse_new - data
        # dual ascent on the constraint x - low - sparse, matching the +dual/mu
        # prox arguments above (the opposite sign diverges)
        dual -= mu * residual

        primal = float(np.abs(residual).max())
        dl = float(np.abs(low_new - low).max())
        ds = float(np.abs(sparse_new - sparse).max())
        objective = tnn + lam * float(np.abs(sparse_new).sum())
        trace.append(TraceRow(iteration, primal, dl, ds, mu, objective))

        low, sparse = low_new, sparse_new
        if max(primal, dl, ds) <= cfg.tol:
            converged = True
            break
        mu = min(cfg.rho * mu, cfg.mu_max)

    return TrpcaSolution(
        low_rank=Tensor3(low),
        sparse=Tensor3(sparse),
        iterations=iteration,
        converged=converged,
        trace=trace,
    )
