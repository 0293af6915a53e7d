"""Singular-value analysis of the preconditioned per-degree operators.

With ``D`` the large-degree limit of the mode matrices ``A_n``, the
preconditioned blocks ``D^{-1} A_n`` tend to the identity, so their singular
values ``s_{j,n}`` cluster at 1 as ``n`` grows.  The condition number of the
full (infinite) operator family,

    kappa = max_{j,n} s_{j,n} / min_{j,n} s_{j,n} ,

is therefore computable from finitely many degrees: beyond a cap where
``max_j |s_{j,n} - 1| < tail_tol`` the tail is accounted for by the bracket
``[1 - tail_tol, 1 + tail_tol]`` instead of being ignored.

Degree 0 uses the same regularized block as the solver (the identically-zero
fourth row replaced by the mean-zero constraint on ``q-``); the raw block is
structurally singular there and would report an infinite kappa that no
solve ever encounters.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .debye_core import LondonConfig, build_An_stack, build_D

__all__ = [
    "TailNotConvergedError",
    "ConditionResult",
    "ConditionSweepResult",
    "mode_singular_values",
    "singular_value_stack",
    "condition_number",
    "sweep",
    "write_sweep_csv",
]

DEFAULT_TAIL_TOL = 0.01


class TailNotConvergedError(ArithmeticError):
    """Singular values have not clustered at 1 by the requested cap."""


def _regularized_stack(config: LondonConfig, n_cap: int) -> np.ndarray:
    A = build_An_stack(config, n_cap)
    A[0, 3] = 0.0
    A[0, 3, 3] = 1.0
    return A


def _preconditioner_stack(lambda_L: float, n_cap: int) -> np.ndarray:
    """D per degree; at degree 0 its fourth row matches the constraint row.

    The solver replaces the structurally-zero fourth row of ``A_0`` by the
    mean-zero constraint on ``q-``, so the matching identity block at degree
    0 carries that same row; otherwise the row-scale mismatch against the
    ``-lambda_L/4`` row of ``D`` would inflate the degree-0 singular values
    by an artificial 1/lambda_L factor.
    """
    D = build_D(lambda_L)
    Ds = np.broadcast_to(D, (n_cap + 1, 6, 6)).copy()
    Ds[0, 3] = 0.0
    Ds[0, 3, 3] = 1.0
    return Ds


def singular_value_stack(config: LondonConfig, n_cap: int) -> np.ndarray:
    """Singular values of D^{-1} A_n for n = 0..n_cap, shape (n_cap+1, 6).

    Sorted descending along the last axis (numpy SVD convention).
    """
    A = _regularized_stack(config, n_cap)
    pre = np.linalg.solve(_preconditioner_stack(config.lambda_L, n_cap), A)
    return np.linalg.svd(pre, compute_uv=False)


def mode_singular_values(n: int, config: LondonConfig) -> np.ndarray:
    """The six singular values of D^{-1} A_n (descending)."""
    return singular_value_stack(config, n)[n]


@dataclass(frozen=True)
class ConditionResult:
    """kappa with the degrees and singular-value indices attaining it."""

    kappa: float
    s_max: float
    s_min: float
    n_at_smax: int
    n_at_smin: int
    n_cap: int
    tail_tol: float


def _tail_deviation(config: LondonConfig, n: int) -> float:
    """max_j |s_{j,n} - 1| at a single degree (cheap probe)."""
    A = _regularized_stack(config, n)[n]
    s = np.linalg.svd(
        np.linalg.solve(build_D(config.lambda_L), A), compute_uv=False
    )
    return float(np.max(np.abs(s - 1.0)))


def auto_cap(
    config: LondonConfig,
    tail_tol: float = DEFAULT_TAIL_TOL,
    start: int = 200,
    limit: int = 1 << 17,
) -> int:
    """Smallest probed power-of-two-style cap with a clustered tail.

    The deviation from 1 decays like O(1/(lambda_L n)), so doubling from
    ``start`` terminates quickly; raises if ``limit`` is exceeded.
    """
    n = start
    while n <= limit:
        if _tail_deviation(config, n) < tail_tol:
            return n
        n *= 2
    raise TailNotConvergedError(
        f"singular values not clustered within {tail_tol} of 1 by degree "
        f"{limit}; the operator family may not be of identity-plus-compact form"
    )


def condition_number(
    config: LondonConfig,
    n_cap: int | None = 200,
    tail_tol: float = DEFAULT_TAIL_TOL,
    _svals: np.ndarray | None = None,
) -> ConditionResult:
    """kappa = s_max / s_min over all degrees, with a bracketed tail.

    Requires the tail to have clustered: ``max_j |s_{j,n_cap} - 1| <
    tail_tol``, else raises :class:`TailNotConvergedError` asking for a
    larger cap (``n_cap=None`` selects the cap automatically).  The
    (uncomputed) degrees beyond ``n_cap`` contribute the bracket
    ``[1 - tail_tol, 1 + tail_tol]`` to the extrema.
    """
    if n_cap is None:
        n_cap = auto_cap(config, tail_tol)
    s = singular_value_stack(config, n_cap) if _svals is None else _svals
    if not np.all(np.isfinite(s)):
        raise ArithmeticError("non-finite singular values in the mode stack")
    if np.max(np.abs(s[-1] - 1.0)) >= tail_tol:
        raise TailNotConvergedError(
            f"singular values at degree {n_cap} deviate from 1 by "
            f"{np.max(np.abs(s[-1] - 1.0)):.3e} >= {tail_tol}; increase n_cap"
        )
    per_n_max = s[:, 0]
    per_n_min = s[:, -1]
    i_max = int(np.argmax(per_n_max))
    i_min = int(np.argmin(per_n_min))
    s_max = max(float(per_n_max[i_max]), 1.0 + tail_tol)
    s_min = min(float(per_n_min[i_min]), 1.0 - tail_tol)
    if s_min <= 0.0:
        raise ArithmeticError(
            f"vanishing singular value at degree {i_min}; operator family "
            "is singular for this parameter choice"
        )
    return ConditionResult(
        kappa=s_max / s_min,
        s_max=s_max,
        s_min=s_min,
        n_at_smax=i_max,
        n_at_smin=i_min,
        n_cap=n_cap,
        tail_tol=tail_tol,
    )


@dataclass
class ConditionSweepResult:
    """kappa surface over a (sigma_l, sigma_m) grid at fixed lambda_L."""

    lambda_L: float
    sigma_l_values: np.ndarray
    sigma_m_values: np.ndarray
    kappa: np.ndarray        # shape (len(sigma_l), len(sigma_m))
    n_at_smin: np.ndarray
    n_at_smax: np.ndarray
    n_cap: int
    tail_tol: float

    def min_location(self, rel_tol: float = 1e-9) -> tuple[float, float]:
        """Grid point of minimal kappa; ties broken toward the smallest |sigma|.

        The kappa surface can be flat to rounding near its minimum, so all
        entries within ``rel_tol`` (relative) of the smallest value count as
        minimal and the one closest to the origin is reported.
        """
        k_min = float(np.min(self.kappa))
        ii, jj = np.nonzero(self.kappa <= k_min * (1.0 + rel_tol))
        dist2 = self.sigma_l_values[ii] ** 2 + self.sigma_m_values[jj] ** 2
        pick = int(np.argmin(dist2))
        return float(self.sigma_l_values[ii[pick]]), float(self.sigma_m_values[jj[pick]])


def sweep(
    lambda_L: float,
    sigma_l_values=None,
    sigma_m_values=None,
    n_cap: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ConditionSweepResult:
    """Evaluate kappa on a sigma grid (default 21x21 over [-5, 5]^2).

    The sigma-dependent entries of A_n are linear in (sigma_l, sigma_m), so
    the stack is assembled once at sigma = 0 plus two unit-sigma differences
    and recombined per grid point; only the batched SVDs repeat.  With
    ``n_cap=None`` the cap is chosen automatically so that the tail is
    clustered at the extreme sigma corners of the grid.
    """
    if sigma_l_values is None:
        sigma_l_values = np.linspace(-5.0, 5.0, 21)
    if sigma_m_values is None:
        sigma_m_values = np.linspace(-5.0, 5.0, 21)
    sigma_l_values = np.asarray(sigma_l_values, dtype=float)
    sigma_m_values = np.asarray(sigma_m_values, dtype=float)

    base_cfg = LondonConfig(lambda_L=lambda_L, n_max=0)
    if n_cap is None:
        sl_ex = float(np.max(np.abs(sigma_l_values)))
        sm_ex = float(np.max(np.abs(sigma_m_values)))
        n_cap = max(
            auto_cap(replace(base_cfg, sigma_l=sl, sigma_m=sm), tail_tol)
            for sl in {0.0, sl_ex, -sl_ex}
            for sm in {0.0, sm_ex, -sm_ex}
        )
    A0 = _regularized_stack(base_cfg, n_cap)
    dAl = _regularized_stack(replace(base_cfg, sigma_l=1.0), n_cap) - A0
    dAm = _regularized_stack(replace(base_cfg, sigma_m=1.0), n_cap) - A0
    Dinv = np.linalg.inv(_preconditioner_stack(lambda_L, n_cap))
    B0 = Dinv @ A0
    Bl = Dinv @ dAl
    Bm = Dinv @ dAm

    kappa = np.empty((len(sigma_l_values), len(sigma_m_values)))
    n_at_smin = np.empty_like(kappa, dtype=int)
    n_at_smax = np.empty_like(kappa, dtype=int)
    for i, sl in enumerate(sigma_l_values):
        # batch all sigma_m values of this row into one SVD call
        pre = (
            B0[None, :, :, :]
            + sl * Bl[None, :, :, :]
            + sigma_m_values[:, None, None, None] * Bm[None, :, :, :]
        )
        s_row = np.linalg.svd(pre, compute_uv=False)
        for j, sm in enumerate(sigma_m_values):
            res = condition_number(
                replace(base_cfg, sigma_l=float(sl), sigma_m=float(sm)),
                n_cap=n_cap,
                tail_tol=tail_tol,
                _svals=s_row[j],
            )
            kappa[i, j] = res.kappa
            n_at_smin[i, j] = res.n_at_smin
            n_at_smax[i, j] = res.n_at_smax
    return ConditionSweepResult(
        lambda_L=lambda_L,
        sigma_l_values=sigma_l_values,
        sigma_m_values=sigma_m_values,
        kappa=kappa,
        n_at_smin=n_at_smin,
        n_at_smax=n_at_smax,
        n_cap=n_cap,
        tail_tol=tail_tol,
    )


def write_sweep_csv(result: ConditionSweepResult, path) -> None:
    """One row per grid point: sigma_l, sigma_m, kappa, n_at_smin, n_at_smax."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["sigma_l", "sigma_m", "kappa", "n_at_smin", "n_at_smax"])
        for i, sl in enumerate(result.sigma_l_values):
            for j, sm in enumerate(result.sigma_m_values):
                wr.writerow(
                    [
                        f"{sl:.17g}",
                        f"{sm:.17g}",
                        f"{result.kappa[i, j]:.17g}",
                        int(result.n_at_smin[i, j]),
                        int(result.n_at_smax[i, j]),
                    ]
                )
