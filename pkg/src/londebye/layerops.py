"""Diagonal spectral symbols of layer operators on the unit sphere.

Every rotation-invariant surface operator acts on the orthonormal spherical
harmonics ``Y_nm`` by a scalar multiplier depending only on the degree ``n``
(the *symbol*).  This module provides closed-form symbols for the operators
entering the boundary system, plus an independent 1-D quadrature oracle
(:func:`oracle_symbol`) used by the test suite to pin the closed forms down.

Closed forms (``x = 1/lambda_L``, ``i_n``/``k_n`` the modified spherical
Bessel functions of :mod:`londebye.specfun`):

- single layer, Laplace:       ``S0 -> 1/(2n+1)``
- single layer, Yukawa:        ``Sk -> x i_n(x) k_n(x)``
- p.v. normal derivative:      ``S0' -> -1/(2(2n+1))``
  and ``Sk' -> x^2 (i_n' k_n + i_n k_n')/2``
- the Laplace-Beltrami composite ``Delta_Gamma S0^2 -> -n(n+1)/(2n+1)^2``

The hypersingular pieces appear only through the Calderon combination
``(S0'' + D0' - 2 H S0') S0`` whose sphere symbol follows from the identity
``Delta_Gamma S0^2 = -1/4 + (S0')^2 - (S0'' + D0' - 2 H S0') S0`` (mean
curvature ``H = 1``); solving that identity degree-wise gives
``symbol(S0'' + D0') = -1/(2n+1)``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import eval_legendre

from .specfun import BesselPrecisionError, bessel_products

__all__ = [
    "symbol_S0",
    "symbol_S0_prime",
    "symbol_S0pp_D0p",
    "symbol_Sk",
    "symbol_Sk_prime",
    "symbol_lapbel_S0sq",
    "calderon_residual",
    "oracle_symbol",
]


def symbol_S0(n: int) -> float:
    """Symbol of the Laplace single layer: 1/(2n+1)."""
    return 1.0 / (2 * n + 1)


def symbol_S0_prime(n: int) -> float:
    """Symbol of the p.v. normal derivative of the Laplace single layer."""
    return -0.5 / (2 * n + 1)


def symbol_S0pp_D0p(n: int) -> float:
    """Symbol of the compact combination S0'' + D0'."""
    return -1.0 / (2 * n + 1)


def symbol_Sk(n: int, lambda_L: float) -> float:
    """Symbol of the Yukawa single layer: i k j_n(k) h_n(k) = x i_n k_n > 0."""
    x = 1.0 / lambda_L
    return x * bessel_products(n, x).p[n]


def symbol_Sk_prime(n: int, lambda_L: float) -> float:
    """Symbol of the p.v. normal derivative of the Yukawa single layer.

    From ``i k^2 (j_n' h_n + j_n h_n')/2`` at ``k = i x``, which phase-reduces
    to ``x^2 (i_n' k_n + i_n k_n')/2``; the one-sided limits are this plus or
    minus half the density (interior: +1/2).
    """
    x = 1.0 / lambda_L
    t = bessel_products(n, x)
    return 0.5 * x * x * (t.ipk[n] + t.ikp[n])


def symbol_lapbel_S0sq(n: int) -> float:
    """Symbol of Delta_Gamma S0^2."""
    return -n * (n + 1) / (2 * n + 1) ** 2


def calderon_residual(n: int) -> float:
    """Residual of the sphere Calderon identity at degree n (should be ~0).

    Identity: Delta_Gamma S0^2 = -1/4 + (S0')^2 - (S0''+D0'-2 H S0') S0,
    with H = 1 on the unit sphere.
    """
    lhs = symbol_lapbel_S0sq(n)
    rhs = (
        -0.25
        + symbol_S0_prime(n) ** 2
        - (symbol_S0pp_D0p(n) - 2.0 * symbol_S0_prime(n)) * symbol_S0(n)
    )
    return lhs - rhs


def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w  # on [0, 1]


def oracle_symbol(kernel: str, n: int, lambda_L: float = 1.0, tol: float = 1e-11) -> float:
    """Independent 1-D quadrature evaluation of a sphere symbol.

    The surface integral of ``K(|x-y|) Y_nm(y)`` over the unit sphere reduces
    by the Legendre addition theorem (Funk-Hecke) to

        symbol(n) = 2 pi * integral_{-1}^{1} K(d(gamma)) P_n(gamma) dgamma

    with chord ``d = sqrt(2 - 2 gamma)``.  The endpoint singularity at
    ``gamma = 1`` is removed by ``gamma = 1 - 2 u^2`` (so ``d = 2u`` exactly)
    and the integral evaluated by Gauss quadrature with order doubling until
    two successive levels agree to ``tol``.

    ``kernel``: one of ``"S0"``, ``"Sk"``, ``"Sk_prime"``.  For ``Sk_prime``
    the value is the principal-value symbol (even symmetry of the grid about
    the target realizes the p.v. limit automatically, since the kernel is a
    smooth function of the chord after the substitution).
    """
    if kernel not in {"S0", "Sk", "Sk_prime"}:
        raise ValueError(f"unknown kernel {kernel!r}")
    x = 1.0 / lambda_L

    def f(u: np.ndarray) -> np.ndarray:
        d = 2.0 * u
        gamma = 1.0 - 2.0 * u * u
        pn = eval_legendre(n, gamma)
        if kernel == "S0":
            kern = 1.0 / (4.0 * np.pi * d)
        elif kernel == "Sk":
            kern = np.exp(-x * d) / (4.0 * np.pi * d)
        else:
            # n_x . grad_x g = g'(d) * (n_x.(x-y))/d with n_x.(x-y) = d^2/2
            kern = -np.exp(-x * d) * (x * d + 1.0) / (8.0 * np.pi * d)
        # dgamma = -4 u du; orientation flip gives +4u du on u in [0,1]
        return 2.0 * np.pi * kern * pn * 4.0 * u

    prev = None
    for order in (80, 160, 320, 640, 1280):
        u, w = _gauss(order)
        val = float(np.sum(w * f(u)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
    raise BesselPrecisionError(
        f"oracle quadrature for {kernel} at n={n} did not converge to {tol}"
    )
