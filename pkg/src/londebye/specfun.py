"""Modified spherical Bessel functions and spherical harmonics.

Conventions
-----------
``i_n(x)`` is the first-kind modified spherical Bessel function with
``i_0(x) = sinh(x)/x``.  ``k_n(x)`` is the second kind with the convention
``k_0(x) = exp(-x)/x`` (no ``pi/2`` prefactor).  Under these conventions the
cross products satisfy the Wronskian-type identity

    i_n(x) k_{n+1}(x) + i_{n+1}(x) k_n(x) = 1 / x**2 .

The spherical Bessel/Hankel functions at purely imaginary argument
``z = i*x`` reduce to these real functions via the phase identities

    j_n(ix)  = i**n * i_n(x)            h_n(ix)  = -i**(-n)     * k_n(x)
    j_n'(ix) = i**(n-1) * i_n'(x)       h_n'(ix) = -i**(-(n+1)) * k_n'(x)

with the derivative recurrences ``i_n' = i_{n-1} - (n+1) i_n / x`` and
``k_n' = -k_{n-1} - (n+1) k_n / x`` (``i_0' = i_1``, ``k_0' = -k_0 - k_0/x``).

For large degrees ``i_n`` underflows and ``k_n`` overflows in double
precision while their products stay moderate; :func:`bessel_products`
computes the needed cross products directly through ratio recurrences and is
stable for arbitrarily large degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BesselRangeError",
    "BesselPrecisionError",
    "BesselTable",
    "BesselProductTable",
    "mod_sph_bessel",
    "mod_sph_i_values",
    "bessel_products",
    "bessel_product_jh",
    "legendre_table",
    "sph_harm",
]

_LOG_HUGE = math.log(np.finfo(float).max) - 2.0


class BesselRangeError(ArithmeticError):
    """Raised when a requested value overflows double precision."""


class BesselPrecisionError(ArithmeticError):
    """Raised when a recurrence cannot deliver full-precision results."""


@dataclass(frozen=True)
class BesselTable:
    """Values of i_n(x) and k_n(x) for n = 0..order_max at fixed x > 0."""

    order_max: int
    argument: float
    i_values: np.ndarray
    k_values: np.ndarray

    def i_deriv(self, n: int) -> float:
        """i_n'(x), requires n < order_max for the recurrence neighbour."""
        x = self.argument
        if n == 0:
            return float(self.i_values[1])
        return float(self.i_values[n - 1] - (n + 1) * self.i_values[n] / x)

    def k_deriv(self, n: int) -> float:
        """k_n'(x)."""
        x = self.argument
        if n == 0:
            return float(-self.k_values[0] * (1.0 + 1.0 / x))
        return float(-self.k_values[n - 1] - (n + 1) * self.k_values[n] / x)


def _i_ratios(n_top: int, x: float) -> np.ndarray:
    """Ratios rho_n = i_{n+1}(x)/i_n(x) for n = 0..n_top-1.

    Downward continued-fraction recurrence (Miller-type): starting from 0 at a
    padded degree, iterate rho_n = 1 / ((2n+3)/x + rho_{n+1}).
    """
    pad = max(20, math.ceil(x)) + 15
    start = n_top + pad
    rho = 0.0
    tail = np.empty(start)
    for n in range(start - 1, -1, -1):
        rho = 1.0 / ((2 * n + 3) / x + rho)
        tail[n] = rho
    return tail[:n_top]


def mod_sph_bessel(n_max: int, x: float, strict: bool = True) -> BesselTable:
    """Table of i_n(x), k_n(x) for n = 0..n_max.

    The i-branch comes from the downward ratio recurrence normalized against
    ``i_0 = sinh(x)/x``; the k-branch from the upward three-term recurrence
    seeded by the n = 0, 1 closed forms.

    Raises
    ------
    BesselRangeError
        if ``sinh(x)`` or any ``k_n(x)`` would overflow double precision.
    BesselPrecisionError
        if the i-branch underflows before reaching ``n_max``.
    """
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    if x > _LOG_HUGE:
        raise BesselRangeError(f"sinh({x}) overflows double precision")

    i_vals = np.empty(n_max + 1)
    i_vals[0] = math.sinh(x) / x
    if n_max >= 1:
        rho = _i_ratios(n_max, x)
        for n in range(n_max):
            i_vals[n + 1] = i_vals[n] * rho[n]
    if i_vals[n_max] == 0.0 or not np.isfinite(i_vals[n_max]):
        if strict:
            raise BesselPrecisionError(
                f"i_n underflows below double precision at n={n_max}, x={x}"
            )
        np.nan_to_num(i_vals, copy=False)  # tiny tail values flushed to zero

    # Overflow guard for the k-branch: log k_n ~ log((2n-1)!!) - (n+1) log x - x
    log_kn = (
        math.lgamma(2 * n_max + 1) - n_max * math.log(2.0) - math.lgamma(n_max + 1)
        - (n_max + 1) * math.log(x) - x
    )
    if log_kn > _LOG_HUGE:
        raise BesselRangeError(
            f"k_n overflows double precision at n={n_max}, x={x}"
        )

    k_vals = np.empty(n_max + 1)
    k0 = math.exp(-x) / x
    k_vals[0] = k0
    if n_max >= 1:
        k_vals[1] = k0 * (1.0 + 1.0 / x)
        for n in range(1, n_max):
            k_vals[n + 1] = (2 * n + 1) / x * k_vals[n] + k_vals[n - 1]

    return BesselTable(n_max, float(x), i_vals, k_vals)


def mod_sph_i_values(n_max: int, x: float) -> np.ndarray:
    """First-kind branch i_n(x) alone for n = 0..n_max.

    Unlike :func:`mod_sph_bessel` this never touches the second-kind branch,
    which overflows at large degree for small arguments (needed for radial
    profiles i_n(x r), r < 1).  Underflowed tail values are flushed to zero.
    """
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    if x > _LOG_HUGE:
        raise BesselRangeError(f"sinh({x}) overflows double precision")
    i_vals = np.empty(n_max + 1)
    i_vals[0] = math.sinh(x) / x
    if n_max >= 1:
        rho = _i_ratios(n_max, x)
        for n in range(n_max):
            i_vals[n + 1] = i_vals[n] * rho[n]
    np.nan_to_num(i_vals, copy=False)
    return i_vals


@dataclass(frozen=True)
class BesselProductTable:
    """Stable same-degree and adjacent-degree products of i_n and k_n.

    Attributes (all arrays indexed by degree n = 0..order_max):

    - ``p``:   i_n(x) k_n(x)
    - ``q``:   i_n(x) k_{n-1}(x)           (q[0] unused, set to nan)
    - ``r``:   i_{n+1}(x) k_n(x)
    - ``qr``:  i_{n+1}(x) k_{n-1}(x)       (qr[0] unused, nan)
    - ``ipk``: i_n'(x) k_n(x)
    - ``ikp``: i_n(x) k_n'(x)
    """

    order_max: int
    argument: float
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    qr: np.ndarray
    ipk: np.ndarray
    ikp: np.ndarray


def bessel_products(n_max: int, x: float) -> BesselProductTable:
    """Cross products of i_n, k_n via ratio recurrences; stable for any n.

    Uses rho_n = i_{n+1}/i_n (downward continued fraction) and
    kap_n = k_{n+1}/k_n (upward: kap_n = (2n+1)/x + 1/kap_{n-1},
    kap_0 = 1 + 1/x), with P_0 = i_0 k_0 = sinh(x) e^{-x} / x**2.
    """
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")

    rho = _i_ratios(n_max + 1, x)
    kap = np.empty(n_max + 1)
    kap[0] = 1.0 + 1.0 / x
    for n in range(1, n_max + 1):
        kap[n] = (2 * n + 1) / x + 1.0 / kap[n - 1]

    p = np.empty(n_max + 1)
    # p0 = sinh(x) e^{-x} / x^2 = (1 - e^{-2x}) / (2 x^2), expm1 for accuracy
    p[0] = -math.expm1(-2.0 * x) / (2.0 * x * x)
    for n in range(n_max):
        p[n + 1] = p[n] * rho[n] * kap[n]

    q = np.full(n_max + 1, np.nan)
    r = np.empty(n_max + 1)
    qr = np.full(n_max + 1, np.nan)
    for n in range(n_max + 1):
        if n >= 1:
            q[n] = rho[n - 1] * p[n - 1]          # i_n k_{n-1}
            qr[n] = rho[n] * q[n]                 # i_{n+1} k_{n-1}
        r[n] = rho[n] * p[n]                      # i_{n+1} k_n

    ipk = np.empty(n_max + 1)
    ikp = np.empty(n_max + 1)
    ipk[0] = r[0]                                  # i_0' k_0 = i_1 k_0
    ikp[0] = -p[0] * (1.0 + 1.0 / x)               # i_0 k_0' = -i_0 k_1
    for n in range(1, n_max + 1):
        inm1_kn = p[n - 1] * kap[n - 1]            # i_{n-1} k_n
        ipk[n] = inm1_kn - (n + 1) * p[n] / x
        ikp[n] = -q[n] - (n + 1) * p[n] / x
    return BesselProductTable(n_max, float(x), p, q, r, qr, ipk, ikp)


def bessel_product_jh(n: int, lambda_L: float) -> complex:
    """Product j_n(k) h_n(k) at k = i / lambda_L.

    By the phase identities, j_n(ix) h_n(ix) = i**n i_n(x) * (-i**(-n)) k_n(x)
    = -i_n(x) k_n(x): a negative real number.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if lambda_L <= 0:
        raise ValueError(f"lambda_L must be positive, got {lambda_L}")
    table = bessel_products(n, 1.0 / lambda_L)
    return complex(-table.p[n])


def legendre_table(n_max: int, theta: np.ndarray):
    """Normalized associated Legendre values and theta-derivatives.

    Returns ``(P, dP)`` where ``P[m]`` is an array of shape
    ``(n_max + 1 - m, len(theta))`` holding ``Ptilde_n^m(cos theta)`` for
    ``n = m..n_max``, normalized so that ``Y_nm = Ptilde_n^m(cos th) e^{imφ}``
    is orthonormal on the unit sphere (Condon-Shortley phase included).
    ``dP[m]`` holds the theta-derivatives.

    Uses the standard stable recurrences: diagonal seed
    ``Ptilde_m^m = (-1)^m sqrt((2m+1)!!/(4 pi (2m)!!)) sin^m(theta)`` and
    three-term upward recurrence in degree; derivatives via
    ``d/dth Ptilde_n^m = m cot(th) Ptilde_n^m
    + sqrt((n-m)(n+m+1)) Ptilde_n^{m+1}``.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    ct = np.cos(theta)
    st = np.sin(theta)
    P = []
    # diagonal seeds
    diag = np.full_like(theta, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(n_max + 1):
        block = np.empty((n_max + 1 - m, len(theta)))
        block[0] = diag
        if n_max - m >= 1:
            block[1] = math.sqrt(2 * m + 3) * ct * diag
        for n in range(m + 2, n_max + 1):
            a = math.sqrt((4 * n * n - 1) / (n * n - m * m))
            b = math.sqrt(((n - 1) ** 2 - m * m) / (4 * (n - 1) ** 2 - 1))
            block[n - m] = a * (ct * block[n - 1 - m] - b * block[n - 2 - m])
        P.append(block)
        diag = -math.sqrt((2 * m + 3) / (2 * m + 2)) * st * diag

    # theta-derivatives via the order-raising relation; safe at interior nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = np.where(st > 0, ct / np.where(st > 0, st, 1.0), 0.0)
    dP = []
    for m in range(n_max + 1):
        block = np.empty_like(P[m])
        for n in range(m, n_max + 1):
            term = m * cot * P[m][n - m]
            if m < n:
                term = term + math.sqrt((n - m) * (n + m + 1)) * P[m + 1][n - m - 1]
            block[n - m] = term
        dP.append(block)
    return P, dP


def sph_harm(n: int, m: int, theta, phi):
    """Orthonormal spherical harmonic Y_nm(theta, phi).

    Convention: ``integral |Y_nm|^2 dS = 1`` over the unit sphere and
    ``Y_{n,-m} = (-1)^m conj(Y_{nm})`` (Condon-Shortley phase).
    """
    if abs(m) > n:
        raise ValueError(f"|m| = {abs(m)} exceeds degree n = {n}")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    ma = abs(m)
    P, _ = legendre_table(n, theta)
    val = P[ma][n - ma] * np.exp(1j * ma * phi)
    if m < 0:
        val = (-1) ** ma * np.conj(val)
    if val.size == 1:
        return complex(val[0])
    return val
