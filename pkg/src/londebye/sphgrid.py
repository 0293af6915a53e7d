"""Quadrature grids on the unit sphere and spherical-harmonic transforms.

The grid is the tensor product of Gauss-Legendre nodes in cos(theta) with a
uniform longitude grid, the minimal alias-free layout for band-limited
transforms: ``n_theta = n_max + 1`` colatitude nodes integrate products of
two degree-``n_max`` harmonics exactly, and ``n_phi = 2 n_max + 2`` uniform
longitudes resolve all orders ``|m| <= n_max`` without aliasing.

Scalar fields are expanded in orthonormal spherical harmonics ``Y_nm``;
tangential fields in the surface-gradient / rotated basis

    Psi_nm = grad_Gamma Y_nm ,    Phi_nm = n x grad_Gamma Y_nm ,

with ``integral |Psi_nm|^2 dS = integral |Phi_nm|^2 dS = n(n+1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import legendre_table

__all__ = [
    "SphereGrid",
    "ModeCoefficients",
    "TangentialCoefficients",
    "analyze",
    "synthesize",
    "surface_laplacian",
    "tangential_analyze",
    "tangential_synthesize",
    "vector_synthesize",
]


@dataclass
class ModeCoefficients:
    """Scalar spherical-harmonic coefficients c_{n,m}, 0 <= n <= n_max.

    Stored densely as ``c[n, m + n_max]``; entries with ``|m| > n`` are zero.
    """

    n_max: int
    c: np.ndarray

    @classmethod
    def zeros(cls, n_max: int) -> "ModeCoefficients":
        return cls(n_max, np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex))

    def get(self, n: int, m: int) -> complex:
        return complex(self.c[n, m + self.n_max])

    def set(self, n: int, m: int, value: complex) -> None:
        self.c[n, m + self.n_max] = value

    def copy(self) -> "ModeCoefficients":
        return ModeCoefficients(self.n_max, self.c.copy())

    def norm2(self) -> float:
        """Parseval norm: integral of |field|^2 over the sphere."""
        return float(np.sum(np.abs(self.c) ** 2))


@dataclass
class TangentialCoefficients:
    """Hodge coefficients of a tangential field t = sum g Psi + h Phi."""

    n_max: int
    g: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, n_max: int) -> "TangentialCoefficients":
        shape = (n_max + 1, 2 * n_max + 1)
        return cls(n_max, np.zeros(shape, dtype=complex), np.zeros(shape, dtype=complex))


class SphereGrid:
    """Gauss-Legendre x uniform-longitude quadrature grid for degree n_max."""

    def __init__(self, n_max: int, n_theta: int | None = None, n_phi: int | None = None):
        if n_max < 0:
            raise ValueError(f"n_max must be nonnegative, got {n_max}")
        self.n_max = n_max
        self.n_theta = n_theta if n_theta is not None else n_max + 1
        self.n_phi = n_phi if n_phi is not None else 2 * n_max + 2
        if self.n_phi < 2 * n_max + 1:
            raise ValueError(
                f"n_phi={self.n_phi} aliases orders up to n_max={n_max}; "
                f"need at least {2 * n_max + 1}"
            )
        if self.n_theta < n_max + 1:
            raise ValueError(
                f"n_theta={self.n_theta} cannot integrate degree-{n_max} products"
            )
        ct, w = np.polynomial.legendre.leggauss(self.n_theta)
        order = np.argsort(-ct)  # theta increasing from pole
        self.cos_theta = ct[order]
        self.w_theta = w[order]
        self.theta = np.arccos(self.cos_theta)
        self.sin_theta = np.sin(self.theta)
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

        # Legendre tables for the transform degree
        self.P, self.dP = legendre_table(n_max, self.theta)

        # point coordinates / outward normals, shape (n_theta, n_phi, 3)
        st, ct_ = self.sin_theta[:, None], self.cos_theta[:, None]
        cp, sp = np.cos(self.phi)[None, :], np.sin(self.phi)[None, :]
        self.points = np.stack(
            [st * cp, st * sp, np.broadcast_to(ct_, (self.n_theta, self.n_phi))],
            axis=-1,
        )
        self.normals = self.points
        # unit tangent frame
        zeros = np.zeros((self.n_theta, self.n_phi))
        self.theta_hat = np.stack([ct_ * cp, ct_ * sp, np.broadcast_to(-st, zeros.shape)], axis=-1)
        self.phi_hat = np.stack([np.broadcast_to(-sp, zeros.shape), np.broadcast_to(cp, zeros.shape), zeros], axis=-1)
        # quadrature weights per point (integrate over the unit sphere)
        self.weights = np.broadcast_to(
            self.w_theta[:, None] * (2.0 * np.pi / self.n_phi), zeros.shape
        ).copy()

    # -- helpers -----------------------------------------------------------
    def integrate(self, values: np.ndarray) -> complex:
        """Surface integral of a scalar sampled on the grid."""
        return np.sum(self.weights * values)

    def flat_points(self) -> np.ndarray:
        return self.points.reshape(-1, 3)

    def flat_weights(self) -> np.ndarray:
        return self.weights.ravel()

    def _phi_modes(self, values: np.ndarray) -> np.ndarray:
        """Integral over phi of values * e^{-i m phi}, index m (fft layout)."""
        return np.fft.fft(values, axis=1) * (2.0 * np.pi / self.n_phi)

    def _m_index(self, m: int) -> int:
        return m % self.n_phi


def _sign(m: int) -> float:
    return -1.0 if (m < 0 and m % 2) else 1.0


def analyze(grid: SphereGrid, values: np.ndarray, n_max: int | None = None) -> ModeCoefficients:
    """Project a scalar grid field onto orthonormal spherical harmonics."""
    n_max = grid.n_max if n_max is None else n_max
    if n_max > grid.n_max:
        raise ValueError(f"grid built for n_max={grid.n_max}, requested {n_max}")
    F = grid._phi_modes(np.asarray(values, dtype=complex))
    out = ModeCoefficients.zeros(n_max)
    for m in range(-n_max, n_max + 1):
        ma = abs(m)
        col = grid.w_theta * F[:, grid._m_index(m)]
        block = grid.P[ma][: n_max + 1 - ma] @ col
        out.c[ma : n_max + 1, m + n_max] = _sign(m) * block
    return out


def synthesize(coeffs: ModeCoefficients, grid: SphereGrid) -> np.ndarray:
    """Evaluate the harmonic expansion on the grid (inverse of analyze)."""
    n_max = coeffs.n_max
    if n_max > grid.n_max:
        raise ValueError(f"grid built for n_max={grid.n_max}, coefficients need {n_max}")
    G = np.zeros((grid.n_theta, grid.n_phi), dtype=complex)
    for m in range(-n_max, n_max + 1):
        ma = abs(m)
        cvec = coeffs.c[ma : n_max + 1, m + n_max]
        if not np.any(cvec):
            continue
        G[:, grid._m_index(m)] += _sign(m) * (cvec @ grid.P[ma][: n_max + 1 - ma])
    return np.fft.ifft(G, axis=1) * grid.n_phi


def surface_laplacian(coeffs: ModeCoefficients) -> ModeCoefficients:
    """Laplace-Beltrami operator: c_{n,m} -> -n(n+1) c_{n,m}."""
    out = coeffs.copy()
    n = np.arange(coeffs.n_max + 1, dtype=float)
    out.c *= (-n * (n + 1))[:, None]
    return out


def tangential_analyze(
    grid: SphereGrid, vec_values: np.ndarray, n_max: int | None = None
) -> TangentialCoefficients:
    """Project a tangential vector grid field onto the Psi/Phi basis.

    The input is projected tangentially first (``t = v - (v.n) n``), so a
    small normal component is tolerated.
    """
    n_max = grid.n_max if n_max is None else n_max
    if n_max > grid.n_max:
        raise ValueError(f"grid built for n_max={grid.n_max}, requested {n_max}")
    v = np.asarray(vec_values, dtype=complex)
    vn = np.einsum("ijk,ijk->ij", v, grid.normals)
    t = v - vn[..., None] * grid.normals
    t_th = np.einsum("ijk,ijk->ij", t, grid.theta_hat)
    t_ph = np.einsum("ijk,ijk->ij", t, grid.phi_hat)

    Fth = grid._phi_modes(t_th)
    Fph = grid._phi_modes(t_ph)
    inv_sin = 1.0 / grid.sin_theta

    out = TangentialCoefficients.zeros(n_max)
    for m in range(-n_max, n_max + 1):
        ma = abs(m)
        n_lo = max(ma, 1)
        if n_lo > n_max:
            continue
        cth = grid.w_theta * Fth[:, grid._m_index(m)]
        cph = grid.w_theta * Fph[:, grid._m_index(m)]
        dPb = grid.dP[ma][n_lo - ma : n_max + 1 - ma]
        Pb = grid.P[ma][n_lo - ma : n_max + 1 - ma]
        n_vals = np.arange(n_lo, n_max + 1, dtype=float)
        lam = n_vals * (n_vals + 1.0)
        proj_dP_th = dPb @ cth
        proj_P_ph = Pb @ (inv_sin * cph)
        proj_dP_ph = dPb @ cph
        proj_P_th = Pb @ (inv_sin * cth)
        g = _sign(m) * (proj_dP_th - 1j * m * proj_P_ph) / lam
        h = _sign(m) * (1j * m * proj_P_th + proj_dP_ph) / lam
        out.g[n_lo : n_max + 1, m + n_max] = g
        out.h[n_lo : n_max + 1, m + n_max] = h
    return out


def tangential_synthesize(coeffs: TangentialCoefficients, grid: SphereGrid) -> np.ndarray:
    """Evaluate sum g Psi + h Phi on the grid as Cartesian vectors."""
    n_max = coeffs.n_max
    if n_max > grid.n_max:
        raise ValueError(f"grid built for n_max={grid.n_max}, coefficients need {n_max}")
    Gth = np.zeros((grid.n_theta, grid.n_phi), dtype=complex)
    Gph = np.zeros((grid.n_theta, grid.n_phi), dtype=complex)
    inv_sin = 1.0 / grid.sin_theta
    for m in range(-n_max, n_max + 1):
        ma = abs(m)
        n_lo = max(ma, 1)
        if n_lo > n_max:
            continue
        gvec = coeffs.g[n_lo : n_max + 1, m + n_max]
        hvec = coeffs.h[n_lo : n_max + 1, m + n_max]
        if not (np.any(gvec) or np.any(hvec)):
            continue
        dPb = grid.dP[ma][n_lo - ma : n_max + 1 - ma]
        Pb = grid.P[ma][n_lo - ma : n_max + 1 - ma]
        idx = grid._m_index(m)
        s = _sign(m)
        # Psi = (dY/dth) th_hat + (i m Y / sin th) ph_hat; Phi = n x Psi
        Gth[:, idx] += s * ((gvec @ dPb) - 1j * m * inv_sin * (hvec @ Pb))
        Gph[:, idx] += s * (1j * m * inv_sin * (gvec @ Pb) + (hvec @ dPb))
    vth = np.fft.ifft(Gth, axis=1) * grid.n_phi
    vph = np.fft.ifft(Gph, axis=1) * grid.n_phi
    return vth[..., None] * grid.theta_hat + vph[..., None] * grid.phi_hat


def vector_synthesize(
    f_y: ModeCoefficients,
    f_psi: np.ndarray,
    f_phi: np.ndarray,
    grid: SphereGrid,
) -> np.ndarray:
    """Synthesize f_Y Y n + f_Psi Psi + f_Phi Phi as Cartesian grid vectors.

    ``f_psi`` and ``f_phi`` are dense coefficient arrays laid out like
    ``ModeCoefficients.c``.
    """
    tang = TangentialCoefficients(f_y.n_max, f_psi, f_phi)
    scal = synthesize(f_y, grid)
    return scal[..., None] * grid.normals + tangential_synthesize(tang, grid)
