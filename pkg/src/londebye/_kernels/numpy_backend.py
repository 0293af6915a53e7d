"""Pure-numpy fallback for the kernel sums.

Chunked over targets so peak memory stays at ``chunk x n_sources`` floats.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 256


def _prefactors(tchunk, sources, kappa):
    """Return displacement (c, N, 3), distance (c, N) and g'(d)/d (c, N)."""
    disp = tchunk[:, None, :] - sources[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", disp, disp))
    return disp, d


def potential(targets, sources, charge, kappa):
    out = np.empty(len(targets))
    for a in range(0, len(targets), _CHUNK):
        b = a + _CHUNK
        _, d = _prefactors(targets[a:b], sources, kappa)
        g = np.exp(-kappa * d) / (4.0 * np.pi * d)
        out[a:b] = g @ charge
    return out


def gradient(targets, sources, charge, kappa):
    out = np.empty((len(targets), 3))
    for a in range(0, len(targets), _CHUNK):
        b = a + _CHUNK
        disp, d = _prefactors(targets[a:b], sources, kappa)
        # dg/dd = -exp(-kappa d)(kappa d + 1)/(4 pi d^2); gradient along disp/d
        gp_over_d = -np.exp(-kappa * d) * (kappa * d + 1.0) / (4.0 * np.pi * d**3)
        out[a:b] = np.einsum("ij,ijk->ik", gp_over_d * charge[None, :], disp)
    return out


def curl(targets, sources, vec, kappa):
    out = np.empty((len(targets), 3))
    for a in range(0, len(targets), _CHUNK):
        b = a + _CHUNK
        disp, d = _prefactors(targets[a:b], sources, kappa)
        gp_over_d = -np.exp(-kappa * d) * (kappa * d + 1.0) / (4.0 * np.pi * d**3)
        grad = gp_over_d[:, :, None] * disp
        out[a:b] = np.cross(grad, vec[None, :, :]).sum(axis=1)
    return out
