"""Hot kernel sums for off-surface potential evaluation.

Three primitives over a set of weighted sources ``y_q`` with the screened
Coulomb (Yukawa) kernel ``g(d) = exp(-kappa*d) / (4*pi*d)``; ``kappa = 0``
gives the Laplace kernel:

- ``potential``: sum of ``c_q g(|x - y_q|)``
- ``gradient``:  sum of ``c_q grad_x g(|x - y_q|)``
- ``curl``:      sum of ``grad_x g(|x - y_q|) x v_q``

A compiled Cython backend is preferred; a pure-numpy implementation is used
when the extension is unavailable.  Both accept real or complex densities
(complex inputs are split into real and imaginary parts around the compiled
backend, which is real-only).
"""
from __future__ import annotations

import numpy as np

from . import numpy_backend

try:  # pragma: no cover - exercised indirectly via backend tests
    from . import cython_backend as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _impl = numpy_backend
    BACKEND = "numpy"


def _dispatch_scalar(func, targets, sources, charge, kappa):
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    sources = np.ascontiguousarray(sources, dtype=np.float64)
    charge = np.asarray(charge)
    if np.iscomplexobj(charge):
        re = func(targets, sources, np.ascontiguousarray(charge.real), kappa)
        im = func(targets, sources, np.ascontiguousarray(charge.imag), kappa)
        return re + 1j * im
    return func(targets, sources, np.ascontiguousarray(charge, dtype=np.float64), kappa)


def potential(targets, sources, charge, kappa=0.0):
    """Sum of charges against the (screened) Coulomb kernel at each target."""
    return _dispatch_scalar(_impl.potential, targets, sources, charge, float(kappa))


def gradient(targets, sources, charge, kappa=0.0):
    """Target-gradient of :func:`potential`."""
    return _dispatch_scalar(_impl.gradient, targets, sources, charge, float(kappa))


def curl(targets, sources, vec, kappa=0.0):
    """Sum of ``grad_x g(|x - y_q|) x v_q`` over sources, per target."""
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    sources = np.ascontiguousarray(sources, dtype=np.float64)
    vec = np.asarray(vec)
    if np.iscomplexobj(vec):
        re = _impl.curl(targets, sources, np.ascontiguousarray(vec.real), float(kappa))
        im = _impl.curl(targets, sources, np.ascontiguousarray(vec.imag), float(kappa))
        return re + 1j * im
    return _impl.curl(targets, sources, np.ascontiguousarray(vec, dtype=np.float64), float(kappa))
