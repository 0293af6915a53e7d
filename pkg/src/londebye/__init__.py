"""Spectral boundary-integral solver for the static London equations on the
unit sphere using the generalized Debye source representation.

Modules
-------
specfun
    Modified spherical Bessel functions and spherical harmonics.
sphgrid
    Sphere quadrature grids and scalar/tangential spherical-harmonic
    transforms.
layerops
    Diagonal spectral symbols of the layer operators on the sphere.
debye_core
    Per-degree 6x6 mode systems, right-hand-side projection, and the solver.
fields
    Off-surface and on-surface field evaluation, reference point-source
    fields, and accuracy error functionals.
conditioning
    Singular-value analysis and condition-number sweeps of the
    preconditioned mode operators.
verify
    Independent physics checks: Biot-Savart identity, energy identity,
    far-field decay.
"""

__version__ = "0.1.0"
