"""Conjugation-invariant random rotations: zonal density transforms,
projected-Gram inversion, fake-uniformity detection, and the two-class
Bayes classification accuracy, each backed by an independent Monte Carlo
or quadrature cross-check in the test suite."""

from . import classifier, distributions, fake_uniformity, moments, radon, so3
from .errors import DegenerateRotation, DomainError, NoConvergence, OutOfRange

__version__ = "0.1.0"

__all__ = [
    "classifier",
    "distributions",
    "fake_uniformity",
    "moments",
    "radon",
    "so3",
    "DegenerateRotation",
    "DomainError",
    "NoConvergence",
    "OutOfRange",
    "__version__",
]
