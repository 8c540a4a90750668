"""Exception types shared across the package."""

from __future__ import annotations


class FibrelabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FibrelabError):
    """A study configuration is malformed or internally inconsistent."""


class TubeDegenerate(FibrelabError):
    """The tube density 1 - eps*u*kappa(s) is not strictly positive."""


class GridTooCoarse(FibrelabError):
    """Grid resolution is below the supported minimum."""


class NoConvergence(FibrelabError):
    """Eigensolver failed to reach the requested residual tolerance."""


class FactorizationFailed(FibrelabError):
    """Sparse factorization of the shifted operator failed; adjust the shift."""


class DegenerateField(FibrelabError):
    """Too many exact zeros on grid nodes for a meaningful nodal extraction."""


class EmptySet(FibrelabError):
    """Hausdorff distance requested for an empty point set."""


class NonTransversalZero(FibrelabError):
    """A zero of the base eigenfunction has numerically vanishing slope."""


class DegenerateEffectiveEigenvalue(FibrelabError):
    """The requested effective eigenvalue is not simple within tolerance."""


class PairingAmbiguous(FibrelabError):
    """Two rescaled full eigenvalues are equally close to the effective one."""


class InsufficientPoints(FibrelabError):
    """Fewer than three usable points were supplied to a rate fit."""
