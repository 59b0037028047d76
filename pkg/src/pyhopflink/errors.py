"""Exception hierarchy shared by every pyhopflink module.

All errors derive from ``HopfLinkError`` (itself a ``ValueError``).  The CLI
maps ``GeometryError`` to exit code 2 and ``InputError`` to exit code 1.
"""

from __future__ import annotations


class HopfLinkError(ValueError):
    """Base class for all pyhopflink errors."""


class GeometryError(HopfLinkError):
    """Degenerate or invalid geometry."""


class InputError(HopfLinkError):
    """Malformed or structurally invalid input data."""


# -- quat ---------------------------------------------------------------------


class NonUnitError(GeometryError):
    """A quaternion expected to be unit length is not."""


class NotRotationError(GeometryError):
    """A matrix expected to lie in SO(3) does not."""


class StepTooLargeError(GeometryError):
    """Adjacent samples of a rotation path are too far apart to lift."""


# -- roundlink ----------------------------------------------------------------


class DegenerateError(GeometryError):
    """Tangencies, touching circles, or other measure-zero configurations."""


class NotLinkedError(GeometryError):
    """Two circles have linking number zero."""


class ParallelPlanesError(GeometryError):
    """The planes of two circles are parallel."""


class EmptyIntersectionError(GeometryError):
    """The discs of a link do not meet in an arc joining both components."""


# -- retraction ---------------------------------------------------------------


class NotInYError(GeometryError):
    """A configuration fails the conditions of the retract Y."""


class NotClosedError(GeometryError):
    """A sampled loop does not return to a deck translate of its start."""


class PostconditionFailedError(GeometryError):
    """A retraction stage did not reach its stated target."""


# -- plgeom -------------------------------------------------------------------


class TooCloseError(GeometryError):
    """Two polylines come closer than the linking tolerance."""


class NoTransverseHeightError(GeometryError):
    """No sampled ellipsoid height is transverse to the mesh."""


class NotTransverseError(GeometryError):
    """The mesh is not transverse to the ellipsoid."""


class NoMixedChordError(GeometryError):
    """The extracted pattern does not have exactly one mixed-sign chord."""


class MeshError(InputError):
    """A triangle mesh is not an embedded disc."""


# -- pattern ------------------------------------------------------------------


class CrossingChordsError(InputError):
    """Two chords of a pattern cross."""


class WrongAlphaCountError(InputError):
    """A pattern does not have exactly one mixed-sign chord."""


class NotInnermostError(InputError):
    """A chord scheduled for removal still has chords nested inside it."""


class MalformedPatternError(InputError):
    """Pattern points and chords do not form a perfect matching."""


# -- grassmann ----------------------------------------------------------------


class NotOrthonormalError(GeometryError):
    """A pair of 4-vectors is not orthonormal."""


class PoleProximityError(GeometryError):
    """A point is too close to the stereographic projection pole."""
