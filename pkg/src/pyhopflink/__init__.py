"""pyhopflink — round Hopf links, the prism manifold S³/ℚ8, and great Hopf links in S³."""

__version__ = "0.1.0"

from pyhopflink.retraction import canonical_prism_point, retract_to_Y
from pyhopflink.roundlink import OrientedRoundHopfLink, RoundCircle, validate_hopf

__all__ = [
    "OrientedRoundHopfLink",
    "RoundCircle",
    "canonical_prism_point",
    "retract_to_Y",
    "validate_hopf",
]
