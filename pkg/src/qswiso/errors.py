"""Exception types shared across the package.

Input problems (bad graphs, out-of-range parameters, malformed files) raise
ValueError subclasses; conditions detected only at numerical runtime (lost
dominance, ill conditioning, failed consistency checks) raise NumericalError
subclasses.  The CLI maps the former to exit code 2 and the latter to 3.
"""

from __future__ import annotations


class Graph6ParseError(ValueError):
    """Malformed graph6 input: bad header, bad payload length, or stray bytes."""


class DisconnectedGraphError(ValueError):
    """The graph is not connected; every generator built here assumes it is."""


class SizeLimitError(ValueError):
    """Input exceeds a hard size cap (brute-force search, dense eigensolve)."""


class InvalidAuxEdgeError(ValueError):
    """Aux edge endpoints invalid: out of range, equal, or already an edge."""


class NumericalError(RuntimeError):
    """Base class for failures detected during numerical computation."""


class DegenerateSteadyStateError(NumericalError):
    """Null space of the generator is not one-dimensional at working precision."""


class DominanceGapError(NumericalError):
    """Gap between the two largest real parts fell below the safety threshold."""


class BranchCrossingError(NumericalError):
    """Eigenvalue branch tracking around the contour lost the dominant branch."""


class RadiusConsistencyError(NumericalError):
    """Contour cumulants disagree between radii r and r/2 beyond tolerance."""


class IllConditionedSystemError(NumericalError):
    """Linear system condition estimate exceeds what working precision supports."""


class ReconstructionError(NumericalError):
    """A reconstruction pipeline stage failed; message names the stage."""
