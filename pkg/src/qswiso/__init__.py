"""qswiso: quantum stochastic walk spectra as graph invariants.

Builds the Liouville-space generator of a quantum stochastic walk on a
graph, uses its complex spectrum as an isomorphism invariant, and recovers
that spectrum from the full counting statistics of jumps across an
auxiliary edge (exact cumulants, linear-system reconstruction, and
quantum-jump Monte Carlo).
"""

__version__ = "0.1.0"

from .errors import (
    BranchCrossingError,
    DegenerateSteadyStateError,
    DisconnectedGraphError,
    DominanceGapError,
    Graph6ParseError,
    IllConditionedSystemError,
    InvalidAuxEdgeError,
    NumericalError,
    RadiusConsistencyError,
    ReconstructionError,
    SizeLimitError,
)
from .graphs import (
    Graph,
    adjacency,
    apply_permutation,
    are_isomorphic_bruteforce,
    complement_adjacency,
    degrees,
    encode_graph6,
    laplacian,
    named_graph,
    parse_graph6,
    signless_laplacian,
)
from .liouville import (
    SuperOperator,
    build_aux,
    build_classical,
    build_quantum,
    compose,
    dyad_index,
    quantize_rate,
)
from .spectral import (
    DEFAULT_TAU,
    CharPoly,
    ComparisonResult,
    Spectrum,
    char_poly,
    closed_form_classical_spectrum,
    closed_form_quantum_spectrum,
    cluster_count,
    compare,
    eigenvalues,
    omega_spectrum,
    radius_bound,
    spectral_distance,
    sweep_distance,
)
from .counting import (
    CumulantSet,
    DensityVector,
    SplitCharPoly,
    cumulants_contour,
    cumulants_forward,
    dominant_eigenvalue,
    split_char_poly,
    steady_state,
    tilted_builder,
)
from .reconstruct import (
    CharPolyPair,
    LinearSystem,
    ReconstructionResult,
    assemble_system,
    monomial_derivative,
    reconstruct_from_cumulants,
    reconstruct_spectrum,
    solve_coefficients,
    spectrum_from_coeffs,
    system_order,
)
from .trajectory import (
    ChannelSet,
    CountRecord,
    CumulantEstimates,
    channel_set,
    k_statistics,
    simulate,
    variance_scaling_check,
    write_csv,
)
from .search import CLASSIC_INVARIANTS, PairReport, SearchReport, load_catalog, scan
from .catalog import enumerate_connected, enumerate_graphs, write_catalog

__all__ = [
    "__version__",
    # errors
    "BranchCrossingError", "DegenerateSteadyStateError", "DisconnectedGraphError",
    "DominanceGapError", "Graph6ParseError", "IllConditionedSystemError",
    "InvalidAuxEdgeError", "NumericalError", "RadiusConsistencyError",
    "ReconstructionError", "SizeLimitError",
    # graphs
    "Graph", "adjacency", "apply_permutation", "are_isomorphic_bruteforce",
    "complement_adjacency", "degrees", "encode_graph6", "laplacian",
    "named_graph", "parse_graph6", "signless_laplacian",
    # liouville
    "SuperOperator", "build_aux", "build_classical", "build_quantum",
    "compose", "dyad_index", "quantize_rate",
    # spectral
    "DEFAULT_TAU", "CharPoly", "ComparisonResult", "Spectrum", "char_poly",
    "closed_form_classical_spectrum", "closed_form_quantum_spectrum",
    "cluster_count", "compare", "eigenvalues", "omega_spectrum",
    "radius_bound", "spectral_distance", "sweep_distance",
    # counting
    "CumulantSet", "DensityVector", "SplitCharPoly", "cumulants_contour",
    "cumulants_forward", "dominant_eigenvalue", "split_char_poly",
    "steady_state", "tilted_builder",
    # reconstruct
    "CharPolyPair", "LinearSystem", "ReconstructionResult", "assemble_system",
    "monomial_derivative", "reconstruct_from_cumulants", "reconstruct_spectrum",
    "solve_coefficients", "spectrum_from_coeffs", "system_order",
    # trajectory
    "ChannelSet", "CountRecord", "CumulantEstimates", "channel_set",
    "k_statistics", "simulate", "variance_scaling_check", "write_csv",
    # search / catalog
    "CLASSIC_INVARIANTS", "PairReport", "SearchReport", "load_catalog", "scan",
    "enumerate_connected", "enumerate_graphs", "write_catalog",
]
