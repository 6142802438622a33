"""Coherence of single-mode bosonic states with respect to the coherent-state family.

The package computes the alpha-coherence of a state by greedily peeling off
coherent-state components, tagging each with an orthonormal ancilla, and
measuring the finite-dimensional coherence of the result.  A second, independent
nonclassicality measure (the negative volume of a regular P function) lives in
:mod:`alphacoh.pdist`.
"""

from .errors import (
    AlphaCohError,
    ConsistencyError,
    DimensionError,
    HeadroomError,
    QuadratureError,
    SingularPError,
    TruncationError,
    VanishedResidualError,
)
from .fock import (
    FockDensity,
    FockVector,
    apply_displacement,
    apply_phase_rotation,
    cat_state,
    coherent_vector,
    fock_state,
    mean_photon,
    overlap,
    squeezed_vacuum,
)
from .husimi import MaximizerSet, SearchConfig, husimi, maximize_overlap
from .gram_schmidt import (
    ClassicalCertificate,
    GreedyDecomposition,
    GSMapResult,
    JointState,
    build_cnot_unitary,
    classical_certificate,
    greedy_decompose,
    gs_map_density,
    gs_project,
    gs_unitary_simulate,
)
from .measures import (
    CoherenceReport,
    ConvergenceSchedule,
    alpha_coherence,
    coherence_curve,
    l1_coherence,
    rel_entropy_coherence,
)
from .pdist import (
    NegativityReport,
    PDensity,
    is_classical,
    negativity,
    transform_beamsplitter,
    transform_displace,
    transform_phase,
)

__all__ = [
    "alpha_coherence",
    "AlphaCohError",
    "apply_displacement",
    "apply_phase_rotation",
    "build_cnot_unitary",
    "cat_state",
    "classical_certificate",
    "ClassicalCertificate",
    "coherence_curve",
    "CoherenceReport",
    "coherent_vector",
    "ConsistencyError",
    "ConvergenceSchedule",
    "DimensionError",
    "fock_state",
    "FockDensity",
    "FockVector",
    "greedy_decompose",
    "GreedyDecomposition",
    "gs_map_density",
    "gs_project",
    "gs_unitary_simulate",
    "GSMapResult",
    "HeadroomError",
    "husimi",
    "is_classical",
    "JointState",
    "l1_coherence",
    "maximize_overlap",
    "MaximizerSet",
    "mean_photon",
    "negativity",
    "NegativityReport",
    "overlap",
    "PDensity",
    "QuadratureError",
    "rel_entropy_coherence",
    "SearchConfig",
    "SingularPError",
    "squeezed_vacuum",
    "transform_beamsplitter",
    "transform_displace",
    "transform_phase",
    "TruncationError",
    "VanishedResidualError",
]

__version__ = "0.1.0"
