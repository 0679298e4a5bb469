"""Certificates and simulation for sums of entropic CHSH-type inequalities.

Graph-level certificates (chordal decompositions and oriented 3-cycle
inequalities, exact rational arithmetic), Shannon evaluation of entropic
expressions, and a small density-matrix simulator for the tripartite
entropic CHSH experiments including Pauli-expectation readout.
"""

__version__ = "0.1.0"

from .entropy import (
    EQ4,
    SEC2B,
    EntropicExpression,
    GlobalDistributionModel,
    JointDistribution,
    H,
    chain_inequality,
    combine,
    conditional_entropy,
    entropic_chsh,
    evaluate,
)
from .graphs import (
    ChordalDecomposition,
    CommutationGraph,
    chordal_edge_decompositions,
    cycle_graph,
    is_chordal,
    make_graph,
    triangles,
)
from .monogamy import (
    MonogamyCertificate,
    chord_example,
    chsh_tripartite_example,
    derive_monogamy,
    verify,
)
from .pauli import (
    PauliDecomposition,
    PauliString,
    base4_pauli,
    decompose,
    expectations,
    probability_from_expectations,
    readout_report,
)
from .quantum import (
    BornModel,
    DensityOperator,
    ObservableSpec,
    bell_with_spectator,
    born_model,
    chsh_observables,
    chsh_values,
    depolarize,
    fidelity,
    joint_distribution,
    maximize_violation,
    mixed_family,
    pure_family,
    xz_observable,
)
