"""Sequential entanglement witnessing by a chain of unsharp observers."""

from seqwitness.errors import (
    InternalInconsistency,
    InvalidParams,
    InvalidSharpness,
    NonUnitTrace,
    NotFound,
    NotHermitian,
)
from seqwitness.pauli_core import (
    TwoQubitState,
    decompose,
    eigenvalues_hermitian4,
    partial_transpose_bob,
    reconstruct,
)
from seqwitness.criteria import (
    ChshReport,
    ProductState,
    Witness,
    chsh_value,
    ppt_min_eigenvalue,
    sample_product_state,
    witness_expectation,
    witness_expectation_product,
    witness_matrix,
)
from seqwitness.protocol import (
    ProtocolParams,
    PovmEffect,
    SharpnessSequence,
    apply_bob_channel,
    apply_bob_channel_matrix,
    count_bobs,
    find_theta_for_n,
    gamma_sequence,
    lambda_sequence,
    make_initial_state,
    make_initial_state_asymmetric,
    simulate_protocol,
    verify_lemma1,
    verify_lemma2,
)

__version__ = "0.1.0"
