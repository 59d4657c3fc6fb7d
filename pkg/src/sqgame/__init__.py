"""Bounded-dimension certification games over trusted quantum inputs.

Design a score operator around a two-qubit entangled target, decompose it
into playable quantum inputs, maximize the score by exact coordinate ascent,
and certify the optimizer up to local unitaries. The dual layout covers
entanglement swapping with uncharacterized sources, including the
complete-Bell-measurement check. A probe suite validates the structural
claims (separability propagation, rank collapse, overlap inequalities) by
seeded brute-force sampling.
"""

from .policy import DEFAULT_POLICY, NumericPolicy
from .qlin import (
    KetVector,
    Operator,
    SchmidtForm,
    Spectrum,
    SubsystemShape,
    eig_hermitian,
    partial_trace,
    partial_transpose,
    qubits,
    random_density,
    random_ket,
    random_unitary,
    schmidt,
    tensor,
)
from .witness import (
    InputEnsemble,
    ScoreTable,
    Witness,
    build_certification_witness,
    decompose_witness,
    pauli6_states,
    reconstruct,
    target_ket,
    tetrahedral_states,
)
from .game import (
    EffectiveElement,
    SemiQuantumGame,
    Strategy,
    effective_element,
    ideal_strategy,
    score,
)
from .certify import (
    CertificationReport,
    OptResult,
    SeeSawConfig,
    bound_scan,
    certification_report,
    lu_equivalent_pure,
    seesaw_optimize,
    theorem2_bound,
)
from .swap import (
    SwapGame,
    SwapInstance,
    bsm_projectors,
    corollary_check,
    dualize,
    ideal_swap_instance,
    optimize_swap,
    swap_effective,
    swap_game_operator,
    swap_score,
)
from .oracle import (
    Lemma3Instance,
    ProbeReport,
    appendixD_scan,
    lemma1_probe,
    lemma2_probe,
    lemma3_check,
    lemma3_sample,
    naive_effective_element,
    ppt_entangled,
    theorem1_probe,
)

__version__ = "0.1.0"
