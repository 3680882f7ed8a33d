"""Distributed interactive proof laboratory: recognition protocols for
cographs and distance-hereditary graphs with shared randomness, plus the
oracles, generators, and adversarial probes used to exercise them."""

from .engine import (
    BandwidthReport,
    Bits,
    ProverStrategy,
    Transcript,
    Verdict,
    build_report,
    estimate_error,
    honest_prover,
    make_adversary,
    run_protocol,
)
from .cograph import COGRAPH, RefereeLog, reconstruct, root_referee
from .dh import DH, ant_replay
from .fields import (
    MERSENNE_61,
    FieldConfig,
    FingerprintCollision,
    ValidVectorEntry,
    canonical_family_root_count,
    choose_prime,
    pending_delete,
    twin_merge,
)
from .generators import (
    gen_fooling_instance,
    gen_nonmember,
    gen_random_cograph,
    gen_random_dh,
    gen_yes_gadget,
)
from .graphs import (
    Graph,
    GraphError,
    NetworkConfig,
    PruningSequence,
    PruningStep,
    Role,
    bcc_spanning_tree,
    compute_pruning_sequence,
    dh_definitional_check,
    is_cograph_oracle,
    is_dh_oracle,
    join_split,
    load_network,
    save_network,
    validate_pruning_sequence,
)

PROTOCOLS = {"cograph": COGRAPH, "dh": DH}

__all__ = [name for name in dir() if not name.startswith("_")]
