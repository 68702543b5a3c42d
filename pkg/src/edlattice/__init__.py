"""Toolkit for one-way-coupled non-Hermitian lattices: spectra, eigenspace
coalescence, skin-effect dynamics and steady-state response."""

from .lattice import (
    BOUNDARIES,
    DIRECTIONS,
    SYSTEM_I,
    SYSTEM_II,
    BetaRoot,
    ConfigError,
    DisorderSpec,
    ExactChainParams,
    HNChainParams,
    ModelSpec,
    SSHChainParams,
    build_bloch,
    build_realspace,
    chain_blocks,
    characteristic_roots,
    exact_model,
    load_spec,
    physical_permutation,
    save_spec,
    spec_from_dict,
    spec_to_dict,
)
from .spectra import (
    EigenResult,
    GBZPortrait,
    SpectrumSet,
    eig,
    gbz_portrait,
    obc_spectrum,
    pbc_spectrum,
    resolvent_norm,
    winding_number,
)
from .coalescence import (
    EDReport,
    EigenspacePair,
    cosine_similarity,
    ed_condition_check,
    ed_condition_from_blocks,
    extract_eigenspaces,
    localization_gauge,
    pair_gauges,
    state_gauges,
    structured_eigenvector,
)
from .dynamics import (
    TrajectoryField,
    WavepacketSpec,
    evolve,
    pese_metrics,
    prepare_wavepacket,
    seap_metrics,
)
from .response import ResponseField, greens_response, integrated_response
from .exact import (
    ExactSolution,
    asymptotic_regime,
    exact_eigensystem,
    ratio_scan,
)

__version__ = "0.1.0"
