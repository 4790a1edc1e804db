"""Compiler and exact simulator for single-photon quantum computing with OAM encoding."""

from .errors import LeakageError, ValidationError
from .state import (
    PhotonState,
    basis_state,
    from_amplitudes,
    normalized,
    overlap,
    survival_probability,
)
from .elements import (
    IDEAL,
    BeamSplitter,
    ExtractGate,
    Filter,
    Hologram,
    Mirror,
    Netlist,
    PhaseShifter,
    ReintegrateGate,
    check_reflection_parity,
    run_netlist,
)
from .extraction import (
    ExtractionSpec,
    component_survival,
    extraction_survival,
    ideal_extract,
    ideal_reintegrate,
    lower_extract_to_netlist,
    lower_reintegrate_to_netlist,
    survival_lower_bound,
    zeno_extract,
    zeno_reintegrate,
)
from .compiler import (
    CompileReport,
    TwoLevelFactor,
    U2Params,
    compile_unitary,
    decompose_two_level,
    embed_factor,
    haar_random_unitary,
    lower_two_level,
    reconstruct_and_verify,
    u2_to_optics,
)
from .readout import (
    PathQubitState,
    ReadoutCost,
    demux,
    measure_bit,
    remux,
    repeated_run_readout,
    sample_full_measurement,
    sorter_cost,
)

__version__ = "0.1.0"
