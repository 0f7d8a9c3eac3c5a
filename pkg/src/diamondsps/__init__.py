"""Cavity-enhanced diamond color-center single-photon sources and QKD links."""

from .channels import (
    DetectorSpec,
    FiberChannel,
    FreeSpacePath,
    LinkBudget,
    assemble_link_budget,
    background_noise,
    beam_divergence,
    collection_efficiency,
    effective_spot_radius,
    fiber_transmittance,
    fov_geometry,
    hv_cn2,
    satellite_weff,
    terrestrial_weff,
    turbulence_moment,
)
from .emitters import (
    CavitySpec,
    CenterSpec,
    ExcitationPoint,
    bare_center_p1,
    cascade_emission_probability,
    dipole_moment,
    excitation_bounds,
    ideal_emission_probability,
    optimal_q,
    pulse_energy,
    pump_intensity,
    purcell_factor,
    purcell_factor_qv,
    rabi_frequency,
    sideband_coupling,
    wavelength_sized_volume,
    zpl_coupling,
)
from .hilbert import HilbertSpace, annihilation, atomic_projector, embed, number_operator
from .lindblad import (
    DissipatorTerm,
    EvolutionResult,
    NumericalError,
    PulseSchedule,
    build_dissipators,
    build_hamiltonian,
    evolve,
    lindblad_rhs,
)
from .qkd import (
    KeyRatePoint,
    ProtocolParams,
    SourceSpec,
    compression_tau,
    cutoff_search,
    eta_to_db,
    key_rate,
    key_rate_decoy,
    key_rate_sps,
    key_rate_wcs,
    loss_cutoff_sps,
    loss_cutoff_wcs,
    optimize_attenuation,
    shannon_entropy,
)
from .trajectories import (
    CoincidenceHistogram,
    JumpOperator,
    JumpRecord,
    hbt_histogram,
    run_cycles,
    unravel,
)

__version__ = "0.1.0"
