"""Passive linear-optics simulator: classical fields, coherent states, Fock states."""
from .circuit import CircuitElement, CircuitSpec, compile_circuit, format_circuit, mach_zehnder, parse_circuit
from .classical import intensities, output_fractions, propagate_classical
from .quantum import (
    FockBasisVector,
    coincidence_coefficient,
    displaced_annihilation,
    fock_evolve,
    fock_evolve_bruteforce,
    permanent,
    poisson_number_distribution,
    propagate_coherent,
    single_photon_distribution,
    two_photon_component_coherent,
)
from .statistics import (
    CountRecord,
    Fringe,
    anticorrelation_parameter,
    coincidence_probability,
    equivalence_check,
    fringe_visibility,
    hom_scan,
    sample_frames,
)
from .transfer import (
    ElementMatrix,
    TransferMatrix,
    compose,
    embed,
    make_beam_splitter,
    make_phase,
    validate_unitary,
)

__version__ = "0.1.0"
