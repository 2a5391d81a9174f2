"""topamp: directional topological traveling-wave parametric amplifier toolkit.

Pipeline: microscopic circuit -> effective coupled-array model
(:mod:`topamp.circuit`), pumped mean field (:mod:`topamp.meanfield`),
non-Hermitian lattice dynamics (:mod:`topamp.lattice`), phase
classification via singular-value spectra (:mod:`topamp.topology`),
gain / noise / directionality spectra (:mod:`topamp.response`), and
deterministic disorder Monte Carlo and grid sweeps (:mod:`topamp.sweep`).
"""

__version__ = "0.1.0"

from .circuit import (CircuitParams, EffectiveCircuit, derive_effective_circuit,
                      low_flux_margin)
from .lattice import (DisorderRealization, DisorderSigmas, NambuMatrix,
                      StabilityReport, build_hnh, sample_disorder, stability)
from .meanfield import (EffectiveParams, MeanFieldSolution, aux_chain_steady_state,
                        duffing_analytic, duffing_numeric,
                        effective_params_from_meanfield, matched_chain_inverse,
                        solve_operating_point)
from .presets import Preset, get_preset
from .response import (GainProfile, GreenFunction, SignalSpec, bandwidth_20db,
                       coherent_output, gains, green, max_occupation, noise,
                       noise_asymmetry)
from .sweep import (DisorderConfig, DisorderSummary, disorder_sweep,
                    instability_onset, run_phase_diagram)
from .topology import (SpectralDecomposition, TopologyReport, classify_point,
                       edge_states, localization_length, phase_map, svd_spectrum,
                       topological_window)

__all__ = [
    "__version__",
    "CircuitParams", "EffectiveCircuit", "derive_effective_circuit", "low_flux_margin",
    "DisorderRealization", "DisorderSigmas", "NambuMatrix", "StabilityReport",
    "build_hnh", "sample_disorder", "stability",
    "EffectiveParams", "MeanFieldSolution", "aux_chain_steady_state",
    "duffing_analytic", "duffing_numeric", "effective_params_from_meanfield",
    "matched_chain_inverse", "solve_operating_point",
    "Preset", "get_preset",
    "GainProfile", "GreenFunction", "SignalSpec", "bandwidth_20db",
    "coherent_output", "gains", "green", "max_occupation", "noise",
    "noise_asymmetry",
    "DisorderConfig", "DisorderSummary", "disorder_sweep", "instability_onset",
    "run_phase_diagram",
    "SpectralDecomposition", "TopologyReport", "classify_point", "edge_states",
    "localization_length", "phase_map", "svd_spectrum", "topological_window",
]
