"""fibrotor: quantum kicked rotor under binary (Fibonacci) kick sequences.

Split-step stroboscopic evolution, exact-rational expansion-coefficient
algebra along the kick word, effective Fibonacci Hamiltonian and its
localized spectrum, and localization/delocalization diagnostics, with a CLI
that maps experiment presets to deterministic CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from .bchcoeff import (
    CoefficientState,
    MuAsymptotics,
    SaturatedCoefficients,
    coefficients_along_word,
    coefficients_closed_form,
    delocalization_time,
    fibonacci_coefficients,
    mu_normalized,
    recursion_step,
    saturated_necs,
)
from .effham import (
    EffectiveGenerator,
    LocalizationProfile,
    SpectralData,
    accumulate_generator,
    build_L,
    diagonalize,
    diagonalize_unitary,
    fibonacci_propagator,
    localization_profile,
    plateau_estimate,
    regular_qkr_scales,
)
from .errors import (
    DomainError,
    FibrotorError,
    FitError,
    IntegrityError,
    NumericError,
    ResourceError,
    TruncationError,
    UsageError,
)
from .evolve import (
    EnergyTrace,
    EvolutionConfig,
    LogPolicy,
    SplitStepPropagator,
    run_trajectory,
    step,
    suggest_window_size,
)
from .hilbert import (
    BasisWindow,
    OperatorMatrix,
    RotorState,
    SymmetryTag,
    build_cos_theta,
    build_l_squared,
    build_sin_sq,
    build_sin_theta,
    build_sym_lsin,
    gaussian_state,
    kick_matrix_bessel,
    kinetic_energy,
    momentum_eigenstate,
)
from .kickseq import (
    GOLDEN_MEAN,
    KickSequenceSpec,
    SequenceKind,
    fibonacci_instant,
    fibonacci_word_labels,
    gamma,
    kick_amplitude,
    kick_amplitudes,
    kick_labels,
    sequence_prefix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
