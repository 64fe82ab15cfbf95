"""Discrete sine processes, the shifted half-lattice process and their statistics."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AhppError,
    DegenerateBasisError,
    EmptyInteriorError,
    InsufficientDecayError,
    MacchiViolation,
    QuadratureError,
    SpanExhaustedError,
    SpectrumError,
)
from .sine_kernel import (  # noqa: E402
    KernelWindowMatrix,
    kernel_matrix,
    macchi_spectrum_check,
    rayleigh_witness,
    sinc_eval,
)
from .sampler import (  # noqa: E402
    AhConfiguration,
    LatticeConfiguration,
    SeededStream,
    sample_ah_configuration,
    sample_configuration,
)
from .gaps import (  # noqa: E402
    closed_form_gap,
    count_pgf,
    empirical_gap_histogram,
    gap_probability,
    gap_sum_rules,
    omega,
)
from .testfunctions import BandLimitedTestFunction, SincFactor, product, sinc_power  # noqa: E402
from .correlations import (  # noqa: E402
    ah_npoint_expectation,
    bandlimited_agreement_check,
    continuous_correlation_integral,
    discrete_correlation_sum,
    offdiagonal_vanishing_check,
)
from .formfactor import FormFactorModel, empirical_form_factor, form_factor_theoretical  # noqa: E402
from .ergodic import (  # noqa: E402
    DeterministicSequence,
    build_sequence,
    continuous_average_statistic,
    convergence_diagnostic,
    lattice_average_statistic,
)
