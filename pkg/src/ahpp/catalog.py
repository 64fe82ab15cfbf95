"""Representative test functions used by the verification suites."""
from __future__ import annotations

from .testfunctions import BandLimitedTestFunction, SincFactor, product, sinc_power


def one_dim_family() -> list[BandLimitedTestFunction]:
    """Five one-dimensional functions with spectrum inside (-1, 1)."""
    return [
        sinc_power(0.9, 1),
        sinc_power(0.45, 2),
        sinc_power(0.25, 3, 0.2),
        sinc_power(0.3, 2, 0.3, scale=2.0),
        sinc_power(0.2, 4, 0.1),
    ]


def two_dim_family() -> list[BandLimitedTestFunction]:
    """Products of sinc^6 factors with spectrum inside (-1, 1)^2."""
    return [
        product(SincFactor(0.25, 3), SincFactor(0.25, 3)),
        product(SincFactor(0.2, 3), SincFactor(0.3, 3), freq=(0.2, -0.1)),
        product(SincFactor(0.3, 3), SincFactor(0.2, 3), freq=(0.05, 0.3), scale=0.5),
    ]


def sharpness_case() -> BandLimitedTestFunction:
    """Spectrum [-1.5, 1.5]^2, beyond 1/(2a) for every a >= 1/3."""
    return product(SincFactor(0.5, 3), SincFactor(0.5, 3))


def off_diagonal_family() -> list[BandLimitedTestFunction]:
    """Functions whose spectrum avoids xi_1 + ... + xi_n = 0."""
    return [
        sinc_power(0.25, 2, 1.5),  # [1, 2]
        product(SincFactor(0.25, 2), SincFactor(0.25, 2), freq=(1.5, 1.5)),  # [1, 2]^2
        product(SincFactor(0.25, 3), SincFactor(0.25, 3), freq=(1.0, 1.0)),
    ]


def control_case() -> BandLimitedTestFunction:
    """Unmodulated function whose spectrum contains 0."""
    return product(SincFactor(0.25, 2), SincFactor(0.25, 2))


def ergodic_family(dim: int) -> list[BandLimitedTestFunction]:
    if dim == 1:
        return [sinc_power(1.0, 1), sinc_power(0.5, 2), sinc_power(0.25, 3, 0.2)]
    if dim == 2:
        return [product(SincFactor(0.25, 3), SincFactor(0.25, 3))]
    raise ValueError("ergodic families exist for dimensions 1 and 2")
