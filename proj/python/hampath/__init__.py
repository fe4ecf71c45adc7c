"""Phase-space path integral propagators for the free particle and the harmonic oscillator."""

from ._core import (
    DomainError,
    Error,
    SingularTime,
    dense_fredholm_det,
    eigenvalues,
    exact_eigenvalue,
    fredholm_det,
    free_expectation,
    free_expectation_reference,
    ho_propagator,
    ho_t_transform_value,
    is_singular_time,
    pin_spectral_sum,
    run_cli,
    schrodinger_residual,
    verify_determinant,
    verify_free_limit,
    verify_oracle,
    verify_pde,
    verify_spectrum,
)

__all__ = [
    "DomainError",
    "Error",
    "SingularTime",
    "dense_fredholm_det",
    "eigenvalues",
    "exact_eigenvalue",
    "fredholm_det",
    "free_expectation",
    "free_expectation_reference",
    "ho_propagator",
    "ho_t_transform_value",
    "is_singular_time",
    "pin_spectral_sum",
    "run_cli",
    "schrodinger_residual",
    "verify_determinant",
    "verify_free_limit",
    "verify_oracle",
    "verify_pde",
    "verify_spectrum",
]
