"""Separable-pair and k-UpCCGSD circuits for molecular electronic structure."""

__version__ = "0.1.0"

from .paulis import (  # noqa: F401
    FermionOperator,
    PauliString,
    PauliSum,
    SpinLayout,
    excitation_generator,
    jordan_wigner,
    multiply,
    paired_generator_hcb,
    paired_generator_jw,
)
