"""Fixture generation toolchain: Gaussian integrals, RHF, MP2 and FCI."""

__version__ = "0.1.0"
