"""Exact Liouvillian spectrum of the boundary-dissipated transverse-field Ising chain."""
from .model import DisorderSpec, ModelParams, Parity, sample_disorder, validate

__all__ = ["DisorderSpec", "ModelParams", "Parity", "sample_disorder", "validate"]
__version__ = "0.1.0"
