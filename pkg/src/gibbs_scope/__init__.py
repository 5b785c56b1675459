"""Gibbs / non-Gibbs diagnostics for time-evolved rotor models."""

__version__ = "0.1.0"
