"""Finite-scale verifiers and oracles for simulated group shift spaces."""

__version__ = "0.1.0"
