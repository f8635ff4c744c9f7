"""Reservoir computing with input-driven Kuramoto oscillator ensembles."""

__version__ = "0.1.0"
