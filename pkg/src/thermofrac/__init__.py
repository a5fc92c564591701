"""Coupled thermoelasticity and phase-field fracture on P1 triangles."""

__version__ = "0.1.0"
