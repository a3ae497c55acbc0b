"""Desk-scale bin-picking cell: simulator, perception, controller, bus, HMI."""

__version__ = "0.1.0"
