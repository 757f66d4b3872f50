"""Surface-plasmon quantum bus: nanowire modes, dot coupling, CPHASE gates, network layer."""

__version__ = "0.1.0"
