"""chaodyn: classical and quantum chaotic maps, their open-system variants,
and unitary measurement models."""

__version__ = "0.1.0"
