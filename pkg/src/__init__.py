"""Counterdiabatic state preparation for the transverse-field Ising chain"""

__version__ = "1.0.0"
