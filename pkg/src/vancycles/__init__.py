"""Characteristic cycles, vanishing-cycle normal data and Thom a_f checks."""

__version__ = "0.1.0"
