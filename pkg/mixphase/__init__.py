"""mixphase - desk-scale simulation of mixed-state phases under fast dissipative evolution."""

__version__ = "0.1.0"
__author__ = "Eric Flee"
