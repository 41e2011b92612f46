"""Utility modules for mixphase."""
