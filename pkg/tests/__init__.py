"""Test suite for mixphase."""
