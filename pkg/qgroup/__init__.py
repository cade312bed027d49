"""Quantum group K-matrix engine."""
