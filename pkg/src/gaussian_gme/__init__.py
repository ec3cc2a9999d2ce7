"""Gaussian-state genuine multipartite entanglement toolkit."""

__version__ = "0.1.0"
