"""Pseudo-spectral laboratory for unstable multi-vortex equilibria of 2D Navier-Stokes."""

__version__ = "0.1.0"
