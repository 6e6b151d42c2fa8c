"""
Core modules of the photon-triggered QPT engine.

This package contains the computational modules:
- model: parameters, photon-dressed frame, phase and stability classification
- thermo_limit: closed-form N -> infinity spectra and observables
- finite_ed: finite-N exact diagonalization in a truncated Fock x spin basis
- sweep: parameter grids, contours, CSV tables and manifests
- presets: figure dataset tables
"""

__version__ = "1.0.0"
