"""
Utility modules for the photon-triggered QPT engine.

This package contains helper functions:
- file_handler: Output directories and byte-exact writes
- marching_squares: Iso-line extraction on rectilinear grids
"""
