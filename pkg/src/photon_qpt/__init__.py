"""
Photon-Triggered QPT Engine - command-line front end
"""

__version__ = "1.0.0"
