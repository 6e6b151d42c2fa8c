"""
Test suite for the Photon-Triggered QPT Engine.

This package contains unit tests for all core modules and the CLI.
"""
