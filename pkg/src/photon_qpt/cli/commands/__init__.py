"""
CLI Commands Package for the Photon-Triggered QPT Engine
"""
