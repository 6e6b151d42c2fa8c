"""
CLI Package for the Photon-Triggered QPT Engine
"""
