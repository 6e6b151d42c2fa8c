#!/usr/bin/env python3
"""
Setup script for the Photon-Triggered QPT Engine CLI
"""

from setuptools import setup, find_packages

setup(
    name="photon-qpt",
    version="1.0.0",
    description="Single-photon-triggered superradiant quantum phase transitions: analytic and finite-N solvers",
    packages=find_packages(where="src") + find_packages(include=["core*", "utils*"]),
    package_dir={"photon_qpt": "src/photon_qpt"},
    py_modules=["config"],
    python_requires=">=3.9",
    install_requires=[
        "typer>=0.9.0",
        "rich>=13.0.0",
        "python-dotenv>=1.0.0",
        "pydantic>=2.0.0",
        "numpy>=1.24.0",
        "scipy>=1.10.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-mock>=3.11.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "photon-qpt=photon_qpt.cli.app:app",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
