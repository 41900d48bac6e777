#!/usr/bin/env python
"""
bfmht - Butterfly-compressed manifold harmonic transforms

bfmht compresses the matrix of Laplace-Beltrami eigenfunctions sampled at
points of a surface into a butterfly factorization, so that the transform and
its adjoint cost far less than dense products. It ships:
- the closed-form torus transform as a reference problem
- Laplacian eigenmaps bases of point clouds, computed band by band
- evaluators for the rank bounds behind the compression
- spectral filtering of geometry and Gaussian random field sampling

For usage see README.md.
"""

from setuptools import find_packages, setup

setup(
    name="bfmht",
    version="0.1.0",
    description="Butterfly-compressed manifold harmonic transforms",
    long_description=__doc__,
    keywords=[
        "butterfly factorization",
        "manifold harmonic transform",
        "Laplace-Beltrami",
        "low-rank compression",
    ],
    license="GPLv3",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={"bfmht": ["utils/config_defaults.yaml"]},
    zip_safe=False,
    entry_points={
        "console_scripts": [
            "bfmht = bfmht.cli:main",
        ],
    },
    install_requires=[
        # CLI
        "click>=8.0.0",
        # Numerics
        "numpy>=1.17,<2.0",
        "scipy>=1.8.0",
        "scikit-learn>=1.2.0",
        # Settings and validation
        "pydantic>=2.0.0",
        "pydantic-settings>=2.0.0",
        "environs>=9.5.0",
        "pyyaml>=6.0",
        # Serialization
        "marshmallow>=3.19.0",
    ],
    extras_require={
        "dev": [
            # Testing
            "pytest>=7.3.0",
            "factory-boy>=3.2.0",
            # Lint and code style
            "ruff>=0.0.270",
            "black>=23.0.0",
            "isort>=5.12.0",
            "pre-commit>=3.3.0",
        ],
        "deploy": ["wheel>=0.40.0"],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Natural Language :: English",
        "Operating System :: POSIX",
        "Programming Language :: Python",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
