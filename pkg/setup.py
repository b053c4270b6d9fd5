#!/usr/bin/env python
# -*- encoding: utf-8 -*-
"""
setup.py
A module that installs hblab as a module
"""
from pathlib import Path

from setuptools import find_packages, setup

#: Load version from source file
version = {}
version_file = Path(__file__).parent / "src" / "hblab" / "version.py"
exec(version_file.read_text(), version)


setup(
    name="hblab",
    version=version["__version__"],
    license="MIT",
    description="Numerical experiments on summability methods in de Branges-Rovnyak spaces H(b)",
    long_description=(Path(__file__).parent / "README.md").read_text(),
    long_description_content_type="text/markdown",
    packages=find_packages("src"),
    package_dir={"": "src"},
    include_package_data=True,
    zip_safe=True,
    python_requires=">=3.10",
    classifiers=[
        # complete classifier list: http://pypi.python.org/pypi?%3Aaction=list_classifiers
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords=["de branges-rovnyak", "summability", "cesaro", "hardy space"],
    install_requires=[
        "agrc-supervisor==3.0.3",
        "numpy>=1.24,<3",
        "pandas>=2.0,<3",
        "scipy>=1.10,<2",
        "toolz>=0.12,<2",
    ],
    extras_require={
        "tests": [
            "pytest-cov>=3,<6",
            "pytest-instafail==0.5.*",
            "pytest-mock==3.*",
            "pytest-watch==4.*",
            "pytest>=6,<9",
            "ruff==0.*",
        ]
    },
    setup_requires=[
        "pytest-runner",
    ],
    entry_points={
        "console_scripts": [
            "hblab = hblab.main:main",
        ]
    },
)
