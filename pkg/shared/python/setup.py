"""
Setup script for the shared glogger package.
"""

from setuptools import find_packages, setup

setup(
    name="glogger",
    version="1.1.0",
    description="Provider-based structured logging for batch numerical runs",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=[],
    extras_require={
        "dev": [
            "pytest",
            "black",
        ],
    },
)
