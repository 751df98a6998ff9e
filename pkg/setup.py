#!/usr/bin/env python3

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="aeadscan",
    version="0.1.0",
    description="Static detection of AEAD crypto misuse in Rust source, with a code-generation study harness",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Security :: Cryptography",
        "Topic :: Software Development :: Quality Assurance",
    ],
    python_requires=">=3.8",
    install_requires=[
        "pandas>=1.3.0",
        "numpy>=1.21",
        "scipy>=1.7",
        "pyyaml>=5.4",
        "tomli>=1.1; python_version<'3.11'",
        "tomli-w>=1.0",
    ],
    extras_require={
        "live": [
            "openai>=1.0",
        ],
        "dev": [
            "pytest>=7.0",
            "hypothesis>=6.0",
            "black",
            "isort",
            "mypy",
        ],
    },
    entry_points={
        "console_scripts": [
            "aeadscan=aeadscan.main:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
)
