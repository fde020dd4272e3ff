from setuptools import find_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="glrank",
    version="0.1.0",
    description="Exact tensor ranks, dimensions and transvection character ratios of GL_n(F_q) and SL_n(F_q) irreps, with a random-walk toolkit",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests*", "docs*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=[
        "sympy>=1.9",
        "numpy>=1.21",
        "tqdm>=4.60",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0,<8.0.0",
            "pytest-cov>=4.0.0,<5.0.0",
            "black>=22.0.0,<23.0.0",
            "isort>=5.0.0,<6.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "glrank=glrank.cli:main",
        ],
    },
    keywords=[
        "finite groups",
        "general linear group",
        "character table",
        "tensor rank",
        "random walk",
        "representation theory",
    ],
    package_data={
        "glrank": ["py.typed"],
    },
)
