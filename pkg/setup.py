from setuptools import find_packages, setup

setup(
    name="xy-gibbs-vqa",
    version="0.1.0",
    description="Gibbs-state preparation of the periodic XY chain with a classically simulated variational circuit.",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    include_package_data=True,
    license="MIT",
    python_requires=">=3.10",
    install_requires=[
        "Django>=4.2",
        "djangorestframework>=3.14",
        "numpy>=1.24",
        "scipy>=1.11",
    ],
    extras_require={
        "test": [
            "hypothesis>=6.80",
            "pytest>=7.4",
        ],
    },
    entry_points={
        "console_scripts": [
            "xy-gibbs=xy_gibbs.cli:main",
        ],
    },
    classifiers=[
        "Framework :: Django",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
