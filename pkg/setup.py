from setuptools import find_packages, setup

setup(
    name="q2d2",
    version="0.0.1",
    description="Quantize latent vectors onto two-dimensional grids, pair by pair.",
    packages=find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "pandas",
        "python-dotenv",
        "scipy",
        "shapely>=1.8",
        "tqdm",
    ],
    tests_require=["hypothesis"],
    entry_points={"console_scripts": ["q2d2=q2d2.pipeline.cli:main"]},
    test_suite="q2d2.tests.test_all.suite",
)
