from setuptools import setup, find_packages

setup(
    name="shqpsk-sim",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["app"],
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "python-dotenv",
        "comet-ml"
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": ["shqpsk=app:main"],
    },
)
