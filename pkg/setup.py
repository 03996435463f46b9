# pylint: disable=missing-module-docstring, missing-function-docstring, missing-class-docstring, import-error, unspecified-encoding


from setuptools import setup, find_packages  # type: ignore

# Read the requirements from the requirements.txt file
with open("requirements.txt") as f:
    requirements = [
        line for line in f.read().splitlines() if line and not line.startswith("#")
        and not line.startswith(" ")
    ]

setup(
    name="oslo",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    package_data={
        "oslo": ["py.typed"],
    },
    install_requires=requirements,
    entry_points={"console_scripts": ["oslo=oslo.cli:main"]},
)
