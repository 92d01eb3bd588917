from setuptools import setup, find_packages

setup(
    name="pareto-preprocess",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"pareto_preprocess": ["templates/*.j2"]},
)
