"""Pareto front reconstruction for imprecise points in the preprocessing model."""

from pareto_preprocess.core.preprocess import preprocess
from pareto_preprocess.core.reconstruct import RetrievalOracle, reconstruct, resolve
from pareto_preprocess.core.schema import Instance, Point, Region

__all__ = [
    "Instance",
    "Point",
    "Region",
    "RetrievalOracle",
    "preprocess",
    "reconstruct",
    "resolve",
]
