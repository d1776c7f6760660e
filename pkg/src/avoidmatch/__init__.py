"""Configuration-avoiding hypergraph matchings and high-girth partial Steiner systems."""

__version__ = "0.1.0"

from .hypercore import ConfigHypergraph, CycleWitness, Hypergraph  # noqa: E402

__all__ = ["Hypergraph", "ConfigHypergraph", "CycleWitness", "__version__"]
