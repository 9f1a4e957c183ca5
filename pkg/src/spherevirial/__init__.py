"""Perturbation theory, numerical oracles and classical orbits for central
potentials on a sphere seen through the gnomonic projection."""

from .core import CurvedParams, EmbeddingPoint, GnomonicPoint, embed, project, unembed, unproject

__version__ = "0.1.0"

__all__ = [
    "CurvedParams",
    "GnomonicPoint",
    "EmbeddingPoint",
    "project",
    "unproject",
    "embed",
    "unembed",
]
