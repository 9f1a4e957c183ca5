"""Gnomonic projection of the sphere and shared parameter records.

Units have hbar = mass = 1. The sphere of curvature ``lam`` has radius
``R = 1/sqrt(lam)``; the gnomonic chart maps the open hemisphere
``0 <= chi < pi/2`` around the point of tangency onto the whole plane via
``r = R tan(chi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "CurvedParams",
    "GnomonicPoint",
    "EmbeddingPoint",
    "project",
    "unproject",
    "embed",
    "unembed",
]


@dataclass(frozen=True)
class CurvedParams:
    """Curvature of the sphere.

    ``lam = 0`` is accepted and stands for the Euclidean plane, in which case
    :attr:`radius` is infinite.
    """

    lam: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError(f"curvature must be non-negative, got {self.lam!r}")

    @property
    def radius(self):
        return math.inf if self.lam == 0 else 1.0 / math.sqrt(self.lam)

    @property
    def is_flat(self):
        return self.lam == 0


@dataclass(frozen=True)
class GnomonicPoint:
    """Point of the tangent plane in polar form, optionally with its colatitude."""

    r: float
    theta: float
    chi: float | None = None

    @property
    def x1(self):
        return self.r * math.cos(self.theta)

    @property
    def x2(self):
        return self.r * math.sin(self.theta)


@dataclass(frozen=True)
class EmbeddingPoint:
    """Cartesian point ``(q1, q2, q0)`` of the sphere in R^3."""

    q1: float
    q2: float
    q0: float

    def norm_sq(self):
        return self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2


def _require_curved(params):
    if params.lam <= 0:
        raise DomainError("gnomonic projection needs a sphere (lam > 0)")


def project(chi, theta, params):
    """Project the point at colatitude `chi` onto the tangent plane.

    Raises
    ------
    DomainError
        If `chi` is not in ``[0, pi/2)``; the chart covers one hemisphere.
    """
    _require_curved(params)
    if not (0.0 <= chi < math.pi / 2):
        raise DomainError(f"chi={chi!r} outside the open hemisphere [0, pi/2)")
    r = math.tan(chi) / math.sqrt(params.lam)
    return GnomonicPoint(r=r, theta=theta, chi=chi)


def unproject(point, params):
    """Return ``(chi, theta)`` for a point of the tangent plane."""
    _require_curved(params)
    if point.r < 0:
        raise DomainError(f"projected radius must be non-negative, got {point.r!r}")
    return math.atan(point.r * math.sqrt(params.lam)), point.theta


def embed(point, params):
    """Map a tangent-plane point to the embedding coordinates of the sphere."""
    _require_curved(params)
    scale = 1.0 / math.sqrt(1.0 + params.lam * point.r * point.r)
    return EmbeddingPoint(
        q1=point.x1 * scale,
        q2=point.x2 * scale,
        q0=params.radius * scale,
    )


def unembed(q, params):
    """Inverse of :func:`embed` on the upper sheet ``q0 > 0``."""
    _require_curved(params)
    if q.q0 <= 0:
        raise DomainError("only the sheet q0 > 0 is covered by the chart")
    # x = R q / q0 on the upper sheet
    s = params.radius / q.q0
    x1, x2 = q.q1 * s, q.q2 * s
    return GnomonicPoint(r=math.hypot(x1, x2), theta=math.atan2(x2, x1))
