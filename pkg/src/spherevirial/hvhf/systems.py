"""System specifications and closed-form unperturbed energies.

Two perturbed systems are supported, both with a perturbation of the form
``beta * x**l * (1 + lam x**2)``:

* :class:`OscillatorSpec` -- ``H = pi^2/2 + alpha x^2/2 + beta x^l (1+lam x^2)`` on
  the circle, ``l`` a positive integer. Jets are taken in ``alpha``.
* :class:`CoulombSpec` -- radial problem ``H1 = pi_r^2/2 + V1`` with
  ``V1 = -kappa/r + beta r^l (1+lam r^2) - [(1/2 - m^2) lam - (m^2 - 1/4)/r^2]/2``,
  ``l`` a negative integer. Jets are taken in ``mu = m^2``.

Coulomb variants
----------------
``"legacy"``
    The zeroth-order spectrum ``-kappa^2/(2N^2) + (lam/2)(N - 1/2) N`` and the
    widely quoted specialised radial relation (coefficients ``2(k-1) kappa`` and
    ``lam k (k^2+2-4mu)/2``). Its first-order ``l = -3`` coefficient is
    ``8 kappa^3/(|m|(4m^2-1)N^3) + 2 kappa lam (4n+4|m|+1)/(|m|(4m^2-1))``.
``"sphere"``
    The spectrum ``-kappa^2/(2N^2) + (lam/2)(N^2 - 1/4)`` of ``H1`` continued
    across the equator to the whole sphere, together with the relation obtained
    by substituting ``V1`` into the general radial hypervirial identity. This
    is the variant the grid oracle reproduces.

Here ``N = n + |m| + 1/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import CurvedParams
from ..errors import SpecError
from .jet import Jet

__all__ = [
    "OscillatorSpec",
    "CoulombSpec",
    "COULOMB_VARIANTS",
    "zeroth_energy_oscillator",
    "zeroth_energy_coulomb",
]

COULOMB_VARIANTS = ("legacy", "sphere")


def _lam(params):
    return params.lam if isinstance(params, CurvedParams) else params


@dataclass(frozen=True)
class OscillatorSpec:
    alpha: float
    n: int
    l: int
    params: CurvedParams = field(default_factory=lambda: CurvedParams(0.0))

    def __post_init__(self):
        if not self.alpha > 0:
            raise SpecError(f"alpha must be positive, got {self.alpha!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise SpecError(f"n must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.l, int) or self.l < 1:
            raise SpecError(
                f"oscillator perturbation exponent must be a positive integer, got {self.l!r}"
            )

    @property
    def lam(self):
        return self.params.lam

    system = "oscillator-1d"


@dataclass(frozen=True)
class CoulombSpec:
    kappa: float
    n: int
    m: int
    l: int
    params: CurvedParams = field(default_factory=lambda: CurvedParams(0.0))
    variant: str = "legacy"

    def __post_init__(self):
        if not self.kappa > 0:
            raise SpecError(f"kappa must be positive, got {self.kappa!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise SpecError(f"n must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.m, int) or self.m == 0:
            raise SpecError("m must be a nonzero integer (|m| and 4m^2-1 appear in denominators)")
        if not isinstance(self.l, int) or self.l > -1:
            raise SpecError(
                f"Coulomb perturbation exponent must be a negative integer, got {self.l!r}"
            )
        if self.variant not in COULOMB_VARIANTS:
            raise SpecError(f"unknown Coulomb variant {self.variant!r}; use one of {COULOMB_VARIANTS}")

    @property
    def lam(self):
        return self.params.lam

    @property
    def mu(self):
        return self.m * self.m

    system = "coulomb-2d"


def zeroth_energy_oscillator(spec, order=0, alpha=None):
    """Unperturbed level ``(n+1/2)(lam + sqrt(lam^2+4 alpha))/2 + n^2 lam/2``.

    Returns a :class:`Jet` in ``alpha`` of the requested order. Pass `alpha`
    (e.g. an ``mpf`` or ``Fraction``) to override the float stored in `spec`.
    """
    a = spec.alpha if alpha is None else alpha
    lam = _lam(spec.params)
    if isinstance(a, Jet):
        x = a
    else:
        lam = lam + a * 0
        x = Jet.variable(a, order)
    root = (x * 4 + lam * lam).sqrt()
    half = (lam * 0 + 1) / 2
    return (root + lam) * ((spec.n + half) * half) + (spec.n * spec.n) * lam * half


def zeroth_energy_coulomb(spec, order=0, mu=None, kappa=None, variant=None):
    """Unperturbed radial level as a :class:`Jet` in ``mu = m^2``.

    The variant defaults to ``spec.variant``; see the module docstring.
    """
    variant = spec.variant if variant is None else variant
    m2 = spec.mu if mu is None else mu
    kap = spec.kappa if kappa is None else kappa
    lam = _lam(spec.params)
    if isinstance(m2, Jet):
        x = m2
    else:
        kap = kap + m2 * 0
        lam = lam + m2 * 0
        x = Jet.variable(m2 + kap * 0, order)
    half = (lam * 0 + 1) / 2
    big_n = x.sqrt() + (spec.n + half)
    coulomb = -(kap * kap) * half / (big_n * big_n)
    if variant == "legacy":
        return coulomb + big_n * (big_n - half) * (lam * half)
    if variant == "sphere":
        return coulomb + (big_n * big_n - half * half) * (lam * half)
    raise SpecError(f"unknown Coulomb variant {variant!r}")
