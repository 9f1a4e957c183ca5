"""Closed-form low-order coefficients used as cross-checks of the engine.

Oscillator, ``l = 1``: with ``s = sqrt(lam^2 + 4 alpha)``::

    Q_0^0 = (s + (2n+1) lam)/s
    Q_0^2 = [(2n+1) lam + s] [(2n+1) s + c lam] / ((4 alpha - 3 lam^2) s)
    E^(2) = -(Q_0^0 + 3 lam Q_0^2)/(2 alpha)

where ``c = 2n^2 + 2n + 2``. The ``"legacy"`` form carries
``c = 2n^2 + 2n + 3`` instead, a value that a direct quadrature of
``<x^2 (1 + lam x^2)>`` over the exact ground state rules out for ``lam > 0``;
both forms share the flat limit ``E^(2) -> -1/(2 alpha)``.
"""

from __future__ import annotations

import math

__all__ = [
    "OSCILLATOR_FORMS",
    "oscillator_q00",
    "oscillator_q02",
    "oscillator_e2",
    "coulomb_e1_legacy",
]

OSCILLATOR_FORMS = ("exact", "legacy")


def _c(n, form):
    if form == "exact":
        return 2 * n * n + 2 * n + 2
    if form == "legacy":
        return 2 * n * n + 2 * n + 3
    raise ValueError(f"unknown form {form!r}; use one of {OSCILLATOR_FORMS}")


def oscillator_q00(alpha, lam, n):
    """Zeroth-order weighted moment ``<1 + lam x^2>``."""
    s = math.sqrt(lam * lam + 4 * alpha)
    return (s + (2 * n + 1) * lam) / s


def oscillator_q02(alpha, lam, n, form="exact"):
    """Zeroth-order weighted moment ``<x^2 (1 + lam x^2)>``."""
    s = math.sqrt(lam * lam + 4 * alpha)
    a = (2 * n + 1) * lam + s
    b = (2 * n + 1) * s + _c(n, form) * lam
    return a * b / ((4 * alpha - 3 * lam * lam) * s)


def oscillator_e2(alpha, lam, n, form="exact"):
    """Second-order coefficient for ``beta x (1 + lam x^2)``.

    Examples
    --------
    >>> round(oscillator_e2(1.0, 1e-12, 0), 9)
    -0.5
    """
    return -(oscillator_q00(alpha, lam, n) + 3 * lam * oscillator_q02(alpha, lam, n, form)) / (2 * alpha)


def coulomb_e1_legacy(kappa, lam, n, m):
    """First-order coefficient for ``beta r^-3 (1 + lam r^2)`` in the legacy Coulomb variant.

    ``8 kappa^3/(|m|(4m^2-1)N^3) + 2 kappa lam (4n + 4|m| + 1)/(|m|(4m^2-1))``
    with ``N = n + |m| + 1/2``.
    """
    am = abs(m)
    big = n + am + 0.5
    den = am * (4 * m * m - 1)
    return 8 * kappa**3 / (den * big**3) + 2 * kappa * lam * (4 * n + 4 * am + 1) / den
