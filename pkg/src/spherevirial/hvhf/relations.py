"""Hypervirial recurrences specialised to the two perturbed systems.

A relation is a list of :class:`Term` objects whose sum vanishes. Each term is
``coef * Q[gamma - shift][k]``, or for an ``energy`` term
``coef * sum_{j=0}^{gamma} E^(j) Q[gamma - j][k]``. Exactly one term is the
``target`` that the relation is solved for.

Coefficients are built from whatever scalar type the caller passes (``float``,
``Fraction``, ``mpf``) or from :class:`~spherevirial.hvhf.jet.Jet` seeds, so the
same code serves exact-rational checks, high-precision runs and
derivative-carrying runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jet import Jet

__all__ = [
    "Term",
    "oscillator_relation",
    "coulomb_relation",
    "is_zero",
    "solve_index",
]


@dataclass(frozen=True)
class Term:
    coef: object
    k: int
    shift: int = 0
    energy: bool = False
    target: bool = False


def is_zero(c):
    if isinstance(c, Jet):
        return c.is_zero()
    return c == 0


def _one(*values):
    """A unit of the richest scalar type among `values`."""
    one = 1
    for v in values:
        v0 = v.value if isinstance(v, Jet) else v
        one = one * (v0 * 0 + 1) if v0 is not None else one
    return one


def oscillator_relation(k, alpha, lam, l):
    """Relation of index `k` for ``alpha x^2/2 + beta x^l (1 + lam x^2)``.

    Solved for ``Q^{k+1}`` at the current order::

        [(k+1) alpha - k(k+1)(k+2) lam^2/4] Q_g^{k+1}
            = 2k sum_j E^(j) Q_{g-j}^{k-1} + k^3 lam/2 Q_g^{k-1}
              + k(k-1)(k-2)/4 Q_g^{k-3}
              - (2k+l) Q_{g-1}^{k+l-1} - lam (2k+l+2) Q_{g-1}^{k+l+1}
    """
    one = _one(alpha, lam)
    lead = alpha * (k + 1) - lam * lam * (one * (k * (k + 1) * (k + 2)) / 4)
    return [
        Term(-lead, k + 1, target=True),
        Term(one * (2 * k), k - 1, energy=True),
        Term(lam * (k**3) / 2, k - 1),
        Term(one * (k * (k - 1) * (k - 2)) / 4, k - 3),
        Term(-(one * (2 * k + l)), k + l - 1, shift=1),
        Term(-(lam * (2 * k + l + 2)), k + l + 1, shift=1),
    ]


def coulomb_relation(k, mu, kappa, lam, l, variant="legacy"):
    """Relation of index `k` for the radial Coulomb problem, solved for ``Q^{k-3}``.

    ``variant="legacy"`` uses the widely quoted specialisation::

        [k(k-1)(k-2) - (k-1)(4mu-1)]/4 Q^{k-3} + lam k (k^2+2-4mu)/2 Q^{k-1}
            + 2k E Q^{k-1} + 2(k-1) kappa Q^{k-2} + k(k+1)(k+2) lam^2/4 Q^{k+1}
            - (2k+l) Q_{g-1}^{k+l-1} - lam (2k+l+2) Q_{g-1}^{k+l+1} = 0

    (with ``lam^2`` on the ``Q^{k+1}`` term, as required dimensionally and by
    the one-dimensional analogue).

    ``variant="sphere"`` substitutes ``V1`` into the general radial identity,
    which changes two coefficients: ``lam k (k^2+1-2mu)/2`` on ``Q^{k-1}`` and
    ``(2k-1) kappa`` on ``Q^{k-2}``.
    """
    one = _one(mu, kappa, lam)
    lead = (mu * 4 - 1) * (-(k - 1)) + one * (k * (k - 1) * (k - 2))
    lead = lead / 4
    if variant == "legacy":
        lam_term = (mu * (-4) + (k * k + 2)) * (lam * k) / 2
        kappa_term = kappa * (2 * (k - 1))
    elif variant == "sphere":
        lam_term = (mu * (-2) + (k * k + 1)) * (lam * k) / 2
        kappa_term = kappa * (2 * k - 1)
    else:
        raise ValueError(f"unknown Coulomb variant {variant!r}")
    return [
        Term(lead, k - 3, target=True),
        Term(lam_term, k - 1),
        Term(one * (2 * k), k - 1, energy=True),
        Term(kappa_term, k - 2),
        Term(lam * lam * (one * (k * (k + 1) * (k + 2))) / 4, k + 1),
        Term(-(one * (2 * k + l)), k + l - 1, shift=1),
        Term(-(lam * (2 * k + l + 2)), k + l + 1, shift=1),
    ]


def solve_index(system, k):
    """Index of the relation that determines moment `k`."""
    return k - 1 if system == "oscillator-1d" else k + 3
