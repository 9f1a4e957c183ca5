"""Hypervirial-Hellmann-Feynman perturbation driver.

The driver works entirely with moments ``Q[gamma][k]``, the coefficient of
``beta**gamma`` in the curvature-weighted expectation ``<(1 + lam x^2) x^k>``
(or ``r^k`` for the radial problem). Every moment is a :class:`Jet` in the seed
parameter, so the derivative needed by the next bootstrap is always available
exactly.

Order of work for ``gamma = 0..J-1``:

1. bootstrap the seed moment (``Q^0`` for the oscillator, ``Q^{-2}`` for the
   Coulomb problem) from ``dE^(gamma)/d(seed)``;
2. sweep the recurrence over the moments the dependency walk marked as needed
   (upward in ``k`` for the oscillator, downward for the Coulomb problem);
3. read off ``E^(gamma+1) = Q[gamma][l] / (gamma+1)``.

Examples
--------
>>> from spherevirial.core import CurvedParams
>>> from spherevirial.hvhf import OscillatorSpec, perturbation_series
>>> spec = OscillatorSpec(alpha=1.0, n=0, l=1, params=CurvedParams(0.0))
>>> series, _ = perturbation_series(spec, 3)
>>> [round(float(e), 12) for e in series.coeffs]
[0.5, 0.0, -0.5, 0.0]
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ResonanceError, TruncationError, UnreachableMomentError
from .jet import Jet
from .relations import coulomb_relation, is_zero, oscillator_relation, solve_index
from .systems import (
    CoulombSpec,
    OscillatorSpec,
    zeroth_energy_coulomb,
    zeroth_energy_oscillator,
)

__all__ = [
    "MomentTable",
    "EnergySeries",
    "relation_terms",
    "recurrence_step_1d",
    "recurrence_step_2d",
    "bootstrap_moments",
    "energy_from_hf",
    "required_moments",
    "perturbation_series",
    "evaluate_series",
    "relation_residuals",
]

# relative size below which a solve-for coefficient counts as vanishing
RESONANCE_RTOL = 1e-12


@dataclass
class MomentTable:
    """Moments ``Q[gamma][k]`` keyed by ``(gamma, k)``.

    ``provenance[(gamma, k)]`` is ``"seed"`` or the index of the relation the
    entry was solved from.
    """

    system: str
    weight: str
    entries: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def set(self, gamma, k, value, source):
        self.entries[(gamma, k)] = value
        self.provenance[(gamma, k)] = source

    def orders(self):
        return sorted({g for g, _ in self.entries})

    def k_range(self, gamma):
        ks = [k for g, k in self.entries if g == gamma]
        return (min(ks), max(ks)) if ks else None

    def values(self, fn=float):
        """Plain ``{(gamma, k): fn(value)}`` mapping of the constant terms."""
        return {key: fn(_value(v)) for key, v in sorted(self.entries.items())}


@dataclass
class EnergySeries:
    """Energy coefficients ``E^(0)..E^(J)`` as jets in the seed parameter."""

    spec: object
    jets: list

    @property
    def order(self):
        return len(self.jets) - 1

    @property
    def coeffs(self):
        return tuple(_value(e) for e in self.jets)

    def __getitem__(self, j):
        return self.jets[j]


def _value(x):
    return x.value if isinstance(x, Jet) else x


def _new_table(spec):
    if isinstance(spec, OscillatorSpec):
        return MomentTable(system=spec.system, weight="(1 + lam x^2)")
    return MomentTable(system=spec.system, weight="(1 + lam r^2)")


def _seed_k(spec):
    return 0 if isinstance(spec, OscillatorSpec) else -2


def _check_spec(spec):
    if not isinstance(spec, (OscillatorSpec, CoulombSpec)):
        raise TypeError(f"unsupported system specification {type(spec).__name__}")


def relation_terms(spec, k, seed=None):
    """Terms of the index-`k` relation for `spec`.

    `seed` replaces the seed parameter (``alpha`` or ``m^2``) with a value of
    another type, typically a :class:`Jet`.
    """
    _check_spec(spec)
    if isinstance(spec, OscillatorSpec):
        alpha = spec.alpha if seed is None else seed
        lam = spec.lam + _value(alpha) * 0
        return oscillator_relation(k, alpha, lam, spec.l)
    mu = spec.mu if seed is None else seed
    kappa = spec.kappa + _value(mu) * 0
    lam = spec.lam + kappa * 0
    return coulomb_relation(k, mu, kappa, lam, spec.l, variant=spec.variant)


def _check_resonance(spec, target, k_rel, gamma):
    lead = _value(target.coef)
    if isinstance(spec, OscillatorSpec):
        k = k_rel
        scale = abs((k + 1) * spec.alpha) + abs(k * (k + 1) * (k + 2) * spec.lam**2 / 4)
        if abs(lead) <= RESONANCE_RTOL * scale:
            raise ResonanceError(
                f"resonant parameters: (k+1) alpha - k(k+1)(k+2) lam^2/4 vanishes at "
                f"k={k} (alpha={spec.alpha!r}, lam={spec.lam!r}); "
                f"moment Q[{gamma}][{target.k}] is undetermined",
                gamma=gamma,
                k=target.k,
                kind="curvature",
            )
    else:
        if lead == 0 or abs(lead) <= RESONANCE_RTOL * (abs(k_rel) + 1) ** 3 * (4 * spec.mu + 1):
            raise ResonanceError(
                f"angular resonance: solve-for coefficient of relation k={k_rel} vanishes "
                f"for m={spec.m} (k = 1 or k = 1 +/- 2|m|); moment Q[{gamma}][{target.k}] "
                f"is undetermined",
                gamma=gamma,
                k=target.k,
                kind="angular",
                m=spec.m,
            )


def _skip(spec, gamma, k):
    """Entries that are identically zero by convention."""
    if gamma < 0:
        return True
    return isinstance(spec, OscillatorSpec) and k < 0


def _lookup(table, spec, gamma, k):
    if _skip(spec, gamma, k):
        return 0
    try:
        return table[(gamma, k)]
    except KeyError:
        raise KeyError(f"moment Q[{gamma}][{k}] is not in the table") from None


def _term_value(term, table, energy, spec, gamma):
    if is_zero(term.coef):
        return 0
    if term.energy:
        acc = 0
        for j in range(gamma + 1):
            q = _lookup(table, spec, gamma - j, term.k)
            if not (isinstance(q, int) and q == 0):
                acc = acc + energy[j] * q
        return term.coef * acc
    q = _lookup(table, spec, gamma - term.shift, term.k)
    return term.coef * q


def _seed_value(spec, table):
    order = max((v.order for v in table.entries.values() if isinstance(v, Jet)), default=0)
    if isinstance(spec, OscillatorSpec):
        return Jet.variable(spec.alpha, order)
    return Jet.variable(spec.mu + spec.kappa * 0, order)


def _solve(table, energy, spec, k_rel, gamma, seed=None):
    seed = _seed_value(spec, table) if seed is None else seed
    terms = relation_terms(spec, k_rel, seed=seed)
    target = next(t for t in terms if t.target)
    _check_resonance(spec, target, k_rel, gamma)
    acc = 0
    for t in terms:
        if not t.target:
            acc = acc + _term_value(t, table, energy, spec, gamma)
    value = -acc / target.coef
    return target.k, value


def recurrence_step_1d(table, energy, k, gamma, spec, seed=None):
    """Solve the index-`k` oscillator relation at order `gamma` for ``Q^{k+1}``.

    Parameters
    ----------
    table : MomentTable
        Must hold every right-hand-side moment with a nonzero coefficient.
    energy : EnergySeries or sequence of Jet
        ``E^(0)..E^(gamma)``.

    Raises
    ------
    ResonanceError
        If ``(k+1) alpha - k(k+1)(k+2) lam^2/4`` vanishes.
    """
    if not isinstance(spec, OscillatorSpec):
        raise TypeError("recurrence_step_1d needs an OscillatorSpec")
    return _solve(table, energy, spec, k, gamma, seed)[1]


def recurrence_step_2d(table, energy, k, gamma, spec, seed=None):
    """Solve the index-`k` Coulomb relation at order `gamma` for ``Q^{k-3}``.

    Raises
    ------
    ResonanceError
        If ``[k(k-1)(k-2) - (k-1)(4m^2-1)]/4`` vanishes (``k = 1`` or
        ``k = 1 +/- 2|m|``).
    """
    if not isinstance(spec, CoulombSpec):
        raise TypeError("recurrence_step_2d needs a CoulombSpec")
    return _solve(table, energy, spec, k, gamma, seed)[1]


def bootstrap_moments(energy, spec, gamma):
    """Seed moment at order `gamma` from ``dE^(gamma)/d(seed)``.

    Oscillator: ``Q[gamma][0] = delta_{gamma,0} + 2 lam dE^(gamma)/d alpha``.
    Coulomb: ``Q[gamma][-2] = 2 dE^(gamma)/d mu``.
    """
    _check_spec(spec)
    e = energy[gamma]
    if not isinstance(e, Jet) or e.order < 1:
        raise TruncationError(
            f"E^({gamma}) has no derivative order left; allocate jets of order >= J"
        )
    d = e.derivative()
    if isinstance(spec, OscillatorSpec):
        out = d * (2 * spec.lam)
        if gamma == 0:
            out = out + 1
        return out
    return d * 2


def energy_from_hf(table, j, l):
    """``E^(j) = Q[j-1][l] / j`` for ``j >= 1``."""
    if j < 1:
        raise ValueError("E^(0) comes from the closed form, not from the HF theorem")
    return table[(j - 1, l)] / j


def required_moments(spec, J):
    """Dependency walk from ``E^(1)..E^(J)``.

    Returns
    -------
    dict
        ``{gamma: sorted list of k}`` of every moment the run must produce.

    Raises
    ------
    UnreachableMomentError
        If a needed Coulomb moment sits above the seed (``k >= -1``).
    ResonanceError
        If a needed moment can only be solved from a resonant relation.
    """
    _check_spec(spec)
    if J < 1:
        raise ValueError("J must be at least 1")
    seed = _seed_k(spec)
    need = set()
    # every E^(j), j <= J, is part of the output series
    stack = [(g, spec.l) for g in range(J)]
    while stack:
        g, k = stack.pop()
        if _skip(spec, g, k) or (g, k) in need:
            continue
        if isinstance(spec, CoulombSpec) and k > seed:
            raise UnreachableMomentError(
                f"<r^{k}> at order {g} lies above the <r^-2> seed; the downward "
                "Coulomb recurrence cannot reach it",
                gamma=g,
                k=k,
            )
        need.add((g, k))
        if k == seed:
            # the seed needs E^(g), which needs Q[g-1][l]
            stack.append((g - 1, spec.l))
            continue
        k_rel = solve_index(spec.system, k)
        terms = relation_terms(spec, k_rel)
        target = next(t for t in terms if t.target)
        _check_resonance(spec, target, k_rel, g)
        for t in terms:
            if t.target or is_zero(t.coef):
                continue
            if t.energy:
                for j in range(g + 1):
                    stack.append((g - j, t.k))
                    if j >= 1:
                        stack.append((j - 1, spec.l))
            else:
                stack.append((g - t.shift, t.k))
    out = {}
    for g, k in need:
        out.setdefault(g, []).append(k)
    return {g: sorted(ks) for g, ks in sorted(out.items())}


def perturbation_series(spec, J, seed_value=None):
    """Energy coefficients ``E^(0)..E^(J)`` and the moments that produced them.

    Parameters
    ----------
    spec : OscillatorSpec or CoulombSpec
    J : int
        Highest order, ``J >= 1``.
    seed_value : optional
        Value of the seed parameter in another scalar type (``Fraction`` for
        exact arithmetic, ``mpf`` for extended precision). Defaults to the value in `spec`.

    Returns
    -------
    EnergySeries, MomentTable
    """
    needed = required_moments(spec, J)
    table = _new_table(spec)
    if isinstance(spec, OscillatorSpec):
        a = spec.alpha if seed_value is None else seed_value
        e0 = zeroth_energy_oscillator(spec, order=J, alpha=a)
        seed = Jet.variable(a, J)
    else:
        mu = spec.mu if seed_value is None else seed_value
        e0 = zeroth_energy_coulomb(spec, order=J, mu=mu)
        seed = Jet.variable(mu + spec.kappa * 0, J)
    energy = [e0]
    seed_k = _seed_k(spec)
    descending = isinstance(spec, CoulombSpec)
    for g in range(J):
        ks = needed.get(g, [])
        if seed_k in ks:
            table.set(g, seed_k, bootstrap_moments(energy, spec, g), "seed")
        for k in sorted(ks, reverse=descending):
            if k == seed_k:
                continue
            k_rel = solve_index(spec.system, k)
            _, value = _solve(table, energy, spec, k_rel, g, seed=seed)
            table.set(g, k, value, k_rel)
        energy.append(energy_from_hf(table, g + 1, spec.l))
    return EnergySeries(spec=spec, jets=energy), table


def evaluate_series(series, beta):
    """Truncated sum ``sum_j beta**j E^(j)`` (Horner form)."""
    coeffs = series.coeffs if isinstance(series, EnergySeries) else tuple(series)
    acc = 0
    for c in reversed(coeffs):
        acc = acc * beta + c
    return acc


def relation_residuals(series, table):
    """Check every valid relation whose terms are all available in `table`.

    Oscillator relations with negative index and Coulomb relations with
    ``k <= 1 - 2|m|`` are skipped: they involve moments that are either not
    structural zeros or not finite.

    Returns
    -------
    list of dict
        One record per ``(gamma, k_rel)`` with keys ``gamma``, ``k``,
        ``residual`` (absolute, constant term), ``relative`` (worst relative
        residual over all carried Taylor coefficients) and ``used``
        (whether the relation solved for a table entry).
    """
    spec = series.spec
    energy = series.jets
    out = []
    orders = table.orders()
    if not orders:
        return out
    ks = [k for _, k in table.entries]
    kmin, kmax = min(ks), max(ks)
    used = {(g, src) for (g, _), src in table.provenance.items() if src != "seed"}
    seed = _seed_value(spec, table)
    for g in orders:
        for k_rel in range(kmin - 4, kmax + 5):
            if isinstance(spec, OscillatorSpec) and k_rel < 0:
                # these involve genuine negative moments, not the structural zeros
                continue
            if isinstance(spec, CoulombSpec) and k_rel <= 1 - 2 * abs(spec.m):
                # <r^{k-3}> diverges and the r -> 0 boundary term survives
                continue
            terms = relation_terms(spec, k_rel, seed=seed)
            try:
                vals = [_term_value(t, table, energy, spec, g) for t in terms]
            except (KeyError, IndexError):
                continue
            if all(isinstance(v, int) and v == 0 for v in vals):
                continue
            # compare every carried Taylor coefficient, not just the value
            jets = [v for v in vals if isinstance(v, Jet)]
            order = min((v.order for v in jets), default=0)
            total = [0] * (order + 1)
            scale = [0] * (order + 1)
            for v in vals:
                cs = v.coeffs if isinstance(v, Jet) else (v,) + (0,) * order
                for i in range(order + 1):
                    total[i] = total[i] + cs[i]
                    scale[i] = scale[i] + abs(cs[i])
            residual = abs(total[0])
            rel = max(abs(t) / sc if sc else abs(t) for t, sc in zip(total, scale))
            out.append(
                {
                    "gamma": g,
                    "k": k_rel,
                    "residual": residual,
                    "relative": rel,
                    "used": (g, k_rel) in used,
                }
            )
    return out
