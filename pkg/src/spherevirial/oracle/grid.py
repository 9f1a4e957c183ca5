"""Finite-difference Hamiltonians in the angle variable ``u``.

Both curved Hamiltonians are conjugated to ``-1/2 d^2/du^2 + W(u)``:

* 1D: ``x = tan(a u)/a`` with ``a = sqrt(lam)`` and ``phi = (1 + lam x^2)^{1/2} psi``
  maps ``L^2(dx)`` onto ``L^2(du)`` and the curved momentum onto ``-i d/du``.
* radial: ``r = tan(a u)/a`` with ``phi = (r (1 + lam r^2))^{1/2} psi`` maps
  ``L^2(r dr)`` onto ``L^2(du)`` and ``pi_r`` onto ``-i d/du``.

With these, ``|psi|^2 dx = |phi|^2 du`` (resp. ``|psi|^2 r dr``), so expectation
values are plain quadratures in ``u`` and no Jacobian has to be tracked.

The Laplacian is the standard three-point stencil on interior nodes
``u_i = u_min + i h``, ``i = 1..N``, ``h = (u_max - u_min)/(N + 1)`` with
Dirichlet conditions at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import CurvedParams
from ..errors import DomainError, GridResolutionError, SpecError

__all__ = [
    "GridSpec",
    "DiscreteHamiltonian",
    "build_oscillator_1d",
    "build_oscillator_flat",
    "build_coulomb_radial",
    "build_oscillator_radial",
    "radial_oscillator_energy",
    "coulomb_sphere_energy",
    "COULOMB_DOMAINS",
]

COULOMB_DOMAINS = ("sphere", "hemisphere")


@dataclass(frozen=True)
class GridSpec:
    """Uniform interior grid.

    Parameters
    ----------
    npoints : int
        Number of interior nodes (at least 64).
    umin, umax : float, optional
        Override the natural interval of the builder, e.g. to cut a nearly flat
        problem down to the region where the state lives.
    """

    npoints: int
    umin: float | None = None
    umax: float | None = None

    def __post_init__(self):
        if not isinstance(self.npoints, (int, np.integer)) or self.npoints < 64:
            raise GridResolutionError(f"npoints must be an integer >= 64, got {self.npoints!r}")

    def nodes(self, lo, hi):
        lo = lo if self.umin is None else max(lo, self.umin)
        hi = hi if self.umax is None else min(hi, self.umax)
        if not hi > lo:
            raise DomainError(f"empty grid interval ({lo}, {hi})")
        h = (hi - lo) / (self.npoints + 1)
        return lo + h * np.arange(1, self.npoints + 1), h, (lo, hi)


@dataclass
class DiscreteHamiltonian:
    """Symmetric tridiagonal ``-1/2 D2 + diag(W)``.

    Attributes
    ----------
    diag, offdiag : ndarray
        Main and off diagonal; the matrix is symmetric by construction because
        only one off-diagonal array is stored.
    u : ndarray
        Interior nodes. ``sin_au`` and ``cos_au`` are cached so that moments can be
        formed without evaluating ``tan`` at the equator.
    kind : str
        ``"oscillator-1d"``, ``"flat-1d"``, ``"coulomb-2d"`` or ``"oscillator-2d"``.
    measure : str
        Measure of the original wavefunction (``"dx"`` or ``"r dr"``).
    potential : dict
        ``{power: coefficient}`` of the (effective) potential in the chart
        coordinate, used by the hypervirial checks.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    h: float
    u: np.ndarray
    interval: tuple
    lam: float
    kind: str
    measure: str
    potential: dict
    n: int = 0
    m: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def npoints(self):
        return self.diag.size

    @property
    def a(self):
        return math.sqrt(self.lam)

    @property
    def sin_au(self):
        return np.sin(self.a * self.u)

    @property
    def cos_au(self):
        return np.cos(self.a * self.u)

    @property
    def coordinate(self):
        """Chart coordinate ``x`` (or ``r``) at the nodes; ``inf`` at an equator node."""
        if self.lam == 0:
            return self.u.copy()
        with np.errstate(divide="ignore"):
            return self.sin_au / self.cos_au / self.a

    def matvec(self, v):
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out


def _check_resolution(npoints, n):
    if npoints < 32 * (n + 1):
        raise GridResolutionError(
            f"{npoints} interior points cannot resolve level n={n}; use at least {32 * (n + 1)}"
        )


def _assemble(w, h):
    diag = 1.0 / (h * h) + w
    off = np.full(w.size - 1, -0.5 / (h * h))
    return diag, off


def _require_curved(lam):
    if not lam > 0:
        raise DomainError("curved builders need lam > 0; use the flat builder for lam = 0")


def _power_terms(alpha_half, beta, l, lam):
    pot = {2: alpha_half}
    if beta:
        pot[l] = pot.get(l, 0.0) + beta
        pot[l + 2] = pot.get(l + 2, 0.0) + beta * lam
    return pot


def build_oscillator_1d(spec, beta, grid):
    """``-1/2 d^2/du^2 + alpha x^2/2 + beta x^l (1 + lam x^2)`` on ``|u| < pi/(2a)``."""
    lam = float(spec.lam)
    _require_curved(lam)
    _check_resolution(grid.npoints, spec.n)
    a = math.sqrt(lam)
    half = math.pi / (2 * a)
    u, h, interval = grid.nodes(-half, half)
    x = np.tan(a * u) / a
    w = 0.5 * spec.alpha * x * x
    if beta:
        w = w + beta * x**spec.l * (1 + lam * x * x)
    diag, off = _assemble(w, h)
    return DiscreteHamiltonian(
        diag, off, h, u, interval, lam, "oscillator-1d", "dx",
        _power_terms(0.5 * spec.alpha, beta, spec.l, lam), n=spec.n,
        meta={"alpha": spec.alpha, "beta": beta, "l": spec.l},
    )


def build_oscillator_flat(alpha, grid, beta=0.0, l=1, n=0, box=None):
    """Flat ``-1/2 d^2/dx^2 + alpha x^2/2 + beta x^l`` in a large Dirichlet box.

    The default half-width ``(sqrt(2n+1) + 9)/alpha^{1/4}`` leaves the
    Gaussian tail below double precision at the walls.
    """
    _check_resolution(grid.npoints, n)
    if box is None:
        box = (math.sqrt(2 * n + 1) + 9.0) / alpha**0.25
    u, h, interval = grid.nodes(-box, box)
    w = 0.5 * alpha * u * u + (beta * u**l if beta else 0.0)
    diag, off = _assemble(w, h)
    pot = {2: 0.5 * alpha}
    if beta:
        pot[l] = pot.get(l, 0.0) + beta
    return DiscreteHamiltonian(
        diag, off, h, u, interval, 0.0, "flat-1d", "dx", pot, n=n,
        meta={"alpha": alpha, "beta": beta, "l": l},
    )


def _coulomb_constant(m, lam):
    # V1 = V - [(1/2 - m^2) lam - (m^2 - 1/4)/r^2]/2
    return (0.5 * m * m - 0.25) * lam


def build_coulomb_radial(spec, beta, grid, domain="sphere"):
    """Transformed radial Coulomb Hamiltonian ``-1/2 d^2/du^2 + V1(r(u))``.

    Parameters
    ----------
    domain : {"sphere", "hemisphere"}
        ``"sphere"`` continues ``u`` across the equator to the antipode,
        ``u in (0, pi/a)``, where the Coulomb centre's image makes the problem
        self-adjoint without a wall. ``"hemisphere"`` stops at the equator
        ``u = pi/(2a)`` with a Dirichlet wall.

    Notes
    -----
    ``V1`` is evaluated through ``s = 1/r = a cot(a u)``, which is finite at the
    equator, so an equator node is harmless.
    """
    lam = float(spec.lam)
    _require_curved(lam)
    _check_resolution(grid.npoints, spec.n)
    if domain not in COULOMB_DOMAINS:
        raise SpecError(f"unknown Coulomb domain {domain!r}; use one of {COULOMB_DOMAINS}")
    a = math.sqrt(lam)
    end = math.pi / a if domain == "sphere" else math.pi / (2 * a)
    u, h, interval = grid.nodes(0.0, end)
    s = a * np.cos(a * u) / np.sin(a * u)
    m2 = spec.m * spec.m
    w = -spec.kappa * s + 0.5 * (m2 - 0.25) * s * s + _coulomb_constant(spec.m, lam)
    if beta:
        l = spec.l
        if domain == "sphere" and l > -2:
            raise DomainError("beta r^l (1 + lam r^2) with l = -1 is unbounded at the equator")
        w = w + beta * (s ** (-l) + lam * s ** (-l - 2))
    diag, off = _assemble(w, h)
    physical = {-1: -spec.kappa}
    if beta:
        physical[spec.l] = physical.get(spec.l, 0.0) + beta
        physical[spec.l + 2] = physical.get(spec.l + 2, 0.0) + beta * lam
    pot = {
        -1: -spec.kappa,
        -2: 0.5 * (m2 - 0.25),
        0: _coulomb_constant(spec.m, lam),
    }
    if beta:
        pot[spec.l] = pot.get(spec.l, 0.0) + beta
        pot[spec.l + 2] = pot.get(spec.l + 2, 0.0) + beta * lam
    return DiscreteHamiltonian(
        diag, off, h, u, interval, lam, "coulomb-2d", "r dr", pot, n=spec.n, m=spec.m,
        meta={
            "kappa": spec.kappa, "beta": beta, "l": spec.l, "domain": domain,
            "physical": physical,
        },
    )


def build_oscillator_radial(alpha, m, params, grid, n=0):
    """Radial part of the 2D oscillator ``alpha r^2/2`` in the sector ``m``.

    A confining companion of the Coulomb builder: every moment that the 2D
    identities need is finite for it.
    """
    lam = float(params.lam if isinstance(params, CurvedParams) else params)
    _require_curved(lam)
    _check_resolution(grid.npoints, n)
    a = math.sqrt(lam)
    u, h, interval = grid.nodes(0.0, math.pi / (2 * a))
    r = np.tan(a * u) / a
    m2 = m * m
    w = 0.5 * alpha * r * r + 0.5 * (m2 - 0.25) / (r * r) + _coulomb_constant(m, lam)
    diag, off = _assemble(w, h)
    pot = {2: 0.5 * alpha, -2: 0.5 * (m2 - 0.25), 0: _coulomb_constant(m, lam)}
    return DiscreteHamiltonian(
        diag, off, h, u, interval, lam, "oscillator-2d", "r dr", pot, n=n, m=m,
        meta={"alpha": alpha, "physical": {2: 0.5 * alpha}},
    )


def radial_oscillator_energy(alpha, m, lam, n):
    """Exact level of :func:`build_oscillator_radial` (trigonometric Poschl-Teller)."""
    nu = 0.5 + math.sqrt(0.25 + alpha / lam**2)
    big = 2 * n + abs(m) + 0.5 + nu
    return 0.5 * lam * big * big - alpha / (2 * lam) - 0.5 * lam * (m * m - 0.25) + _coulomb_constant(m, lam)


def coulomb_sphere_energy(kappa, m, lam, n):
    """Exact level of :func:`build_coulomb_radial` on the whole sphere.

    ``E = (lam/2)(N^2 - 1/4) - kappa^2/(2 N^2)`` with ``N = n + |m| + 1/2``.
    """
    big = n + abs(m) + 0.5
    return 0.5 * lam * (big * big - 0.25) - kappa * kappa / (2 * big * big)
