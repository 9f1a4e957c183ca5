"""Classical central-force orbits on the sphere and their flat counterparts.

Motion is integrated directly in the colatitude/azimuth pair ``(chi, theta)``
of the sphere of radius ``R`` using the Lagrangian

    L = R^2 (chi'^2 + sin^2(chi) theta'^2)/2 - V(R tan chi),

so that the gnomonic relations (projected radius ``r = R tan chi``, conserved
``L = r^2 theta'/(1 + lam r^2)``, energy shift ``E - lam L^2/2``) are checked
rather than assumed.

Radial Coulomb orbits run into the centre; they are integrated with the
Levi-Civita substitution ``chi = w^2``, ``dt = chi ds``, under which the motion
is smooth and the orbit bounces back along its ray. Radial oscillator orbits
pass through the centre and are integrated with a signed ``chi``.

Averages over one period use the periodic trapezoid rule on a uniform grid in
the integration variable, which converges spectrally for smooth orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .core import CurvedParams
from .errors import ChartBoundaryError, ConvergenceError, DomainError, PeriodNotFoundError

__all__ = [
    "Potential",
    "coulomb",
    "oscillator",
    "perturbed_coulomb",
    "SphericalState",
    "SphericalOrbit",
    "FlatOrbit",
    "circular_state",
    "integrate_sphere",
    "integrate_flat",
    "orbit_equation_residual",
    "virial_time_averages",
    "virial_pointwise_gap",
    "flat_virial_time_averages",
    "flat_correspondence",
    "closure_distance",
    "time_reversal_error",
]

RTOL = 1e-12
ATOL = 1e-14
CHART_MARGIN = 1e-6


# -- potentials ------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Radial potential ``V(r)`` of the projected radius.

    ``kind`` is ``"coulomb"`` (``-kappa/r``), ``"oscillator"``
    (``omega2 r^2/2``) or ``"perturbed-coulomb"`` (``-kappa/r + epsilon r``).
    """

    kind: str
    strength: float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("coulomb", "oscillator", "perturbed-coulomb"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if not self.strength > 0:
            raise ValueError("potential strength must be positive")

    @property
    def singular_at_origin(self):
        return self.kind != "oscillator"

    @property
    def radial_periods_per_orbit(self):
        """Radial periods after which a Bertrand orbit closes (1 Kepler, 2 oscillator)."""
        return 2 if self.kind == "oscillator" else 1

    def value(self, r):
        if self.kind == "oscillator":
            return 0.5 * self.strength * r * r
        return -self.strength / r + self.epsilon * r

    def derivative(self, r):
        if self.kind == "oscillator":
            return self.strength * r
        return self.strength / (r * r) + self.epsilon


def coulomb(kappa):
    return Potential("coulomb", kappa)


def oscillator(omega2):
    return Potential("oscillator", omega2)


def perturbed_coulomb(kappa, epsilon):
    """Coulomb plus ``epsilon r``: a non-Bertrand control whose orbits precess."""
    return Potential("perturbed-coulomb", kappa, epsilon)


# -- states and orbits --------------------------------------------------------


@dataclass(frozen=True)
class SphericalState:
    chi: float
    theta: float
    chidot: float
    thetadot: float

    def as_array(self):
        return np.array([self.chi, self.theta, self.chidot, self.thetadot], dtype=float)


def _energy_sphere(y, R, pot):
    chi, _, chidot, thetadot = y
    kin = 0.5 * R * R * (chidot**2 + np.sin(chi) ** 2 * thetadot**2)
    return kin + pot.value(R * np.tan(chi))


def _angmom_sphere(y, R):
    return R * R * np.sin(y[0]) ** 2 * y[3]


def circular_state(pot, params, chi0, theta0=0.0):
    """Initial state of the circular orbit at colatitude `chi0`.

    Balancing ``sin chi cos chi theta'^2 = V'(r) sec^2(chi)/R`` gives
    ``theta'^2 = V'(r) / (R sin chi cos^3 chi)``.
    """
    R = params.radius
    r = R * math.tan(chi0)
    w2 = pot.derivative(r) / (R * math.sin(chi0) * math.cos(chi0) ** 3)
    if not w2 > 0:
        raise DomainError("no circular orbit at this colatitude")
    return SphericalState(chi0, theta0, 0.0, math.sqrt(w2))


@dataclass
class SphericalOrbit:
    """Integrated orbit on the sphere.

    Attributes
    ----------
    t, chi, theta, chidot, thetadot : ndarray
        Samples over one period (uniform in the integration variable).
    weights : ndarray
        Quadrature weights for time averages over that period (they sum to the
        period).
    energy, angmom : ndarray
        ``E_s`` and ``L_s`` at the samples.
    period : float
        Radial period used for averaging (azimuthal period for circles).
    closure_period : float
        Time after which a Bertrand orbit closes.
    """

    params: CurvedParams
    potential: Potential
    initial: SphericalState
    mode: str
    t: np.ndarray
    chi: np.ndarray
    theta: np.ndarray
    chidot: np.ndarray
    thetadot: np.ndarray
    weights: np.ndarray
    period: float
    closure_period: float
    state_at: object = field(repr=False, default=None)
    regularized: dict | None = field(repr=False, default=None)

    @property
    def radius(self):
        return self.params.radius

    @property
    def r(self):
        return self.radius * np.tan(self.chi)

    @property
    def rdot(self):
        # dr/dt = R sec^2(chi) chi'
        return self.radius * self.chidot / np.cos(self.chi) ** 2

    @property
    def energy(self):
        return _energy_sphere((self.chi, self.theta, self.chidot, self.thetadot), self.radius, self.potential)

    @property
    def angmom(self):
        return self.radius**2 * np.sin(self.chi) ** 2 * self.thetadot

    def average(self, values):
        return float(np.sum(self.weights * values) / np.sum(self.weights))

    def energy_drift(self):
        """Max deviation of the energy from its initial value over the samples.

        For regularised radial Coulomb orbits ``E`` itself is ill-conditioned
        next to the collision, so the regularised invariant
        ``2 R^2 w'^2 - w^2 (E_0 - V)`` is used, scaled by the largest ``w^2``.
        """
        if self.mode == "radial-regularized":
            reg = self.regularized
            R = self.radius
            w, wp, e0 = reg["w"], reg["wp"], reg["energy"]
            z = w * w
            pot = self.potential
            w2v = -pot.strength * _z_cot(z) / R + pot.epsilon * R * z * np.tan(z)
            inv = 2 * R * R * wp * wp - (e0 * z - w2v)
            return float(np.max(np.abs(inv)) / np.max(z))
        e = self.energy
        return float(np.max(np.abs(e - e[0])))

    def angmom_drift(self):
        L = self.angmom
        return float(np.max(np.abs(L - L[0])))


@dataclass
class FlatOrbit:
    """Orbit of ``H = p^2/2 + V`` in the plane, in polar form."""

    potential: Potential
    t: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    rdot: np.ndarray
    thetadot: np.ndarray
    period: float
    energy: float
    angmom: float
    state_at: object = field(repr=False, default=None)
    regularized: dict | None = field(repr=False, default=None)


# -- equations of motion ------------------------------------------------------


def _sphere_rhs(pot, R):
    def rhs(t, y):
        chi, _, chidot, thetadot = y
        s, c = math.sin(chi), math.cos(chi)
        r = R * s / c
        chiddot = s * c * thetadot**2 - pot.derivative(r) / (c * c * R)
        thetaddot = 0.0 if thetadot == 0.0 else -2.0 * (c / s) * chidot * thetadot
        return [chidot, thetadot, chiddot, thetaddot]

    return rhs


def _edge_event(t, y):
    return math.pi / 2 - CHART_MARGIN - abs(y[0])


_edge_event.terminal = True


def _first_event(times, t_min):
    times = [t for t in times if t > t_min]
    return float(times[0]) if times else None


def _solve(rhs, span, y0, events=None, dense=True):
    sol = solve_ivp(
        rhs, span, y0, method="DOP853", rtol=RTOL, atol=ATOL,
        dense_output=dense, events=events,
    )
    if not sol.success:
        raise ConvergenceError(f"orbit integration failed: {sol.message}")
    return sol


def _period_event(y0, accel0, index_pos, index_vel, scale):
    """Event marking the return of the radial coordinate to its initial phase."""
    vel0 = y0[index_vel]
    if abs(vel0) > 1e-9 * scale:
        def ev(t, y):
            return y[index_pos] - y0[index_pos]

        ev.direction = math.copysign(1.0, vel0)
    else:
        def ev(t, y):
            return y[index_vel]

        ev.direction = math.copysign(1.0, accel0)
    return ev


def integrate_sphere(pot, init, params, tmax=None, samples=4096):
    """Integrate one period of motion from `init`.

    Parameters
    ----------
    pot : Potential
    init : SphericalState
        Must lie in the open hemisphere ``|chi| < pi/2``; for singular
        potentials ``chi > 0``.
    params : CurvedParams
        ``lam > 0``.
    tmax : float, optional
        Integration window for period detection; defaults to a generous
        multiple of the natural time scale.
    samples : int
        Number of quadrature samples over the period.

    Raises
    ------
    ChartBoundaryError
        If the orbit reaches the equator of the chart.
    PeriodNotFoundError
        If no period is detected before `tmax`.
    """
    if params.lam <= 0:
        raise DomainError("orbits on the sphere need lam > 0")
    if not abs(init.chi) < math.pi / 2:
        raise DomainError("initial point outside the open hemisphere")
    R = params.radius
    radial = init.thetadot == 0.0
    if pot.singular_at_origin and not init.chi > 0:
        raise DomainError("the Coulomb centre must not be the initial point")
    if radial and pot.singular_at_origin:
        return _integrate_radial_coulomb(pot, init, params, tmax, samples)
    rhs = _sphere_rhs(pot, R)
    y0 = init.as_array()
    accel = rhs(0.0, y0)
    scale = abs(init.chidot) + abs(init.thetadot) + math.sqrt(abs(pot.derivative(R * math.tan(init.chi)) / R) + 1e-300)
    tmax = tmax if tmax is not None else _default_window(pot, init, params)

    circular = abs(init.chidot) <= 1e-12 * scale and abs(accel[2]) <= 1e-10 * scale**2
    if circular:
        period = 2 * math.pi / abs(init.thetadot)
        mode = "circular"
    else:
        ev = _period_event(y0, accel[2], 0, 2, scale)
        sol = _solve(rhs, (0.0, tmax), y0, events=[ev, _edge_event], dense=False)
        if sol.t_events[1].size:
            raise ChartBoundaryError(f"orbit reached the chart equator at t={sol.t_events[1][0]:.6g}")
        t_min = 1e-6 * tmax
        period = _first_event(sol.t_events[0], t_min)
        if period is None:
            raise PeriodNotFoundError(
                f"no radial period within t <= {tmax:.6g}", best_guess=_guess_period(sol, y0)
            )
        mode = "radial" if radial else "generic"
    closure = period * (1 if circular else pot.radial_periods_per_orbit)
    sol = _solve(rhs, (0.0, max(closure, period)), y0)
    t = np.linspace(0.0, period, samples, endpoint=False)
    y = sol.sol(t)
    weights = np.full(samples, period / samples)
    return SphericalOrbit(
        params, pot, init, mode, t, y[0], y[1], y[2], y[3], weights, period, closure,
        state_at=sol.sol,
    )


def _default_window(pot, init, params):
    R = params.radius
    r = abs(R * math.tan(init.chi)) or R * 1e-3
    e = _energy_sphere(init.as_array(), R, pot)
    if pot.kind == "oscillator":
        return 40.0 * math.pi / math.sqrt(pot.strength)
    # Kepler-like: period ~ 2 pi a^{3/2}/sqrt(kappa) with a ~ kappa/(2|E|)
    a = pot.strength / (2 * abs(e)) if e < 0 else 10 * r
    return 20.0 * math.pi * max(a, r) ** 1.5 / math.sqrt(pot.strength)


def _guess_period(sol, y0):
    # crude: time between successive maxima of chi
    chi = sol.y[0]
    idx = np.where((chi[1:-1] > chi[:-2]) & (chi[1:-1] > chi[2:]))[0] + 1
    if idx.size >= 2:
        return float(sol.t[idx[1]] - sol.t[idx[0]])
    return None


# -- radial Coulomb orbits (Levi-Civita) ----------------------------------------


def _cot_minus(z):
    """``cot z - z csc^2 z`` with its small-``z`` series (scalar)."""
    if abs(z) < 1e-3:
        return -2.0 * z / 3.0 - 4.0 * z**3 / 45.0
    return 1.0 / math.tan(z) - z / math.sin(z) ** 2


def _z_cot(z):
    """``z cot z`` with its small-``z`` series."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    return np.where(small, 1.0 - z * z / 3.0, zs / np.tan(zs))


def _integrate_radial_coulomb(pot, init, params, tmax, samples):
    R = params.radius
    e = float(_energy_sphere(init.as_array(), R, pot))
    kappa, eps = pot.strength, pot.epsilon

    # 2 R^2 w'^2 = F(w) = w^2 (E - V(R tan w^2)); V = -(kappa/R) cot chi + eps R tan chi
    def rhs(s, y):
        w, wp, _ = y
        z = w * w
        dF = 2 * e * w + (2 * kappa / R) * w * _cot_minus(z)
        if eps:
            # d/dw [-eps R w^2 tan(w^2)] = -eps R (2 w tan z + 2 w^3 sec^2 z)
            dF -= eps * R * (2 * w * math.tan(z) + 2 * w**3 / math.cos(z) ** 2)
        return [wp, dF / (4 * R * R), z]

    w0 = math.sqrt(init.chi)
    wp0 = init.chidot * w0 / 2
    y0 = np.array([w0, wp0, 0.0])
    accel = rhs(0.0, y0)[1]
    smax = tmax if tmax is not None else 200.0 * R * math.pi / math.sqrt(abs(e) + 1e-300)

    # half an oscillation of w maps (w, w') to (-w, -w'), i.e. the same (chi, chi')
    if abs(wp0) > 1e-12 * (abs(w0) + 1):
        def ev(s, y):
            return y[0] + w0

        ev.direction = -math.copysign(1.0, wp0)
    else:
        def ev(s, y):
            return y[1]

        ev.direction = -math.copysign(1.0, accel)
    sol = _solve(rhs, (0.0, smax), y0, events=[ev], dense=False)
    s_period = _first_event(sol.t_events[0], 1e-9 * smax)
    if s_period is None:
        raise PeriodNotFoundError(f"no radial period within s <= {smax:.6g}")
    sol = _solve(rhs, (0.0, s_period), y0)
    s_sol = sol.sol
    s = np.linspace(0.0, s_period, samples, endpoint=False)
    w, wp, t = sol.sol(s)
    period = float(sol.sol(s_period)[2])
    chi = w * w
    # chi' = 2 w'/w; keep the product form so the pole sample stays finite
    with np.errstate(divide="ignore", invalid="ignore"):
        chidot = np.where(w != 0, 2 * wp / np.where(w != 0, w, 1.0), np.inf)
    weights = chi * (s_period / samples)

    def state_at(tq):
        tq = np.atleast_1d(tq)
        sq = np.array([brentq(lambda x: sol.sol(x)[2] - tv, 0.0, s_period) if 0 < tv < period else (0.0 if tv <= 0 else s_period) for tv in tq])
        wq, wpq, _ = sol.sol(sq)
        return np.array([wq * wq, np.full_like(wq, init.theta), 2 * wpq / wq, np.zeros_like(wq)])

    return SphericalOrbit(
        params, pot, init, "radial-regularized", t, chi, np.full_like(chi, init.theta), chidot,
        np.zeros_like(chi), weights, period, period, state_at=state_at,
        regularized={"s": s, "w": w, "wp": wp, "energy": e, "sol": s_sol},
    )


# -- flat orbits --------------------------------------------------------------------


def integrate_flat(pot, r0, theta0, rdot0, thetadot0, samples=4096, tmax=None):
    """Integrate one radial period of ``H = p^2/2 + V`` in Cartesian form.

    Radial Coulomb orbits (``thetadot0 = 0``) use the closed-form
    Levi-Civita solution instead, since they pass through the singularity.
    """
    if thetadot0 == 0.0 and pot.singular_at_origin:
        return _flat_radial_coulomb(pot, r0, theta0, rdot0, samples)
    x0 = np.array([
        r0 * math.cos(theta0), r0 * math.sin(theta0),
        rdot0 * math.cos(theta0) - r0 * thetadot0 * math.sin(theta0),
        rdot0 * math.sin(theta0) + r0 * thetadot0 * math.cos(theta0),
    ])

    def rhs(t, y):
        x, yy, vx, vy = y
        r = math.hypot(x, yy)
        f = pot.derivative(r) / r
        return [vx, vy, -f * x, -f * yy]

    energy = 0.5 * (rdot0**2 + r0**2 * thetadot0**2) + pot.value(r0)
    angmom = r0 * r0 * thetadot0
    if tmax is None:
        if pot.kind == "oscillator":
            tmax = 40 * math.pi / math.sqrt(pot.strength)
        else:
            a = pot.strength / (2 * abs(energy)) if energy < 0 else 10 * r0
            tmax = 20 * math.pi * max(a, r0) ** 1.5 / math.sqrt(pot.strength)

    if thetadot0 == 0.0:
        # radial orbit: follow the signed coordinate along the ray, which passes the centre
        ct, st = math.cos(theta0), math.sin(theta0)

        def radius(y):
            return y[0] * ct + y[1] * st

        def radial_velocity(y):
            return y[2] * ct + y[3] * st
    else:
        def radius(y):
            return math.hypot(y[0], y[1])

        def radial_velocity(y):
            return (y[0] * y[2] + y[1] * y[3]) / radius(y)

    accel = -pot.derivative(r0) + r0 * thetadot0**2
    scale = abs(rdot0) + abs(r0 * thetadot0) + 1e-300
    if abs(rdot0) > 1e-9 * scale:
        def ev(t, y):
            return radius(y) - r0

        ev.direction = math.copysign(1.0, rdot0)
    else:
        def ev(t, y):
            return radial_velocity(y)

        ev.direction = math.copysign(1.0, accel)
    circular = abs(rdot0) <= 1e-12 * scale and abs(accel) <= 1e-10 * (abs(pot.derivative(r0)) + 1e-300)
    if circular:
        period = 2 * math.pi / abs(thetadot0)
    else:
        sol = _solve(rhs, (0.0, tmax), x0, events=[ev], dense=False)
        period = _first_event(sol.t_events[0], 1e-6 * tmax)
        if period is None:
            raise PeriodNotFoundError(f"no flat radial period within t <= {tmax:.6g}")
    closure = period * (1 if circular else pot.radial_periods_per_orbit)
    sol = _solve(rhs, (0.0, closure), x0)
    t = np.linspace(0.0, period, samples, endpoint=False)
    x, y, vx, vy = sol.sol(t)
    r = np.hypot(x, y)
    theta = np.unwrap(np.arctan2(y, x))
    rdot = (x * vx + y * vy) / r
    thetadot = (x * vy - y * vx) / r**2
    return FlatOrbit(pot, t, r, theta, rdot, thetadot, period, energy, angmom, state_at=sol.sol)


# -- checks ---------------------------------------------------------------------------


def orbit_equation_residual(orbit):
    """Max of ``|L^2 [r^-4 (dr/dtheta)^2 + r^-2]/2 + V(r) - (E - lam L^2/2)|``.

    Raises
    ------
    DomainError
        For radial orbits (``L = 0``), where ``dr/dtheta`` is undefined.
    """
    L = float(orbit.angmom[0])
    if L == 0.0 or orbit.mode.startswith("radial"):
        raise DomainError("the orbit equation needs L != 0; use the radial virial check")
    E = float(orbit.energy[0])
    lam = orbit.params.lam
    r = orbit.r
    drdtheta = orbit.rdot / orbit.thetadot
    lhs = 0.5 * L * L * (drdtheta**2 / r**4 + 1 / r**2) + orbit.potential.value(r)
    return float(np.max(np.abs(lhs - (E - 0.5 * lam * L * L))))


def _virial_integrands(orbit):
    R = orbit.radius
    lam = orbit.params.lam
    if orbit.mode == "radial-regularized":
        # integrands multiplied by chi = dt/ds stay finite through the collision:
        # T_r chi = 2 R^2 w'^2 and (f r V') chi = f (kappa chi cot chi / R + eps r chi)
        reg = orbit.regularized
        chi = orbit.chi
        r = R * np.tan(chi)
        f = 1 + lam * r * r
        tr_chi = 2 * R * R * reg["wp"] ** 2
        pot = orbit.potential
        rv_chi = f * (pot.strength * _z_cot(chi) / R + pot.epsilon * r * chi)
        total = np.sum(chi)
        avg = lambda g_chi: float(np.sum(g_chi) / total)  # noqa: E731
        return {
            "f_Tr": avg(f * tr_chi),
            "T_theta": 0.0,
            "f_rdV": avg(rv_chi),
            "f_2T_minus_lamL2": avg(2 * f * tr_chi),
        }
    r = orbit.r
    f = 1 + lam * r * r
    t_r = 0.5 * R * R * orbit.chidot**2
    t_theta = 0.5 * R * R * np.sin(orbit.chi) ** 2 * orbit.thetadot**2
    L = orbit.angmom
    return {
        "f_Tr": orbit.average(f * t_r),
        "T_theta": orbit.average(t_theta),
        "f_rdV": orbit.average(f * r * orbit.potential.derivative(r)),
        "f_2T_minus_lamL2": orbit.average(f * (2 * (t_r + t_theta) - lam * L * L)),
    }


def virial_time_averages(orbit):
    """Time averages over one period and the residuals of both virial forms.

    Returns
    -------
    dict
        ``f_Tr``, ``T_theta``, ``f_rdV``, ``f_2T_minus_lamL2`` (the averages of
        ``(1+lam r^2) T_r``, ``T_theta``, ``(1+lam r^2) r V'`` and
        ``(1+lam r^2)(2T - lam L^2)``), ``residual_split``
        (``2<f T_r> + 2<T_theta> - <f r V'>``), ``residual_pi``
        (``<f (2T - lam L^2)> - <f r V'>``) and ``period``.
    """
    avg = _virial_integrands(orbit)
    avg["residual_split"] = 2 * avg["f_Tr"] + 2 * avg["T_theta"] - avg["f_rdV"]
    avg["residual_pi"] = avg["f_2T_minus_lamL2"] - avg["f_rdV"]
    avg["period"] = orbit.period
    return avg


def flat_virial_time_averages(flat):
    """Flat virial theorem ``2<T> = <r V'>`` over one radial period of `flat`.

    Returns
    -------
    dict
        ``T``, ``rdV``, ``residual`` (``2<T> - <r V'>``) and ``period``.
    """
    if flat.regularized is not None:
        # uniform in s with dt = r ds: T r = 2 w'^2 and (r V') r = kappa r^0
        w, wp = flat.regularized["w"], flat.regularized["wp"]
        total = np.sum(w * w)
        t_avg = float(np.sum(2 * wp * wp) / total)
        rdv = float(flat.potential.strength * w.size / total)
        return {"T": t_avg, "rdV": rdv, "residual": 2 * t_avg - rdv, "period": flat.period}
    kin = 0.5 * (flat.rdot**2 + flat.r**2 * flat.thetadot**2)
    t_avg = float(np.mean(kin))
    rdv = float(np.mean(flat.r * flat.potential.derivative(flat.r)))
    return {"T": t_avg, "rdV": rdv, "residual": 2 * t_avg - rdv, "period": flat.period}


def virial_pointwise_gap(orbit):
    """Max over samples of ``|f (2T - lam L^2) - 2 f T_r - 2 T_theta|`` (identically zero)."""
    R = orbit.radius
    lam = orbit.params.lam
    r = orbit.r
    f = 1 + lam * r * r
    t_r = 0.5 * R * R * orbit.chidot**2
    t_theta = 0.5 * R * R * np.sin(orbit.chi) ** 2 * orbit.thetadot**2
    L = orbit.angmom
    gap = f * (2 * (t_r + t_theta) - lam * L * L) - 2 * f * t_r - 2 * t_theta
    finite = np.isfinite(gap)
    return float(np.max(np.abs(gap[finite]))) if finite.any() else 0.0


def _phase_point(y, R):
    chi, theta, chidot, thetadot = y
    return np.array([chi, math.remainder(theta, 2 * math.pi), R * chidot, R * math.sin(chi) * thetadot])


def closure_distance(orbit, periods=None):
    """Phase-space distance between the initial state and the state after the closure time.

    Uses ``(chi, theta mod 2 pi, R chi', R sin(chi) theta')`` and the max norm.
    `periods` overrides the number of radial periods (default: the Bertrand
    closure count of the potential).
    """
    if orbit.mode == "radial-regularized":
        y = orbit.state_at(orbit.period)[:, 0]
        y0 = orbit.initial.as_array()
        return float(np.max(np.abs(_phase_point(y, orbit.radius) - _phase_point(y0, orbit.radius))))
    n = orbit.potential.radial_periods_per_orbit if periods is None else periods
    t_close = orbit.closure_period if periods is None else n * orbit.period
    if t_close > orbit.closure_period * (1 + 1e-12):
        sol = _solve(_sphere_rhs(orbit.potential, orbit.radius), (0.0, t_close), orbit.initial.as_array())
        y = sol.sol(t_close)
    else:
        y = orbit.state_at(t_close)
    y0 = orbit.initial.as_array()
    return float(np.max(np.abs(_phase_point(y, orbit.radius) - _phase_point(y0, orbit.radius))))


def time_reversal_error(pot, init, params, duration):
    """Integrate forward for `duration`, then backward; return the max state error."""
    R = params.radius
    rhs = _sphere_rhs(pot, R)
    y0 = init.as_array()
    fwd = _solve(rhs, (0.0, duration), y0, dense=False)
    back = _solve(rhs, (duration, 0.0), fwd.y[:, -1], dense=False)
    return float(np.max(np.abs(back.y[:, -1] - y0)))


def flat_correspondence(orbit, samples=2048):
    """Compare a spherical orbit with the flat orbit of energy ``E_s - lam L_s^2/2``.

    The flat orbit starts from the same projected point with the same angular
    momentum; its radial speed is fixed by the shifted energy.

    Returns
    -------
    FlatOrbit, dict
        The report holds ``hausdorff`` (max distance between matched points,
        an upper bound on the Hausdorff distance of the two paths in the plane),
        ``velocity`` (max ``|v_s - (1 + lam r^2) v_p|``; relative to
        ``(1 + lam r^2) |v_p|`` for radial Coulomb orbits, whose speed diverges
        at the collision), ``period_ratio``
        (``tau_s/tau_p``), ``E_s``, ``E_p``, ``L``.
    """
    lam = orbit.params.lam
    pot = orbit.potential
    R = orbit.radius
    init = orbit.initial
    r0 = R * math.tan(init.chi)
    f0 = 1 + lam * r0 * r0
    e_s = float(orbit.energy[0])
    L = float(orbit.angmom[0])
    e_p = e_s - 0.5 * lam * L * L
    thetadot_p = L / (r0 * r0)
    rdot_s = R * init.chidot / math.cos(init.chi) ** 2
    speed2 = 2 * (e_p - pot.value(r0)) - L * L / (r0 * r0)
    rdot_p = math.copysign(math.sqrt(max(speed2, 0.0)), rdot_s) if rdot_s != 0 else 0.0
    if orbit.mode == "radial-regularized":
        flat = _flat_radial_coulomb(pot, r0, init.theta, rdot_p, samples)
    else:
        flat = integrate_flat(pot, r0, init.theta, rdot_p, thetadot_p, samples=samples)
    report = {"E_s": e_s, "E_p": e_p, "L": L, "period_ratio": float(orbit.period / flat.period)}

    if orbit.mode == "radial-regularized":
        # the speed diverges at the collision: compare it relatively
        dist, vel = _match_radial(orbit, flat, lam, relative=True)
    elif orbit.mode == "radial":
        dist, vel = _match_radial(orbit, flat, lam)
    else:
        dist, vel = _match_by_angle(orbit, flat, lam)
    report["hausdorff"] = dist
    report["velocity"] = vel
    return flat, report


def _match_by_angle(orbit, flat, lam):
    # theta is monotonic for L != 0: match points with equal azimuth
    sign = math.copysign(1.0, orbit.initial.thetadot)
    grid = np.linspace(0.0, flat.period, 4097)
    xy = flat.state_at(grid)
    th_grid = np.unwrap(np.arctan2(xy[1], xy[0]))
    span = abs(th_grid[-1] - th_grid[0])

    def flat_theta(t, ref):
        x, y = flat.state_at(t)[:2]
        return _unwrap_near(math.atan2(y, x), ref)

    dist = 0.0
    vel = 0.0
    for k in range(orbit.t.size):
        # bring the spherical azimuth into the flat orbit's unwrapped range
        target = orbit.theta[k]
        while sign * (target - th_grid[0]) < 0:
            target += sign * span
        while sign * (target - th_grid[-1]) > 0:
            target -= sign * span
        j = int(np.searchsorted(sign * th_grid, sign * target))
        j = min(max(j, 1), grid.size - 1)
        try:
            tm = brentq(lambda t: flat_theta(t, target) - target, grid[j - 1], grid[j], xtol=1e-15, rtol=1e-15)
        except ValueError:
            tm = grid[j] if abs(th_grid[j] - target) < abs(th_grid[j - 1] - target) else grid[j - 1]
        x, y, vx, vy = flat.state_at(tm)
        r_p = math.hypot(x, y)
        rdot_p = (x * vx + y * vy) / r_p
        thetadot_p = (x * vy - y * vx) / r_p**2
        r_s = orbit.r[k]
        dist = max(dist, abs(r_s - r_p))
        f = 1 + lam * r_s * r_s
        vel = max(vel, abs(orbit.rdot[k] - f * rdot_p), abs(r_s * orbit.thetadot[k] - f * r_p * thetadot_p))
    return dist, vel


def _unwrap_near(angle, ref):
    return ref + math.remainder(angle - ref, 2 * math.pi)


def _flat_radial_coulomb(pot, r0, theta0, rdot0, samples):
    # flat Levi-Civita: r = w^2, dt = r ds, 2 w'^2 = E w^2 + kappa, w'' = E w / 2
    e = 0.5 * rdot0**2 + pot.value(r0)
    if pot.epsilon:
        raise DomainError("regularised flat radial orbits support the pure Coulomb potential only")
    if not e < 0:
        raise DomainError("radial Coulomb orbit is unbound")
    w0 = math.sqrt(r0)
    wp0 = rdot0 * w0 / 2
    om = math.sqrt(-e / 2)
    # w(s) = A cos(om s + phase); the physical period is half the w period
    s_period = math.pi / om
    amp = math.hypot(w0, wp0 / om)
    phase = math.atan2(-wp0 / om, w0)
    s = np.linspace(0.0, s_period, samples, endpoint=False)
    w = amp * np.cos(om * s + phase)
    wp = -amp * om * np.sin(om * s + phase)

    def t_of(s_):
        # t = int w^2 ds
        a = om * s_ + phase
        return 0.5 * amp * amp * (s_ + (np.sin(2 * a) - math.sin(2 * phase)) / (2 * om))

    t = t_of(s)
    period = float(t_of(s_period))
    r = w * w
    with np.errstate(divide="ignore", invalid="ignore"):
        rdot = 2 * wp / w

    def state_at(tq):
        tq = np.atleast_1d(tq)
        sq = np.array([brentq(lambda x: t_of(x) - tv, 0.0, s_period) for tv in tq])
        wq = amp * np.cos(om * sq + phase)
        wpq = -amp * om * np.sin(om * sq + phase)
        return np.array([wq * wq, 2 * wpq / wq])

    return FlatOrbit(
        pot, t, r, np.full_like(r, theta0), rdot, np.zeros_like(r), period, e, 0.0, state_at=state_at,
        regularized={"s": s, "w": w, "wp": wp},
    )


def _refined_max(fun, grid, values):
    """Maximum of a smooth sampled function, polished on its dense output."""
    k = int(np.nanargmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda x: -fun(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14 * max(abs(hi), 1.0)})
    return max(float(-res.fun), float(values[k]))


def _turning_radius_sphere(orbit):
    R = orbit.radius
    if orbit.mode == "radial-regularized":
        reg = orbit.regularized
        chi_max = _refined_max(lambda x: reg["sol"](x)[0] ** 2, reg["s"], reg["w"] ** 2)
        return R * math.tan(chi_max)
    grid = np.linspace(0.0, orbit.period, 4 * orbit.t.size + 1)
    chi = np.abs(orbit.state_at(grid)[0])
    return R * math.tan(_refined_max(lambda x: abs(orbit.state_at(x)[0]), grid, chi))


def _turning_radius_flat(flat):
    if flat.angmom == 0.0 and flat.potential.kind != "oscillator":
        return _flat_coulomb_rmax(flat)
    grid = np.linspace(0.0, flat.period, 4 * flat.t.size + 1)
    xy = flat.state_at(grid)
    r = np.hypot(xy[0], xy[1])
    return _refined_max(lambda x: float(np.hypot(*flat.state_at(x)[:2])), grid, r)


def _flat_coulomb_rmax(flat):
    # bound radial Kepler motion turns where E = V(r)
    return -flat.potential.strength / flat.energy


def _match_radial(orbit, flat, lam, relative=False):
    # along a ray the paths coincide iff the turning radii agree; compare speeds at equal r
    r_s = orbit.r
    dist = abs(_turning_radius_sphere(orbit) - _turning_radius_flat(flat))
    rmax_p = float(np.nanmax(np.abs(flat.r)))
    vel = 0.0
    e_p = flat.energy
    for k in range(r_s.size):
        r = abs(r_s[k])
        if not (np.isfinite(orbit.rdot[k]) and 0 < r < rmax_p):
            continue
        vp = math.sqrt(max(2 * (e_p - orbit.potential.value(r)), 0.0))
        f = 1 + lam * r * r
        dev = abs(abs(orbit.rdot[k]) - f * vp)
        if relative:
            dev /= f * vp
        vel = max(vel, dev)
    return dist, vel
