"""Command-line front end: ``spherevirial {series,verify,classical}``.

Every run is described by a :class:`RunConfig`, read from a JSON file
(``--config``) and overridden by flags. The configuration is validated in full
before anything is computed. Each command writes

* ``<command>-report.json`` -- metadata, result blocks and a table of checks,
  every check carrying the tolerance it was tested against;
* ``<command>.csv`` -- the check table (plus command-specific CSV extracts);
* static SVG figures (``verify``, ``classical``).

Exit status: 0 all checks pass (expected failures excluded), 1 some check
failed, 2 invalid configuration, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import classical as cl
from .core import CurvedParams
from .errors import ConfigError, SpecError, SphereVirialError
from .hvhf import (
    CoulombSpec,
    OscillatorSpec,
    coulomb_e1_legacy,
    evaluate_series,
    oscillator_e2,
    perturbation_series,
    relation_residuals,
)
from .oracle import (
    GridSpec,
    build_coulomb_radial,
    build_oscillator_1d,
    build_oscillator_flat,
    coulomb_sphere_energy,
    eigen_indices,
    eigen_nearest,
    extrapolate,
    hypervirial_residual_quantum,
    richardson,
    virial_residual_quantum,
)

__all__ = ["RunConfig", "OrbitConfig", "cmd_series", "cmd_verify", "cmd_classical", "main"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
SYSTEMS = ("oscillator-1d", "coulomb-2d")
PRESETS = ("circular", "radial", "generic")

# tolerances of the report rows
TOL = {
    "exact_zero": 1e-13,
    "closed_form": 1e-10,
    "energy": 1e-6,
    "coulomb_energy": 1e-5,
    "virial": 1e-5,
    "virial_ratio": 3.5,
    "hypervirial": 1e-5,
    "slope": 0.3,
    "relation": 1e-9,
    "drift": 1e-9,
    "classical_virial": 1e-6,
    "pointwise": 1e-10,
    "orbit_equation": 1e-7,
    "closure": 1e-6,
    "correspondence": 1e-6,
}


# -- configuration ----------------------------------------------------------------------


@dataclass
class OrbitConfig:
    """One classical orbit: a preset or explicit ``(chi, theta, chidot, thetadot)``."""

    potential: str = "coulomb"
    strength: float = 1.0
    epsilon: float = 0.0
    preset: str | None = "generic"
    r0: float = 1.0
    state: list | None = None
    name: str | None = None


@dataclass
class RunConfig:
    system: str = "oscillator-1d"
    alpha: float = 1.0
    kappa: float = 1.0
    lam: float = 0.1
    n: int = 0
    m: int = 1
    l: int = 1
    order: int = 4
    variant: str = "sphere"
    beta: list = field(default_factory=lambda: [1e-3, 3e-3, 1e-2])
    grid: list = field(default_factory=lambda: [2048, 4096])
    k: list = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    orbits: list = field(default_factory=list)
    out: str = "spherevirial-out"

    @classmethod
    def from_mapping(cls, data):
        """Build and validate a config from a plain mapping (keys as in the JSON file).

        ``lambda`` is accepted as an alias of ``lam``.
        """
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        orbits = data.pop("orbits", [])
        try:
            cfg = cls(**data)
            cfg.orbits = [o if isinstance(o, OrbitConfig) else OrbitConfig(**o) for o in orbits]
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self):
        if self.system not in SYSTEMS:
            raise ConfigError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        for name in ("alpha", "kappa"):
            if not _is_real(getattr(self, name)) or not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be a positive number")
        if not _is_real(self.lam) or not self.lam >= 0:
            raise ConfigError("lambda must be a non-negative number")
        for name in ("n", "order"):
            if not _is_int(getattr(self, name)) or getattr(self, name) < (0 if name == "n" else 1):
                raise ConfigError(f"{name} must be an integer >= {0 if name == 'n' else 1}")
        if not _is_int(self.l) or not _is_int(self.m):
            raise ConfigError("l and m must be integers")
        if self.system == "oscillator-1d" and self.l < 1:
            raise ConfigError(f"oscillator-1d needs a positive perturbation exponent, got l={self.l}")
        if self.system == "coulomb-2d":
            if self.l > -1:
                raise ConfigError(f"coulomb-2d needs a negative perturbation exponent, got l={self.l}")
            if self.m == 0:
                raise ConfigError("coulomb-2d needs m != 0")
        if self.variant not in ("legacy", "sphere"):
            raise ConfigError("variant must be 'legacy' or 'sphere'")
        if not self.beta or not all(_is_real(b) and b > 0 for b in self.beta):
            raise ConfigError("beta must be a non-empty list of positive numbers")
        if not self.grid or not all(_is_int(g) and g >= 64 for g in self.grid):
            raise ConfigError("grid must be a non-empty list of integers >= 64")
        if not all(_is_int(k) for k in self.k):
            raise ConfigError("k must be a list of integers")
        for o in self.orbits:
            if o.potential not in ("coulomb", "oscillator", "perturbed-coulomb"):
                raise ConfigError(f"unknown orbit potential {o.potential!r}")
            if not (_is_real(o.strength) and o.strength > 0 and _is_real(o.epsilon)):
                raise ConfigError("orbit strength must be positive and epsilon a number")
            if o.state is None and o.preset not in PRESETS:
                raise ConfigError(f"orbit needs a preset in {PRESETS} or an explicit state")
            if o.state is not None and (len(o.state) != 4 or not all(_is_real(v) for v in o.state)):
                raise ConfigError("orbit state must be [chi, theta, chidot, thetadot]")
            if not (_is_real(o.r0) and o.r0 > 0):
                raise ConfigError("orbit r0 must be positive")
        return self

    def to_json(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def _is_real(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


# -- report rows ----------------------------------------------------------------------------


class Report:
    """Ordered check table plus free-form result blocks."""

    def __init__(self, command, config):
        self.command = command
        self.config = config
        self.rows = []
        self.blocks = {}

    def check(self, name, value, tol, *, kind="abs", expected_fail=False, detail=None):
        """Record a check. ``kind`` is ``"abs"`` (``|value| <= tol``),
        ``"min"`` (``value >= tol``) or ``"range"`` (``tol = (target, width)``)."""
        value = None if value is None else float(value)
        if value is None or not math.isfinite(value):
            ok = False
        elif kind == "abs":
            ok = abs(value) <= tol
        elif kind == "min":
            ok = value >= tol
        elif kind == "range":
            ok = abs(value - tol[0]) <= tol[1]
        else:
            raise ValueError(kind)
        status = "pass" if ok else ("expected-fail" if expected_fail else "fail")
        row = {"check": name, "value": value, "tolerance": tol if kind != "range" else list(tol),
               "criterion": kind, "status": status}
        if detail is not None:
            row["detail"] = detail
        self.rows.append(row)
        return ok

    def error(self, name, exc):
        self.rows.append({
            "check": name, "value": None, "tolerance": None, "criterion": "error", "status": "error",
            "detail": {"type": type(exc).__name__, "message": str(exc)},
        })

    @property
    def exit_code(self):
        statuses = {r["status"] for r in self.rows}
        if "error" in statuses:
            return EXIT_NUMERICAL
        if "fail" in statuses:
            return EXIT_FAIL
        return EXIT_PASS

    def document(self, timestamp=None):
        ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        return {
            "tool": "spherevirial",
            "version": __version__,
            "command": self.command,
            "timestamp": ts,
            "config": self.config.to_json(),
            "results": self.blocks,
            "checks": self.rows,
            "summary": {
                "status": {0: "pass", 1: "fail", 3: "numerical-error"}[self.exit_code],
                "exit_code": self.exit_code,
                "counts": {s: sum(r["status"] == s for r in self.rows)
                           for s in ("pass", "fail", "expected-fail", "error")},
            },
        }

    def write(self, out, timestamp=None):
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        doc = self.document(timestamp)
        path = out / f"{self.command}-report.json"
        path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
        _write_csv(out / f"{self.command}.csv", ["check", "value", "tolerance", "criterion", "status"],
                   [[r["check"], r["value"], r["tolerance"], r["criterion"], r["status"]] for r in self.rows])
        return path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if hasattr(x, "__float__") and not isinstance(x, (int, float, bool)):
        return float(x)
    return x


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "spherevirial"
    fig, ax = plt.subplots(figsize=(5, 4))
    return fig, ax, plt


def _save_svg(fig, plt, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- series ------------------------------------------------------------------------------


def _spec(cfg, lam=None, variant=None):
    params = CurvedParams(cfg.lam if lam is None else lam)
    if cfg.system == "oscillator-1d":
        return OscillatorSpec(cfg.alpha, cfg.n, cfg.l, params)
    return CoulombSpec(cfg.kappa, cfg.n, cfg.m, cfg.l, params, variant=variant or cfg.variant)


def cmd_series(cfg):
    """Energy coefficients, the moment table and closed-form comparisons."""
    rep = Report("series", cfg)
    spec = _spec(cfg)
    series, table = perturbation_series(spec, cfg.order)
    coeffs = [float(c) for c in series.coeffs]
    e0 = abs(coeffs[0]) or 1.0
    rep.blocks["series"] = [
        {"j": j, "value": c, "exact_zero": c == 0.0} for j, c in enumerate(coeffs)
    ]
    rep.blocks["moments"] = [
        {"gamma": g, "k": k, "value": v, "source": table.provenance[(g, k)]}
        for (g, k), v in table.values().items()
    ]
    worst = max((r["relative"] for r in relation_residuals(series, table)), default=0.0)
    rep.check("relation residual (relative, all carried orders)", worst, TOL["relation"])

    if cfg.system == "oscillator-1d" and cfg.l == 1:
        for j in range(1, cfg.order + 1, 2):
            rep.check(f"E^({j}) vanishes", coeffs[j] / e0, TOL["exact_zero"])
        if cfg.order >= 2:
            ref = oscillator_e2(cfg.alpha, cfg.lam, cfg.n)
            rep.check("E^(2) vs closed form", (coeffs[2] - ref) / abs(ref), TOL["closed_form"],
                      detail={"closed_form": ref})
            legacy = oscillator_e2(cfg.alpha, cfg.lam, cfg.n, form="legacy")
            rep.check("E^(2) vs legacy closed form", (coeffs[2] - legacy) / abs(legacy),
                      TOL["closed_form"], expected_fail=True, detail={"closed_form": legacy})
    if cfg.system == "coulomb-2d" and cfg.l == -3 and cfg.variant == "legacy":
        ref = coulomb_e1_legacy(cfg.kappa, cfg.lam, cfg.n, cfg.m)
        rep.check("E^(1) vs legacy closed form", (coeffs[1] - ref) / abs(ref), TOL["closed_form"],
                  detail={"closed_form": ref})
    return rep


# -- verify ------------------------------------------------------------------------------


def _unperturbed_exact(cfg):
    if cfg.system == "oscillator-1d":
        lam = cfg.lam
        return (cfg.n + 0.5) * (lam + math.sqrt(lam * lam + 4 * cfg.alpha)) / 2 + cfg.n**2 * lam / 2
    return coulomb_sphere_energy(cfg.kappa, cfg.m, cfg.lam, cfg.n)


def _build(cfg, npoints, beta=0.0):
    grid = GridSpec(int(npoints))
    if cfg.system == "oscillator-1d":
        if cfg.lam == 0:
            return build_oscillator_flat(cfg.alpha, grid, beta=beta, l=cfg.l, n=cfg.n)
        return build_oscillator_1d(_spec(cfg), beta, grid)
    return build_coulomb_radial(_spec(cfg, variant="sphere"), beta, grid, domain="sphere")


def _state(cfg, npoints, beta=0.0, target=None):
    ham = _build(cfg, npoints, beta)
    if target is not None:
        return eigen_nearest(ham, target)
    return eigen_indices(ham, [cfg.n])[0]


def cmd_verify(cfg):
    """Oracle energies, virial and hypervirial residuals, and the beta-scaling fit."""
    if cfg.system == "coulomb-2d" and cfg.lam == 0:
        raise ConfigError("coulomb-2d verification needs lambda > 0 (the oracle lives on the sphere)")
    rep = Report("verify", cfg)
    grids = sorted(cfg.grid)
    exact = _unperturbed_exact(cfg)
    states = {}
    energies = []
    for npts in grids:
        try:
            st = _state(cfg, npts)
            states[npts] = st
            energies.append({"grid": npts, "energy": st.energy})
        except SphereVirialError as exc:
            rep.error(f"eigenstate on grid {npts}", exc)
    rep.blocks["energies"] = {"closed_form": exact, "grids": energies}
    ok_grids = [g for g in grids if g in states]
    if ok_grids:
        if len(ok_grids) >= 2:
            g0, g1 = ok_grids[-2:]
            best = richardson(states[g0].energy, states[g1].energy, states[g0].h, states[g1].h)
        else:
            best = states[ok_grids[-1]].energy
        rep.blocks["energies"]["extrapolated"] = best
        tol = TOL["energy"] if cfg.system == "oscillator-1d" else TOL["coulomb_energy"]
        rep.check("E^(0) oracle vs closed form", best - exact, tol)

    _verify_virial(cfg, rep, states, ok_grids)
    _verify_hypervirial(cfg, rep, states, ok_grids)
    _verify_scaling(cfg, rep)
    return rep


def _verify_virial(cfg, rep, states, grids):
    if cfg.system == "coulomb-2d":
        rep.blocks["virial"] = {
            "skipped": "<(1 + lam r^2) r^-1> diverges at the equator for Coulomb states on the sphere"
        }
        return
    res = {}
    for g in grids:
        try:
            res[g] = virial_residual_quantum(states[g])
            rep.check(f"virial residual (grid {g})", res[g], TOL["virial"])
        except SphereVirialError as exc:
            rep.error(f"virial residual (grid {g})", exc)
    rep.blocks["virial"] = {"residuals": [{"grid": g, "residual": r} for g, r in res.items()]}
    pairs = [(a, b) for a, b in zip(grids, grids[1:]) if a in res and b in res and b == 2 * a]
    for a, b in pairs:
        ratio = abs(res[a]) / abs(res[b]) if res[b] else math.inf
        rep.check(f"virial convergence ratio {a}->{b}", ratio, TOL["virial_ratio"], kind="min")


def _verify_hypervirial(cfg, rep, states, grids):
    rows = []
    if not grids or not cfg.k:
        rep.blocks["hypervirial"] = rows
        return
    g = grids[-1]
    for k in cfg.k:
        try:
            r = hypervirial_residual_quantum(states[g], None, k)
        except SphereVirialError as exc:
            rows.append({"k": k, "skipped": str(exc)})
            continue
        rows.append({"k": k, "grid": g, "residual": r})
        rep.check(f"hypervirial residual k={k} (grid {g})", r, TOL["hypervirial"])
    rep.blocks["hypervirial"] = rows


def _leading_omitted(coeffs, J, scale):
    for j in range(J + 1, len(coeffs)):
        if abs(coeffs[j]) > 1e-13 * scale:
            return j
    return None


def _verify_scaling(cfg, rep):
    """Fit ``log |E(beta) - sum_{j<=J} beta^j E^(j)|`` against ``log beta``.

    The expected slope is the first omitted order whose coefficient does not
    vanish, which is ``J + 1`` unless parity removes that order.
    """
    J = cfg.order
    betas = sorted(float(b) for b in cfg.beta)
    if len(betas) < 2:
        rep.blocks["scaling"] = {"skipped": "needs at least two beta values"}
        return
    try:
        if cfg.system == "oscillator-1d":
            if cfg.lam == 0:
                rep.blocks["scaling"] = {"skipped": "the spectral oracle needs lambda > 0"}
                return
            import mpmath

            from .oracle import SpectralOscillator

            with mpmath.workdps(40):
                lam = mpmath.mpf(repr(float(cfg.lam)))
                alpha = mpmath.mpf(repr(float(cfg.alpha)))
                spec = OscillatorSpec(cfg.alpha, cfg.n, cfg.l, CurvedParams(lam))
                series, _ = perturbation_series(spec, J + 4, seed_value=alpha)
                coeffs = list(series.coeffs)
                oracle = SpectralOscillator(alpha, lam, cfg.l, basis=40, dps=40)
                e_or = [oracle.energy(mpmath.mpf(repr(b)), cfg.n) for b in betas]
                e_se = [evaluate_series(coeffs[: J + 1], mpmath.mpf(repr(b))) for b in betas]
                diffs = [abs(a - b) for a, b in zip(e_or, e_se)]
                scale = abs(coeffs[0])
        else:
            spec = _spec(cfg, variant="sphere")
            series, _ = perturbation_series(spec, J)
            coeffs = list(series.coeffs)
            e_or, diffs = [], []
            grids = sorted(cfg.grid)[-3:]
            e_se = [evaluate_series(coeffs, b) for b in betas]
            for b, es in zip(betas, e_se):
                vals = [_state(cfg, g, beta=b, target=es).energy for g in grids]
                steps = [math.pi / math.sqrt(cfg.lam) / (g + 1) for g in grids]
                e = extrapolate(vals, steps, orders=(2,) if len(grids) == 2 else (2, 4)[: len(grids) - 1])
                e_or.append(e)
                diffs.append(abs(e - es))
            scale = abs(coeffs[0])
    except SphereVirialError as exc:
        rep.error(f"beta scaling J={J}", exc)
        return
    x = np.log([float(b) for b in betas])
    y = np.log([float(d) for d in diffs])
    slope = float(np.polyfit(x, y, 1)[0])
    expected = _leading_omitted(coeffs, J, scale) if cfg.system == "oscillator-1d" else J + 1
    rows = [[b, float(o), float(s), float(d)] for b, o, s, d in zip(betas, e_or, e_se, diffs)]
    rep.blocks["scaling"] = {
        "order": J, "slope": slope, "expected_slope": expected, "naive_expected": J + 1,
        "rows": [dict(zip(("beta", "E_oracle", "E_series", "abs_diff"), r)) for r in rows],
    }
    if expected is None:
        rep.blocks["scaling"]["skipped"] = "no nonzero omitted order found"
    else:
        rep.check(f"beta-scaling slope J={J}", slope, (float(expected), TOL["slope"]), kind="range",
                  detail={"naive_expected": J + 1})
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "beta_scaling.csv", ["beta", "E_oracle", "E_series", "abs_diff"], rows)
    fig, ax, plt = _figure()
    ax.loglog(betas, [float(d) for d in diffs], "o-", label=f"truncated at J={J}")
    ref = [float(diffs[0]) * (b / betas[0]) ** (expected or J + 1) for b in betas]
    ax.loglog(betas, ref, "--", label=f"slope {expected or J + 1}")
    ax.set_xlabel("beta")
    ax.set_ylabel("|E_oracle - E_series|")
    ax.legend()
    _save_svg(fig, plt, out / "convergence.svg")


# -- classical ------------------------------------------------------------------------------


def _potential(o):
    if o.potential == "coulomb":
        return cl.coulomb(o.strength)
    if o.potential == "oscillator":
        return cl.oscillator(o.strength)
    return cl.perturbed_coulomb(o.strength, o.epsilon)


def _initial_state(o, pot, params):
    if o.state is not None:
        return cl.SphericalState(*map(float, o.state))
    R = params.radius
    chi0 = math.atan(o.r0 / R)
    circ = cl.circular_state(pot, params, chi0)
    f0 = 1 + params.lam * o.r0**2
    if o.preset == "circular":
        return circ
    if o.preset == "radial":
        # outward radial speed 0.2 in the projected coordinate: chi' = r'/(R sec^2 chi)
        return cl.SphericalState(chi0, 0.0, 0.2 / (R * f0), 0.0)
    return cl.SphericalState(chi0, 0.0, 0.1 / (R * f0), 0.8 * circ.thetadot)


def _default_orbits():
    return [OrbitConfig(potential=p, preset=s) for p in ("coulomb", "oscillator") for s in PRESETS] + [
        OrbitConfig(potential="perturbed-coulomb", epsilon=0.05, preset="generic", name="negative-control")
    ]


def cmd_classical(cfg):
    """Integrate the configured orbits and check the classical identities."""
    rep = Report("classical", cfg)
    orbits = cfg.orbits or _default_orbits()
    blocks = []
    paths = []
    for i, o in enumerate(orbits):
        name = o.name or f"{o.potential}-{o.preset or 'custom'}-{i}"
        pot = _potential(o)
        try:
            if cfg.lam == 0:
                blocks.append(_classical_flat(rep, name, o, pot))
                continue
            params = CurvedParams(cfg.lam)
            init = _initial_state(o, pot, params)
            orbit = cl.integrate_sphere(pot, init, params)
        except SphereVirialError as exc:
            rep.error(f"{name}: integration", exc)
            continue
        blocks.append(_classical_rows(rep, name, orbit))
        paths.append((name, orbit.r * np.cos(orbit.theta), orbit.r * np.sin(orbit.theta)))
    rep.blocks["orbits"] = blocks
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if paths:
        fig, ax, plt = _figure()
        for name, x, y in paths:
            ax.plot(np.append(x, x[:1]), np.append(y, y[:1]), lw=1, label=name)
        ax.set_aspect("equal")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.legend(fontsize=6)
        _save_svg(fig, plt, out / "orbits.svg")
    return rep


def _classical_flat(rep, name, o, pot):
    r0 = o.r0
    if o.state is not None:
        raise ConfigError("explicit sphere states need lambda > 0")
    vc = math.sqrt(r0 * pot.derivative(r0))
    rdot, thetadot = {"circular": (0.0, vc / r0), "radial": (0.2, 0.0), "generic": (0.1, 0.8 * vc / r0)}[o.preset]
    flat = cl.integrate_flat(pot, r0, 0.0, rdot, thetadot)
    v = cl.flat_virial_time_averages(flat)
    rep.check(f"{name}: flat virial residual", v["residual"], TOL["classical_virial"])
    return {"name": name, "flat": True, "period": flat.period, "virial": v}


def _classical_rows(rep, name, orbit):
    pot = orbit.potential
    e0 = abs(float(orbit.energy[0])) or 1.0
    block = {"name": name, "mode": orbit.mode, "period": orbit.period, "potential": asdict(pot)}
    rep.check(f"{name}: relative energy drift", orbit.energy_drift() / e0, TOL["drift"])
    L = orbit.angmom
    if orbit.mode.startswith("radial"):
        rep.check(f"{name}: angular momentum", float(np.max(np.abs(L))), 0.0)
    else:
        rep.check(f"{name}: relative angular momentum drift", orbit.angmom_drift() / abs(L[0]), TOL["drift"])
    v = cl.virial_time_averages(orbit)
    block["virial"] = v
    rep.check(f"{name}: virial residual (split form)", v["residual_split"], TOL["classical_virial"])
    rep.check(f"{name}: virial residual (pi form)", v["residual_pi"], TOL["classical_virial"])
    rep.check(f"{name}: pointwise agreement of the two forms", cl.virial_pointwise_gap(orbit), TOL["pointwise"])
    if not orbit.mode.startswith("radial"):
        res = cl.orbit_equation_residual(orbit)
        block["orbit_equation_residual"] = res
        rep.check(f"{name}: orbit equation residual", res, TOL["orbit_equation"])
    bertrand = pot.kind != "perturbed-coulomb"
    dist = cl.closure_distance(orbit)
    block["closure_distance"] = dist
    rep.check(f"{name}: closure after {pot.radial_periods_per_orbit} radial period(s)", dist,
              TOL["closure"], expected_fail=not bertrand)
    if bertrand:
        try:
            _, corr = cl.flat_correspondence(orbit)
        except SphereVirialError as exc:
            rep.error(f"{name}: flat correspondence", exc)
        else:
            block["correspondence"] = corr
            rep.check(f"{name}: path distance to flat orbit", corr["hausdorff"], TOL["correspondence"])
            rep.check(f"{name}: velocity relation", corr["velocity"], TOL["correspondence"])
    return block


# -- entry point ---------------------------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="spherevirial", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("series", "perturbation coefficients from the hypervirial/Hellmann-Feynman recursion"),
        ("verify", "grid-oracle energies, virial and hypervirial residuals, beta scaling"),
        ("classical", "orbit integration, classical virial theorem and flat correspondence"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="JSON file with RunConfig keys")
        s.add_argument("--system", choices=SYSTEMS)
        s.add_argument("--alpha", type=float)
        s.add_argument("--kappa", type=float)
        s.add_argument("--lambda", dest="lam", type=float)
        s.add_argument("--n", type=int)
        s.add_argument("--m", type=int)
        s.add_argument("--l", type=int)
        s.add_argument("--order", type=int)
        s.add_argument("--variant", choices=("legacy", "sphere"))
        s.add_argument("--beta", type=float, action="append")
        s.add_argument("--grid", type=int, action="append")
        s.add_argument("--k", type=int, action="append", help="hypervirial index (repeatable)")
        s.add_argument("--no-k", action="store_true", help="skip the hypervirial checks")
        s.add_argument("--out", help="output directory")
        s.add_argument("--timestamp", help=argparse.SUPPRESS)
    return p


def load_config(args):
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("system", "alpha", "kappa", "lam", "n", "m", "l", "order", "variant", "beta", "grid", "k", "out"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.no_k:
        data["k"] = []
    return RunConfig.from_mapping(data)


COMMANDS = {"series": cmd_series, "verify": cmd_verify, "classical": cmd_classical}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, SpecError) as exc:
        _emit_error("rejected-config", exc)
        return EXIT_CONFIG
    try:
        rep = COMMANDS[args.command](cfg)
    except (ConfigError, SpecError) as exc:
        _emit_error("rejected-config", exc)
        return EXIT_CONFIG
    except (SphereVirialError, ArithmeticError) as exc:
        _emit_error("numerical-error", exc)
        return EXIT_NUMERICAL
    path = rep.write(cfg.out, timestamp=args.timestamp)
    summary = rep.document(args.timestamp)["summary"]
    print(json.dumps({"report": str(path), **summary}, sort_keys=True))
    return rep.exit_code


def _emit_error(status, exc):
    print(json.dumps({"status": status, "error": {"type": type(exc).__name__, "message": str(exc)}},
                     sort_keys=True))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
