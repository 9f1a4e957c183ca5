"""Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.

Lines are collected in ``conftest.ACCEPTANCE_LINES`` and repeated in the
terminal summary. Criteria 2, 4 and 6 compare against target expressions
that the independent oracles contradict; they are expected to stay red and
their lines carry the measured discrepancy.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conftest import record_acceptance
from spherevirial import classical as cl
from spherevirial.core import CurvedParams
from spherevirial.hvhf import (
    CoulombSpec,
    OscillatorSpec,
    coulomb_e1_legacy,
    oscillator_e2,
    perturbation_series,
    zeroth_energy_oscillator,
)
from spherevirial.hvhf.relations import oscillator_relation
from spherevirial.oracle import (
    GridSpec,
    SpectralOscillator,
    build_coulomb_radial,
    build_oscillator_1d,
    build_oscillator_radial,
    coulomb_sphere_energy,
    eigen_indices,
    extrapolate,
    hypervirial_residual_quantum,
    hypervirial_terms,
    richardson,
    virial_residual_quantum,
)

ALPHAS = (0.5, 1.0, 2.0)
LAMS = (0.05, 0.1, 0.3)
LEVELS = range(5)


def _grid_params():
    return [(a, lam, n) for a in ALPHAS for lam in LAMS for n in LEVELS]


def test_criterion_01_oscillator_spectrum():
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in ALPHAS:
        for lam in LAMS:
            spec = OscillatorSpec(alpha, 4, 1, CurvedParams(lam))
            coarse, fine = (eigen_indices(build_oscillator_1d(spec, 0.0, GridSpec(g)), LEVELS) for g in (1024, 2048))
            for n, (a, b) in enumerate(zip(coarse, fine)):
                exact = zeroth_energy_oscillator(OscillatorSpec(alpha, n, 1, CurvedParams(lam))).value
                worst = max(worst, abs(richardson(a.energy, b.energy, a.h, b.h) - exact))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 5
    record_acceptance(1, ok, f"1D spectrum, 45 levels, max |E_grid - E_n^(0)| = {worst:.2e} (tol 1e-6), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_criterion_02_coulomb_spectrum():
    t0 = time.perf_counter()
    worst_target = worst_sphere = 0.0
    for lam in (0.05, 0.1):
        for m in (1, 2):
            spec = CoulombSpec(1.0, 1, m, -3, CurvedParams(lam), variant="sphere")
            coarse, fine = (eigen_indices(build_coulomb_radial(spec, 0.0, GridSpec(g)), [0, 1]) for g in (2047, 4095))
            for n in (0, 1):
                e = richardson(coarse[n].energy, fine[n].energy, coarse[n].h, fine[n].h)
                nm = n + abs(m)
                target = -1 / (2 * (nm + 0.5) ** 2) + 0.5 * lam * nm * (nm + 0.5)
                worst_target = max(worst_target, abs(e - target))
                worst_sphere = max(worst_sphere, abs(e - coulomb_sphere_energy(1.0, m, lam, n)))
    elapsed = time.perf_counter() - t0
    ok = worst_target < 1e-5 and elapsed < 5
    record_acceptance(
        2, ok,
        f"2D Coulomb spectrum vs -k^2/(2N^2) + (lam/2)(N-1/2)N: max dev {worst_target:.2e} (tol 1e-5); "
        f"vs (lam/2)(N^2-1/4) - k^2/(2N^2): {worst_sphere:.2e}; {elapsed:.2f} s",
    )
    assert worst_sphere < 1e-5
    assert ok, "target spectrum contradicted by the oracle; see the second deviation"


def test_criterion_03_exact_zeros():
    worst = 0.0
    for alpha, lam, n in _grid_params():
        series, _ = perturbation_series(OscillatorSpec(alpha, n, 1, CurvedParams(lam)), 3)
        e0 = abs(series.coeffs[0])
        worst = max(worst, abs(series.coeffs[1]) / e0, abs(series.coeffs[3]) / e0)
    ok = worst < 1e-13
    record_acceptance(3, ok, f"E^(1), E^(3) for l=1: max |E^(j)|/|E^(0)| = {worst:.2e} (tol 1e-13)")
    assert ok


def test_criterion_04_second_order():
    worst_target = worst_exact = 0.0
    for alpha, lam, n in _grid_params():
        series, _ = perturbation_series(OscillatorSpec(alpha, n, 1, CurvedParams(lam)), 2)
        e2 = series.coeffs[2]
        worst_target = max(worst_target, abs(e2 / oscillator_e2(alpha, lam, n, "legacy") - 1))
        worst_exact = max(worst_exact, abs(e2 / oscillator_e2(alpha, lam, n, "exact") - 1))
    flat = max(
        abs(perturbation_series(OscillatorSpec(a, n, 1, CurvedParams(1e-8)), 2)[0].coeffs[2] + 1 / (2 * a))
        for a in ALPHAS for n in LEVELS
    )
    ok = worst_target < 1e-10 and flat < 1e-6
    record_acceptance(
        4, ok,
        f"E^(2) vs legacy closed form: max rel dev {worst_target:.2e} (tol 1e-10); flat limit dev {flat:.2e} "
        f"(tol 1e-6); vs corrected form (2n^2+2n+2): {worst_exact:.2e}",
    )
    assert flat < 1e-6 and worst_exact < 1e-10
    assert ok, "legacy E^(2) closed form disagrees with quadrature of the exact state for lam > 0"


def test_criterion_05_coulomb_first_order():
    worst = 0.0
    for n in (0, 1):
        for m in (1, 2):
            series, _ = perturbation_series(CoulombSpec(1.0, n, m, -3, CurvedParams(0.1)), 1)
            worst = max(worst, abs(series.coeffs[1] / coulomb_e1_legacy(1.0, 0.1, n, m) - 1))
    ok = worst < 1e-10
    record_acceptance(5, ok, f"Coulomb E^(1), l=-3: max rel dev {worst:.2e} (tol 1e-10)")
    assert ok


def _slope(J):
    betas = [1e-3, 3e-3, 1e-2]
    oracle = SpectralOscillator(1.0, 0.1, 1, basis=40, dps=40)
    with mpmath.workdps(40):
        series, _ = perturbation_series(OscillatorSpec(1.0, 0, 1, CurvedParams(0.1)), J, seed_value=mpmath.mpf(1))
        errs = []
        for b in betas:
            b = mpmath.mpf(b)
            errs.append(float(abs(oracle.energy(b) - sum(c * b**j for j, c in enumerate(series.coeffs)))))
    return float(np.polyfit(np.log(betas), np.log(errs), 1)[0])


def test_criterion_06_scaling():
    t0 = time.perf_counter()
    slopes = {J: _slope(J) for J in (2, 4)}
    elapsed = time.perf_counter() - t0
    ok = all(abs(slopes[J] - (J + 1)) <= 0.3 for J in slopes) and elapsed < 30
    parity_ok = all(abs(slopes[J] - (J + 2)) <= 0.3 for J in slopes)
    record_acceptance(
        6, ok,
        f"truncation slopes J=2: {slopes[2]:.3f}, J=4: {slopes[4]:.3f} (target J+1 +/- 0.3; "
        f"E^(J+1) = 0 by parity, first nonzero omitted order J+2 {'holds' if parity_ok else 'fails'}); {elapsed:.1f} s",
    )
    assert parity_ok
    assert ok, "odd orders vanish identically, so the error scales as beta^(J+2)"


def test_criterion_07_quantum_virial():
    spec = OscillatorSpec(1.0, 0, 1, CurvedParams(0.1))
    r1 = [virial_residual_quantum(eigen_indices(build_oscillator_1d(spec, 0.0, GridSpec(g)), [0])[0]) for g in (2048, 4096)]
    r2 = [
        virial_residual_quantum(eigen_indices(build_oscillator_radial(1.0, 1, CurvedParams(0.1), GridSpec(g)), [0])[0])
        for g in (2048, 4096)
    ]
    ok = all(abs(r[0]) < 1e-5 and abs(r[0] / r[1]) >= 3.5 for r in (r1, r2))
    record_acceptance(
        7, ok,
        f"virial residual 1D {r1[0]:.2e} (ratio {r1[0] / r1[1]:.2f}), 2D {r2[0]:.2e} "
        f"(ratio {r2[0] / r2[1]:.2f}); tol 1e-5 at 2048, ratio >= 3.5",
    )
    assert ok


def test_criterion_08_hypervirial():
    spec = OscillatorSpec(1.0, 0, 1, CurvedParams(0.1))
    st = eigen_indices(build_oscillator_1d(spec, 0.0, GridSpec(4096)), [0])[0]
    worst_1d = max(abs(hypervirial_residual_quantum(st, spec, k)) for k in range(1, 7))
    worst_2d = 0.0
    checked = []
    grids = (2047, 4095, 8191)
    # radial relations need k > 1 - 2|m| and finite moments
    for m, ks in ((1, range(0, 4)), (2, range(-1, 4))):
        states = [eigen_indices(build_oscillator_radial(1.0, m, CurvedParams(0.1), GridSpec(g)), [0])[0] for g in grids]
        for k in ks:
            r = [hypervirial_residual_quantum(s, None, k) for s in states]
            worst_2d = max(worst_2d, abs(extrapolate(r, [s.h for s in states])))
            checked.append(f"osc m={m} k={k}")
    for m, ks in ((1, (0,)), (2, (-1, 0))):
        cspec = CoulombSpec(1.0, 0, m, -3, CurvedParams(0.1), variant="sphere")
        states = [eigen_indices(build_coulomb_radial(cspec, 0.0, GridSpec(g)), [0])[0] for g in grids]
        for k in ks:
            r = [hypervirial_residual_quantum(s, cspec, k) for s in states]
            worst_2d = max(worst_2d, abs(extrapolate(r, [s.h for s in states])))
            checked.append(f"coulomb m={m} k={k}")
    ok = worst_1d < 1e-5 and worst_2d < 1e-5
    record_acceptance(
        8, ok,
        f"hypervirial 1D k=1..6 (grid 4096) max {worst_1d:.2e}; 2D {len(checked)} integrable (m, k) "
        f"pairs, grid-extrapolated max {worst_2d:.2e}; tol 1e-5",
    )
    assert ok


def _initial(pot, params, preset):
    R = params.radius
    chi0 = math.atan(1.0 / R)
    circ = cl.circular_state(pot, params, chi0)
    f0 = 1 + params.lam
    if preset == "circular":
        return circ
    if preset == "radial":
        return cl.SphericalState(chi0, 0.0, 0.2 / (R * f0), 0.0)
    return cl.SphericalState(chi0, 0.0, 0.1 / (R * f0), 0.8 * circ.thetadot)


@pytest.fixture(scope="module")
def classical_orbits():
    out = {}
    for lam in (0.05, 0.2):
        params = CurvedParams(lam)
        for pot in (cl.coulomb(1.0), cl.oscillator(1.0)):
            for preset in ("circular", "radial", "generic"):
                out[(lam, pot.kind, preset)] = cl.integrate_sphere(pot, _initial(pot, params, preset), params)
    return out


def test_criterion_09_classical_virial(classical_orbits):
    worst_vt = worst_eq = 0.0
    for (lam, kind, preset), orbit in classical_orbits.items():
        avg = cl.virial_time_averages(orbit)
        worst_vt = max(worst_vt, abs(avg["residual_split"]), abs(avg["residual_pi"]))
        if preset != "radial":
            worst_eq = max(worst_eq, cl.orbit_equation_residual(orbit))
    ok = worst_vt < 1e-6 and worst_eq < 1e-7
    record_acceptance(
        9, ok,
        f"classical virial, 12 orbits: max residual {worst_vt:.2e} (tol 1e-6); orbit equation {worst_eq:.2e} (tol 1e-7)",
    )
    assert ok


def test_criterion_10_correspondence(classical_orbits):
    worst_h = worst_v = 0.0
    worst_close = 0.0
    for orbit in classical_orbits.values():
        _, rep = cl.flat_correspondence(orbit)
        worst_h = max(worst_h, rep["hausdorff"])
        worst_v = max(worst_v, rep["velocity"])
        worst_close = max(worst_close, cl.closure_distance(orbit))
    params = CurvedParams(0.1)
    pot = cl.perturbed_coulomb(1.0, 0.05)
    control = cl.closure_distance(cl.integrate_sphere(pot, _initial(pot, params, "generic"), params))
    ok = worst_h < 1e-6 and worst_v < 1e-6 and worst_close < 1e-6 and control > 1e-3
    record_acceptance(
        10, ok,
        f"flat correspondence: Hausdorff {worst_h:.2e}, velocity {worst_v:.2e} (tol 1e-6); closure "
        f"{worst_close:.2e} (tol 1e-6); perturbed control return distance {control:.2e} (> 1e-3)",
    )
    assert ok


def _flat_recurrence(k, alpha, l):
    """Flat hypervirial theorem for alpha x^2/2 + beta x^l, keyed by (moment, order shift, energy)."""
    out = {
        (k + 1, 0, False): -(k + 1) * alpha,
        (k - 1, 0, True): Fraction(2 * k),
        (k - 3, 0, False): Fraction(k * (k - 1) * (k - 2), 4),
        (k + l - 1, 1, False): Fraction(-(2 * k + l)),
    }
    return {key: c for key, c in out.items() if c != 0}


def _collect(terms):
    out = {}
    for t in terms:
        key = (t.k, t.shift, t.energy)
        out[key] = out.get(key, 0) + (-t.coef if t.target else t.coef)
    return {key: c for key, c in out.items() if c != 0}


def test_criterion_11_flat_reduction():
    mismatches = []
    alpha, energy = Fraction(3, 7), Fraction(5, 11)
    for l in (1, 2, 3):
        for k in range(1, 7):
            engine = _collect(oscillator_relation(k, alpha, Fraction(0), l))
            # the target sits on the left; move it back to the sum-equals-zero form
            engine[(k + 1, 0, False)] = -engine.pop((k + 1, 0, False))
            if engine != _flat_recurrence(k, alpha, l):
                mismatches.append((l, k, "engine"))
            # oracle form: full potential alpha x^2/2 + beta x^l, energy folded in
            beta = Fraction(2, 13)
            potential = {2: alpha / 2}
            potential[l] = potential.get(l, 0) + beta
            oracle = hypervirial_terms(potential, k, Fraction(0), energy)
            expected = {}
            for (j, shift, is_energy), c in _flat_recurrence(k, alpha, l).items():
                expected[j] = expected.get(j, 0) + c * (energy if is_energy else beta if shift else 1)
            if oracle != {j: c for j, c in expected.items() if c != 0}:
                mismatches.append((l, k, "oracle"))
    ok = not mismatches
    record_acceptance(11, ok, f"flat-limit recurrence, k=1..6, l=1..3: {len(mismatches)} exact-rational mismatches")
    assert ok, mismatches
