import math

import numpy as np
import pytest

from spherevirial.core import CurvedParams
from spherevirial.errors import DivergentMomentError, DomainError, GridResolutionError, SpecError
from spherevirial.hvhf import CoulombSpec, OscillatorSpec, perturbation_series, zeroth_energy_oscillator
from spherevirial.oracle import (
    GridSpec,
    build_coulomb_radial,
    build_oscillator_1d,
    build_oscillator_flat,
    build_oscillator_radial,
    coulomb_sphere_energy,
    eigen_indices,
    eigen_lowest,
    eigen_nearest,
    extrapolate,
    hypervirial_residual_quantum,
    hypervirial_terms,
    moment_expectation,
    radial_oscillator_energy,
    residual_tolerance,
    richardson,
    sturm_count,
    untransformed_energy,
    virial_residual_quantum,
)

LAM = CurvedParams(0.1)


def osc(alpha=1.0, n=0, l=1, lam=LAM):
    return OscillatorSpec(alpha, n, l, lam)


def ground(spec, npoints, beta=0.0, index=None):
    ham = build_oscillator_1d(spec, beta, GridSpec(npoints))
    return eigen_indices(ham, [spec.n if index is None else index])[0]


@pytest.fixture(scope="module")
def osc_states():
    spec = osc()
    return spec, {n: ground(spec, n) for n in (1024, 2048, 4096)}


@pytest.fixture(scope="module")
def coulomb_states():
    spec = CoulombSpec(1.0, 0, 1, -3, LAM, variant="sphere")
    return spec, [eigen_indices(build_coulomb_radial(spec, 0.0, GridSpec(n)), [0])[0] for n in (2047, 4095, 8191)]


def test_grid_validation():
    with pytest.raises(GridResolutionError):
        GridSpec(10)
    with pytest.raises(GridResolutionError):
        build_oscillator_1d(osc(n=4), 0.0, GridSpec(64))
    with pytest.raises(DomainError):
        build_oscillator_1d(osc(lam=CurvedParams(0.0)), 0.0, GridSpec(256))
    with pytest.raises(SpecError):
        build_coulomb_radial(CoulombSpec(1.0, 0, 1, -3, LAM), 0.0, GridSpec(256), domain="disc")
    with pytest.raises(DomainError):
        build_coulomb_radial(CoulombSpec(1.0, 0, 1, -1, LAM), 0.1, GridSpec(256))


def test_oscillator_energy_richardson(osc_states):
    spec, st = osc_states
    e = richardson(st[1024].energy, st[2048].energy, st[1024].h, st[2048].h)
    assert e == pytest.approx(0.525625, abs=1e-6)
    assert abs(e - zeroth_energy_oscillator(spec).value) < 1e-8


def test_nearly_flat_proxy():
    # lam = 1e-6: restrict the grid to where the state lives
    spec = osc(lam=CurvedParams(1e-6))
    grid = lambda n: GridSpec(n, umin=-12.0, umax=12.0)  # noqa: E731
    a, b = (eigen_lowest(build_oscillator_1d(spec, 0.0, grid(n)))[0] for n in (1024, 2048))
    assert richardson(a.energy, b.energy, a.h, b.h) == pytest.approx(0.5, abs=1e-5)


def test_flat_builder_matches_harmonic_levels():
    coarse, fine = (eigen_lowest(build_oscillator_flat(2.0, GridSpec(g), n=3), 4) for g in (2048, 4096))
    for n, (a, b) in enumerate(zip(coarse, fine)):
        assert richardson(a.energy, b.energy, a.h, b.h) == pytest.approx((n + 0.5) * math.sqrt(2.0), abs=1e-8)


def test_coulomb_sphere_levels(coulomb_states):
    spec, states = coulomb_states
    a, b = states[-2:]
    e = richardson(a.energy, b.energy, a.h, b.h)
    # the centrifugal r^-2 term leaves a non-polynomial error near the origin
    assert e == pytest.approx(coulomb_sphere_energy(1.0, 1, 0.1, 0), abs=1e-7)
    assert coulomb_sphere_energy(1.0, 1, 0.1, 0) == pytest.approx(-0.1222222222, abs=1e-10)


def test_coulomb_nearly_flat_proxy():
    spec = CoulombSpec(1.0, 0, 1, -3, CurvedParams(1e-6), variant="sphere")
    grid = lambda n: GridSpec(n, umax=60.0)  # noqa: E731
    a, b = (eigen_lowest(build_coulomb_radial(spec, 0.0, grid(n)))[0] for n in (2048, 4096))
    assert richardson(a.energy, b.energy, a.h, b.h) == pytest.approx(-2 / 9, abs=1e-4)


def test_eigenpair_quality(osc_states):
    _, st = osc_states
    s = st[2048]
    ham = s.hamiltonian
    v = s.phi * math.sqrt(s.h)
    assert np.linalg.norm(ham.matvec(v) - s.energy * v) <= residual_tolerance(ham)
    assert s.h * np.sum(s.phi**2) == pytest.approx(1.0, rel=1e-12)
    assert sturm_count(ham.diag, ham.offdiag, s.energy + 1e-9) == 1


def test_moments(osc_states):
    _, st = osc_states
    s = st[2048]
    assert moment_expectation(s, 0) == pytest.approx(1.0, abs=1e-12)
    assert moment_expectation(s, 0, weighted=True) == pytest.approx(1.049938, abs=1e-5)
    for k in (1, 3, 5):
        assert abs(moment_expectation(s, k)) < 1e-10
    with pytest.raises(DivergentMomentError):
        moment_expectation(s, -1)


def test_moment_edge_divergence():
    # nu = 1/2 + sqrt(1/4 + alpha/lam^2) is small for a soft oscillator on a tight sphere
    spec = OscillatorSpec(0.5, 0, 1, CurvedParams(1.0))
    s = ground(spec, 512)
    moment_expectation(s, 0, weighted=True)
    with pytest.raises(DivergentMomentError):
        moment_expectation(s, 2, weighted=True)


def test_perturbed_ground_state_energy():
    spec = osc()
    beta = 0.01
    series, _ = perturbation_series(spec, 4)
    target = zeroth_energy_oscillator(spec).value
    a, b = (eigen_nearest(build_oscillator_1d(spec, beta, GridSpec(n)), target) for n in (2048, 4096))
    e = richardson(a.energy, b.energy, a.h, b.h)
    # truncation error of the series is ~ beta^6 |E^(6)|
    assert e == pytest.approx(sum(c * beta**j for j, c in enumerate(series.coeffs)), abs=1e-8)


def test_virial_order_two(osc_states):
    _, st = osc_states
    r1, r2 = virial_residual_quantum(st[2048]), virial_residual_quantum(st[4096])
    assert abs(r1) < 1e-5
    assert math.log2(abs(r1 / r2)) == pytest.approx(2.0, abs=0.2)


def test_virial_excited_state_converges():
    spec = osc(n=2)
    r = [virial_residual_quantum(ground(spec, n)) for n in (1024, 2048, 4096)]
    assert math.log2(abs(r[1] / r[2])) == pytest.approx(2.0, abs=0.2)
    assert abs(extrapolate(r, [1, 0.5, 0.25], orders=(2, 4))) < 1e-8


def test_radial_oscillator_virial():
    params = CurvedParams(0.1)
    st = [eigen_indices(build_oscillator_radial(1.0, 1, params, GridSpec(n)), [0])[0] for n in (2047, 4095, 8191)]
    assert extrapolate([s.energy for s in st], [s.h for s in st]) == pytest.approx(
        radial_oscillator_energy(1.0, 1, 0.1, 0), abs=1e-7
    )
    st = st[:2]
    r = [virial_residual_quantum(s) for s in st]
    assert abs(r[0]) < 1e-5
    assert abs(r[0] / r[1]) > 3.5


@pytest.mark.parametrize("k", range(1, 7))
def test_hypervirial_1d(osc_states, k):
    spec, st = osc_states
    assert abs(hypervirial_residual_quantum(st[4096], spec, k)) < 1e-5


def test_hypervirial_terms_flat_form():
    terms = hypervirial_terms({2: 0.5}, 3, 0.0, 1.5)
    # 2kE Q^2 - (2k+2) c Q^4 + k(k-1)(k-2)/4 Q^0
    assert terms == {0: 1.5, 2: 9.0, 4: -4.0}


def test_coulomb_low_relation(coulomb_states):
    # index-0 relation: (4m^2 - 1) Q^-3 = 4 kappa Q^-2
    _, states = coulomb_states
    d = [moment_expectation(s, -3, True) - 4 * moment_expectation(s, -2, True) / 3 for s in states]
    assert abs(extrapolate(d, [s.h for s in states])) < 1e-7


def test_coulomb_first_order_moment(coulomb_states):
    spec, states = coulomb_states
    q = extrapolate([moment_expectation(s, -3, True) for s in states], [s.h for s in states])
    series, _ = perturbation_series(spec, 1)
    assert q == pytest.approx(series.coeffs[1], abs=1e-5)


@pytest.mark.parametrize("m,k", [(1, 0), (2, -1), (2, 0)])
def test_coulomb_hypervirial(m, k):
    # k >= 1 brings in <(1 + lam r^2) r^-1>, which diverges at the equator
    spec = CoulombSpec(1.0, 0, m, -3, LAM, variant="sphere")
    states = [eigen_indices(build_coulomb_radial(spec, 0.0, GridSpec(n)), [0])[0] for n in (2047, 4095, 8191)]
    r = [hypervirial_residual_quantum(s, spec, k) for s in states]
    assert abs(extrapolate(r, [s.h for s in states])) < 1e-6


def test_coulomb_surface_term_rejected(coulomb_states):
    spec, states = coulomb_states
    with pytest.raises(DivergentMomentError):
        hypervirial_residual_quantum(states[0], spec, -1)


def test_untransformed_operator_energy():
    spec = osc(n=2)
    exact = zeroth_energy_oscillator(spec).value
    for npoints in (1024, 2048):
        s = ground(spec, npoints)
        assert abs(untransformed_energy(s) - exact) < 1e-6


def test_eigen_nearest_skips_edge_states():
    spec = osc()
    ham = build_oscillator_1d(spec, 0.05, GridSpec(1024))
    s = eigen_nearest(ham, zeroth_energy_oscillator(spec).value)
    assert s.energy == pytest.approx(0.5256, abs=2e-3)
