import math

import mpmath
import numpy as np
import pytest

from spherevirial.core import CurvedParams
from spherevirial.errors import DivergentMomentError
from spherevirial.hvhf import OscillatorSpec, perturbation_series, zeroth_energy_oscillator
from spherevirial.oracle import SpectralOscillator


def test_unperturbed_levels_match_closed_form():
    sp = SpectralOscillator(1.0, 0.1, 1, basis=12)
    for n in range(4):
        spec = OscillatorSpec(1.0, n, 1, CurvedParams(0.1))
        assert float(sp.levels[n]) == pytest.approx(zeroth_energy_oscillator(spec).value, rel=1e-15)


def test_diagonal_coupling_is_first_order_coefficient():
    sp = SpectralOscillator(1.0, 0.1, 2, basis=8)
    series, _ = perturbation_series(OscillatorSpec(1.0, 0, 2, CurvedParams(0.1)), 1)
    assert float(sp.coupling[0, 0]) == pytest.approx(series.coeffs[1], rel=1e-13)


def test_odd_perturbation_has_zero_diagonal():
    sp = SpectralOscillator(1.0, 0.1, 1, basis=8)
    assert all(abs(sp.coupling[i, i]) < mpmath.mpf(10) ** -30 for i in range(8))


def test_edge_divergence_rejected():
    with pytest.raises(DivergentMomentError):
        SpectralOscillator(0.5, 1.0, 3)


def _slope(J, l=1):
    spec = OscillatorSpec(1.0, 0, l, CurvedParams(0.1))
    betas = [1e-3, 3e-3, 1e-2]
    sp = SpectralOscillator(1.0, 0.1, l, basis=40, dps=40)
    with mpmath.workdps(40):
        series, _ = perturbation_series(spec, J, seed_value=mpmath.mpf(1))
        errs = []
        for b in betas:
            b = mpmath.mpf(b)
            s = sum(c * b**j for j, c in enumerate(series.coeffs))
            errs.append(float(abs(sp.energy(b) - s)))
    return np.polyfit(np.log(betas), np.log(errs), 1)[0]


@pytest.mark.parametrize("J,expected", [(1, 2), (2, 4), (3, 4), (4, 6)])
def test_truncation_slope_is_first_nonzero_omitted_order(J, expected):
    # odd coefficients vanish for x(1 + lam x^2), so the first omitted
    # nonzero term is the next even order
    assert _slope(J) == pytest.approx(expected, abs=0.1)


def test_even_perturbation_slope_is_J_plus_one():
    assert _slope(2, l=2) == pytest.approx(3.0, abs=0.1)
