"""Symmetric tridiagonal eigenpairs by Sturm bisection and inverse iteration.

Bisection brackets every requested eigenvalue to roughly machine precision
using the Sturm count (number of negative pivots of ``T - x I``); inverse
iteration then recovers the eigenvector and the Rayleigh quotient gives the
reported energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import solve_banded

from ..errors import ConvergenceError

__all__ = [
    "EigenState",
    "sturm_count",
    "bisect_eigenvalues",
    "eigen_lowest",
    "eigen_indices",
    "eigen_nearest",
    "residual_tolerance",
]


@dataclass
class EigenState:
    """Eigenpair of a :class:`~spherevirial.oracle.grid.DiscreteHamiltonian`.

    ``phi`` is normalised so that ``h * sum(phi**2) == 1`` and has a positive
    first lobe.
    """

    energy: float
    phi: np.ndarray
    index: int
    hamiltonian: object
    residual: float = 0.0

    @property
    def h(self):
        return self.hamiltonian.h


@numba.njit(cache=True)
def _sturm(diag, off2, x):
    count = 0
    d = 1.0
    tiny = 1e-300
    for i in range(diag.size):
        if i == 0:
            d = diag[0] - x
        else:
            d = diag[i] - x - off2[i - 1] / d
        if d == 0.0:
            d = -tiny
        if d < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect(diag, off2, index, lo, hi, tol):
    # smallest x with more than `index` eigenvalues below it
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid == lo or mid == hi:
            break
        if _sturm(diag, off2, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sturm_count(diag, offdiag, x):
    """Number of eigenvalues strictly below `x`."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off2 = np.ascontiguousarray(offdiag, dtype=float) ** 2
    return int(_sturm(diag, off2, float(x)))


def _gershgorin(diag, off):
    rad = np.zeros_like(diag)
    rad[:-1] += np.abs(off)
    rad[1:] += np.abs(off)
    return float(np.min(diag - rad)), float(np.max(diag + rad))


def bisect_eigenvalues(diag, offdiag, indices):
    """Eigenvalues with the given (0-based, ascending) indices."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off2 = np.ascontiguousarray(offdiag, dtype=float) ** 2
    lo, hi = _gershgorin(diag, np.asarray(offdiag, dtype=float))
    scale = max(abs(lo), abs(hi), 1.0)
    tol = 4 * np.finfo(float).eps * scale
    return np.array([_bisect(diag, off2, int(i), lo, hi, tol) for i in indices])


def residual_tolerance(ham):
    """``1e-10``, relaxed to ``64 eps ||H||_inf`` when rounding makes that unreachable."""
    norm = float(np.max(np.abs(ham.diag)) + 2 * np.max(np.abs(ham.offdiag), initial=0.0))
    return max(1e-10, 64 * np.finfo(float).eps * norm)


def _inverse_iteration(ham, energy, rng, max_restarts=3):
    diag, off = ham.diag, ham.offdiag
    tol = residual_tolerance(ham)
    n = diag.size
    scale = max(np.max(np.abs(diag)), 1.0)
    # a minute shift keeps the LU factorisation nonsingular
    shift = energy - 4 * np.finfo(float).eps * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    best = None
    for attempt in range(max_restarts + 1):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        for _ in range(6):
            y = solve_banded((1, 1), ab, v, check_finite=False)
            v = y / np.linalg.norm(y)
        hv = ham.matvec(v)
        e = float(v @ hv)
        res = float(np.linalg.norm(hv - e * v))
        if best is None or res < best[2]:
            best = (v, e, res)
        if res <= tol:
            break
    return best


def _finish(ham, indices, energies, seed=0):
    rng = np.random.default_rng(seed)
    states = []
    for idx, e0 in zip(indices, energies):
        v, e, res = _inverse_iteration(ham, e0, rng)
        if res > residual_tolerance(ham):
            others = bisect_eigenvalues(ham.diag, ham.offdiag, [max(idx - 1, 0), idx + 1])
            gap = float(min(abs(others - e0)[abs(others - e0) > 0], default=np.inf))
            raise ConvergenceError(
                f"inverse iteration for eigenvalue #{idx} (E={e0:.12g}) stalled at "
                f"residual {res:.3e}; distance to nearest neighbour {gap:.3e}"
            )
        # sign convention: first significant lobe positive
        k = int(np.argmax(np.abs(v) > 1e-3 * np.max(np.abs(v))))
        if v[k] < 0:
            v = -v
        phi = v / np.sqrt(ham.h)
        states.append(EigenState(energy=e, phi=phi, index=int(idx), hamiltonian=ham, residual=res))
    return states


def eigen_indices(ham, indices):
    """Eigenstates with the given ascending indices."""
    indices = [int(i) for i in indices]
    energies = bisect_eigenvalues(ham.diag, ham.offdiag, indices)
    return _finish(ham, indices, energies)


def eigen_lowest(ham, count=1):
    """The `count` lowest eigenstates, sorted by energy.

    Raises
    ------
    ValueError
        If `count` exceeds a quarter of the grid size.
    ConvergenceError
        If inverse iteration cannot reach the residual target (see
        :func:`residual_tolerance`).
    """
    if count < 1 or count > ham.npoints // 4:
        raise ValueError(f"count must be in 1..{ham.npoints // 4}, got {count}")
    return eigen_indices(ham, range(count))


def eigen_nearest(ham, target):
    """Eigenstate whose energy is closest to `target`.

    Needed when the perturbation is unbounded below (odd ``l``): spurious
    states localised at the chart edge sit at the bottom of the spectrum.
    """
    below = sturm_count(ham.diag, ham.offdiag, target)
    cand = [i for i in (below - 1, below) if 0 <= i < ham.npoints]
    energies = bisect_eigenvalues(ham.diag, ham.offdiag, cand)
    j = int(np.argmin(np.abs(energies - target)))
    return _finish(ham, [cand[j]], [energies[j]])[0]
