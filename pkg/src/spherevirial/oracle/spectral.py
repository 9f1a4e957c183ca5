"""Extended-precision Galerkin oracle for the perturbed 1D oscillator.

The unperturbed transformed Hamiltonian ``-1/2 d^2/du^2 + (alpha/2 lam) tan^2(a u)``
is a trigonometric Poschl-Teller problem with eigenfunctions
``cos^nu(a u) C_j^(nu)(sin a u)`` and levels ``E_j^(0)``. In that basis the
perturbation ``beta x^l (1 + lam x^2)`` becomes, with ``s = sin(a u)``,

    <i|W|j> = a^-l  int_{-1}^{1} p_i(s) p_j(s) s^l (1 - s^2)^(nu - 3/2 - l/2) ds,

where ``p_j`` are the Gegenbauer polynomials orthonormal for the weight
``(1 - s^2)^(nu - 1/2)``. The integrand is a polynomial times a Jacobi weight,
so Gauss-Jacobi quadrature is exact. Diagonalising ``diag(E^(0)) + beta W`` in
``mpmath`` resolves energy differences far below double precision, which is
what a log-log fit of a truncated perturbation series needs.
"""

from __future__ import annotations

import mpmath

from ..errors import DivergentMomentError

__all__ = ["SpectralOscillator"]


class SpectralOscillator:
    """Galerkin model of ``alpha x^2/2 + beta x^l (1 + lam x^2)`` on the circle.

    Parameters
    ----------
    alpha, lam : real
        Stiffness and curvature (``lam > 0``).
    l : int
        Perturbation exponent.
    basis : int
        Number of unperturbed eigenfunctions kept.
    dps : int
        Decimal digits of working precision.
    """

    def __init__(self, alpha, lam, l, basis=40, dps=40):
        self.basis = int(basis)
        self.dps = int(dps)
        self.l = int(l)
        with mpmath.workdps(self.dps):
            self.alpha = mpmath.mpf(alpha)
            self.lam = mpmath.mpf(lam)
            self.nu = mpmath.mpf(1) / 2 + mpmath.sqrt(mpmath.mpf(1) / 4 + self.alpha / self.lam**2)
            expo = self.nu - mpmath.mpf(3) / 2 - mpmath.mpf(self.l) / 2
            if not expo > -1:
                raise DivergentMomentError(
                    f"<x^{self.l} (1 + lam x^2)> diverges at the chart edge (nu={float(self.nu):.4g})"
                )
            self.levels = [self.unperturbed(j) for j in range(self.basis)]
            self.coupling = self._coupling(expo)

    def unperturbed(self, n):
        """``(n + 1/2)(lam + sqrt(lam^2 + 4 alpha))/2 + n^2 lam/2``."""
        with mpmath.workdps(self.dps):
            root = mpmath.sqrt(self.lam**2 + 4 * self.alpha)
            return (n + mpmath.mpf(1) / 2) * (self.lam + root) / 2 + n * n * self.lam / 2

    def _orthonormal(self, s):
        # three-term recurrence of Gegenbauer polynomials orthonormal for (1 - s^2)^(nu - 1/2)
        g = self.nu
        mass = mpmath.sqrt(mpmath.pi) * mpmath.gamma(g + mpmath.mpf(1) / 2) / mpmath.gamma(g + 1)
        p = [1 / mpmath.sqrt(mass)]
        b_prev = mpmath.mpf(0)
        p_prev = mpmath.mpf(0)
        for j in range(1, self.basis):
            b = mpmath.sqrt(mpmath.mpf(j * 1) * (j + 2 * g - 1) / (4 * (j + g) * (j + g - 1)))
            p.append((s * p[-1] - b_prev * p_prev) / b)
            p_prev = p[-2]
            b_prev = b
        return p

    def _coupling(self, expo):
        nodes = self.basis + abs(self.l) // 2 + 2
        xs, ws = mpmath.gauss_quadrature(nodes, "jacobi", expo, expo)
        a = mpmath.sqrt(self.lam)
        w = mpmath.zeros(self.basis, self.basis)
        for s, wt in zip(xs, ws):
            p = self._orthonormal(s)
            c = wt * s**self.l
            for i in range(self.basis):
                ci = c * p[i]
                for j in range(i, self.basis):
                    w[i, j] += ci * p[j]
        scale = a ** (-self.l)
        for i in range(self.basis):
            for j in range(i, self.basis):
                w[i, j] *= scale
                w[j, i] = w[i, j]
        return w

    def energy(self, beta, n=0):
        """Perturbed level continuously connected to ``E_n^(0)``.

        For odd ``l`` the perturbation is unbounded below and a truncated
        basis can show edge states, so the eigenvalue closest to ``E_n^(0)`` is
        returned rather than the ``n``-th lowest.
        """
        with mpmath.workdps(self.dps):
            beta = mpmath.mpf(beta)
            h = self.coupling * beta
            for j in range(self.basis):
                h[j, j] += self.levels[j]
            evals = mpmath.eigsy(h, eigvals_only=True)
            target = self.levels[n]
            return min(evals, key=lambda e: abs(e - target))
