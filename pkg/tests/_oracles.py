"""Independent high-precision oracles for the test suite.

Everything here recomputes package quantities through a route the
package itself does not use: mpmath arbitrary-precision arithmetic
with numerical differentiation and root polishing, scipy special
functions, or closed forms.  Tests compare package output against
these values rather than against other package output.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 30

_E2E = mp.exp(2 * mp.e)


def w_profile(t):
    """log(b) * loglog(b) with b = sqrt(exp(2e) + t^2), in mpmath."""
    b = mp.sqrt(_E2E + mp.mpf(t) ** 2)
    return mp.log(b) * mp.log(mp.log(b))


def w_derivative(t, order: int):
    """Derivatives of the profile by mpmath numerical differentiation."""
    return mp.diff(w_profile, mp.mpf(t), order)


def p_aux(t):
    """t * w'(t) / w(t), the ratio whose sup is the critical constant."""
    t = mp.mpf(t)
    return t * mp.diff(w_profile, t, 1) / w_profile(t)


def t0_oracle() -> mp.mpf:
    """Root of w'' polished by mpmath from a coarse start."""
    return mp.findroot(lambda t: mp.diff(w_profile, t, 2), mp.mpf("16.4"))


def p0_oracle() -> tuple:
    """(argmax, max) of p_aux: coarse log-grid scan plus stationary polish."""
    best_t, best_p = None, mp.mpf(-1)
    t = mp.mpf(1)
    while t < 1e6:
        v = p_aux(t)
        if v > best_p:
            best_t, best_p = t, v
        t *= mp.mpf("1.25")
    tstar = mp.findroot(lambda t: mp.diff(p_aux, t, 1), best_t)
    return tstar, p_aux(tstar)


def tail_integral(alpha, t):
    """Upper incomplete gamma by mpmath."""
    return mp.gammainc(mp.mpf(alpha), a=mp.mpf(t), b=mp.inf)


def gaussian_l2_norm(a) -> mp.mpf:
    """||exp(-a x^2)||_{L^2(R)} = (pi / (2a))^(1/4)."""
    return (mp.pi / (2 * mp.mpf(a))) ** mp.mpf("0.25")


def gaussian_transform(a, xi) -> mp.mpf:
    """(2 pi)^(-1/2) integral of exp(-a x^2) e^{-i x xi}: real Gaussian."""
    a, xi = mp.mpf(a), mp.mpf(xi)
    return mp.exp(-xi * xi / (4 * a)) / mp.sqrt(2 * a)


def bump_transform(mu, xi, dps: int = 30) -> mp.mpc:
    """(2 pi)^(-1/2) int_0^1 exp(-(1-t)^mu - t^mu) e^{-i t xi} dt."""
    mu, xi = mp.mpf(mu), mp.mpf(xi)

    def f(t):
        return mp.exp(-((1 - t) ** mu) - t ** mu - 1j * t * xi)

    with mp.workdps(dps):
        val = mp.quad(f, [0, mp.mpf("0.5"), 1])
    return val / mp.sqrt(2 * mp.pi)
