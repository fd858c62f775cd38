"""Frozen reference values, computed independently of the package with mpmath.

Run ``python3 tests/oracles.py`` to recompute them (about a minute); the
printout should reproduce every constant below to the digits shown.

Seeds: ``psi1(x) = C exp(-1/(1 - t^2))`` with ``t = 2x - 1`` on ``[0, 1]``,
``psi2(x) = psi1(x - 3)``. Transforms use ``F(r) = (2 pi)^{-1/2} int e^{-irx} psi(x) dx``.
"""

import math

# unit-norm constant C on [0, 1] and on [-1, 1]
NORM_C_01 = 3.87657878362759773650417403153
NORM_C_M11 = 2.74115514570697231345291753798
# the k=1 profile on [-1, 1]: second derivative at 0 is -2/e before normalization
BUMP_D2_AT_0_RAW = -2.0 / math.e
BUMP_D2_AT_0_NORMALIZED_M11 = -2.01682924633380905301811129992

INT_PSI1 = 0.860588503909514312286168079548
# F1(0) = int psi1 / sqrt(2 pi); the beta = 0 state has F(0) = sqrt(2) F1(0)
F1_AT_0 = 0.343325140236918901164803975744
F_STATE_AT_0 = 0.485535069626695513072943262036
# |F1(r)|^2 at r = 0, 1, 5, 20
F1_SQ = {
    0.0: 0.11787215191870004,
    1.0: 0.11329066737763437,
    5.0: 0.04030150129969614,
    20.0: 0.00012786022861079404,
}
# E[R^2] under the momentum operator: int |psi1'|^2 dx
MOMENTUM_E2 = 12.3104365249271086177728071047

# overlapping fixture psi2 = psi1(x - 0.5): cross terms int conj(psi1) (-i d/dx)^n psi2
OVERLAP_CROSS_1 = -1.56455894482038913959719101048j
OVERLAP_CROSS_2 = -3.85811948654180921555067219876

# int_0^1 exp(-50 i x) dx
OSC_INTEGRAL = complex(-0.00524749707407857571828787293825, -0.00070067943015773451862085882198)

# L1 distance between the momentum densities at beta = 0 and pi for the default pair.
# P(r; beta) = |F1|^2 (1 + cos(rD - beta)), so P(r; 0) - P(r; pi) = 2 |F1|^2 cos(rD) and the
# distance is 2 int |F1|^2 |cos(3r)| dr. With |cos| = 2/pi + sum_m c_m cos(6 m r) and int |F1|^2 cos(6 m r) dr equal
# to the autocorrelation of psi1 at lag 6m (0 for a width-1 support, m >= 1), it is 2 * (2/pi) * 1.
EX1_L1_0_PI = 4.0 / math.pi

# Heyde: L1(eps=0, eps=1) = int P_LN |sin(2 pi k ln x)| dx. The same Fourier argument gives 2/pi, up to
# terms of order exp(-8 pi^2 k^2) from the Gaussian characteristic function.
HEYDE_L1_0_1 = 2.0 / math.pi


def _recompute():
    import mpmath as mp

    mp.mp.dps = 30

    def prof(t):
        return mp.e ** (-1 / (1 - t * t)) if abs(t) < 1 else mp.mpf(0)

    raw01 = mp.quad(lambda x: prof(2 * x - 1) ** 2, [0, 0.5, 1])
    C = 1 / mp.sqrt(raw01)
    print("NORM_C_01", C)
    print("NORM_C_M11", 1 / mp.sqrt(mp.quad(lambda t: prof(t) ** 2, [-1, 0, 1])))
    cm11 = 1 / mp.sqrt(mp.quad(lambda t: prof(t) ** 2, [-1, 0, 1]))
    print("BUMP_D2_AT_0_NORMALIZED_M11", cm11 * mp.diff(prof, 0, 2))
    psi = lambda x: C * prof(2 * x - 1)
    dpsi = lambda x: mp.diff(psi, x) if 0 < x < 1 else mp.mpf(0)
    ip = mp.quad(psi, [0, 0.5, 1])
    print("INT_PSI1", ip)
    print("F1_AT_0", ip / mp.sqrt(2 * mp.pi))
    print("F_STATE_AT_0", ip / mp.sqrt(mp.pi))
    for r in (0, 1, 5, 20):
        pts = mp.linspace(0, 1, 9 + 2 * r)
        F = mp.quad(lambda x: mp.expj(-r * x) * psi(x), pts) / mp.sqrt(2 * mp.pi)
        print("F1_SQ", r, abs(F) ** 2)
    print("MOMENTUM_E2", mp.quad(lambda x: dpsi(x) ** 2, mp.linspace(0, 1, 9)))
    # overlap fixture: psi2 = psi1(x - 0.5), overlap on [0.5, 1]
    psi2 = lambda x: psi(x - 0.5) if 0.5 < x < 1.5 else mp.mpf(0)
    c1 = mp.quad(lambda x: psi(x) * (-1j) * mp.diff(psi2, x), mp.linspace(0.5, 1, 9))
    c2 = mp.quad(lambda x: psi(x) * (-1) * mp.diff(psi2, x, 2), mp.linspace(0.5, 1, 9))
    print("OVERLAP_CROSS_1", c1)
    print("OVERLAP_CROSS_2", c2)
    print("OSC_INTEGRAL", mp.quad(lambda x: mp.expj(-50 * x), mp.linspace(0, 1, 20)))


if __name__ == "__main__":
    _recompute()
