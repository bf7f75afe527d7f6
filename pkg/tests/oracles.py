"""Independent reference values, computed with mpmath.

Nothing here imports the package under test.
"""

import mpmath as mp

mp.mp.dps = 40


def Q(t):
    return mp.erfc(mp.mpf(t) / mp.sqrt(2)) / 2


def phi(t):
    t = mp.mpf(t)
    return mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi)


def bpsk_pep(gamma):
    return Q(mp.sqrt(gamma))


def bpsk_pep_curv_snr(gamma):
    g = mp.mpf(gamma)
    return phi(mp.sqrt(g)) * (g + 1) / (4 * g**1.5)


def bpsk_pep_curv_noise(p):
    p = mp.mpf(p)
    return phi(1 / mp.sqrt(p)) / 4 * p**-2.5 * (1 / p - 3)


def pam4_outer_inner_pep(gamma):
    # points at -3, -1, 1, 3 over sqrt(5); decide -1 from -3: noise in [2, 4]/sqrt(5)
    g = mp.mpf(gamma)
    return Q(mp.sqrt(g / 5)) - Q(3 * mp.sqrt(g / 5))


def qpsk_ser(gamma):
    q = Q(mp.sqrt(mp.mpf(gamma) / 2))
    return 1 - (1 - q) ** 2


def qam16_ser(gamma):
    pl = mp.mpf(3) / 2 * Q(mp.sqrt(mp.mpf(gamma) / 10))
    return 1 - (1 - pl) ** 2


def second_derivative(f, x):
    return mp.diff(f, mp.mpf(x), 2)


def gaussian_pdf(r2, noise_power, n):
    p = mp.mpf(noise_power)
    return (2 * mp.pi * p) ** (-mp.mpf(n) / 2) * mp.exp(-mp.mpf(r2) / (2 * p))


def pdf_curv_snr(r2, gamma, n):
    return mp.diff(lambda g: gaussian_pdf(r2, 1 / g, n), mp.mpf(gamma), 2)


def pdf_curv_noise(r2, noise_power, n):
    return mp.diff(lambda p: gaussian_pdf(r2, p, n), mp.mpf(noise_power), 2)
