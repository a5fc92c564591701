"""Dense 1D quadrature for the surface energy of the initial crack profile.

The profile factorizes as z(x1, x2) = g(x1) f(x2) with
g = 1/(1 + exp(x1/eta)) and f = exp(-(x2/eta)^2), so every term of

    E_s = (gamma*/2) * [eps * int |grad z|^2 + (1/eps) * int z^2]

splits into products of 1D integrals over (-1, 1):

    int |grad z|^2 = int g'^2 int f^2 + int g^2 int f'^2
    int z^2        = int g^2 int f^2

evaluated here with scipy.integrate.quad at tight tolerance.
Parameters: eta = 0.015, gamma* = 5.08, eps = 0.01.
"""

import math

from scipy.integrate import quad

ETA = 0.015
GAMMA = 5.08
EPS = 0.01


def g(x):
    return 1.0 / (1.0 + math.exp(x / ETA))


def gp(x):
    e = math.exp(x / ETA)
    return -e / (ETA * (1.0 + e) ** 2)


def f(y):
    return math.exp(-((y / ETA) ** 2))


def fp(y):
    return -2.0 * y / ETA ** 2 * math.exp(-((y / ETA) ** 2))


def integ(fn):
    val, err = quad(fn, -1.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=400)
    assert err < 1e-9
    return val


int_g2 = integ(lambda x: g(x) ** 2)
int_gp2 = integ(lambda x: gp(x) ** 2)
int_f2 = integ(lambda y: f(y) ** 2)
int_fp2 = integ(lambda y: fp(y) ** 2)

grad_term = int_gp2 * int_f2 + int_g2 * int_fp2
mass_term = int_g2 * int_f2
E_s = 0.5 * GAMMA * (EPS * grad_term + mass_term / EPS)

print("int g^2  ", int_g2)
print("int g'^2 ", int_gp2)
print("int f^2  ", int_f2)
print("int f'^2 ", int_fp2)
print("E_s      ", E_s)
