"""Regenerates tests/oracles/oracle_values.hpp from arbitrary-precision mpmath references.

Run: python3 tests/oracles/generate_oracles.py > tests/oracles/oracle_values.hpp
"""
from mpmath import mp, mpf, mpc, loggamma, psi, whitw, gamma, quad, inf, exp, sin, pi, re, im, euler

mp.dps = 40


def c(v):
    v = mpc(v)
    return "{%s, %s}" % (mp.nstr(re(v), 20, min_fixed=-1, max_fixed=-1), mp.nstr(im(v), 20, min_fixed=-1, max_fixed=-1))


def r(v):
    return mp.nstr(re(v), 20, min_fixed=-1, max_fixed=-1)


def whittaker_by_quadrature(kappa, mu, x):
    a = mpf(1) / 2 - kappa + mu
    integrand = lambda t: exp(-t) * t ** (mu - kappa - mpf(1) / 2) * (1 + t / x) ** (mu + kappa - mpf(1) / 2)
    return exp(-x / 2) * x ** kappa / gamma(a) * quad(integrand, [0, 1, 10, inf])


def whittaker_kernel(z, zp, x, y):
    k = (z + zp + 1) / 2
    m = (z - zp) / 2
    g = gamma(z) * gamma(zp)
    if x == y:
        w0, w1, w2 = whitw(k, m, x), whitw(k - 1, m, x), whitw(k - 2, m, x)
        return re((w0 * w1 + z * zp * w1 ** 2 - (z - 1) * (zp - 1) * w0 * w2) / (g * x * x))
    num = whitw(k, m, x) * whitw(k - 1, m, y) - whitw(k, m, y) * whitw(k - 1, m, x)
    return re((x * y) ** mpf(-0.5) / g * num / (x - y))


def expected_alpha_intersection(z):
    # z' -> z limit of the alpha-sum expectation, via trigamma.
    return sin(pi * z) ** 2 / pi ** 2 * ((2 * z - 1) / (2 * z * z) + psi(1, -z))


out = []
out.append("// Generated by tests/oracles/generate_oracles.py (mpmath, 40 digits). Do not edit.")
out.append("#pragma once\n#include <array>\n#include <complex>\n\nnamespace fermion::oracle {\n")
out.append("using cplx = std::complex<double>;\n")
out.append("inline const cplx log_gamma_2_3i%s;" % c(loggamma(mpc(2, 3))))
out.append("inline const cplx log_gamma_m2p5_1i%s;" % c(loggamma(mpc(-2.5, 1))))
out.append("inline const double digamma_1 = %s;" % r(-euler))
out.append("inline const cplx digamma_03_04i%s;" % c(psi(0, mpc(0.3, 0.4))))
out.append("inline const double digamma_m075 = %s;" % r(psi(0, mpf(-0.75))))
out.append("inline const double whittaker_k0_mu03i_x1 = %s;" % r(whittaker_by_quadrature(mpf(0), mpc(0, 0.3), mpf(1))))

cases = []
for kappa, mu in [(0, mpc(0, 0.3)), (1, -0.25), (0, -0.25), (-1, -0.25), (0.75, mpc(0, 1.5)), (-0.25, mpc(0, 1.5)),
                  (1.5, 0), (0.5, 0), (-0.5, 0), (3.2, 0.4), (-4.5, 2.5), (5, mpc(0.2, 0.3)), (2.3, -0.2), (0.7, 0.2)]:
    for x in [1e-6, 1e-3, 0.37, 2.0, 11.0, 50.0]:
        kappa_m, mu_m, x_m = mpf(kappa), mpc(mu), mpf(x)
        cases.append((kappa_m, mu_m, x_m, whitw(kappa_m, mu_m, x_m)))
out.append("\nstruct WhittakerCase { double kappa; cplx mu; double x; cplx value; };")
out.append("inline const std::array<WhittakerCase, %d> whittaker_cases{{" % len(cases))
for kappa, mu, x, v in cases:
    out.append("    {%s, %s, %s, %s}," % (r(kappa), "cplx" + c(mu), r(x), "cplx" + c(v)))
out.append("}};")

kcases = []
for z, zp in [(mpf(0.25), mpf(0.75)), (mpc(0.5, 0.5), mpc(0.5, -0.5)), (mpf(0.5), mpf(0.5)), (mpf(-0.7), mpf(-0.2)),
              (mpc(1.3, 0.8), mpc(1.3, -0.8))]:
    for x, y in [(0.7, 1.3), (1.0, 1.0), (0.05, 0.2), (3.0, 7.5), (2.0, 2.0), (1.0, 1.001)]:
        kcases.append((z, zp, mpf(x), mpf(y), whittaker_kernel(z, zp, mpf(x), mpf(y))))
out.append("\nstruct WhittakerKernelCase { cplx z; cplx zp; double x; double y; double value; };")
out.append("inline const std::array<WhittakerKernelCase, %d> whittaker_kernel_cases{{" % len(kcases))
for z, zp, x, y, v in kcases:
    out.append("    {cplx%s, cplx%s, %s, %s, %s}," % (c(z), c(zp), r(x), r(y), r(v)))
out.append("}};")

icases = [(mpf(z), expected_alpha_intersection(mpf(z))) for z in ["0.5", "0.3", "1.7", "-0.4"]]
out.append("\nstruct IntersectionCase { double z; double alpha_sum; };")
out.append("inline const std::array<IntersectionCase, %d> intersection_cases{{" % len(icases))
for z, v in icases:
    out.append("    {%s, %s}," % (r(z), r(v)))
out.append("}};")
out.append("\n}  // namespace fermion::oracle")
print("\n".join(out))
