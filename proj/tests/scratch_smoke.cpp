// Temporary smoke harness used during bring-up; not part of the suite.
#include <cstdio>
#include <cmath>

#include "flowlab/specfun.hpp"
#include "flowlab/sphere_cov.hpp"

using namespace flowlab;

int main() {
    std::printf("zeta(2)  = %.15f (pi^2/6 = %.15f)\n", riemann_zeta(2.0),
                kPi * kPi / 6.0);
    std::printf("zeta(3)  = %.15f\n", riemann_zeta(3.0));
    std::printf("zeta(1.5)= %.15f\n", riemann_zeta(1.5));
    std::printf("gamma(.5)= %.15f (sqrt(pi) = %.15f)\n", gamma_fn(0.5), std::sqrt(kPi));
    std::printf("B(1.5,.5)= %.15f (pi/2 = %.15f)\n", beta_fn(1.5, 0.5), kPi / 2);
    std::printf("c_2 = %.15f (pi/2)\n", sin_power_integral(2));
    std::printf("c_3 = %.15f (4/3)\n", sin_power_integral(3));

    std::printf("gegenbauer l=3,d=2,t=.5 = %.15f (0.0625)\n", gegenbauer_gamma(3, 2, 0.5));
    auto gi = gegenbauer_gamma_integral(7, 2, 0.8);
    std::printf("gamma_7 integral=%.12f recurrence=%.12f err=%.2e\n", gi.value,
                gegenbauer_gamma(7, 2, std::cos(0.8)), gi.err_estimate);

    // quadrature basics
    QuadratureSpec qs;
    auto r1 = integrate_1d([](double) { return 1.0; }, 0, 1, qs);
    std::printf("int_0^1 1 = %.15f\n", r1.value);
    QuadratureSpec qh = qs;
    qh.endpoint_power_hint = -0.5;
    auto r2 = integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, qh);
    std::printf("int_0^1 x^-1/2 = %.15f (2)\n", r2.value);
    auto r3 = integrate_1d([](double x) { return std::exp(-x); }, 0,
                           std::numeric_limits<double>::infinity(), qs);
    std::printf("int_0^inf e^-x = %.15f (1)\n", r3.value);

    // K constant
    std::printf("K(1,2) = %.12f (2/3)\n", sphere::K_constant(1.0, 2));
    auto k2d = sphere::K_constant_2d(1.0, 2);
    std::printf("K2d(1,2) = %.12f err=%.2e conv=%d\n", k2d.value, k2d.err_estimate,
                (int)k2d.converged);

    // G series vs deficit
    SphereParams p{2, 1.0, 1.0, 0.0};
    auto gs = sphere::G_series(p, kPi / 2, 2000000, 1e-5);
    const double g0 = sphere::G_zero(p);
    const double def = sphere::G_deficit(p, kPi / 2);
    std::printf("G(pi/2) series=%.10f tail=%.1e | G0-deficit=%.10f\n", gs.value,
                gs.tail_bound, g0 - def);

    // Delta at pi closed form: 2 (1 - 2^-(alpha+1)) zeta(alpha+1)
    const double closed = 2.0 * (1.0 - std::pow(2.0, -(p.alpha + 1))) * riemann_zeta(p.alpha + 1);
    std::printf("Delta(pi) = %.10f closed=%.10f\n", sphere::G_deficit(p, kPi), closed);

    // small-angle: Delta(phi)/phi^alpha -> K ?
    for (double phi : {1e-1, 1e-2, 1e-3, 1e-4}) {
        std::printf("phi=%.0e  Delta/phi^a=%.8f  -G'/(a phi^(a-1))=%.8f (K=%.8f)\n", phi,
                    sphere::G_deficit(p, phi) / std::pow(phi, p.alpha),
                    -sphere::G_derivative(p, phi) / (p.alpha * std::pow(phi, p.alpha - 1)),
                    sphere::K_constant(p.alpha, p.d));
    }

    // G' vs term-differentiated series at pi/2, d=2, alpha=1.5
    SphereParams p2{2, 1.5, 1.0, 0.0};
    // oracle: sum (l-1)^-(a+1) d/dphi gamma_l(cos phi) using derivative recurrence
    const double t = std::cos(kPi / 2), s = std::sin(kPi / 2);
    const double pp = 0.5 * (p2.d + 1);
    double cm2 = 1.0, cm1 = 2.0 * pp * t, dm2 = 0.0, dm1 = 2.0 * pp;
    double um2 = 1.0, um1 = 2.0 * pp;
    double dsum = (dm1 / um1) * (-s);
    for (long n = 2; n <= 400000; ++n) {
        const double cn = (2.0 * (n + pp - 1) * t * cm1 - (n + 2 * pp - 2) * cm2) / n;
        const double dn = (2.0 * (n + pp - 1) * (cm1 + t * dm1) - (n + 2 * pp - 2) * dm2) / n;
        const double un = (2.0 * (n + pp - 1) * um1 - (n + 2 * pp - 2) * um2) / n;
        cm2 = cm1; cm1 = cn; dm2 = dm1; dm1 = dn; um2 = um1; um1 = un;
        if (um1 > 1e280) {
            const double sc = 1.0 / um1;
            cm2 *= sc; cm1 *= sc; dm2 *= sc; dm1 *= sc; um2 *= sc; um1 = 1.0;
        }
        dsum += std::pow((double)n, -(p2.alpha + 1)) * (dm1 / um1) * (-s);
    }
    std::printf("G'(pi/2) integral=%.10f series=%.10f\n", sphere::G_derivative(p2, kPi / 2),
                dsum);
    return 0;
}
