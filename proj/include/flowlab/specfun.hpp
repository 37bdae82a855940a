#pragma once

// Special functions shared by the covariance modules: normalized Gegenbauer
// polynomials (recurrence + integral-form oracle), Riemann zeta, gamma/beta
// and the sin^d normalization integral.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "flowlab/quadrature.hpp"

namespace flowlab {

// gamma_l(t) = C_{l-1}^{(d+1)/2}(t) / C_{l-1}^{(d+1)/2}(1) by the three-term
// recurrence n C_n = 2(n+p-1) t C_{n-1} - (n+2p-2) C_{n-2}. Both sequences are
// rescaled together when the value at 1 grows large, so any l is safe.
inline double gegenbauer_gamma(long l, int d, double t) {
    if (l < 1) throw std::domain_error("gegenbauer_gamma: l >= 1 required");
    if (d < 2) throw std::domain_error("gegenbauer_gamma: d >= 2 required");
    if (!(t >= -1.0 && t <= 1.0)) throw std::domain_error("gegenbauer_gamma: t in [-1,1]");
    const long n_target = l - 1;
    if (n_target == 0) return 1.0;
    const double p = 0.5 * (d + 1);
    double cm2 = 1.0, cm1 = 2.0 * p * t;        // C_{n-2}(t), C_{n-1}(t)
    double um2 = 1.0, um1 = 2.0 * p;            // same at t = 1
    for (long n = 2; n <= n_target; ++n) {
        const double cn = (2.0 * (n + p - 1.0) * t * cm1 - (n + 2.0 * p - 2.0) * cm2) / n;
        const double un = (2.0 * (n + p - 1.0) * um1 - (n + 2.0 * p - 2.0) * um2) / n;
        cm2 = cm1; cm1 = cn;
        um2 = um1; um1 = un;
        if (um1 > 1e280) {
            const double s = 1.0 / um1;
            cm2 *= s; cm1 *= s; um2 *= s; um1 = 1.0;
        }
    }
    return cm1 / um1;
}

// Integral form: (1/c_d) * Int_0^pi Re[z^(l-1)] sin^d(theta) dtheta with
// z = cos(phi) - i sin(phi) cos(theta). Oracle for the recurrence.
inline IntegralResult gegenbauer_gamma_integral(long l, int d, double phi,
                                                const QuadratureSpec& quad = {}) {
    if (l < 1) throw std::domain_error("gegenbauer_gamma_integral: l >= 1 required");
    if (d < 2) throw std::domain_error("gegenbauer_gamma_integral: d >= 2 required");
    const double pi = 3.14159265358979323846;
    if (!(phi >= 0.0 && phi <= pi))
        throw std::domain_error("gegenbauer_gamma_integral: phi in [0,pi]");
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    auto integrand = [&](double theta) {
        const std::complex<double> z(cphi, -sphi * std::cos(theta));
        return std::pow(z, static_cast<double>(l - 1)).real() *
               std::pow(std::sin(theta), d);
    };
    QuadratureSpec qs = quad;
    qs.endpoint_power_hint.reset();
    IntegralResult num = integrate_1d(integrand, 0.0, pi, qs);
    IntegralResult den = integrate_1d([&](double th) { return std::pow(std::sin(th), d); },
                                      0.0, pi, qs);
    IntegralResult r;
    r.value = num.value / den.value;
    r.err_estimate = (num.err_estimate + std::fabs(r.value) * den.err_estimate) /
                     std::max(den.value, 1e-300);
    r.converged = num.converged && den.converged;
    return r;
}

namespace detail {

// Euler-Maclaurin evaluation of zeta. Valid by analytic continuation for
// s > 0, s != 1; the remainder after K Bernoulli terms is below the first
// omitted term for real s > 0.
inline double zeta_euler_maclaurin(double s) {
    if (s == 1.0) throw std::domain_error("zeta: pole at s = 1");
    static constexpr double kB2k[] = {1.0 / 6,   -1.0 / 30,   1.0 / 42,  -1.0 / 30,
                                      5.0 / 66,  -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    int N = 24;
    for (int attempt = 0; attempt < 6; ++attempt, N *= 2) {
        double sum = 0.0;
        for (int n = 1; n < N; ++n) sum += std::pow(n, -s);
        sum += std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
        double poch = s;             // s(s+1)...(s+2k-2)
        double npow = std::pow(N, -s - 1.0);
        double term = 0.0;
        int k = 0;
        double factorial = 2.0;      // (2k)!
        for (k = 1; k <= 8; ++k) {
            term = kB2k[k - 1] / factorial * poch * npow;
            sum += term;
            poch *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
            npow /= static_cast<double>(N) * N;
            factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        }
        const double bound = std::fabs(kB2k[7] / factorial * poch * npow);
        if (bound < 1e-14) return sum;
    }
    throw std::runtime_error("zeta: tail bound not achieved");
}

}  // namespace detail

// zeta(s) for s > 1 to better than 1e-12 absolute.
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta: requires s > 1");
    return detail::zeta_euler_maclaurin(s);
}

inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
    return std::tgamma(x);
}

inline double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("beta_fn: positive arguments");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

// Int_0^pi sin^d(theta) dtheta = B((d+1)/2, 1/2).
inline double sin_power_integral(int d) {
    if (d < 1) throw std::domain_error("sin_power_integral: d >= 1");
    return beta_fn(0.5 * (d + 1), 0.5);
}

}  // namespace flowlab
