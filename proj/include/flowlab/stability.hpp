#pragma once

// First Lyapunov exponent of the smooth (alpha > 2) flows and the critical
// compressibility curves where its sign flips.

#include <cmath>
#include <stdexcept>

#include "flowlab/euclid_cov.hpp"
#include "flowlab/params.hpp"
#include "flowlab/specfun.hpp"

namespace flowlab::stability {

struct Lyapunov {
    double value = 0.0;
    bool formal = false;  // alpha <= 2: outside the flow-of-diffeomorphisms regime
};

// lambda_1 on the sphere in terms of zeta values. For alpha in (1, 2) the
// zeta(alpha - 1) factor uses the Euler-Maclaurin continuation and the
// result is flagged formal.
inline Lyapunov lyapunov_sphere(double alpha, double a, double b, int d) {
    if (d < 2) throw std::domain_error("lyapunov_sphere: d >= 2");
    if (a < 0 || b < 0) throw std::domain_error("lyapunov_sphere: weights >= 0");
    if (!(alpha > 1.0)) throw std::domain_error("lyapunov_sphere: alpha > 1 required");
    if (alpha == 2.0) throw std::domain_error("lyapunov_sphere: pole at alpha = 2");
    const double z1 = detail::zeta_euler_maclaurin(alpha - 1.0);
    const double z2 = riemann_zeta(alpha);
    const double z3 = riemann_zeta(alpha + 1.0);
    const double c = (d - 4.0) * a + d * b;
    Lyapunov out;
    out.value = c / (d + 2.0) * z1 + (d - 1.0) / (d + 2.0) * c * z2 -
                d * (2.0 * (d - 1.0) * a + d * b) / (d + 2.0) * z3;
    out.formal = alpha < 2.0;
    return out;
}

// Compressibility at which lambda_1 changes sign on the sphere.
inline double eta_critical_sphere(double alpha, int d) {
    if (d < 2) throw std::domain_error("eta_critical_sphere: d >= 2");
    if (!(alpha > 2.0)) throw std::domain_error("eta_critical_sphere: alpha > 2");
    const double z1 = riemann_zeta(alpha - 1.0);
    const double z2 = riemann_zeta(alpha);
    const double z3 = riemann_zeta(alpha + 1.0);
    return (-(d - 4.0) * z1 - (d - 1.0) * (d - 4.0) * z2 + 2.0 * d * (d - 1.0) * z3) /
           (4.0 * z1 + 4.0 * (d - 1.0) * z2 + d * (d - 2.0) * z3);
}

struct LyapunovRd {
    double value = 0.0;
    double moment = 0.0;  // Int rho^2 F(d rho)
    bool divergent = false;
    double moment_err = 0.0;
};

// lambda_1 = ((d-4) a + d b) / (2 (d+2)) * Int rho^2 F(d rho); the moment
// diverges for alpha <= 2 and is then reported as such rather than
// evaluated.
inline LyapunovRd lyapunov_rd(const EuclidParams& p) {
    p.validate();
    LyapunovRd out;
    if (!(p.alpha > 2.0)) {
        out.divergent = true;
        return out;
    }
    QuadratureSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = 1e-10;
    q.max_subdivisions = 24;
    auto f = [&](double rho) {
        return std::pow(rho, p.d + 1) *
               std::pow(rho * rho + p.mass * p.mass, -0.5 * (p.d + p.alpha));
    };
    auto r = integrate_1d(f, 0.0, std::numeric_limits<double>::infinity(), q);
    out.moment = r.value;
    out.moment_err = r.err_estimate;
    out.value = ((p.d - 4.0) * p.a + p.d * p.b) / (2.0 * (p.d + 2.0)) * r.value;
    return out;
}

// Euclidean critical compressibility (only meaningful for d <= 4).
inline double eta_critical_rd(int d) {
    if (d < 2 || d > 4) throw std::domain_error("eta_critical_rd: defined for d in {2,3,4}");
    return (4.0 - d) / 4.0;
}

// Signed divergence diagnostic: |lambda_1| along a sequence alpha_n -> 2+ at
// fixed eta. Growth of the sequence witnesses the blow-up without ever
// evaluating an infinity.
inline std::vector<double> lyapunov_sphere_blowup(double eta, int d,
                                                  const std::vector<double>& alphas) {
    std::vector<double> out;
    for (double alpha : alphas) out.push_back(lyapunov_sphere(alpha, 1.0 - eta, eta, d).value);
    return out;
}

}  // namespace flowlab::stability
