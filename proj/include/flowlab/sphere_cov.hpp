#pragma once

// Isotropic Sobolev covariance on S^d and the induced two-point distance
// diffusion. The spectral series G is summed by recurrence; the deficit
// G(0)-G(phi) and the derivative G' are evaluated through real, positive
// double-integral representations obtained from the Laplace transform of
// the spectral weights, which keeps full relative accuracy as phi -> 0
// where the raw series cancels catastrophically.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "flowlab/params.hpp"
#include "flowlab/quadrature.hpp"
#include "flowlab/specfun.hpp"

namespace flowlab::sphere {

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    bool converged = false;
};

// Partial sum of G(phi) = sum_{l>=2} (l-1)^-(alpha+1) gamma_l(cos phi) with
// the integral tail bound (L-1)^-alpha / alpha reported alongside.
inline SeriesValue G_series(const SphereParams& p, double phi, long l_max = 5000,
                            double tol = 1e-10) {
    p.validate();
    if (l_max < 2) throw std::invalid_argument("G_series: l_max >= 2");
    if (!(phi >= 0.0 && phi <= kPi)) throw std::domain_error("G_series: phi in [0,pi]");
    const double t = std::cos(phi);
    const double pp = 0.5 * (p.d + 1);
    double cm2 = 1.0, cm1 = 2.0 * pp * t;
    double um2 = 1.0, um1 = 2.0 * pp;
    double sum = cm1 / um1;  // l = 2 term (weight 1)
    for (long n = 2; n <= l_max - 1; ++n) {
        const double cn = (2.0 * (n + pp - 1.0) * t * cm1 - (n + 2.0 * pp - 2.0) * cm2) / n;
        const double un = (2.0 * (n + pp - 1.0) * um1 - (n + 2.0 * pp - 2.0) * um2) / n;
        cm2 = cm1; cm1 = cn;
        um2 = um1; um1 = un;
        if (um1 > 1e280) {
            const double s = 1.0 / um1;
            cm2 *= s; cm1 *= s; um2 *= s; um1 = 1.0;
        }
        sum += std::pow(static_cast<double>(n), -(p.alpha + 1.0)) * (cm1 / um1);
    }
    SeriesValue r;
    r.value = sum;
    r.tail_bound = std::pow(static_cast<double>(l_max - 1), -p.alpha) / p.alpha;
    r.converged = r.tail_bound < tol;
    return r;
}

inline double G_zero(const SphereParams& p) {
    p.validate();
    return riemann_zeta(p.alpha + 1.0);
}

namespace detail {

struct ZParts {
    double one_minus_cos;  // 1 - cos(phi)
    double cosphi, sinphi;
};

inline ZParts z_parts(double phi) {
    ZParts z;
    const double h = std::sin(0.5 * phi);
    z.one_minus_cos = 2.0 * h * h;
    z.cosphi = std::cos(phi);
    z.sinphi = std::sin(phi);
    return z;
}

inline QuadratureSpec cov_spec(double rel_tol) {
    QuadratureSpec q;
    q.abs_tol = 1e-300;  // relative-error driven
    q.rel_tol = rel_tol;
    q.max_subdivisions = 28;
    q.endpoint_power_hint.reset();
    return q;
}

// s-integral over (0, inf) for integrands behaving like s^(alpha-1) near 0
// with structure spread over s in [corner_lo, corner_hi] (the |1 - z| range)
// and exponential decay beyond. The middle piece runs in log s, so corners
// many decades below 1 cost only O(log) panels.
inline double integrate_corner(const std::function<double(double)>& f, double alpha,
                               double corner_lo, double corner_hi, double rel_tol) {
    QuadratureSpec q = cov_spec(rel_tol);
    const double b1 = std::min(corner_lo, 1.0);
    const double b2 = std::min(std::max(10.0 * corner_hi, 2.0 * b1), 50.0);
    QuadratureSpec qh = q;
    qh.endpoint_power_hint = alpha - 1.0;
    double total = integrate_1d(f, 0.0, b1, qh).value;
    total += integrate_1d([&](double v) {
                 const double s = std::exp(v);
                 return f(s) * s;
             },
             std::log(b1), std::log(b2), q)
                 .value;
    total += integrate_1d(f, b2, std::numeric_limits<double>::infinity(), q).value;
    return total;
}

// Closed forms for Int_0^{pi/2} (A + B cos^2 th) sin^d th / (C + D cos^2 th) dth,
// A, C > 0, B possibly signed, D >= 0. With x = cos th this needs the pair
//   I_d(r) = Int_0^1 (1-x^2)^{(d-1)/2} / (r^2 + x^2) dx,  r^2 = C/D,
//   T_d(r) = Int_0^1 x^2 (1-x^2)^{(d-1)/2} / (r^2 + x^2) dx = S_d - r^2 I_d,
// via the downward recursion I_d = (1+r^2) I_{d-2} - S_{d-2} for moderate r
// and the 1/r^2 moment series when D << C (which also covers D -> 0).
class ThetaReduction {
  public:
    explicit ThetaReduction(int d) : d_(d) {
        S_.resize(d + 1);
        for (int k = 0; k <= d; ++k)
            S_[k] = 0.5 * beta_fn(0.5 * (k + 1), 0.5);  // Int_0^{pi/2} sin^k
        M_.resize(kSeriesTerms + 2);
        for (int k = 0; k < kSeriesTerms + 2; ++k)
            M_[k] = 0.5 * beta_fn(k + 0.5, 0.5 * (d + 1));  // Int_0^1 x^{2k}(1-x^2)^{(d-1)/2}
    }

    double operator()(double A, double B, double C, double D) const {
        if (D <= 0.25 * C) {
            // (A I_d + B T_d)/D as alternating series in q = D/C.
            const double q = D / C;
            double sum = 0.0, qk = 1.0;
            for (int k = 0; k < kSeriesTerms; ++k) {
                const double term = (A * M_[k] + B * M_[k + 1]) * qk;
                sum += (k % 2 == 0) ? term : -term;
                qk *= q;
                if (std::fabs(M_[k + 1] * qk) * (std::fabs(A) + std::fabs(B)) <
                    1e-16 * std::fabs(sum))
                    break;
            }
            return sum / C;
        }
        const double r2 = C / D;
        const double r = std::sqrt(r2);
        double im1;  // I_k climbing k by 2
        int k0;
        if (d_ % 2 == 1) {
            im1 = std::atan(1.0 / r) / r;  // I_1
            k0 = 1;
        } else {
            im1 = 0.5 * kPi * (std::sqrt(1.0 + r2) / r - 1.0);  // I_2
            k0 = 2;
        }
        for (int k = k0; k < d_; k += 2) im1 = (1.0 + r2) * im1 - S_[k];
        const double Id = im1;
        const double Td = S_[d_] - r2 * Id;
        return (A * Id + B * Td) / D;
    }

  private:
    static constexpr int kSeriesTerms = 40;
    int d_;
    std::vector<double> S_, M_;
};

}  // namespace detail

// G(0) - G(phi), positive for phi in (0, pi]. Real representation
//   (2 / Gamma(a+1) c_d) Int_0^inf Int_0^{pi/2}
//     e^-s [ (1-cos phi)(1-e^-s cos phi) + e^-s sin^2 phi cos^2 th ]
//     s^alpha sin^d th / ( (1-e^-s) |1 - e^-s z|^2 ) dth ds,
// with the theta integral evaluated in closed form.
inline double G_deficit(const SphereParams& p, double phi, double rel_tol = 1e-8) {
    p.validate();
    if (!(phi > 0.0 && phi <= kPi)) throw std::domain_error("G_deficit: phi in (0,pi]");
    const auto z = detail::z_parts(phi);
    static thread_local int cached_d = -1;
    static thread_local std::unique_ptr<detail::ThetaReduction> theta;
    if (cached_d != p.d) {
        theta = std::make_unique<detail::ThetaReduction>(p.d);
        cached_d = p.d;
    }
    auto f = [&](double s) {
        const double es = std::exp(-s);
        const double one_minus_es = -std::expm1(-s);
        const double re = (z.cosphi >= 0.0) ? z.one_minus_cos + z.cosphi * one_minus_es
                                            : 1.0 - es * z.cosphi;  // 1 - e^-s cos(phi)
        const double A = z.one_minus_cos * re;
        const double B = es * z.sinphi * z.sinphi;
        const double C = re * re;
        const double D = es * es * z.sinphi * z.sinphi;
        return es * std::pow(s, p.alpha) / one_minus_es * (*theta)(A, B, C, D);
    };
    const double value = detail::integrate_corner(f, p.alpha, z.one_minus_cos,
                                                  z.one_minus_cos + z.sinphi, rel_tol);
    return value * 2.0 / (gamma_fn(p.alpha + 1.0) * sin_power_integral(p.d));
}

// G'(phi) < 0 on (0, pi). Real reduction of the derivative integral,
// written in e^-s so the tail cannot overflow:
//   -G'(phi) = (2 sin phi / Gamma(a) c_d) Int Int
//     (e^-s - e^-2s cos phi sin^2 th) s^(alpha-1) sin^d th
//     / ((1 - e^-s cos phi)^2 + e^-2s sin^2 phi cos^2 th) dth ds.
inline double G_derivative(const SphereParams& p, double phi, double rel_tol = 1e-8) {
    p.validate();
    if (!(phi > 0.0 && phi < kPi)) throw std::domain_error("G_derivative: phi in (0,pi)");
    if (!(p.alpha < 2.0))
        throw std::domain_error("G_derivative: integral representation needs alpha in (0,2)");
    const auto z = detail::z_parts(phi);
    static thread_local int cached_d = -1;
    static thread_local std::unique_ptr<detail::ThetaReduction> theta;
    if (cached_d != p.d) {
        theta = std::make_unique<detail::ThetaReduction>(p.d);
        cached_d = p.d;
    }
    auto f = [&](double s) {
        const double es = std::exp(-s);
        const double one_minus_es = -std::expm1(-s);
        const double re = (z.cosphi >= 0.0) ? z.one_minus_cos + z.cosphi * one_minus_es
                                            : 1.0 - es * z.cosphi;
        const double A = es * re;                 // e^-s - e^-2s cos(phi)
        const double B = es * es * z.cosphi;      // coefficient of cos^2 th
        const double C = re * re;
        const double D = es * es * z.sinphi * z.sinphi;
        return std::pow(s, p.alpha - 1.0) * (*theta)(A, B, C, D);
    };
    const double value =
        detail::integrate_corner(f, p.alpha, z.one_minus_cos, z.one_minus_cos + z.sinphi,
                                 rel_tol);
    return -value * 2.0 * z.sinphi / (gamma_fn(p.alpha) * sin_power_integral(p.d));
}

inline bool K_well_conditioned(double alpha) { return alpha >= 0.05 && alpha <= 1.95; }

// Small-angle constant: the inner t-integral reduces to |cos th|^alpha times
// pi / (2 sin(pi alpha / 2)), leaving a Beta function in theta.
inline double K_constant(double alpha, int d) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("K_constant: alpha in (0,2)");
    if (d < 2) throw std::domain_error("K_constant: d >= 2");
    const double theta_int = beta_fn(0.5 * (d + 1), 0.5 * (alpha + 1));  // = Int |cos|^a sin^d
    return kPi * theta_int /
           (2.0 * std::sin(0.5 * kPi * alpha) * gamma_fn(alpha + 1.0) * sin_power_integral(d));
}

// Full 2-D quadrature path; oracle for K_constant.
inline IntegralResult K_constant_2d(double alpha, int d, const QuadratureSpec& quad = {}) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("K_constant_2d: alpha in (0,2)");
    if (d < 2) throw std::domain_error("K_constant_2d: d >= 2");
    auto f = [&](double t, double theta) {
        const double c = std::cos(theta);
        return c * c / (t * t + c * c) * std::pow(t, alpha - 1.0) *
               std::pow(std::sin(theta), d);
    };
    QuadratureSpec q = quad;
    q.endpoint_power_hint = alpha - 1.0;
    const double inf = std::numeric_limits<double>::infinity();
    auto r = integrate_2d(f, Rect{0.0, inf, 0.0, kPi}, q);
    const double norm = 1.0 / (gamma_fn(alpha + 1.0) * sin_power_integral(d));
    r.value *= norm;
    r.err_estimate *= norm;
    return r;
}

struct AlphaBeta {
    double alpha_cov = 0.0;
    double beta_cov = 0.0;
};

// Covariance components at t = cos(phi).
inline AlphaBeta covariance_alpha_beta(const SphereParams& p, double phi,
                                       double rel_tol = 3e-7) {
    p.validate();
    if (!(phi > 0.0 && phi < kPi)) throw std::domain_error("covariance_alpha_beta: interior phi");
    const double G0 = G_zero(p);
    const double G = G0 - G_deficit(p, phi, rel_tol);
    const double Gp = G_derivative(p, phi, rel_tol);
    const double c = std::cos(phi), s = std::sin(phi);
    AlphaBeta ab;
    ab.alpha_cov = p.a * G + p.b * (c * G + s / (p.d - 1.0) * Gp);
    ab.beta_cov = -p.a / s * Gp + p.b * (-G + c / ((p.d - 1.0) * s) * Gp);
    return ab;
}

namespace detail {

// sigma^2 and drift in grouped form. Equivalent to
//   sigma^2 = alpha(1) - alpha(cos phi) cos phi + beta(cos phi) sin^2 phi
//   drift   = (d-1)/sin phi (alpha(1) cos phi - alpha(cos phi))
// but with the difference G(0)-G(phi) kept as a single positive quantity.
inline double sigma2_from(const SphereParams& p, double phi, double G0, double Delta, double Gp) {
    const auto z = z_parts(phi);
    return (p.a * z.cosphi + p.b) * Delta + p.a * z.one_minus_cos * G0 -
           p.a * z.sinphi * Gp;
}

inline double drift_sin_over_dm1(const SphereParams& p, double phi, double G0, double Delta,
                                 double Gp) {
    // h(phi) = drift * sin(phi) / (d-1); smooth and bounded on [0, pi].
    const auto z = z_parts(phi);
    return (p.a + p.b) * z.cosphi * Delta - p.a * z.one_minus_cos * (G0 - Delta) -
           p.b * z.sinphi * Gp / (p.d - 1.0);
}

}  // namespace detail

// Distance-diffusion coefficients on (0, pi); every call evaluates the two
// covariance integrals. Use distance_coefficients_fast for tight loops.
inline CoefficientPair distance_coefficients(const SphereParams& p, double rel_tol = 3e-7) {
    p.validate();
    const double G0 = G_zero(p);
    CoefficientPair c;
    c.lo = 0.0;
    c.hi = kPi;
    auto require_interior = [](double phi) {
        if (!(phi > 0.0 && phi < kPi))
            throw std::domain_error("CoefficientPair: argument outside open domain");
    };
    c.sigma2 = [p, G0, rel_tol, require_interior](double phi) {
        require_interior(phi);
        return detail::sigma2_from(p, phi, G0, G_deficit(p, phi, rel_tol),
                                   G_derivative(p, phi, rel_tol));
    };
    c.drift = [p, G0, rel_tol, require_interior](double phi) {
        require_interior(phi);
        const double h = detail::drift_sin_over_dm1(p, phi, G0, G_deficit(p, phi, rel_tol),
                                                    G_derivative(p, phi, rel_tol));
        return (p.d - 1.0) * h / std::sin(phi);
    };
    return c;
}

// Spline-backed coefficients in the coordinate u = log(phi / (pi - phi)),
// which resolves both boundaries. sigma^2 is stored in log form (its
// power-law left tail extends exactly); the drift is rebuilt from the
// bounded product h = drift sin(phi)/(d-1) with an exponential left tail.
inline CoefficientPair distance_coefficients_fast(const SphereParams& p, double phi_min = 1e-6,
                                                  double pi_margin = 1e-3, double du = 0.04,
                                                  double rel_tol = 1e-6) {
    p.validate();
    const double G0 = G_zero(p);
    const double u_lo = std::log(phi_min / (kPi - phi_min));
    const double u_hi = std::log((kPi - pi_margin) / pi_margin);
    const int n = std::max(8, static_cast<int>((u_hi - u_lo) / du) + 1);
    std::vector<double> log_s2(n), hval(n);
    for (int i = 0; i < n; ++i) {
        const double u = u_lo + (u_hi - u_lo) * i / (n - 1);
        const double phi = kPi / (1.0 + std::exp(-u));
        const double Delta = G_deficit(p, phi, rel_tol);
        const double Gp = G_derivative(p, phi, rel_tol);
        log_s2[i] = std::log(detail::sigma2_from(p, phi, G0, Delta, Gp));
        hval[i] = detail::drift_sin_over_dm1(p, phi, G0, Delta, Gp);
    }
    const double step = (u_hi - u_lo) / (n - 1);
    auto s2_spline = std::make_shared<UniformSpline>(u_lo, step, log_s2);
    auto h_spline = std::make_shared<UniformSpline>(u_lo, step, hval);
    // Left tail of h decays like phi^alpha; extend by that power law.
    const double h_left = hval.front();
    const double h_left_rate =
        (hval[1] > 0 && hval[0] > 0) ? (std::log(hval[1]) - std::log(hval[0])) / step : p.alpha;
    const int d = p.d;
    auto require_interior = [](double phi) {
        if (!(phi > 0.0 && phi < kPi))
            throw std::domain_error("CoefficientPair: argument outside open domain");
    };
    CoefficientPair c;
    c.lo = 0.0;
    c.hi = kPi;
    c.sigma2 = [s2_spline, require_interior](double phi) {
        require_interior(phi);
        return std::exp((*s2_spline)(std::log(phi / (kPi - phi))));
    };
    c.drift = [h_spline, h_left, h_left_rate, u_lo, d, require_interior](double phi) {
        require_interior(phi);
        const double u = std::log(phi / (kPi - phi));
        const double h =
            (u < u_lo) ? h_left * std::exp(h_left_rate * (u - u_lo)) : (*h_spline)(u);
        return (d - 1.0) * h / std::sin(phi);
    };
    return c;
}

// Coefficients of the squared process x = psi^2 on (0, hi^2).
inline CoefficientPair squared_coefficients(const CoefficientPair& base) {
    CoefficientPair c;
    c.lo = 0.0;
    c.hi = base.hi * base.hi;
    const double hi2 = c.hi;
    auto require_interior = [hi2](double x) {
        if (!(x > 0.0 && x < hi2))
            throw std::domain_error("CoefficientPair: argument outside open domain");
    };
    c.sigma2 = [base, require_interior](double x) {
        require_interior(x);
        const double r = std::sqrt(x);
        return 4.0 * x * base.sigma2(r);
    };
    c.drift = [base, require_interior](double x) {
        require_interior(x);
        const double r = std::sqrt(x);
        return 2.0 * base.sigma2(r) + 2.0 * r * base.drift(r);
    };
    return c;
}

struct SmallAngleFit {
    double lambda = 0.0;       // measured limit of (G(0)-G(phi)) / phi^alpha
    double uncertainty = 0.0;  // spread of the last extrapolation steps
    double k_value = 0.0;      // closed-form K
    double k_times_g0 = 0.0;   // alternative normalization K G(0)
    bool matches_k = false;    // |lambda - K| < |lambda - K G(0)|
};

// Richardson/Aitken extrapolation of Delta(phi)/phi^alpha on a dyadic grid.
inline SmallAngleFit measured_small_angle_limit(const SphereParams& p, double phi0 = 0.05,
                                                int levels = 9) {
    p.validate();
    if (!(p.alpha < 2.0))
        throw std::domain_error("measured_small_angle_limit: alpha in (0,2)");
    std::vector<double> ratio;
    double phi = phi0;
    for (int k = 0; k < levels; ++k, phi *= 0.5)
        ratio.push_back(G_deficit(p, phi, 1e-8) / std::pow(phi, p.alpha));
    // Aitken delta-squared on the tail of the sequence.
    std::vector<double> acc = ratio;
    double prev = ratio.back();
    for (int pass = 0; pass < 2 && acc.size() >= 3; ++pass) {
        std::vector<double> next;
        for (std::size_t i = 0; i + 2 < acc.size(); ++i) {
            const double den = acc[i + 2] - 2.0 * acc[i + 1] + acc[i];
            next.push_back(std::fabs(den) > 1e-300
                               ? acc[i + 2] - (acc[i + 2] - acc[i + 1]) * (acc[i + 2] - acc[i + 1]) / den
                               : acc[i + 2]);
        }
        prev = acc.back();
        acc = next;
    }
    SmallAngleFit fit;
    fit.lambda = acc.back();
    fit.uncertainty = std::fabs(acc.back() - prev);
    fit.k_value = K_constant(p.alpha, p.d);
    fit.k_times_g0 = fit.k_value * G_zero(p);
    fit.matches_k = std::fabs(fit.lambda - fit.k_value) < std::fabs(fit.lambda - fit.k_times_g0);
    return fit;
}

}  // namespace flowlab::sphere
