#pragma once

// Stationary isotropic Sobolev covariance on R^d: longitudinal/normal
// correlators, spectral density, small-r constants and the distance
// diffusion coefficients. The radial measure is
//   F(d rho) = rho^(d-1) (rho^2 + m^2)^-((d+alpha)/2) d rho.
// Deficits B - B_L(r), B - B_N(r) are integrated through (1 - cos) kernels,
// which are positive and therefore keep full relative accuracy at small r.
// omega is the uniform probability measure on S^(d-1); its u1-marginal has
// density proportional to (1-u^2)^((d-3)/2), pinned by Int u1^2 omega = 1/d.

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "flowlab/params.hpp"
#include "flowlab/quadrature.hpp"
#include "flowlab/specfun.hpp"

namespace flowlab::euclid {

// Normalizer of the u1-marginal: 1 / Int_-1^1 (1-u^2)^((d-3)/2) du.
inline double marginal_norm(int d) {
    if (d < 2) throw std::domain_error("marginal_norm: d >= 2");
    return 1.0 / beta_fn(0.5, 0.5 * (d - 1));
}

struct SpectralTotal {
    double f_total = 0.0;  // F(R+)
    double big_b = 0.0;    // B = (a+b) F(R+) / d
    double err_estimate = 0.0;
    bool converged = false;
};

inline SpectralTotal spectral_total(const EuclidParams& p) {
    p.validate();
    QuadratureSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = 1e-11;
    q.max_subdivisions = 24;
    auto f = [&](double rho) {
        return std::pow(rho, p.d - 1) *
               std::pow(rho * rho + p.mass * p.mass, -0.5 * (p.d + p.alpha));
    };
    auto r = integrate_1d(f, 0.0, std::numeric_limits<double>::infinity(), q);
    SpectralTotal out;
    out.f_total = r.value;
    out.big_b = (p.a + p.b) * r.value / p.d;
    out.err_estimate = r.err_estimate;
    out.converged = r.converged;
    return out;
}

namespace detail {

// T(beta) = Int_0^inf (1-cos x) x^(d-1) (x^2+beta^2)^-((d+alpha)/2) dx, so
// that Int (1-cos(c rho)) F(d rho) = c^alpha T(c m). Small beta keeps the
// positive (1-cos) kernel; large beta switches to the scaled variable
// y = x/beta where the cosine part is a shrinking correction.
inline double radial_deficit_direct(int d, double alpha, double beta, double rel_tol = 1e-9) {
    QuadratureSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = rel_tol;
    q.max_subdivisions = 24;
    if (beta <= 8.0) {
        auto g = [&](double x) {
            return std::pow(x, d - 1) * std::pow(x * x + beta * beta, -0.5 * (d + alpha));
        };
        const double split = 8.0;
        auto head = integrate_1d(
            [&](double x) {
                const double h = std::sin(0.5 * x);
                return 2.0 * h * h * g(x);
            },
            0.0, split, q);
        auto plain = integrate_1d(g, split, std::numeric_limits<double>::infinity(), q);
        auto osc = integrate_cosine_tail(g, split, 0.0,
                                         std::max(1e-15, 1e-4 * rel_tol * head.value));
        return head.value + plain.value - osc.value;
    }
    // beta > 8: T = beta^-alpha (M - C(beta)), M = Int y^(d-1)(1+y^2)^-(d+a)/2 dy.
    const double M = 0.5 * beta_fn(0.5 * d, 0.5 * alpha);
    double C = 0.0;
    if (beta < 1e4) {  // beyond this C/M < ~1e-8 and is dropped
        auto gw = [&](double w) {
            const double y = w / beta;
            return std::pow(y, d - 1) * std::pow(1.0 + y * y, -0.5 * (d + alpha)) / beta;
        };
        const double w0 = 16.0 * kPi;
        auto head = integrate_1d([&](double w) { return std::cos(w) * gw(w); }, 0.0, w0, q);
        auto tail = integrate_cosine_tail(gw, w0, 0.0, std::max(1e-15, 1e-3 * rel_tol * M), 6000);
        C = head.value + tail.value;
    }
    return std::pow(beta, -alpha) * (M - C);
}

// One-time log-log spline of T(beta) per (d, alpha); both tails extend as
// exact power laws (slope 0 on the left, -alpha on the right).
class RadialDeficitTable {
  public:
    RadialDeficitTable(int d, double alpha) {
        const double u_lo = std::log(1e-7), u_hi = std::log(3e4);
        const double du = 0.08;
        const int n = static_cast<int>((u_hi - u_lo) / du) + 1;
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i)
            y[i] = std::log(radial_deficit_direct(d, alpha, std::exp(u_lo + i * du)));
        spline_ = UniformSpline(u_lo, du, std::move(y));
    }
    double operator()(double beta) const { return std::exp(spline_(std::log(beta))); }

  private:
    UniformSpline spline_;
};

inline const RadialDeficitTable& radial_table(int d, double alpha) {
    static thread_local std::map<std::pair<int, double>, std::unique_ptr<RadialDeficitTable>>
        cache;
    auto key = std::make_pair(d, alpha);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<RadialDeficitTable>(d, alpha)).first;
    return *it->second;
}

struct DeficitWeights {
    // Int Int (1-cos(rho u1 r)) w(u1) omega(du) F(d rho) for w(u) = u^2 and
    // w(u) = 1 - u^2; everything else is a combination of the two.
    double du2 = 0.0;
    double dperp = 0.0;
};

inline DeficitWeights deficit_integrals(const EuclidParams& p, double r, double rel_tol,
                                        bool exact) {
    const double cw = marginal_norm(p.d);
    const RadialDeficitTable* table = exact ? nullptr : &radial_table(p.d, p.alpha);
    auto inner = [&](double u) {
        const double c = u * r;
        if (c <= 0.0) return 0.0;
        const double t = exact ? radial_deficit_direct(p.d, p.alpha, c * p.mass, rel_tol * 0.2)
                               : (*table)(c * p.mass);
        return std::pow(c, p.alpha) * t;
    };
    QuadratureSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = rel_tol;
    q.max_subdivisions = exact ? 14 : 18;
    DeficitWeights out;
    // u = cos(theta); marginal density becomes 2 c_w sin^(d-2) theta.
    out.du2 = integrate_1d(
                  [&](double th) {
                      const double u = std::cos(th);
                      return 2.0 * cw * std::pow(std::sin(th), p.d - 2) * u * u * inner(u);
                  },
                  0.0, 0.5 * kPi, q)
                  .value;
    out.dperp = integrate_1d(
                    [&](double th) {
                        const double s = std::sin(th);
                        return 2.0 * cw * std::pow(s, p.d) * inner(std::cos(th));
                    },
                    0.0, 0.5 * kPi, q)
                    .value;
    return out;
}

}  // namespace detail

struct CorrelatorDeficits {
    double sigma2 = 0.0;  // B - B_L(r)
    double bn_gap = 0.0;  // B - B_N(r)
};

// Positive-integrand evaluation of B - B_L and B - B_N:
//   B - B_L = Int Int (1-cos(rho u1 r)) [ a u1^2 + b (1-u1^2)/(d-1) ] omega F
//   B - B_N = Int Int (1-cos(rho u1 r)) [ a (1-u1^2)/(d-1)
//             + b (d-2+u1^2)/(d-1)^2 ] omega F
inline CorrelatorDeficits correlator_deficits(const EuclidParams& p, double r,
                                              double rel_tol = 1e-7, bool exact = false) {
    p.validate();
    if (!(r > 0)) throw std::domain_error("correlator_deficits: r > 0");
    auto w = detail::deficit_integrals(p, r, rel_tol, exact);
    const double dm1 = p.d - 1.0;
    CorrelatorDeficits out;
    out.sigma2 = p.a * w.du2 + p.b / dm1 * w.dperp;
    out.bn_gap = p.a * w.dperp / dm1 + p.b / dm1 * (w.du2 + (dm1 - 1.0) / dm1 * w.dperp);
    return out;
}

struct Correlators {
    double b_l = 0.0;
    double b_n = 0.0;
};

inline Correlators correlators(const EuclidParams& p, double r, double rel_tol = 1e-7) {
    p.validate();
    const double B = spectral_total(p).big_b;
    if (r == 0.0) return {B, B};
    auto d = correlator_deficits(p, r, rel_tol);
    return {B - d.sigma2, B - d.bn_gap};
}

// C^ij(z) = delta_ij B_N(|z|) + z_i z_j / |z|^2 (B_L - B_N).
inline std::vector<std::vector<double>> covariance_matrix(const EuclidParams& p,
                                                          const std::vector<double>& z) {
    p.validate();
    if (static_cast<int>(z.size()) != p.d)
        throw std::invalid_argument("covariance_matrix: z must have d components");
    double n2 = 0.0;
    for (double zi : z) n2 += zi * zi;
    std::vector<std::vector<double>> C(p.d, std::vector<double>(p.d, 0.0));
    if (n2 == 0.0) {
        const double B = spectral_total(p).big_b;
        for (int i = 0; i < p.d; ++i) C[i][i] = B;
        return C;
    }
    auto c = correlators(p, std::sqrt(n2));
    for (int i = 0; i < p.d; ++i) {
        C[i][i] = c.b_n;
        for (int j = 0; j < p.d; ++j) C[i][j] += z[i] * z[j] / n2 * (c.b_l - c.b_n);
    }
    return C;
}

// Overall constant of the Fourier representation fixed so that the inverse
// transform reproduces B at z = 0: c = (2 pi)^d / Omega_d.
inline double spectral_constant(int d) {
    const double omega = 2.0 * std::pow(kPi, 0.5 * d) / gamma_fn(0.5 * d);
    return std::pow(2.0 * kPi, d) / omega;
}

inline std::vector<std::vector<double>> spectral_density(const EuclidParams& p,
                                                         const std::vector<double>& k) {
    p.validate();
    if (static_cast<int>(k.size()) != p.d)
        throw std::invalid_argument("spectral_density: k must have d components");
    double n2 = 0.0;
    for (double ki : k) n2 += ki * ki;
    if (n2 == 0.0) throw std::domain_error("spectral_density: k != 0");
    const double radial =
        spectral_constant(p.d) * std::pow(n2 + p.mass * p.mass, -0.5 * (p.d + p.alpha));
    std::vector<std::vector<double>> S(p.d, std::vector<double>(p.d, 0.0));
    const double bt = p.b / (p.d - 1.0);
    for (int i = 0; i < p.d; ++i) {
        S[i][i] = radial * bt;
        for (int j = 0; j < p.d; ++j) S[i][j] += radial * (p.a - bt) * k[i] * k[j] / n2;
    }
    return S;
}

struct SmallScaleConstants {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
};

// Leading small-r constants: a1 = 2 c_w (Int_0^inf (1-cos x) x^-(alpha+1) dx)
// I(d-2, alpha), a2 = (alpha+1)/(d+alpha) a1, a3 = a1/(d+alpha). The x
// integral has the closed form pi / (2 Gamma(alpha+1) sin(pi alpha/2)).
inline SmallScaleConstants alpha_constants(double alpha, int d) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("alpha_constants: alpha in (0,2)");
    if (d < 2) throw std::domain_error("alpha_constants: d >= 2");
    const double xint = kPi / (2.0 * gamma_fn(alpha + 1.0) * std::sin(0.5 * kPi * alpha));
    const double theta_int = 0.5 * beta_fn(0.5 * (d - 1), 0.5 * (alpha + 1));  // I(d-2,alpha)
    SmallScaleConstants c;
    c.a1 = 2.0 * marginal_norm(d) * xint * theta_int;
    c.a2 = (alpha + 1.0) / (d + alpha) * c.a1;
    c.a3 = c.a1 / (d + alpha);
    return c;
}

// Distance-diffusion coefficients on (0, inf):
//   sigma^2(r) = B - B_L(r),   drift(r) = (d-1)(B - B_N(r)) / r.
inline CoefficientPair distance_coefficients(const EuclidParams& p, double rel_tol = 1e-7) {
    p.validate();
    CoefficientPair c;
    c.lo = 0.0;
    c.hi = std::numeric_limits<double>::infinity();
    auto require_pos = [](double r) {
        if (!(r > 0.0)) throw std::domain_error("CoefficientPair: argument outside open domain");
    };
    c.sigma2 = [p, rel_tol, require_pos](double r) {
        require_pos(r);
        return correlator_deficits(p, r, rel_tol).sigma2;
    };
    c.drift = [p, rel_tol, require_pos](double r) {
        require_pos(r);
        return (p.d - 1.0) * correlator_deficits(p, r, rel_tol).bn_gap / r;
    };
    return c;
}

// Spline-backed version in u = log r. Both stored functions are positive:
// log(B - B_L) and log(B - B_N); power-law left tails extend exactly and the
// right tails saturate at log B.
inline CoefficientPair distance_coefficients_fast(const EuclidParams& p, double r_min = 1e-6,
                                                  double r_max = 1e4, double du = 0.045,
                                                  double rel_tol = 1e-7) {
    p.validate();
    const double u_lo = std::log(r_min), u_hi = std::log(r_max);
    const int n = std::max(8, static_cast<int>((u_hi - u_lo) / du) + 1);
    std::vector<double> log_s2(n), log_gap(n);
    for (int i = 0; i < n; ++i) {
        const double r = std::exp(u_lo + (u_hi - u_lo) * i / (n - 1));
        auto d = correlator_deficits(p, r, rel_tol);
        log_s2[i] = std::log(d.sigma2);
        log_gap[i] = std::log(d.bn_gap);
    }
    const double step = (u_hi - u_lo) / (n - 1);
    auto s2 = std::make_shared<UniformSpline>(u_lo, step, log_s2);
    auto gap = std::make_shared<UniformSpline>(u_lo, step, log_gap);
    const double dm1 = p.d - 1.0;
    auto require_pos = [](double r) {
        if (!(r > 0.0)) throw std::domain_error("CoefficientPair: argument outside open domain");
    };
    CoefficientPair c;
    c.lo = 0.0;
    c.hi = std::numeric_limits<double>::infinity();
    c.sigma2 = [s2, require_pos](double r) {
        require_pos(r);
        return std::exp((*s2)(std::log(r)));
    };
    c.drift = [gap, dm1, require_pos](double r) {
        require_pos(r);
        return dm1 * std::exp((*gap)(std::log(r))) / r;
    };
    return c;
}

}  // namespace flowlab::euclid
