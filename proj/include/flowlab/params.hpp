#pragma once

// Shared parameter records, the distance-diffusion coefficient pair and a
// spline helper used by the geometry modules to build fast evaluators.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace flowlab {

inline constexpr double kPi = 3.14159265358979323846;

enum class Geometry { Sphere, Euclid };

struct SphereParams {
    int d = 2;          // sphere dimension, >= 2
    double alpha = 1.0; // Sobolev roughness exponent, > 0
    double a = 1.0;     // gradient spectral weight, >= 0
    double b = 0.0;     // divergence-free spectral weight, >= 0

    void validate() const {
        if (d < 2) throw std::invalid_argument("SphereParams: d >= 2");
        if (!(alpha > 0)) throw std::invalid_argument("SphereParams: alpha > 0");
        if (a < 0 || b < 0) throw std::invalid_argument("SphereParams: weights >= 0");
        if (!(a + b > 0)) throw std::invalid_argument("SphereParams: a + b > 0");
    }
    double eta() const { return b / (a + b); }
};

struct EuclidParams {
    int d = 2;
    double alpha = 1.0;
    double a = 1.0;
    double b = 0.0;
    double mass = 1.0;  // infrared regulator m > 0

    void validate() const {
        if (d < 2) throw std::invalid_argument("EuclidParams: d >= 2");
        if (!(alpha > 0)) throw std::invalid_argument("EuclidParams: alpha > 0");
        if (a < 0 || b < 0) throw std::invalid_argument("EuclidParams: weights >= 0");
        if (!(a + b > 0)) throw std::invalid_argument("EuclidParams: a + b > 0");
        if (!(mass > 0)) throw std::invalid_argument("EuclidParams: mass > 0");
    }
    double eta() const { return b / (a + b); }
};

// Evaluator pair for the two-point distance diffusion with generator
// L = sigma2(x) d^2/dx^2 + drift(x) d/dx on the open interval (lo, hi).
// No 1/2 in front of sigma2; the matching SDE carries sqrt(2) sigma.
struct CoefficientPair {
    std::function<double(double)> sigma2;
    std::function<double(double)> drift;
    double lo = 0.0;
    double hi = kPi;

    double check_domain(double x) const {
        if (!(x > lo && x < hi))
            throw std::domain_error("CoefficientPair: argument outside open domain");
        return x;
    }
};

// Natural cubic spline on a uniform grid, with linear extension past the
// ends. Geometry modules feed it transformed coordinates in which the
// tabulated functions are smooth up to both boundaries.
class UniformSpline {
  public:
    UniformSpline() = default;
    UniformSpline(double u0, double du, std::vector<double> y)
        : u0_(u0), du_(du), y_(std::move(y)) {
        const std::size_t n = y_.size();
        if (n < 4 || !(du_ > 0)) throw std::invalid_argument("UniformSpline: bad grid");
        m_.assign(n, 0.0);
        std::vector<double> diag(n, 4.0), rhs(n, 0.0);
        diag[0] = diag[n - 1] = 2.0;
        rhs[0] = 3.0 * (y_[1] - y_[0]) / du_;
        rhs[n - 1] = 3.0 * (y_[n - 1] - y_[n - 2]) / du_;
        for (std::size_t i = 1; i + 1 < n; ++i) rhs[i] = 3.0 * (y_[i + 1] - y_[i - 1]) / du_;
        for (std::size_t i = 1; i < n; ++i) {
            const double w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - m_[i + 1]) / diag[i];
    }

    double operator()(double u) const {
        const std::size_t n = y_.size();
        if (u <= u0_) return y_.front() + m_.front() * (u - u0_);
        const double umax = u0_ + du_ * (n - 1);
        if (u >= umax) return y_.back() + m_.back() * (u - umax);
        auto i = static_cast<std::size_t>((u - u0_) / du_);
        if (i >= n - 1) i = n - 2;
        const double x = u - (u0_ + i * du_);
        const double h = du_;
        const double c2 = (3.0 * (y_[i + 1] - y_[i]) / h - 2.0 * m_[i] - m_[i + 1]) / h;
        const double c3 = (2.0 * (y_[i] - y_[i + 1]) / h + m_[i] + m_[i + 1]) / (h * h);
        return y_[i] + x * (m_[i] + x * (c2 + x * c3));
    }

  private:
    double u0_ = 0.0, du_ = 1.0;
    std::vector<double> y_, m_;
};

}  // namespace flowlab
