#pragma once

// Adaptive quadrature used by the analytic modules: 1-D Gauss-Kronrod 7/15
// with global panel refinement, declared endpoint-power substitution,
// the u/(1-u) map for half-infinite ranges, a tensor 2-D driver and an
// Euler-accelerated scheme for oscillatory cosine tails.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace flowlab {

enum class QuadScheme { AdaptiveComposite, Tensor2D };

struct QuadratureSpec {
    QuadScheme scheme = QuadScheme::AdaptiveComposite;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 20;
    std::optional<double> endpoint_power_hint;  // f ~ x^p near the left endpoint

    void validate() const {
        if (!(abs_tol > 0) || !(rel_tol > 0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions >= 1");
        if (endpoint_power_hint && !(*endpoint_power_hint > -1.0))
            throw std::invalid_argument("QuadratureSpec: endpoint power must exceed -1");
    }
};

struct IntegralResult {
    double value = 0.0;
    double err_estimate = 0.0;
    bool converged = false;
};

namespace detail {

// QUADPACK QK15 nodes/weights.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEval {
    double integral;
    double error;
};

template <typename F>
PanelEval kronrod15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    const double diff = std::fabs(resk - resg) * h;
    // QUADPACK-style sharpening of the raw difference.
    double err = diff;
    if (diff > 0) {
        double resabs = 0;
        for (int i = 0; i < 7; ++i) resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
        resabs += kWgk[7] * std::fabs(fv[7]);
        resabs *= std::fabs(h);
        if (resabs > 0) err = resabs * std::min(1.0, std::pow(200.0 * diff / resabs, 1.5));
    }
    return {resk * h, err};
}

struct Panel {
    double a, b, integral, error;
    int depth;
};

// Globally adaptive refinement on a finite interval.
template <typename F>
IntegralResult adapt_finite(const F& f, double a, double b, const QuadratureSpec& spec,
                            std::size_t panel_budget) {
    std::vector<Panel> panels;
    auto e0 = kronrod15(f, a, b);
    panels.push_back({a, b, e0.integral, e0.error, 0});
    double total = e0.integral, total_err = e0.error;
    while (panels.size() < panel_budget) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
        if (total_err <= tol) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        if (panels[worst].depth >= spec.max_subdivisions) break;
        Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        auto left = kronrod15(f, p.a, mid);
        auto right = kronrod15(f, mid, p.b);
        total += left.integral + right.integral - p.integral;
        total_err += left.error + right.error - p.error;
        panels[worst] = {p.a, mid, left.integral, left.error, p.depth + 1};
        panels.push_back({mid, p.b, right.integral, right.error, p.depth + 1});
    }
    total = 0;
    total_err = 0;
    for (const auto& p : panels) {
        total += p.integral;
        total_err += p.error;
    }
    IntegralResult r;
    r.value = total;
    r.err_estimate = total_err;
    r.converged = total_err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    return r;
}

}  // namespace detail

// Integral of f over [a, b]; pass b = +infinity for a half line, which is
// mapped once through x = a + u/(1-u). An endpoint_power_hint p warps the
// left endpoint by x = a + t^(1/(1+p)) so that x^p singularities vanish.
inline IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                                   const QuadratureSpec& spec = {}) {
    spec.validate();
    const std::size_t budget = 256u * static_cast<std::size_t>(spec.max_subdivisions);
    const bool infinite = std::isinf(b);
    if (!infinite && !(b > a)) throw std::invalid_argument("integrate_1d: requires b > a");

    auto hinted = [&](double lo, double hi) -> IntegralResult {
        if (spec.endpoint_power_hint && *spec.endpoint_power_hint != 0.0) {
            const double p = *spec.endpoint_power_hint;
            const double q = 1.0 / (1.0 + p);
            const double tmax = std::pow(hi - lo, 1.0 + p);
            auto g = [&](double t) {
                const double x = lo + std::pow(t, q);
                return f(x) * q * std::pow(t, q - 1.0);
            };
            return detail::adapt_finite(g, 0.0, tmax, spec, budget);
        }
        return detail::adapt_finite(f, lo, hi, spec, budget);
    };

    if (!infinite) return hinted(a, b);

    // Split [a, a+1] (carries any endpoint hint) from the transformed tail.
    IntegralResult head = hinted(a, a + 1.0);
    auto tail_f = [&](double u) {
        const double w = 1.0 - u;
        return f(a + 1.0 + u / w) / (w * w);
    };
    IntegralResult tail = detail::adapt_finite(tail_f, 0.0, 1.0, spec, budget);
    IntegralResult r;
    r.value = head.value + tail.value;
    r.err_estimate = head.err_estimate + tail.err_estimate;
    r.converged = r.err_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(r.value));
    return r;
}

struct Rect {
    double x_lo, x_hi;  // inner axis; x_hi may be +infinity
    double y_lo, y_hi;  // outer axis, finite
};

// Tensor 2-D integral: adaptive outer loop over y, integrate_1d in x per
// y node. The endpoint hint of `spec` applies to the inner x axis.
inline IntegralResult integrate_2d(const std::function<double(double, double)>& f,
                                   const Rect& rect, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(rect.y_hi > rect.y_lo)) throw std::invalid_argument("integrate_2d: empty y range");
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 0.05;
    inner.rel_tol = std::max(spec.rel_tol * 0.05, 1e-14);
    inner.max_subdivisions = std::max(6, spec.max_subdivisions - 4);
    double worst_inner = 0.0;
    bool inner_ok = true;
    auto outer_f = [&](double y) {
        auto slice = integrate_1d([&](double x) { return f(x, y); }, rect.x_lo, rect.x_hi, inner);
        worst_inner = std::max(worst_inner, slice.err_estimate);
        inner_ok = inner_ok && slice.converged;
        return slice.value;
    };
    QuadratureSpec outer = spec;
    outer.endpoint_power_hint.reset();
    IntegralResult r = detail::adapt_finite(outer_f, rect.y_lo, rect.y_hi, outer,
                                            256u * static_cast<std::size_t>(outer.max_subdivisions));
    r.err_estimate += worst_inner * (rect.y_hi - rect.y_lo);
    r.converged = inner_ok &&
                  r.err_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(r.value));
    return r;
}

// Integral of g(x) * cos(x + phase) over [x0, infinity) for g smooth with an
// eventually monotone, integrable envelope. Half-period panels accelerated by
// repeated averaging of the partial sums (Euler transformation).
inline IntegralResult integrate_cosine_tail(const std::function<double(double)>& g, double x0,
                                            double phase = 0.0, double tol = 1e-12,
                                            int max_half_periods = 400) {
    const double pi = 3.14159265358979323846;
    // Start panels on a zero of cos so signs alternate cleanly.
    double first = (std::floor((x0 + phase) / pi - 0.5) + 1.5) * pi - phase;
    if (first <= x0) first += pi;
    auto cospart = [&](double x) { return g(x) * std::cos(x + phase); };
    QuadratureSpec panel_spec;
    panel_spec.abs_tol = tol * 1e-2;
    panel_spec.rel_tol = 1e-12;
    panel_spec.max_subdivisions = 8;
    IntegralResult head = detail::adapt_finite(cospart, x0, first, panel_spec, 64);

    std::vector<double> partial;  // partial sums of the alternating panel series
    double run = 0.0;
    double prev_extrap = std::numeric_limits<double>::quiet_NaN();
    double extrap = 0.0, spread = std::numeric_limits<double>::infinity();
    for (int j = 0; j < max_half_periods; ++j) {
        const double a = first + j * pi;
        run += detail::kronrod15(cospart, a, a + pi).integral;
        partial.push_back(run);
        if (partial.size() >= 4) {
            std::vector<double> row = partial;
            while (row.size() > 1) {
                for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
                row.pop_back();
            }
            extrap = row[0];
            if (!std::isnan(prev_extrap)) {
                spread = std::fabs(extrap - prev_extrap);
                if (spread < tol) break;
            }
            prev_extrap = extrap;
        }
    }
    IntegralResult r;
    r.value = head.value + extrap;
    r.err_estimate = head.err_estimate + (std::isinf(spread) ? std::fabs(extrap) : spread);
    r.converged = r.err_estimate <= std::max(tol, 1e-12 * std::fabs(r.value));
    return r;
}

}  // namespace flowlab
