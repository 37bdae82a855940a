#pragma once

// Monte-Carlo integration of the two-point distance diffusion. The default
// scheme is Euler-Maruyama on the squared process x = psi^2, whose
// coefficients vanish at 0:
//   x_{n+1} = x_n + bt(x_n) dt + sqrt(2) st(x_n) sqrt(dt) xi_n,
//   st^2(x) = 4 x sigma^2(sqrt x),  bt(x) = 2 sigma^2(sqrt x) + 2 sqrt(x) b(sqrt x).
// Paths run on counter-based per-path streams and aggregate through
// index-addressed slots, so results are bit-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "flowlab/feller.hpp"
#include "flowlab/params.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/util.hpp"

namespace flowlab::sim {

enum class Scheme { SquaredProcess, DirectReflected };

// What to do when the path reaches the hit_eps shell around 0: freeze (exit
// regime), reflect (regular regime), or record the event and keep going
// (entrance regime, where hits are scheme artifacts).
enum class BoundaryPolicy { Absorb, Reflect, RecordOnly };

struct SimConfig {
    double dt = 1e-3;
    double T = 1.0;
    int n_paths = 1000;
    std::uint64_t seed = 1;
    double hit_eps = 0.0;  // 0: defaults to 1e-4 * domain scale
    double phi0 = 0.1;
    Scheme scheme = Scheme::SquaredProcess;
    BoundaryPolicy boundary = BoundaryPolicy::Absorb;

    void validate() const {
        if (!(dt > 0) || !(T > 0) || dt > T) throw std::invalid_argument("SimConfig: 0 < dt <= T");
        if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths >= 1");
        if (!(phi0 > 0)) throw std::invalid_argument("SimConfig: phi0 > 0");
        if (hit_eps < 0 || (hit_eps > 0 && hit_eps >= phi0))
            throw std::invalid_argument("SimConfig: hit_eps < phi0");
    }
};

struct SimResult {
    double absorbed_fraction = 0.0;
    std::vector<double> absorption_times;  // first passage below hit_eps, per hit path
    std::vector<double> terminal_values;   // final psi of paths that never hit
    std::vector<double> min_values;        // per-path minimum of psi
    int n_paths = 0;
    int discarded = 0;
    long negativity_clamps = 0;
    long cap_events = 0;
    double hit_eps = 0.0;
};

namespace detail {

struct PathOutcome {
    bool hit = false;
    bool discarded = false;
    double hit_time = 0.0;
    double terminal = 0.0;
    double min_value = 0.0;
    long clamps = 0;
    long caps = 0;
};

}  // namespace detail

inline SimResult simulate(const CoefficientPair& coeffs, Geometry geometry,
                          const SimConfig& cfg) {
    cfg.validate();
    const bool sphere = geometry == Geometry::Sphere;
    const double domain_hi = sphere ? kPi : std::numeric_limits<double>::infinity();
    if (!(cfg.phi0 < domain_hi)) throw std::invalid_argument("simulate: phi0 inside domain");
    const double hit_eps = cfg.hit_eps > 0 ? cfg.hit_eps : 1e-4 * (sphere ? kPi : 1.0);
    const double cap = sphere ? kPi * (1.0 - 1e-9) : std::numeric_limits<double>::infinity();
    const long n_steps = std::lround(std::ceil(cfg.T / cfg.dt));
    const double x_floor = 1e-8 * hit_eps * hit_eps;

    std::vector<detail::PathOutcome> out(cfg.n_paths);
    auto run_squared = [&](std::size_t ip) {
        RngStream rng(cfg.seed, ip);
        detail::PathOutcome& o = out[ip];
        double x = cfg.phi0 * cfg.phi0;
        const double hit2 = hit_eps * hit_eps;
        const double near2 = 100.0 * hit2;  // substep shell: psi < 10 hit_eps
        o.min_value = cfg.phi0;
        double t = 0.0;
        try {
            for (long n = 0; n < n_steps; ++n) {
                const int sub = (x < near2) ? 16 : 1;
                const double h = cfg.dt / sub;
                for (int k = 0; k < sub; ++k) {
                    const double psi = std::sqrt(std::max(x, x_floor));
                    const double s2 = coeffs.sigma2(psi);
                    const double b = coeffs.drift(psi);
                    const double bt = 2.0 * s2 + 2.0 * psi * b;
                    const double st = 2.0 * psi * std::sqrt(s2);
                    x += bt * h + 1.4142135623730951 * st * std::sqrt(h) * rng.normal();
                    if (x < 0.0) {
                        ++o.clamps;
                        x = (cfg.boundary == BoundaryPolicy::Absorb) ? 0.0 : -x;
                    }
                    if (x > cap * cap) {
                        ++o.caps;
                        x = cap * cap;
                    }
                    o.min_value = std::min(o.min_value, std::sqrt(x));
                    if (!o.hit && x <= hit2) {
                        o.hit = true;
                        o.hit_time = t + (k + 1.0) * h;
                        if (cfg.boundary == BoundaryPolicy::Absorb) {
                            o.terminal = std::sqrt(x);
                            return;
                        }
                    }
                }
                t += cfg.dt;
            }
            o.terminal = std::sqrt(x);
        } catch (const std::exception&) {
            o.discarded = true;
        }
    };

    auto run_direct = [&](std::size_t ip) {
        RngStream rng(cfg.seed, ip);
        detail::PathOutcome& o = out[ip];
        double psi = cfg.phi0;
        o.min_value = psi;
        double t = 0.0;
        try {
            for (long n = 0; n < n_steps; ++n) {
                const int sub = (psi < 10.0 * hit_eps) ? 16 : 1;
                const double h = cfg.dt / sub;
                for (int k = 0; k < sub; ++k) {
                    const double p = std::max(psi, 1e-4 * hit_eps);
                    psi += coeffs.drift(p) * h +
                           std::sqrt(2.0 * coeffs.sigma2(p) * h) * rng.normal();
                    if (psi < 0.0) {
                        ++o.clamps;
                        psi = (cfg.boundary == BoundaryPolicy::Absorb) ? 0.0 : -psi;
                    }
                    if (psi > cap) {
                        ++o.caps;
                        psi = 2.0 * cap - psi;
                    }
                    o.min_value = std::min(o.min_value, psi);
                    if (!o.hit && psi <= hit_eps) {
                        o.hit = true;
                        o.hit_time = t + (k + 1.0) * h;
                        if (cfg.boundary == BoundaryPolicy::Absorb) {
                            o.terminal = psi;
                            return;
                        }
                    }
                }
                t += cfg.dt;
            }
            o.terminal = psi;
        } catch (const std::exception&) {
            o.discarded = true;
        }
    };

    if (cfg.scheme == Scheme::SquaredProcess)
        parallel_for(cfg.n_paths, run_squared);
    else
        parallel_for(cfg.n_paths, run_direct);

    SimResult res;
    res.n_paths = cfg.n_paths;
    res.hit_eps = hit_eps;
    for (const auto& o : out) {
        if (o.discarded) {
            ++res.discarded;
            continue;
        }
        res.negativity_clamps += o.clamps;
        res.cap_events += o.caps;
        res.min_values.push_back(o.min_value);
        if (o.hit)
            res.absorption_times.push_back(o.hit_time);
        else
            res.terminal_values.push_back(o.terminal);
    }
    const int kept = cfg.n_paths - res.discarded;
    if (res.discarded > 0.01 * cfg.n_paths)
        throw std::runtime_error("simulate: more than 1% of paths discarded");
    res.absorbed_fraction =
        kept > 0 ? static_cast<double>(res.absorption_times.size()) / kept : 0.0;
    return res;
}

struct HittingComparison {
    double empirical = 0.0;  // exit-left frequency
    double analytic = 0.0;   // (s(r) - s(x)) / (s(r) - s(l))
    double censored_fraction = 0.0;
    int n_paths = 0;
};

// Two-sided exit probabilities against the scale function; the sharpest
// quantitative check of the coefficient/scale stack.
inline HittingComparison hitting_probability_vs_scale(const CoefficientPair& coeffs,
                                                      const SimConfig& cfg, double l, double r,
                                                      double x) {
    cfg.validate();
    if (!(coeffs.lo < l && l < x && x < r && (std::isinf(coeffs.hi) || r < coeffs.hi)))
        throw std::invalid_argument("hitting_probability_vs_scale: need lo < l < x < r < hi");
    const long max_steps = std::lround(std::ceil(10.0 * cfg.T / cfg.dt));
    const double near = l + 0.05 * (r - l);

    std::vector<int> outcome(cfg.n_paths, -1);  // 0 left, 1 right, -1 censored
    parallel_for(cfg.n_paths, [&](std::size_t ip) {
        RngStream rng(cfg.seed, ip);
        double psi = x;
        for (long n = 0; n < max_steps; ++n) {
            const int sub = (psi < near) ? 16 : 1;
            const double h = cfg.dt / sub;
            for (int k = 0; k < sub; ++k) {
                psi += coeffs.drift(psi) * h + std::sqrt(2.0 * coeffs.sigma2(psi) * h) * rng.normal();
                if (psi <= l) {
                    outcome[ip] = 0;
                    return;
                }
                if (psi >= r) {
                    outcome[ip] = 1;
                    return;
                }
            }
        }
    });

    HittingComparison out;
    out.n_paths = cfg.n_paths;
    int left = 0, done = 0;
    for (int oc : outcome) {
        if (oc >= 0) {
            ++done;
            if (oc == 0) ++left;
        }
    }
    out.censored_fraction = 1.0 - static_cast<double>(done) / cfg.n_paths;
    if (out.censored_fraction > 0.05)
        throw std::runtime_error("hitting_probability_vs_scale: more than 5% censored");
    out.empirical = done > 0 ? static_cast<double>(left) / done : 0.0;
    feller::ScaleFunction scale(coeffs, 0.9 * l, 1.1 * r, x);
    out.analytic = (scale(r) - scale(x)) / (scale(r) - scale(l));
    return out;
}

}  // namespace flowlab::sim
