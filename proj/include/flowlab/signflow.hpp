#pragma once

// The one-dimensional sign flow: exact statistical solution (reflected path
// with branch splitting), the heat semigroup on a grid, and the Wiener chaos
// recursion checked pathwise against the exact solution. The driving noise
// is one-dimensional; the derivation operator is D f = sgn(x) f' with
// sgn(0) = 1.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "flowlab/rng.hpp"
#include "flowlab/util.hpp"

namespace flowlab::signflow {

inline double sign_conv(double x) { return x >= 0.0 ? 1.0 : -1.0; }  // sgn(0) = 1

struct NoisePath {
    double dt = 0.0;
    std::vector<double> increments;  // i.i.d. N(0, dt)
    std::vector<double> cumulative;  // W(t_j), j = 0..steps

    static NoisePath make(double dt, long steps, std::uint64_t seed, std::uint64_t index = 0) {
        if (!(dt > 0) || steps < 1) throw std::invalid_argument("NoisePath: dt > 0, steps >= 1");
        NoisePath p;
        p.dt = dt;
        p.increments.resize(steps);
        p.cumulative.resize(steps + 1);
        RngStream rng(seed, index);
        const double sq = std::sqrt(dt);
        p.cumulative[0] = 0.0;
        for (long j = 0; j < steps; ++j) {
            p.increments[j] = sq * rng.normal();
            p.cumulative[j + 1] = p.cumulative[j] + p.increments[j];
        }
        return p;
    }

    long steps_for(double t) const {
        const long j = std::lround(t / dt);
        if (j < 0 || j > static_cast<long>(increments.size()))
            throw std::invalid_argument("NoisePath: t outside the path grid");
        if (std::fabs(j * dt - t) > 1e-9 * std::max(1.0, t))
            throw std::invalid_argument("NoisePath: t must lie on the path grid");
        return j;
    }
};

// Exact statistical solution of Prop-type: R = x + W_t + sgn(x) L_t with
// L_t the running supremum of -sgn(x)(x + W_s); the kernel splits into
// (delta_R + delta_-R)/2 once L > 0. L uses the discrete running extremum
// of the sampled path.
inline double exact_solution(const std::function<double(double)>& f, double x,
                             const NoisePath& path, double t) {
    const long J = path.steps_for(t);
    const double sgn = sign_conv(x);
    double L = 0.0;
    for (long j = 0; j <= J; ++j) L = std::max(L, -sgn * (x + path.cumulative[j]));
    const double R = x + path.cumulative[J] + sgn * L;
    if (L <= 0.0) return f(R);
    return 0.5 * (f(R) + f(-R));
}

struct Grid {
    double x_lo = 0.0;
    double h = 0.0;
    int n = 0;

    double x(int i) const { return x_lo + i * h; }
    // Symmetric grid containing 0 exactly.
    static Grid symmetric(double half_width, double h) {
        Grid g;
        const int half = static_cast<int>(std::ceil(half_width / h));
        g.h = h;
        g.n = 2 * half + 1;
        g.x_lo = -half * h;
        return g;
    }
    int index_of(double x) const {
        const int i = static_cast<int>(std::lround((x - x_lo) / h));
        if (i < 0 || i >= n || std::fabs(this->x(i) - x) > 1e-9)
            throw std::invalid_argument("Grid: x is not a grid node");
        return i;
    }
};

inline double grid_interp(const Grid& g, const std::vector<double>& v, double x) {
    const double s = (x - g.x_lo) / g.h;
    if (s <= 0.0 || s >= g.n - 1) return 0.0;  // zero padding outside
    const int i = static_cast<int>(s);
    const double w = s - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

namespace detail {

// Normalized Gaussian convolution taps for one heat step of variance tau.
inline std::vector<double> heat_taps(double tau, double h) {
    const double sigma = std::sqrt(tau);
    const int half = std::max(2, static_cast<int>(std::ceil(6.0 * sigma / h)));
    std::vector<double> taps(2 * half + 1);
    double sum = 0.0;
    for (int j = -half; j <= half; ++j) {
        const double v = std::exp(-0.5 * (j * h) * (j * h) / tau);
        taps[j + half] = v;
        sum += v;
    }
    for (auto& v : taps) v /= sum;
    return taps;
}

inline void convolve(const std::vector<double>& taps, const std::vector<double>& in,
                     std::vector<double>& out) {
    const int n = static_cast<int>(in.size());
    const int half = (static_cast<int>(taps.size()) - 1) / 2;
    out.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(-half, -i);
        const int j_hi = std::min(half, n - 1 - i);
        for (int j = j_lo; j <= j_hi; ++j) acc += taps[j + half] * in[i + j];
        out[i] = acc;
    }
}

// D = sgn(x) d/dx by central differences; the endpoints (zero-padded
// functions) get zero.
inline void apply_derivation(const Grid& g, const std::vector<double>& in,
                             std::vector<double>& out) {
    const int n = g.n;
    out.assign(n, 0.0);
    for (int i = 1; i + 1 < n; ++i)
        out[i] = sign_conv(g.x(i)) * (in[i + 1] - in[i - 1]) / (2.0 * g.h);
}

}  // namespace detail

struct HeatResult {
    std::vector<double> values;
    double leakage = 0.0;  // fraction of |f| mass lost past the grid ends
    bool flagged = false;
};

// P_t by Gaussian convolution (unit diffusion: kernel variance t), zero
// padded beyond the grid.
inline HeatResult heat_semigroup(const std::vector<double>& f, double t, const Grid& g,
                                 double leak_tol = 1e-6) {
    if (static_cast<int>(f.size()) != g.n) throw std::invalid_argument("heat_semigroup: size");
    if (!(t > 0)) throw std::invalid_argument("heat_semigroup: t > 0");
    HeatResult r;
    auto taps = detail::heat_taps(t, g.h);
    detail::convolve(taps, f, r.values);
    double in_mass = 0.0, out_mass = 0.0;
    for (int i = 0; i < g.n; ++i) {
        in_mass += std::fabs(f[i]);
        out_mass += std::fabs(r.values[i]);
    }
    r.leakage = in_mass > 0 ? std::max(0.0, 1.0 - out_mass / in_mass) : 0.0;
    r.flagged = r.leakage > leak_tol;
    return r;
}

// Closed form of P_t applied to exp(-(x-c)^2 / w).
inline double gaussian_heat_closed_form(double w, double c, double t, double x) {
    return std::sqrt(w / (w + 2.0 * t)) * std::exp(-(x - c) * (x - c) / (w + 2.0 * t));
}

struct ChaosState {
    Grid grid;
    double t = 0.0;
    std::vector<std::vector<double>> orders;  // S^0_t f .. S^N_t f on the grid
    std::vector<double> exact;                // exact solution, same path
};

// Chaos recursion evaluated by one backward sweep. With U^(m)_j the order-m
// tail sum propagated to time t_j,
//   U^(m)_j = P_dt U^(m)_{j+1} + dW_j D(P_dt U^(m-1)_{j+1}),
//   U^(0)_j = P_{t - t_j} f,  U^(m)_J = 0,
// the m-th chaos term is U^(m)_0 and S^N = P_t f + sum_m U^(m)_0. The left
// point (Ito) rule is forced by adaptedness; D acts on the smoothed
// functions only.
inline ChaosState chaos_recursion(const std::function<double(double)>& f, double t,
                                  const NoisePath& path, int N, const Grid& g) {
    if (N < 0 || N > 8) throw std::invalid_argument("chaos_recursion: 0 <= N <= 8");
    const long J = path.steps_for(t);
    ChaosState st;
    st.grid = g;
    st.t = t;
    std::vector<std::vector<double>> U(N + 1, std::vector<double>(g.n, 0.0));
    for (int i = 0; i < g.n; ++i) U[0][i] = f(g.x(i));
    auto taps = detail::heat_taps(path.dt, g.h);
    std::vector<double> smoothed(g.n), deriv(g.n), tmp(g.n);
    std::vector<std::vector<double>> V(N + 1, std::vector<double>(g.n, 0.0));
    for (long j = J - 1; j >= 0; --j) {
        for (int m = 0; m <= N; ++m) detail::convolve(taps, U[m], V[m]);
        const double dW = path.increments[j];
        U[0] = V[0];
        for (int m = 1; m <= N; ++m) {
            detail::apply_derivation(g, V[m - 1], deriv);
            for (int i = 0; i < g.n; ++i) U[m][i] = V[m][i] + dW * deriv[i];
        }
    }
    st.orders.assign(N + 1, std::vector<double>(g.n, 0.0));
    std::vector<double> acc = U[0];
    st.orders[0] = acc;
    for (int m = 1; m <= N; ++m) {
        for (int i = 0; i < g.n; ++i) acc[i] += U[m][i];
        st.orders[m] = acc;
    }
    st.exact.resize(g.n);
    for (int i = 0; i < g.n; ++i) st.exact[i] = exact_solution(f, g.x(i), path, t);
    return st;
}

// n-th chaos term by direct iterated summation (n <= 3); must agree with the
// recursion's increment S^n - S^(n-1) up to rounding.
inline std::vector<double> chaos_term_direct(const std::function<double(double)>& f, double t,
                                             const NoisePath& path, int n, const Grid& g) {
    if (n < 1 || n > 3) throw std::invalid_argument("chaos_term_direct: 1 <= n <= 3");
    const long J = path.steps_for(t);
    auto taps = detail::heat_taps(path.dt, g.h);
    // Backward heat flow H_j = P_{t-t_j} f.
    std::vector<std::vector<double>> H(J + 1, std::vector<double>(g.n));
    for (int i = 0; i < g.n; ++i) H[J][i] = f(g.x(i));
    for (long j = J - 1; j >= 0; --j) detail::convolve(taps, H[j + 1], H[j]);

    std::vector<double> deriv(g.n), tmp(g.n);
    auto propagate = [&](std::vector<double>& v, long steps) {
        for (long s = 0; s < steps; ++s) {
            detail::convolve(taps, v, tmp);
            v.swap(tmp);
        }
    };
    if (n == 1) {
        // Horner over the single jump index; left-point integrand at t_i is
        // D P_{t - t_i} f.
        std::vector<double> acc(g.n, 0.0);
        for (long i = J - 1; i >= 0; --i) {
            detail::apply_derivation(g, H[i], deriv);
            for (int k = 0; k < g.n; ++k) acc[k] += deriv[k] * path.increments[i];
            if (i > 0) propagate(acc, 1);
        }
        return acc;
    }
    if (n == 2) {
        // sum over i1 < i2 of P_{t_{i1}} D P_{t_{i2}-t_{i1}} D H_{i2} dW1 dW2:
        // bucket the inner propagation per i1, then Horner over i1.
        std::vector<std::vector<double>> bucket(J, std::vector<double>(g.n, 0.0));
        for (long i2 = 1; i2 < J; ++i2) {
            detail::apply_derivation(g, H[i2], deriv);
            std::vector<double> y = deriv;
            for (int k = 0; k < g.n; ++k) y[k] *= path.increments[i2];
            for (long i1 = i2 - 1; i1 >= 0; --i1) {
                propagate(y, 1);
                detail::apply_derivation(g, y, deriv);
                for (int k = 0; k < g.n; ++k)
                    bucket[i1][k] += deriv[k] * path.increments[i1];
            }
        }
        std::vector<double> acc(g.n, 0.0);
        for (long i1 = J - 1; i1 >= 0; --i1) {
            for (int k = 0; k < g.n; ++k) acc[k] += bucket[i1][k];
            if (i1 > 0) propagate(acc, 1);
        }
        return acc;
    }
    // n == 3: direct triple loop with the same bucketing, one level deeper.
    std::vector<std::vector<double>> bucket2(J, std::vector<double>(g.n, 0.0));
    for (long i3 = 2; i3 < J; ++i3) {
        detail::apply_derivation(g, H[i3], deriv);
        std::vector<double> y = deriv;
        for (int k = 0; k < g.n; ++k) y[k] *= path.increments[i3];
        for (long i2 = i3 - 1; i2 >= 1; --i2) {
            propagate(y, 1);
            detail::apply_derivation(g, y, deriv);
            for (int k = 0; k < g.n; ++k) bucket2[i2][k] += deriv[k] * path.increments[i2];
        }
    }
    std::vector<std::vector<double>> bucket1(J, std::vector<double>(g.n, 0.0));
    for (long i2 = 1; i2 < J; ++i2) {
        std::vector<double> y = bucket2[i2];
        for (long i1 = i2 - 1; i1 >= 0; --i1) {
            propagate(y, 1);
            detail::apply_derivation(g, y, deriv);
            for (int k = 0; k < g.n; ++k) bucket1[i1][k] += deriv[k] * path.increments[i1];
        }
    }
    std::vector<double> acc(g.n, 0.0);
    for (long i1 = J - 1; i1 >= 0; --i1) {
        for (int k = 0; k < g.n; ++k) acc[k] += bucket1[i1][k];
        if (i1 > 0) propagate(acc, 1);
    }
    return acc;
}

struct PathSummary {
    double w_t = 0.0;
    double min_w = 0.0;
    double max_w = 0.0;
};

// Monte-Carlo accumulators for the exact solution. When bridge_minmax is
// set, the per-step minimum and maximum are refined by exact Brownian-bridge
// sampling, which removes the O(sqrt(dt)) discrete-extremum bias (each is
// exact in law marginally; only one of the two enters any given x).
struct StatConfig {
    double dt = 1e-3;
    double t = 1.0;
    long n_paths = 10000;
    std::uint64_t seed = 1;
    bool bridge_minmax = true;
};

struct StatReport {
    Grid grid;
    long n_paths = 0;
    std::vector<double> mean_s;   // E^[S_t f](x)
    std::vector<double> se_mean;
    std::vector<double> mean_s2;  // E^[(S_t f)^2](x)
    std::vector<double> se_s2;
};

inline StatReport statistical_checks(const std::function<double(double)>& f, const Grid& g,
                                     const StatConfig& cfg) {
    const long steps = std::lround(cfg.t / cfg.dt);
    if (steps < 1) throw std::invalid_argument("statistical_checks: t/dt >= 1");
    StatReport rep;
    rep.grid = g;
    rep.n_paths = cfg.n_paths;
    std::vector<long double> s1(g.n, 0.0L), s2(g.n, 0.0L), s4(g.n, 0.0L);
    const double sq = std::sqrt(cfg.dt);
    for (long ip = 0; ip < cfg.n_paths; ++ip) {
        RngStream rng(cfg.seed, ip);
        double w = 0.0, wmin = 0.0, wmax = 0.0;
        for (long j = 0; j < steps; ++j) {
            const double dw = sq * rng.normal();
            const double w_next = w + dw;
            if (cfg.bridge_minmax) {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                const double disc_m =
                    std::sqrt(dw * dw - 2.0 * cfg.dt * std::log(u1));
                const double disc_M =
                    std::sqrt(dw * dw - 2.0 * cfg.dt * std::log(u2));
                wmin = std::min(wmin, w + 0.5 * (dw - disc_m));
                wmax = std::max(wmax, w + 0.5 * (dw + disc_M));
            } else {
                wmin = std::min(wmin, w_next);
                wmax = std::max(wmax, w_next);
            }
            w = w_next;
        }
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            const double sgn = sign_conv(x);
            const double L = std::max(0.0, sgn > 0 ? -(x + wmin) : (x + wmax));
            const double R = x + w + sgn * L;
            const double S = (L <= 0.0) ? f(R) : 0.5 * (f(R) + f(-R));
            s1[i] += S;
            s2[i] += S * S;
            s4[i] += S * S * S * S;
        }
    }
    rep.mean_s.resize(g.n);
    rep.se_mean.resize(g.n);
    rep.mean_s2.resize(g.n);
    rep.se_s2.resize(g.n);
    const double n = static_cast<double>(cfg.n_paths);
    for (int i = 0; i < g.n; ++i) {
        const double m1 = static_cast<double>(s1[i]) / n;
        const double m2 = static_cast<double>(s2[i]) / n;
        const double m4 = static_cast<double>(s4[i]) / n;
        rep.mean_s[i] = m1;
        rep.se_mean[i] = std::sqrt(std::max(0.0, m2 - m1 * m1) / n);
        rep.mean_s2[i] = m2;
        rep.se_s2[i] = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    }
    return rep;
}

}  // namespace flowlab::signflow
