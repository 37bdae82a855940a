// Bring-up harness for the feller module.
#include <cstdio>

#include "flowlab/feller.hpp"

using namespace flowlab;
using namespace flowlab::feller;

static void run_sphere(int d, double alpha, double eta, const char* expect) {
    SphereParams p;
    p.d = d;
    p.alpha = alpha;
    p.b = eta;
    p.a = 1.0 - eta;
    auto t0 = std::chrono::steady_clock::now();
    auto nc = classify_regime_numeric(p);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf(
        "sphere d=%d a=%.2f eta=%.2f -> %-26s (expect %-26s) mu_fit=%.4f mu=%.4f "
        "[s'=%.3f g=%.3f e=%.3f c=%.3f] %.2fs\n",
        d, alpha, eta, to_string(nc.label), expect, nc.report.mu,
        mu_exponent(d, alpha, eta), nc.report.scale_density_fit.exponent,
        nc.report.speed_density_fit.exponent, nc.report.entrance_fit.exponent,
        nc.report.closed_fit.exponent, dt);
}

static void run_euclid(int d, double alpha, double eta, const char* expect) {
    EuclidParams p;
    p.d = d;
    p.alpha = alpha;
    p.b = eta;
    p.a = 1.0 - eta;
    p.mass = 1.0;
    auto t0 = std::chrono::steady_clock::now();
    auto nc = classify_regime_numeric(p);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf(
        "euclid d=%d a=%.2f eta=%.2f -> %-26s (expect %-26s) mu_fit=%.4f mu=%.4f far_exp=%.3f "
        "transient=%d %.2fs\n",
        d, alpha, eta, to_string(nc.label), expect, nc.report.mu,
        mu_exponent(d, alpha, eta), nc.far.fitted_exponent, (int)nc.far.transient_to_infinity,
        dt);
}

int main() {
    // analytic sanity
    std::printf("analytic (2,1.5,.05) = %s\n",
                to_string(classify_regime_analytic(2, 1.5, 0.05)));
    std::printf("analytic (4,1.0,.5)  = %s\n", to_string(classify_regime_analytic(4, 1.0, 0.5)));
    std::printf("analytic (2,2.5,.3)  = %s\n", to_string(classify_regime_analytic(2, 2.5, 0.3)));
    std::printf("analytic (3,1.9,.05) = %s\n", to_string(classify_regime_analytic(3, 1.9, 0.05)));

    run_sphere(2, 1.5, 0.05, "CoalescentFlow");
    run_sphere(3, 1.5, 0.5, "DiffusiveWithoutHitting");
    run_sphere(2, 1.0, 0.2, "DiffusiveWithHitting");
    run_euclid(2, 1.5, 0.3, "DiffusiveWithHitting");
    run_euclid(3, 1.5, 0.05, "CoalescentFlow");
    run_euclid(2, 1.2, 0.8, "DiffusiveWithoutHitting");
    run_euclid(3, 1.0, 0.9, "DiffusiveWithoutHitting");

    // synthetic plumbing: sigma^2 = 1, drift = 0 -> s(x) = x - x0
    CoefficientPair unit;
    unit.lo = 0.0;
    unit.hi = std::numeric_limits<double>::infinity();
    unit.sigma2 = [](double) { return 1.0; };
    unit.drift = [](double) { return 0.0; };
    std::printf("linear scale: s(0.7; x0=0.3) = %.8f (0.4)\n",
                scale_function(unit, 0.3, 0.7));
    std::printf("linear scale: s(0.1; x0=0.3) = %.8f (-0.2)\n",
                scale_function(unit, 0.3, 0.1));
    return 0;
}
