// Temporary bring-up harness for the euclid module.
#include <cstdio>
#include <cmath>

#include "flowlab/euclid_cov.hpp"

using namespace flowlab;

int main() {
    {
        EuclidParams p{2, 2.0, 1.0, 0.0, 1.0};
        auto st = euclid::spectral_total(p);
        std::printf("F(R+) d=2 a=2 m=1: %.12f (0.5) B=%.12f\n", st.f_total, st.big_b);
    }
    EuclidParams p{2, 1.0, 1.0, 0.0, 1.0};
    auto st = euclid::spectral_total(p);
    std::printf("F=%.10f B=%.10f\n", st.f_total, st.big_b);

    // correlators at r=0 equal B; r->inf -> 0
    auto c0 = euclid::correlators(p, 0.0);
    std::printf("BL(0)=%.10f BN(0)=%.10f B=%.10f\n", c0.b_l, c0.b_n, st.big_b);
    for (double r : {0.1, 1.0, 10.0, 1000.0}) {
        auto c = euclid::correlators(p, r);
        std::printf("r=%8.1f BL=%.8f BN=%.8f\n", r, c.b_l, c.b_n);
    }

    // small-r law and mu ratio
    auto ac = euclid::alpha_constants(p.alpha, p.d);
    std::printf("a1=%.10f a2=%.10f a3=%.10f (a2/a1=%.6f expect %.6f)\n", ac.a1, ac.a2, ac.a3,
                ac.a2 / ac.a1, (p.alpha + 1) / (p.d + p.alpha));
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
        auto d = euclid::correlator_deficits(p, r, 1e-8, false);
        const double expect_s2 =
            (p.a + p.b) * ac.a1 / (p.d + p.alpha) * (p.alpha + 1 - p.alpha * p.eta());
        std::printf("r=%.0e  sigma2/r^a=%.8f (expect %.8f)  D0/r^a=%.8f (a1=%.8f)\n", r,
                    d.sigma2 / std::pow(r, p.alpha), expect_s2,
                    (d.sigma2 * 0 + (d.sigma2 + 0)) / std::pow(r, p.alpha), ac.a1);
    }
    // D0 = du2 + dperp via exact path (dual-path alpha1 check)
    for (double r : {1e-2, 1e-3}) {
        auto w = euclid::detail::deficit_integrals(p, r, 1e-9, true);
        std::printf("r=%.0e  (du2+dperp)/r^a = %.8f vs a1 = %.8f\n", r,
                    (w.du2 + w.dperp) / std::pow(r, p.alpha), ac.a1);
    }
    // mu ratio
    EuclidParams p2{3, 1.4, 0.4, 0.6, 1.0};
    const double mu = (p2.d - 1 + p2.alpha * p2.eta()) / (p2.alpha + 1 - p2.alpha * p2.eta());
    auto cf = euclid::distance_coefficients(p2);
    for (double r : {1e-3, 1e-4}) {
        std::printf("r=%.0e  r*b/s2 = %.6f vs mu = %.6f\n", r,
                    r * cf.drift(r) / cf.sigma2(r), mu);
    }
    // fast table vs direct
    auto fast = euclid::distance_coefficients_fast(p2);
    for (double r : {1e-4, 0.03, 1.0, 50.0}) {
        std::printf("r=%-8.2g s2 direct=%.8e fast=%.8e  b direct=%.8e fast=%.8e\n", r,
                    cf.sigma2(r), fast.sigma2(r), cf.drift(r), fast.drift(r));
    }
    return 0;
}
