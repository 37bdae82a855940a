// Bring-up: numeric vs analytic agreement sweep (acceptance criterion dry run).
#include <chrono>
#include <cstdio>

#include "flowlab/feller.hpp"

using namespace flowlab;
using namespace flowlab::feller;

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 10;
    auto t0 = std::chrono::steady_clock::now();
    for (int d : {2, 3, 4}) {
        int checked = 0, agree = 0, indet = 0, mislabeled = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double alpha = 0.1 + (1.95 - 0.1) * i / (n - 1);
                const double eta = static_cast<double>(j) / (n - 1);
                const double dist1 = std::fabs(eta - theta1(alpha, d));
                const double dist2 = std::fabs(eta - theta2(alpha, d));
                if (d <= 3 && (dist1 < 0.05 || dist2 < 0.05)) continue;
                ++checked;
                const auto expect = classify_regime_analytic(d, alpha, eta);
                SphereParams p;
                p.d = d;
                p.alpha = alpha;
                p.b = eta;
                p.a = 1.0 - eta;
                auto nc = classify_regime_numeric(p);
                if (nc.label == expect) {
                    ++agree;
                } else if (nc.label == RegimeLabel::ThresholdIndeterminate) {
                    ++indet;
                    std::printf("  indet d=%d alpha=%.3f eta=%.3f (expect %s) note=%s\n", d,
                                alpha, eta, to_string(expect), nc.report.note.c_str());
                } else {
                    ++mislabeled;
                    std::printf("  MISLABEL d=%d alpha=%.3f eta=%.3f got %s expect %s\n", d,
                                alpha, eta, to_string(nc.label), to_string(expect));
                }
            }
        }
        std::printf("d=%d: checked=%d agree=%d indet=%d mislabeled=%d (%.1f%%)\n", d, checked,
                    agree, indet, mislabeled, 100.0 * agree / checked);
    }
    std::printf("elapsed %.1f s\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return 0;
}
