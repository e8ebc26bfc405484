// Spectrum of a binomial cascade, printed next to its closed form.

#include <cstdio>

#include "mfdma/mfdma.hpp"

int main() {
    using namespace mfdma;

    const auto series = pmodel_1d({.p1 = 0.3, .depth = 14});

    AnalysisConfig cfg;
    cfg.theta = ThetaPosition::backward();
    cfg.qs = QGrid::range(-4.0, 4.0, 1.0);
    cfg.scales = ScaleGrid::dyadic(8, static_cast<int>(series.size() / 8));

    const auto result = analyze(series, cfg);
    const auto oracle = AnalyticOracle::binomial(0.3);

    std::printf("%6s %10s %10s %10s %10s\n", "q", "tau_trad", "tau_dir", "tau_exact", "alpha_dir");
    for (std::size_t i = 0; i < cfg.qs.size(); ++i) {
        const double q = cfg.qs[i];
        std::printf("%6.2f %10.4f %10.4f %10.4f %10.4f\n", q, result.traditional->rows[i].tau,
                    result.direct->rows[i].tau, oracle.tau(q), result.direct->rows[i].alpha);
    }
    std::printf("alpha width (direct): %.4f\n", result.direct->alpha_width());
}
