// Compares simulated mean widths against n/sqrt(2 pi sigma^2 L_n) for a few
// families at desk scale.

#include <cstdio>

#include "logtree/asympt.hpp"
#include "logtree/montecarlo.hpp"

int main() {
    using namespace logtree;
    const char* models[] = {"recursive", "port", "quad:d=2", "mary:m=3,t=0", "grid:m=3,d=2"};
    const long n = 100000;
    std::printf("%-14s %12s %12s %8s\n", "model", "mean W_n", "predicted", "ratio");
    for (const char* ms : models) {
        const auto model = parse_model(ms);
        mc::SimOptions opt;
        opt.n = n;
        opt.reps = 100;
        const auto s = mc::simulate(model, opt);
        const double pred =
            asympt::expected_width_prediction(n, asympt::model_constants(model));
        std::printf("%-14s %12.1f %12.1f %8.4f\n", ms, s.mean_width(), pred,
                    s.mean_width() / pred);
    }
    return 0;
}
