#include <catch2/catch_amalgamated.hpp>

#include "logtree/asympt.hpp"
#include "logtree/exact.hpp"

using namespace logtree;
using namespace logtree::asympt;

TEST_CASE("closed-form constants per family") {
    auto c = model_constants(TreeModel::recursive());
    CHECK(c.v == 1.0);
    CHECK(c.sigma2 == 1.0);

    c = model_constants(TreeModel::port());
    CHECK(c.v == 0.5);
    CHECK(c.sigma2 == 0.5);

    c = model_constants(TreeModel::quad(2));
    CHECK(c.v == 1.0);
    CHECK(c.sigma2 == 0.5);

    c = model_constants(TreeModel::mary(2, 1));
    CHECK(c.v_exact == Rat(12, 7));
    CHECK(c.sigma2_exact == Rat(300, 343));

    const auto g = model_constants(TreeModel::grid(2, 3));
    const auto q = model_constants(TreeModel::quad(3));
    CHECK(g.v_exact == Rat(2, 3));
    CHECK(g.sigma2_exact == Rat(2, 9));
    CHECK(g.v == q.v);
    CHECK(g.sigma2 == q.sigma2);

    c = model_constants(TreeModel::increasing({1, 0, 0, 1}));
    CHECK(c.v_exact == Rat(3, 2));
    CHECK(c.sigma2_exact == Rat(3, 2));

    CHECK_FALSE(model_constants(TreeModel::mobile()).width_regular);
}

TEST_CASE("implicit solves match harmonic closed forms to 1e-12") {
    for (int m = 2; m <= 10; ++m)
        for (int d = 1; d <= 4; ++d) {
            const auto model = TreeModel::grid(m, d);
            const auto closed = model_constants(model);
            const auto imp = model_constants_implicit(model);
            CHECK(std::abs(imp.f1 - 1.0) < 1e-12);
            CHECK(std::abs(imp.v - closed.v) < 1e-12);
            CHECK(std::abs(imp.sigma2 - closed.sigma2) < 1e-12);
        }
    for (int m = 2; m <= 10; ++m)
        for (int t = 0; t <= 5; ++t) {
            const auto model = TreeModel::mary(m, t);
            const auto closed = model_constants(model);
            const auto imp = model_constants_implicit(model);
            CHECK(std::abs(imp.v - closed.v) < 1e-12);
            CHECK(std::abs(imp.sigma2 - closed.sigma2) < 1e-12);
        }
}

TEST_CASE("gaussian profile") {
    const auto c = model_constants(TreeModel::recursive());
    const double n = 1e4;
    const double L = std::log(n);
    // peak value at Delta = 0
    CHECK(gaussian_profile(n, c.v * L, c) ==
          Catch::Approx(n / std::sqrt(2 * kPi * c.sigma2 * L)));
    // symmetric in Delta
    CHECK(gaussian_profile(n, c.v * L + 2.5, c) ==
          Catch::Approx(gaussian_profile(n, c.v * L - 2.5, c)));
    // ratio to the exact Stirling row near the peak
    const auto row = exact::expected_profile_stirling<double>(static_cast<long>(n), 40);
    const long k = std::lround(L);
    const double ratio = gaussian_profile(n, static_cast<double>(k), c) / row[k];
    CHECK(ratio > 0.85);
    CHECK(ratio < 1.15);
    CHECK_THROWS(gaussian_profile(100, 1, model_constants(TreeModel::mobile())));
}

TEST_CASE("gaussian profile sums to n within 1%") {
    for (const auto& model : {TreeModel::recursive(), TreeModel::quad(2)}) {
        const auto c = model_constants(model);
        for (double n : {1e4, 1e6}) {
            const double L = std::max(std::log(n), 1.0);
            const double sd = std::sqrt(c.sigma2 * L);
            double sum = 0;
            for (long k = static_cast<long>(c.v * L - 6 * sd); k <= c.v * L + 6 * sd; ++k)
                if (k >= 0) sum += gaussian_profile(n, static_cast<double>(k), c);
            CHECK(std::abs(sum / n - 1.0) < 0.01);
        }
    }
}

TEST_CASE("expected width prediction") {
    const auto c = model_constants(TreeModel::recursive());
    CHECK(expected_width_prediction(std::exp(1.0), c) ==
          Catch::Approx(std::exp(1.0) / std::sqrt(2 * kPi)));
    CHECK(expected_width_prediction(1e6, c) == Catch::Approx(107331.35).epsilon(1e-4));
    const auto p = model_constants(TreeModel::port());
    CHECK(expected_width_prediction(1e6, p) ==
          Catch::Approx(1e6 / std::sqrt(kPi * std::log(1e6))).epsilon(1e-12));
}

TEST_CASE("mode prediction examples") {
    auto p = mode_prediction(1e7);
    CHECK(p.selector == -1);
    CHECK(p.width_level == 15);
    CHECK(p.k_hat == 15);

    p = mode_prediction(404960);
    CHECK(p.frac > 1 - kEulerGamma);
    CHECK(p.selector == 0);
    CHECK(p.width_level == 12);
    CHECK(p.k_hat == 12);

    // the two parabolas intersect exactly at x = 1 - gamma
    CHECK(p_ell(-1, 1 - kEulerGamma) == Catch::Approx(p_ell(0, 1 - kEulerGamma)));
}

TEST_CASE("selector argmax over all integer offsets lands in {-1,0}") {
    for (int i = 0; i <= 10000; ++i) {
        const double x = i / 10000.0;
        int best = -5;
        double bestv = -1e300;
        for (int l = -4; l <= 4; ++l)
            if (p_ell(l, x) > bestv) {
                bestv = p_ell(l, x);
                best = l;
            }
        CHECK((best == -1 || best == 0));
        const int expect = x <= 1 - kEulerGamma ? -1 : 0;
        if (std::abs(x - (1 - kEulerGamma)) > 1e-9) CHECK(best == expect);
    }
}

TEST_CASE("width regularity report") {
    const auto r = width_regularity_report(TreeModel::recursive(), 1e6);
    CHECK(r.width_regular);
    CHECK(r.expected_width == Catch::Approx(107331.35).epsilon(1e-4));
    CHECK(r.mode_center == Catch::Approx(std::log(1e6)));

    const auto m = width_regularity_report(TreeModel::mobile(), 1e6);
    CHECK_FALSE(m.width_regular);
    CHECK(m.expected_width ==
          Catch::Approx(1e6 / std::sqrt(2 * kPi * std::log(std::log(1e6)))));

    const auto a = width_regularity_report(TreeModel::grid(2, 2), 12345);
    const auto b = width_regularity_report(TreeModel::quad(2), 12345);
    CHECK(a.expected_width == b.expected_width);
    CHECK(a.mode_center == b.mode_center);
}
