#include <catch2/catch_amalgamated.hpp>

#include "logtree/exact.hpp"
#include "logtree/io.hpp"
#include "logtree/montecarlo.hpp"

using namespace logtree;

TEST_CASE("summaries are bit-identical across thread and block counts") {
    mc::SimOptions base;
    base.n = 4000;
    base.reps = 133;
    base.seed = 2024;
    base.hist_levels = {5, 6, 7};

    auto opt1 = base;
    opt1.threads = 1;
    auto opt4 = base;
    opt4.threads = 4;
    auto opt_blocks = base;
    opt_blocks.threads = 3;
    opt_blocks.block = 7;

    for (const auto& model : {TreeModel::recursive(), TreeModel::grid(2, 2)}) {
        const auto a = io::summary_to_json(mc::simulate(model, opt1)).dump();
        const auto b = io::summary_to_json(mc::simulate(model, opt4)).dump();
        const auto c = io::summary_to_json(mc::simulate(model, opt_blocks)).dump();
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("degenerate and tiny cases") {
    mc::SimOptions opt;
    opt.n = 1;
    opt.reps = 50;
    const auto s = mc::simulate(TreeModel::recursive(), opt);
    CHECK(s.width_hist.at(1) == 50);
    CHECK(s.mode_hist.at(0) == 50);

    mc::SimOptions bad;
    bad.reps = 0;
    CHECK_THROWS(mc::simulate(TreeModel::recursive(), bad));

    mc::SimOptions big;
    big.n = 1000000000;
    big.reps = 100;
    CHECK_THROWS(mc::simulate(TreeModel::recursive(), big));  // budget
}

TEST_CASE("width statistics at n=3 match the two-outcome law") {
    mc::SimOptions opt;
    opt.n = 3;
    opt.reps = 100000;
    opt.seed = 5;
    const auto s = mc::simulate(TreeModel::recursive(), opt);
    // widths 1 and 2 equally likely; SE of the mean = 0.5/sqrt(reps)
    const auto est = mc::hist_moments(s.width_hist, s.reps);
    CHECK(std::abs(est.mean - 1.5) <= 4 * 0.5 / std::sqrt(100000.0));

    const auto q = mc::simulate(TreeModel::quad(1), opt);
    const double p2 = static_cast<double>(q.width_hist.at(2)) / q.reps;
    const double se = std::sqrt(2.0 / 9.0 / 100000.0);
    CHECK(std::abs(p2 - 1.0 / 3.0) <= 4 * se);
}

TEST_CASE("hist moments and jackknife on a known two-point sample") {
    mc::Hist h{{1, 1}, {3, 1}};
    const auto est = mc::hist_moments(h, 2);
    CHECK(est.mean == Catch::Approx(2.0));
    CHECK(est.var == Catch::Approx(2.0));
    CHECK(est.se_mean == Catch::Approx(1.0));  // = sd/sqrt(2)
}

TEST_CASE("tv distance basics") {
    mc::Hist a{{0, 50}, {1, 50}};
    mc::Hist b{{0, 50}, {1, 50}};
    CHECK(mc::tv_distance(a, b, -10, 10) == Catch::Approx(0.0));
    mc::Hist c{{2, 100}};
    CHECK(mc::tv_distance(a, c, -10, 10) == Catch::Approx(1.0));
    mc::Hist d{{0, 100}};
    CHECK(mc::tv_distance(a, d, -10, 10) == Catch::Approx(0.5));
}

TEST_CASE("simulated profile distribution approaches enumeration in TV") {
    const long n = 6;
    const auto dist = exact::enumerate_exact(TreeModel::recursive(), n);
    auto tv_at = [&](long reps) {
        mc::SimOptions opt;
        opt.n = n;
        opt.reps = reps;
        opt.seed = 99;
        opt.collect_profile_hist = true;
        const auto s = mc::simulate(TreeModel::recursive(), opt);
        double tv = 0;
        for (const auto& [p, w] : dist) {
            std::vector<std::uint32_t> key(p.begin(), p.end());
            const auto it = s.profile_hist.find(key);
            const double emp =
                it == s.profile_hist.end() ? 0.0 : static_cast<double>(it->second) / reps;
            tv += std::abs(emp - to_double(w));
        }
        return tv / 2;
    };
    const double tv4 = tv_at(10000);
    const double tv6 = tv_at(1000000);
    CHECK(tv6 < tv4);
}

TEST_CASE("profile moment gate at enumeration scale and DP scale") {
    mc::GateConfig cfg;
    cfg.seed = 31;
    auto g8 = mc::profile_moment_gate(TreeModel::recursive(), 8, 60000, 4, cfg);
    INFO(g8.detail);
    CHECK(g8.pass);
    auto g500 = mc::profile_moment_gate(TreeModel::recursive(), 500, 4000, 2, cfg);
    INFO(g500.detail);
    CHECK(g500.pass);
    CHECK_THROWS(mc::profile_moment_gate(TreeModel::quad(2), 100, 100, 2, cfg));
}

TEST_CASE("gates at reduced desk scale") {
    mc::GateConfig cfg;
    cfg.seed = 1729;
    cfg.width_n = 30000;
    cfg.width_n_small = 1000;
    cfg.width_reps = 150;
    cfg.var_n_list = {1000, 5000, 30000};
    cfg.var_reps = 200;
    cfg.tail_n = 30000;
    cfg.tail_reps = 200;

    const auto w = mc::width_gate(TreeModel::recursive(), cfg);
    INFO(w.detail);
    CHECK(w.pass);

    const auto v = mc::variance_scaling_gate(TreeModel::recursive(), cfg);
    INFO(v.detail);
    CHECK(v.pass);

    const auto t = mc::mode_tail_gate(TreeModel::recursive(), cfg);
    INFO(t.detail);
    CHECK(t.pass);

    CHECK_THROWS(mc::width_gate(TreeModel::mobile(), cfg));
}

TEST_CASE("figure1 refuses too-few replications") {
    mc::GateConfig cfg;
    CHECK_THROWS(mc::figure1_experiment(1000, 50, cfg));
}

TEST_CASE("figure1 reports a closest level with sane distances") {
    mc::GateConfig cfg;
    cfg.seed = 8;
    const auto r = mc::figure1_experiment(20000, 200, cfg);
    CHECK(r.base_level == 9);  // floor(log 20000) = 9
    for (double tv : r.tv) {
        CHECK(tv >= 0.0);
        CHECK(tv <= 1.0);
    }
    const double best = *std::min_element(r.tv.begin(), r.tv.end());
    CHECK(best == r.tv[r.closest_offset + 1]);
}

TEST_CASE("convergence experiment at reduced scale") {
    mc::GateConfig cfg;
    cfg.seed = 1729;
    cfg.conv_ell_max = 140;  // n up to ~ 1.4e5
    cfg.conv_band_hi = 1.15;  // Theta(1/L_n) bias is still ~8% here
    const auto r = mc::convergence_experiment(TreeModel::recursive(), cfg);
    INFO("final=" << r.final_ratio << " osc " << r.osc_first << " -> " << r.osc_last);
    CHECK(r.pass_band);
    CHECK(r.pass_shrink);
    for (size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i].n > r.points[i - 1].n);
    CHECK_THROWS(mc::convergence_experiment(TreeModel::mobile(), cfg));
}
