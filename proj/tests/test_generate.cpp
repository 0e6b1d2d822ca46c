#include <catch2/catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include "logtree/exact.hpp"
#include "logtree/generate.hpp"
#include "logtree/montecarlo.hpp"

using namespace logtree;

TEST_CASE("profile_from_depths") {
    CHECK(gen::profile_from_depths({0}, 1).counts == std::vector<std::uint64_t>{1});
    CHECK(gen::profile_from_depths({0, 1, 1}, 3).counts == std::vector<std::uint64_t>{1, 2});
    CHECK(gen::profile_from_depths({0, 1, 2, 1}, 4).counts ==
          std::vector<std::uint64_t>{1, 2, 1});
}

TEST_CASE("determinism: same (model, n, seed) gives identical depth sequences") {
    for (const auto& m :
         {TreeModel::recursive(), TreeModel::port(), TreeModel::quad(2), TreeModel::mary(3, 1),
          TreeModel::grid(2, 2), TreeModel::mobile(), TreeModel::increasing({1, 2, 1})}) {
        gen::Generator g1(m), g2(m);
        std::vector<std::int32_t> a, b;
        RngStream r1(99, 5), r2(99, 5);
        g1.depths(200, r1, a);
        g2.depths(200, r2, b);
        CHECK(a == b);
        RngStream r3(99, 6);
        g1.depths(200, r3, a);
        CHECK(a != b);  // different stream index
    }
}

TEST_CASE("depth sequences are parent-consistent for sequential families") {
    gen::Generator g(TreeModel::port());
    std::vector<std::int32_t> d;
    RngStream rng(3, 0);
    g.depths(500, rng, d);
    CHECK(d[0] == 0);
    for (size_t i = 1; i < d.size(); ++i) {
        CHECK(d[i] >= 1);
        CHECK(d[i] < static_cast<std::int32_t>(i) + 1);
    }
}

namespace {

// empirical mean profile within tol_se standard errors of the enumeration
void check_against_enumeration(const TreeModel& model, long n, long reps, double tol_se) {
    mc::SimOptions opt;
    opt.n = n;
    opt.reps = reps;
    opt.seed = 20240801;
    const auto s = mc::simulate(model, opt);
    const auto mom = exact::dist_moments(exact::enumerate_exact(model, n), 2);
    for (size_t k = 0; k < mom.mu.size(); ++k) {
        const double exactv = to_double(mom.mu[k]);
        const double se = std::max(s.se_level(k), 1e-9);
        INFO(format_model(model) << " level " << k);
        CHECK(std::abs(s.mean_level(k) - exactv) <= tol_se * se);
    }
}

}  // namespace

TEST_CASE("empirical profile means match enumeration for every enumerable family") {
    check_against_enumeration(TreeModel::recursive(), 6, 100000, 4);
    check_against_enumeration(TreeModel::port(), 6, 100000, 4);
    check_against_enumeration(TreeModel::quad(1), 6, 100000, 4);
    check_against_enumeration(TreeModel::mary(2, 1), 7, 100000, 4);
    check_against_enumeration(TreeModel::mary(3, 0), 7, 100000, 4);
    check_against_enumeration(TreeModel::mobile(), 6, 100000, 4);
    check_against_enumeration(TreeModel::increasing({1, 2, 1}), 6, 100000, 4);
    check_against_enumeration(TreeModel::increasing({1, 0, 0, 1}), 7, 100000, 4);
}

TEST_CASE("continuous families match the exact mean tables") {
    // No finite enumeration for quad{d>=2}/grid{m>2}; compare to the DP.
    for (const auto& model : {TreeModel::quad(2), TreeModel::grid(3, 2)}) {
        const long n = 12;
        mc::SimOptions opt;
        opt.n = n;
        opt.reps = 200000;
        opt.seed = 7;
        const auto s = mc::simulate(model, opt);
        const auto dp = exact::expected_profile_dp<double>(model, n, 12);
        for (size_t k = 0; k < s.level_sum.size(); ++k) {
            const double se = std::max(s.se_level(k), 1e-9);
            INFO(format_model(model) << " level " << k);
            CHECK(std::abs(s.mean_level(k) - dp.mu[n][k]) <= 4.5 * se);
        }
    }
}

TEST_CASE("quad{1} first-subtree sizes are uniform (chi-square)") {
    const long n = 64;
    const long trees = 64000;
    gen::Generator g(TreeModel::quad(1));
    std::vector<long> counts(n, 0);
    for (long rep = 0; rep < trees; ++rep) {
        RngStream rng(555, rep);
        const auto cells = g.first_split_sizes(n, rng);
        counts[cells[0]]++;  // first-subtree size in {0..63}
    }
    const double expect = static_cast<double>(trees) / n;
    double chi2 = 0;
    for (long v : counts) chi2 += (v - expect) * (v - expect) / expect;
    boost::math::chi_squared dist(n - 1);
    const double p = 1 - boost::math::cdf(dist, chi2);
    CHECK(p > 1e-3);
}

TEST_CASE("grid{2,d} equals quad{d} in distribution (first split)") {
    // identical cell-occupancy law: compare mean first-cell counts
    const long n = 40, trees = 20000;
    gen::Generator gq(TreeModel::quad(2)), gg(TreeModel::grid(2, 2));
    double mq = 0, mg = 0;
    for (long rep = 0; rep < trees; ++rep) {
        RngStream r1(9, rep), r2(10, rep);
        mq += gq.first_split_sizes(n, r1)[0];
        mg += gg.first_split_sizes(n, r2)[0];
    }
    mq /= trees;
    mg /= trees;
    CHECK(mq == Catch::Approx((n - 1) / 4.0).margin(0.2));
    CHECK(mg == Catch::Approx((n - 1) / 4.0).margin(0.2));
}

TEST_CASE("default schedule is strictly increasing with positive spacing") {
    const auto sched = gen::default_schedule(190);
    CHECK(sched.front() >= 1);
    for (size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] > sched[i - 1]);
    CHECK(sched.back() > 900000);
    CHECK(sched.back() < 1100000);
}

TEST_CASE("grow_checkpoints: forced small-n widths and the one-step property") {
    const auto recs = gen::grow_checkpoints(TreeModel::recursive(), {1, 2, 3}, 11);
    REQUIRE(recs.size() == 3);
    CHECK(width_and_mode({recs[0].counts, 1}).width == 1);
    CHECK(width_and_mode({recs[1].counts, 2}).width == 1);
    const auto w3 = width_and_mode({recs[2].counts, 3}).width;
    CHECK((w3 == 1 || w3 == 2));
}

TEST_CASE("width changes by at most 1 per insertion for single-node families") {
    std::vector<long> dense;
    for (long n = 1; n <= 400; ++n) dense.push_back(n);
    for (const auto& model : {TreeModel::recursive(), TreeModel::port(), TreeModel::quad(2),
                              TreeModel::mary(2, 0), TreeModel::grid(2, 2)}) {
        REQUIRE(single_node_insertion(model));
        const auto recs = gen::grow_checkpoints(model, dense, 77);
        std::uint64_t prev = 0;
        for (const auto& r : recs) {
            const auto w = width_and_mode({r.counts, static_cast<std::uint64_t>(r.n)}).width;
            CHECK(w >= prev);
            CHECK(w <= prev + 1);
            prev = w;
        }
    }
}

TEST_CASE("bucketed families grow consistently with their node-count law") {
    // mean node count over replications approaches the exact expectation
    const auto model = TreeModel::mary(3, 1);
    const long n = 30;
    const auto nodes = exact::expected_node_count<Rat>(model, n);
    gen::Generator g(model);
    double mean = 0;
    const long reps = 40000;
    std::vector<std::int32_t> d;
    for (long rep = 0; rep < reps; ++rep) {
        RngStream rng(4242, rep);
        g.depths(n, rng, d);
        mean += static_cast<double>(d.size());
    }
    mean /= reps;
    CHECK(mean == Catch::Approx(to_double(nodes[n])).margin(0.05));
}

TEST_CASE("non-incremental models are rejected by grow_checkpoints") {
    CHECK_THROWS(gen::grow_checkpoints(TreeModel::mobile(), {1, 2, 3}, 1));
    CHECK_THROWS(gen::grow_checkpoints(TreeModel::increasing({1, 2, 1}), {1, 2}, 1));
    CHECK_THROWS(gen::grow_checkpoints(TreeModel::recursive(), {3, 2}, 1));
}

TEST_CASE("increasing sampler guards") {
    gen::Generator g(TreeModel::increasing({1, 0, 0, 1}));
    std::vector<std::int32_t> d;
    RngStream rng(1, 0);
    CHECK_THROWS(g.depths(5, rng, d));  // tau_5 = 0 in this variety
    g.depths(7, rng, d);                // 7 = 1 mod 3 exists
    CHECK(d.size() == 7);
    CHECK_THROWS(g.depths(gen::kIncreasingCap + 1, rng, d));
    CHECK_THROWS(g.depths(0, rng, d));
}

TEST_CASE("mobile trees are flat: root degree grows with n") {
    gen::Generator g(TreeModel::mobile());
    std::vector<std::int32_t> d;
    RngStream rng(31337, 0);
    g.depths(1500, rng, d);
    const auto p = gen::profile_from_depths(d, 1500);
    // level 1 holds a positive fraction of all nodes (about n/L_n on average)
    CHECK(p.counts[1] > 80);
}
