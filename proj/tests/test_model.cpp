#include <catch2/catch_amalgamated.hpp>

#include "logtree/asympt.hpp"
#include "logtree/model.hpp"
#include "logtree/rng.hpp"

using namespace logtree;

TEST_CASE("parse examples") {
    CHECK(parse_model("recursive").family == Family::Recursive);
    const auto g = parse_model("grid:m=3,d=2");
    CHECK(g.family == Family::Grid);
    CHECK(g.m == 3);
    CHECK(g.d == 2);
    const auto m = parse_model("mary:m=2,t=5");
    CHECK(m.family == Family::Mary);
    CHECK(m.m == 2);
    CHECK(m.t == 5);
    const auto inc = parse_model("increasing:phi=1,2,1");
    CHECK(inc.phi == std::vector<double>{1, 2, 1});
}

TEST_CASE("parse errors name the offending field") {
    CHECK_THROWS_WITH(parse_model("mary:m=1,t=0"), Catch::Matchers::ContainsSubstring("m >= 2"));
    CHECK_THROWS_WITH(parse_model("quad:d=0"), Catch::Matchers::ContainsSubstring("d >= 1"));
    CHECK_THROWS_WITH(parse_model("grid:m=2"), Catch::Matchers::ContainsSubstring("d"));
    CHECK_THROWS_WITH(parse_model("mary:m=x,t=0"), Catch::Matchers::ContainsSubstring("m"));
    CHECK_THROWS_WITH(parse_model("increasing:phi=0,1,1"),
                      Catch::Matchers::ContainsSubstring("phi_0"));
    CHECK_THROWS_WITH(parse_model("increasing:phi=1,1"),
                      Catch::Matchers::ContainsSubstring("d >= 2"));
    CHECK_THROWS_WITH(parse_model("increasing:phi=1,-1,1"),
                      Catch::Matchers::ContainsSubstring("phi_j >= 0"));
    CHECK_THROWS(parse_model("florb"));
    CHECK_THROWS(parse_model("recursive:m=2"));
}

TEST_CASE("parse/format round trip on random specs") {
    RngStream rng(42, 0);
    for (int trial = 0; trial < 200; ++trial) {
        TreeModel m;
        switch (rng.next_below(7)) {
            case 0: m = TreeModel::recursive(); break;
            case 1: m = TreeModel::port(); break;
            case 2: m = TreeModel::mobile(); break;
            case 3:
                m = TreeModel::mary(2 + static_cast<int>(rng.next_below(9)),
                                    static_cast<int>(rng.next_below(6)));
                break;
            case 4: m = TreeModel::quad(1 + static_cast<int>(rng.next_below(4))); break;
            case 5:
                m = TreeModel::grid(2 + static_cast<int>(rng.next_below(9)),
                                    1 + static_cast<int>(rng.next_below(4)));
                break;
            default: {
                std::vector<double> phi{1 + rng.next_double()};
                const int d = 2 + static_cast<int>(rng.next_below(4));
                for (int j = 1; j < d; ++j)
                    phi.push_back(rng.next_below(2) ? rng.next_double() * 3 : 0.0);
                phi.push_back(0.25 + rng.next_double());
                m = TreeModel::increasing(phi);
            }
        }
        const std::string s = format_model(m);
        CHECK(parse_model(s) == m);
        CHECK(format_model(parse_model(s)) == s);  // canonical
    }
}

TEST_CASE("width_and_mode") {
    CHECK_THROWS(width_and_mode(Profile{}));
    auto ws = width_and_mode(Profile{{1, 2, 1}, 4});
    CHECK(ws.width == 2);
    CHECK(ws.mode_level == 1);
    CHECK(ws.tie_count == 1);
    ws = width_and_mode(Profile{{1, 1, 1}, 3});
    CHECK(ws.width == 1);
    CHECK(ws.mode_level == 0);
    CHECK(ws.tie_count == 3);
    ws = width_and_mode(Profile{{1, 3, 3, 1}, 8});
    CHECK(ws.width == 3);
    CHECK(ws.mode_level == 1);
    CHECK(ws.tie_count == 2);
}

TEST_CASE("width_and_mode ignores trailing zero levels") {
    RngStream rng(7, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Profile p;
        const int len = 1 + static_cast<int>(rng.next_below(10));
        for (int i = 0; i < len; ++i) p.counts.push_back(rng.next_below(20));
        p.counts[0] = 1;
        const auto a = width_and_mode(p);
        p.counts.insert(p.counts.end(), 3, 0);
        const auto b = width_and_mode(p);
        CHECK(a.width == b.width);
        CHECK(a.mode_level == b.mode_level);
        if (a.width > 0) CHECK(a.tie_count == b.tie_count);
    }
}

TEST_CASE("constants cross-check identities") {
    for (int d = 1; d <= 4; ++d) {
        const auto g = asympt::model_constants(TreeModel::grid(2, d));
        const auto q = asympt::model_constants(TreeModel::quad(d));
        CHECK(g.v_exact == q.v_exact);
        CHECK(g.sigma2_exact == q.sigma2_exact);
    }
    for (const auto& m : {TreeModel::mary(2, 0), TreeModel::quad(1),
                          TreeModel::increasing({1, 2, 1})}) {
        const auto c = asympt::model_constants(m);
        CHECK(c.v_exact == 2);
        CHECK(c.sigma2_exact == 2);
    }
}

TEST_CASE("log scale") {
    const LogScale s(std::exp(1.0));
    CHECK(s.L == Catch::Approx(1.0));
    const LogScale tiny(2.0);
    CHECK(tiny.L == 1.0);  // max(log 2, 1)
    const LogScale drift(1000.0, 2.0);
    CHECK(drift.delta(2 * drift.L) == Catch::Approx(0.0));
}
