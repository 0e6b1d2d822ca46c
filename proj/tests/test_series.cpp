#include <catch2/catch_amalgamated.hpp>

#include "logtree/exact.hpp"
#include "logtree/series.hpp"

using namespace logtree;

TEST_CASE("series algebra: classical expansions") {
    // log(1/(1-z)) = sum z^j / j
    std::vector<Rat> a(12, Rat(1));
    const auto la = series::log(a);
    for (size_t j = 1; j < la.size(); ++j) CHECK(la[j] == Rat(1, j));

    // pow(1-2z, 1/2) = 1 - z - z^2/2 - z^3/2 - ...  (binomial series oracle)
    std::vector<Rat> b(10, Rat(0));
    b[0] = 1;
    b[1] = -2;
    const auto sq = series::pow(b, Rat(1, 2));
    CHECK(sq[0] == 1);
    CHECK(sq[1] == -1);
    CHECK(sq[2] == Rat(-1, 2));
    // oracle: binomial coefficients C(1/2, j) (-2)^j
    Rat coef = 1;
    Rat alpha = Rat(1, 2);
    Rat pw = 1;
    for (size_t j = 1; j < sq.size(); ++j) {
        coef *= (alpha - Rat(j - 1)) / Rat(j);
        pw *= -2;
        CHECK(sq[j] == coef * pw);
    }

    // antiderivative termwise
    std::vector<Rat> c{Rat(3), Rat(4), Rat(5)};
    const auto ic = series::antiderivative(c);
    CHECK(ic[0] == 0);
    CHECK(ic[1] == 3);
    CHECK(ic[2] == 2);
    CHECK(ic[3] == Rat(5, 3));
}

TEST_CASE("exp(log a) = a and pow(a,1) = a, exactly") {
    std::vector<Rat> a{Rat(1), Rat(2), Rat(-1, 3), Rat(5, 7), Rat(0), Rat(1, 11)};
    auto la = series::log(a);
    la[0] = 0;
    const auto back = series::exp(la);
    for (size_t i = 0; i < a.size(); ++i) CHECK(back[i] == a[i]);
    const auto p1 = series::pow(a, Rat(1));
    for (size_t i = 0; i < a.size(); ++i) CHECK(p1[i] == a[i]);
}

TEST_CASE("series domain errors") {
    std::vector<Rat> bad{Rat(2), Rat(1)};
    CHECK_THROWS(series::log(bad));
    std::vector<Rat> bad2{Rat(1), Rat(1)};
    CHECK_THROWS(series::exp(bad2));
}

TEST_CASE("tau ODE oracles") {
    // phi = e^w: tau_n = (n-1)!
    std::vector<Rat> phi_exp(31);
    Rat f = 1;
    for (long j = 0; j <= 30; ++j) {
        if (j > 0) f *= j;
        phi_exp[j] = Rat(1) / f;
    }
    const auto tau = series::solve_tree_ode<Rat>(phi_exp, 30);
    Rat fact = 1;
    for (long n = 1; n <= 30; ++n) {
        fact *= n;
        CHECK(tau[n] * fact == factorial_big(static_cast<unsigned>(n - 1)));
    }

    // phi = 1/(1-w): tau_n = (2n-3)!!
    const auto tp = series::solve_tree_ode<Rat>(std::vector<Rat>(12, Rat(1)), 11);
    BigInt doublefact = 1;
    Rat fct = 1;
    for (long n = 1; n <= 11; ++n) {
        fct *= n;
        if (n >= 3) doublefact *= (2 * n - 3);
        CHECK(tp[n] * fct == doublefact);
    }

    // mobile: tau_3 = 2
    const auto tm = series::solve_tree_ode_mobile<Rat>(8);
    CHECK(tm[1] == 1);
    CHECK(tm[2] * 2 == 1);
    CHECK(tm[3] * 6 == 2);

    CHECK_THROWS(series::solve_tree_ode<Rat>({Rat(2), Rat(1)}, 5));  // phi_0 != 1
}

TEST_CASE("increasing rows match the BST table and enumeration") {
    // (1,2,1) rows == quad{1} DP
    std::vector<long> sizes;
    for (long n = 1; n <= 30; ++n) sizes.push_back(n);
    const auto rows =
        series::profile_rows_increasing<Rat>(TreeModel::increasing({1, 2, 1}), sizes, 30);
    const auto dp = exact::expected_profile_dp<Rat>(TreeModel::quad(1), 30, 30);
    for (size_t i = 0; i < sizes.size(); ++i)
        for (int k = 0; k <= 30; ++k) REQUIRE(rows.rows[i][k] == dp.mu[sizes[i]][k]);

    // mobile rows vs enumeration at tiny n
    const auto mrows = series::profile_rows_increasing<Rat>(TreeModel::mobile(), {5, 6}, 6);
    for (size_t i = 0; i < 2; ++i) {
        const long n = 5 + static_cast<long>(i);
        const auto mom = exact::dist_moments(exact::enumerate_exact(TreeModel::mobile(), n), 1);
        for (size_t k = 0; k < mom.mu.size(); ++k) REQUIRE(mrows.rows[i][k] == mom.mu[k]);
    }
}

TEST_CASE("row identities Xi_n(1)=n and Xi_n(0)=1") {
    for (const auto& model :
         {TreeModel::increasing({1, 2, 1}), TreeModel::increasing({1, 0, 0, 1}),
          TreeModel::mobile()}) {
        const auto phi = series::normalized_phi<Rat>(model, 20);
        const auto tau = model.family == Family::Mobile
                             ? series::solve_tree_ode_mobile<Rat>(21)
                             : series::solve_tree_ode<Rat>(phi, 21);
        std::vector<long> sizes;
        for (long n = 1; n <= 20; ++n)
            if (tau[n] != 0) sizes.push_back(n);
        const auto rows = series::profile_rows_increasing<Rat>(model, sizes, 20);
        for (size_t i = 0; i < sizes.size(); ++i) {
            Rat sum = 0;
            for (const auto& x : rows.rows[i]) sum += x;
            CHECK(sum == Rat(sizes[i]));
            CHECK(rows.rows[i][0] == 1);
        }
    }
}

TEST_CASE("float rows track rational rows") {
    const auto rrow = series::profile_rows_increasing<Rat>(TreeModel::mobile(), {40}, 10);
    const auto frow = series::profile_rows_increasing<double>(TreeModel::mobile(), {40}, 10);
    for (int k = 0; k <= 10; ++k)
        CHECK(frow.rows[0][k] == Catch::Approx(to_double(rrow.rows[0][k])).epsilon(1e-10));
}

TEST_CASE("no trees of a skipped size in a periodic variety") {
    CHECK_THROWS(series::profile_rows_increasing<Rat>(TreeModel::increasing({1, 0, 0, 1}), {5}, 4));
}

TEST_CASE("quadrature: R closed forms") {
    // phi = (1+w)^2: R = 1
    CHECK(series::integral_R_polynomial({1, 2, 1}) == Catch::Approx(1.0).epsilon(1e-10));
    // phi = 1 + w^2: R = pi/2
    CHECK(series::integral_R_polynomial({1, 0, 1}) ==
          Catch::Approx(3.14159265358979323846 / 2).epsilon(1e-10));
    // mobile R = e * E_1(1) = 0.59634736232319...
    CHECK(series::integral_R_mobile() == Catch::Approx(0.596347362323194).epsilon(1e-10));
}

TEST_CASE("tau asymptotic ratio") {
    const auto r = series::tau_asymptotic_ratio(TreeModel::increasing({1, 2, 1}), 200);
    CHECK(r.R == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(r.ratio > 0.9);
    CHECK(r.ratio < 1.1);
    CHECK(r.period == 1);

    // period-2 variety 1 + w^2 + w^4: only odd sizes exist
    const auto model = TreeModel::increasing({1, 0, 1, 0, 1});
    const auto phi = series::normalized_phi<Rat>(model, 0);
    const auto tau = series::solve_tree_ode<Rat>(phi, 12);
    for (long n = 1; n <= 12; ++n) {
        if (n % 2 == 1)
            CHECK(tau[n] != 0);
        else
            CHECK(tau[n] == 0);
    }
    const auto r2 = series::tau_asymptotic_ratio(model, 101);
    CHECK(r2.period == 2);
    CHECK_THROWS(series::tau_asymptotic_ratio(model, 100));  // tau_100 = 0
}
