#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "logtree/model.hpp"
#include "logtree/rational.hpp"

namespace logtree::asympt {

struct AsymptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;

/// Width-regularity parameters: drift v = f'(1) and sigma^2 = f'(1) + f''(1).
/// All families here have rational constants; doubles are derived from the
/// exact values so cross-family identities hold bit-for-bit.
struct ModelConstants {
    bool width_regular = true;
    Rat v_exact{1};
    Rat sigma2_exact{1};
    double v = 1;
    double sigma2 = 1;
};

inline ModelConstants model_constants(const TreeModel& model) {
    ModelConstants c;
    switch (model.family) {
        case Family::Recursive:
            c.v_exact = 1;
            c.sigma2_exact = 1;
            break;
        case Family::Port:
            c.v_exact = Rat(1, 2);
            c.sigma2_exact = Rat(1, 2);
            break;
        case Family::Quad:
            c.v_exact = Rat(2, model.d);
            c.sigma2_exact = Rat(2, BigInt(model.d) * model.d);
            break;
        case Family::Grid: {
            const Rat hm1 = harmonic(model.m) - 1;
            c.v_exact = Rat(1) / (model.d * hm1);
            c.sigma2_exact = (harmonic2(model.m) - 1) / (BigInt(model.d) * model.d * hm1 * hm1 * hm1);
            break;
        }
        case Family::Mary: {
            const unsigned s = static_cast<unsigned>(model.m) * (model.t + 1);
            const Rat hd = harmonic(s) - harmonic(model.t + 1);
            c.v_exact = Rat(1) / hd;
            c.sigma2_exact = (harmonic2(s) - harmonic2(model.t + 1)) / (hd * hd * hd);
            break;
        }
        case Family::Increasing: {
            const int d = model.phi_degree();
            c.v_exact = Rat(d, d - 1);
            c.sigma2_exact = Rat(d, d - 1);  // f is affine, f'' = 0
            break;
        }
        case Family::Mobile:
            c.width_regular = false;
            c.v_exact = 0;
            c.sigma2_exact = 0;
            break;
    }
    c.v = to_double(c.v_exact);
    c.sigma2 = to_double(c.sigma2_exact);
    return c;
}

// ---------------------------------------------------------------------------
// Implicit defining equations for grid and m-ary constants.
// Grid:  ((f+1)...(f+m-1))^d = m!^d u         <=>  F(f) = m! u^{1/d}
// Mary:  (f+t+1)...(f+m(t+1)-1) = (m(t+1))!/(t+1)! u
// Solved by damped Newton from f = 1; f'(1), f''(1) by implicit
// differentiation of the product form.
// ---------------------------------------------------------------------------

struct ImplicitConstants {
    double f1;  // f(1), should be 1
    double v;
    double sigma2;
    int newton_iterations;
};

namespace detail {

// Product P(f) = prod (f + a_i) with log-derivative sums.
struct ShiftedProduct {
    std::vector<double> offsets;

    double value(double f) const {
        double p = 1;
        for (double a : offsets) p *= (f + a);
        return p;
    }
    double d1_over_value(double f) const {
        double s = 0;
        for (double a : offsets) s += 1.0 / (f + a);
        return s;
    }
    double d2_over_value(double f) const {
        double s1 = 0, s2 = 0;
        for (double a : offsets) {
            s1 += 1.0 / (f + a);
            s2 += 1.0 / ((f + a) * (f + a));
        }
        return s1 * s1 - s2;
    }
};

inline ImplicitConstants solve_product_equation(const ShiftedProduct& prod, double rhs1,
                                                double rhs_d1, double rhs_d2) {
    // Solve prod.value(f) = rhs1 by damped Newton from f = 1.
    double f = 1.0;
    int iters = 0;
    for (; iters < 200; ++iters) {
        const double val = prod.value(f);
        const double err = val - rhs1;
        if (std::abs(err) <= 1e-15 * std::abs(rhs1)) break;
        const double dv = val * prod.d1_over_value(f);
        double step = err / dv;
        while (f - step <= -1.0) step *= 0.5;  // keep inside the domain
        f -= step;
    }
    const double pv = prod.value(f);
    const double p1 = pv * prod.d1_over_value(f);
    const double p2 = pv * prod.d2_over_value(f);
    // P(f(u)) = rhs(u):  P' f' = rhs';  P'' f'^2 + P' f'' = rhs''.
    const double fp = rhs_d1 / p1;
    const double fpp = (rhs_d2 - p2 * fp * fp) / p1;
    return {f, fp, fp + fpp, iters};
}

}  // namespace detail

/// Constants recovered from the family's implicit defining equation; must
/// agree with model_constants() to 1e-12 for grid and m-ary families.
inline ImplicitConstants model_constants_implicit(const TreeModel& model) {
    if (model.family == Family::Grid) {
        detail::ShiftedProduct prod;
        for (int i = 1; i <= model.m - 1; ++i) prod.offsets.push_back(i);
        double mfact = 1;
        for (int i = 2; i <= model.m; ++i) mfact *= i;
        // rhs(u) = m! u^{1/d}
        const double d = model.d;
        return detail::solve_product_equation(prod, mfact, mfact / d,
                                              mfact / d * (1.0 / d - 1.0));
    }
    if (model.family == Family::Mary) {
        detail::ShiftedProduct prod;
        const int s = model.m * (model.t + 1);
        for (int i = model.t + 1; i <= s - 1; ++i) prod.offsets.push_back(i);
        double rhs = 1;
        for (int i = model.t + 2; i <= s; ++i) rhs *= i;
        // rhs(u) = C u: linear, second derivative zero
        return detail::solve_product_equation(prod, rhs, rhs, 0.0);
    }
    throw AsymptError("model_constants_implicit: grid and mary families only");
}

// ---------------------------------------------------------------------------
// Gaussian profile approximation and width prediction
// ---------------------------------------------------------------------------

/// Leading term n/sqrt(2 pi sigma^2 L_n) exp(-Delta^2/(2 sigma^2 L_n)),
/// Delta = k - v L_n.
inline double gaussian_profile(double n, double k, const ModelConstants& c) {
    if (!c.width_regular) throw AsymptError("gaussian_profile: model is not width-regular");
    const double L = std::max(std::log(n), 1.0);
    const double delta = k - c.v * L;
    return n / std::sqrt(2 * kPi * c.sigma2 * L) * std::exp(-delta * delta / (2 * c.sigma2 * L));
}

inline double expected_width_prediction(double n, const ModelConstants& c) {
    if (!c.width_regular) throw AsymptError("expected_width_prediction: not width-regular");
    const double L = std::max(std::log(n), 1.0);
    return n / std::sqrt(2 * kPi * c.sigma2 * L);
}

/// Mobile trees instead satisfy E W_n ~ n / sqrt(2 pi log L_n).
inline double expected_width_mobile(double n) {
    const double L = std::max(std::log(n), 1.0);
    return n / std::sqrt(2 * kPi * std::log(L));
}

// ---------------------------------------------------------------------------
// Mode location for recursive trees
// ---------------------------------------------------------------------------

/// Second-order periodic term of the expected profile near the peak:
/// p_l(x) = -1/2 (x - l - 3/2 + gamma)^2 - gamma/2 + pi^2/12 + 1/24.
inline double p_ell(int ell, double x) {
    const double t = x - ell - 1.5 + kEulerGamma;
    return -0.5 * t * t - kEulerGamma / 2 + kPi * kPi / 12 + 1.0 / 24;
}

struct ModePrediction {
    long k_hat;        // predicted argmax of mu_{n,.}
    long width_level;  // level predicted to attain the width
    double frac;       // {L_n}
    int selector;      // -1 or 0; -1 iff {L_n} <= 1 - gamma (ties go to -1)
};

inline ModePrediction mode_prediction(double n) {
    if (n < 2) throw AsymptError("mode_prediction: n >= 2 required");
    const double L = std::max(std::log(n), 1.0);
    ModePrediction p;
    p.k_hat = static_cast<long>(std::floor(L - 1 + kEulerGamma));
    p.frac = L - std::floor(L);
    p.selector = p.frac <= 1 - kEulerGamma ? -1 : 0;
    p.width_level = static_cast<long>(std::floor(L)) + p.selector;
    return p;
}

// ---------------------------------------------------------------------------
// Bundled predictions consumed by the simulation gates
// ---------------------------------------------------------------------------

struct RegularityReport {
    TreeModel model;
    double n;
    ModelConstants constants;
    bool width_regular;
    double expected_width;    // mobile: n/sqrt(2 pi log L_n)
    double mode_center;       // v * L_n (width-regular only)
    double var_scale;         // n^2 L_n^{-3}, the Var(W_n) envelope shape
    double L;
};

inline RegularityReport width_regularity_report(const TreeModel& model, double n) {
    RegularityReport r;
    r.model = model;
    r.n = n;
    r.constants = model_constants(model);
    r.width_regular = r.constants.width_regular;
    r.L = std::max(std::log(n), 1.0);
    if (r.width_regular) {
        r.expected_width = expected_width_prediction(n, r.constants);
        r.mode_center = r.constants.v * r.L;
    } else {
        r.expected_width = expected_width_mobile(n);
        r.mode_center = std::log(r.L);
    }
    r.var_scale = n * n / (r.L * r.L * r.L);
    return r;
}

}  // namespace logtree::asympt
