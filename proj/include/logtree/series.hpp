#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "logtree/model.hpp"
#include "logtree/rational.hpp"

namespace logtree::series {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A series is a plain coefficient vector c[0..N]; every operation truncates
// to the shorter input, so results never read past what the inputs carry.

template <typename T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, size_t n_out) {
    std::vector<T> c(std::min(n_out, a.size() + b.size() - 1));
    for (size_t i = 0; i < a.size() && i < c.size(); ++i) {
        if (a[i] == T{}) continue;
        const size_t jmax = std::min(b.size(), c.size() - i);
        for (size_t j = 0; j < jmax; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

template <typename T>
std::vector<T> derivative(const std::vector<T>& a) {
    if (a.size() <= 1) return {T{}};
    std::vector<T> c(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) c[i - 1] = a[i] * num_traits<T>::from_int(i);
    return c;
}

/// Antiderivative with zero constant term.
template <typename T>
std::vector<T> antiderivative(const std::vector<T>& a) {
    std::vector<T> c(a.size() + 1);
    for (size_t i = 0; i < a.size(); ++i) c[i + 1] = a[i] / num_traits<T>::from_int(i + 1);
    return c;
}

/// log of a series. Exact mode insists on a_0 = 1; float mode accepts any
/// a_0 > 0 and carries log(a_0) in the constant term.
template <typename T>
std::vector<T> log(const std::vector<T>& a) {
    if (a.empty()) throw SeriesError("series log: empty input");
    if constexpr (num_traits<T>::exact) {
        if (a[0] != num_traits<T>::from_int(1))
            throw SeriesError("series log: requires a_0 = 1 in exact mode");
    } else {
        if (!(a[0] > 0)) throw SeriesError("series log: requires a_0 > 0");
    }
    const size_t n = a.size();
    // q = a'/a by division, then integrate.
    std::vector<T> ap = derivative(a);
    ap.resize(n, T{});
    std::vector<T> q(n);
    for (size_t i = 0; i < n; ++i) {
        T s = ap[i];
        for (size_t j = 1; j <= i; ++j) s -= a[j] * q[i - j];
        q[i] = s / a[0];
    }
    std::vector<T> out = antiderivative(q);
    out.resize(n);
    if constexpr (!num_traits<T>::exact) out[0] = std::log(a[0]);
    return out;
}

/// exp of a series with a_0 = 0.
template <typename T>
std::vector<T> exp(const std::vector<T>& a) {
    if (a.empty() || !(a[0] == T{}))
        throw SeriesError("series exp: requires a_0 = 0");
    const size_t n = a.size();
    std::vector<T> ap = derivative(a);
    ap.resize(n, T{});
    std::vector<T> b(n);
    b[0] = num_traits<T>::from_int(1);
    for (size_t i = 0; i + 1 < n; ++i) {
        T s{};
        for (size_t j = 0; j <= i; ++j) s += ap[j] * b[i - j];
        b[i + 1] = s / num_traits<T>::from_int(i + 1);
    }
    return b;
}

/// a^alpha = exp(alpha * log a); requires a_0 = 1 (exact) or a_0 > 0.
template <typename T>
std::vector<T> pow(const std::vector<T>& a, const T& alpha) {
    std::vector<T> la = log(a);
    T c0 = la[0];
    la[0] = T{};
    for (auto& x : la) x = x * alpha;
    std::vector<T> out = exp(la);
    if constexpr (!num_traits<T>::exact) {
        const double scale = std::exp(c0 * alpha);
        for (auto& x : out) x *= scale;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tau' = phi(tau):  (n+1) tau_{n+1} = [z^n] phi(tau), tau_0 = 0.
// Coefficients are EGF coefficients tau_n / n!. Replacing phi by rho*phi
// yields the rescaled solution tau(rho z), whose coefficients stay bounded
// when rho is the singularity radius — float mode at large truncation relies
// on this.
// ---------------------------------------------------------------------------

/// Polynomial phi (phi[0] must be 1 before scaling). O(N^2 deg).
template <typename T>
std::vector<T> solve_tree_ode(const std::vector<T>& phi, size_t n_trunc,
                              const T& rho = num_traits<T>::from_int(1)) {
    if (phi.empty() || phi[0] != num_traits<T>::from_int(1))
        throw SeriesError("solve_tree_ode: phi_0 = 1 required");
    const size_t deg = phi.size() - 1;
    std::vector<T> tau(n_trunc + 1);
    // pw[j][i] = [z^i] tau^j, filled one diagonal (i = n) per step.
    std::vector<std::vector<T>> pw(deg + 1, std::vector<T>(n_trunc + 1));
    pw[0][0] = num_traits<T>::from_int(1);
    for (size_t n = 0; n < n_trunc; ++n) {
        if (n > 0) {
            for (size_t j = 1; j <= deg; ++j) {
                T s{};
                // [z^n] tau^j = sum_a pw[j-1][a] tau[n-a]
                for (size_t a = j - 1; a < n; ++a)
                    if (!(pw[j - 1][a] == T{})) s += pw[j - 1][a] * tau[n - a];
                pw[j][n] = s;
            }
        }
        T val{};
        for (size_t j = 0; j <= deg && j <= phi.size() - 1; ++j)
            if (!(phi[j] == T{})) val += phi[j] * pw[j][n];
        tau[n + 1] = rho * val / num_traits<T>::from_int(n + 1);
    }
    return tau;
}

/// Mobile trees, phi(w) = 1 - log(1-w). Coupled system T' = rho G,
/// G' = rho G H, H' = rho G H^2 with running convolutions; O(N^2).
template <typename T>
std::vector<T> solve_tree_ode_mobile(size_t n_trunc, const T& rho = num_traits<T>::from_int(1)) {
    std::vector<T> tau(n_trunc + 1), g(n_trunc + 1), h(n_trunc + 1), gh(n_trunc + 1),
        ghh(n_trunc + 1);
    const T one = num_traits<T>::from_int(1);
    g[0] = one;
    h[0] = one;
    gh[0] = one;
    ghh[0] = one;
    for (size_t n = 0; n < n_trunc; ++n) {
        const T inv = num_traits<T>::from_int(n + 1);
        tau[n + 1] = rho * g[n] / inv;
        g[n + 1] = rho * gh[n] / inv;
        h[n + 1] = rho * ghh[n] / inv;
        const size_t m = n + 1;
        T s1{};
        for (size_t a = 0; a <= m; ++a)
            if (!(g[a] == T{})) s1 += g[a] * h[m - a];
        gh[m] = s1;  // needed by the ghh convolution below (a = m term)
        T s2{};
        for (size_t a = 0; a <= m; ++a)
            if (!(gh[a] == T{})) s2 += gh[a] * h[m - a];
        ghh[m] = s2;
    }
    return tau;
}

// ---------------------------------------------------------------------------
// Quadrature for R = int_0^inf dv / phi(v)
// ---------------------------------------------------------------------------

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// R = int_0^inf dv/phi(v) for a polynomial degree function (phi_0 = 1).
/// Adaptive panels on [0, V] where the analytic tail bound
/// int_V^inf dv/phi <= V^{1-d}/((d-1) phi_d) is below 1e-13 (phi_j >= 0
/// makes phi(v) >= phi_d v^d).
inline double integral_R_polynomial(const std::vector<double>& phi) {
    const int d = static_cast<int>(phi.size()) - 1;
    if (d < 2) throw SeriesError("integral_R: polynomial degree >= 2 required");
    const double phid = phi.back();
    auto f = [&phi](double v) {
        double p = 0;
        for (size_t j = phi.size(); j-- > 0;) p = p * v + phi[j];
        return 1.0 / p;
    };
    double V = std::pow((d - 1) * phid * 1e13, 1.0 / (d - 1));
    V = std::max(V, 2.0);
    double total = 0;
    double lo = 0, hi = 1;
    while (lo < V) {
        hi = std::min(hi, V);
        total += detail::integrate(f, lo, hi, 1e-14 * std::max(1.0, total));
        lo = hi;
        hi *= 10;
    }
    return total;
}

/// R for mobile trees: int_0^inf e^{-v}/(1+v) dv; tail beyond 40 < 2e-19.
inline double integral_R_mobile() {
    auto f = [](double v) { return std::exp(-v) / (1 + v); };
    double total = 0;
    for (double lo = 0; lo < 40; lo += 5) total += detail::integrate(f, lo, lo + 5, 1e-16);
    return total;
}

// ---------------------------------------------------------------------------
// Expected-profile rows for increasing varieties:
//   Xi_n(u) = (n!/tau_n) [z^n] tau'(z)^u int_0^z tau'(v)^{1-u} dv
//           = sum_k u^k sum_{i+j=k} [z^n] (A^j/j!) * int(tau' (-A)^i / i!),
// with A = log tau'. The u-scaling by rho cancels, so scaled coefficients
// feed the same formula.
// ---------------------------------------------------------------------------

template <typename T>
std::vector<T> normalized_phi(const TreeModel& model, size_t up_to) {
    std::vector<T> phi;
    if (model.family == Family::Mobile) {
        phi.resize(up_to + 1);
        phi[0] = num_traits<T>::from_int(1);
        for (size_t j = 1; j <= up_to; ++j) phi[j] = num_traits<T>::from_fraction(1, j);
    } else if (model.family == Family::Increasing) {
        phi.resize(model.phi.size());
        for (size_t j = 0; j < model.phi.size(); ++j) {
            if constexpr (num_traits<T>::exact)
                phi[j] = Rat(model.phi[j]) / Rat(model.phi[0]);
            else
                phi[j] = model.phi[j] / model.phi[0];
        }
    } else {
        throw SeriesError("normalized_phi: increasing varieties only");
    }
    return phi;
}

template <typename T>
struct ProfileRowTable {
    std::vector<long> sizes;
    std::vector<std::vector<T>> rows;  // rows[i][k] = mu_{sizes[i],k}
    std::vector<T> tau;                // scaled EGF coefficients
    double rho = 1.0;                  // scale actually used (float mode)
};

template <typename T>
ProfileRowTable<T> profile_rows_increasing(const TreeModel& model, std::vector<long> sizes,
                                           int k_max) {
    if (model.family != Family::Increasing && model.family != Family::Mobile)
        throw SeriesError("profile_rows_increasing: increasing varieties only");
    long n_max = 1;
    for (long n : sizes) n_max = std::max(n_max, n);
    if constexpr (num_traits<T>::exact) {
        if (n_max > 200) throw SeriesError("profile_rows_increasing: rational mode capped at 200");
    } else {
        if (n_max > 200000) throw SeriesError("profile_rows_increasing: size cap exceeded");
    }

    ProfileRowTable<T> out;
    out.sizes = sizes;
    const size_t N = static_cast<size_t>(n_max) + 1;  // one extra so tau' reaches index n_max

    T rho = num_traits<T>::from_int(1);
    if constexpr (!num_traits<T>::exact) {
        out.rho = model.family == Family::Mobile
                      ? integral_R_mobile()
                      : integral_R_polynomial(normalized_phi<double>(model, 0));
        rho = out.rho;
    }
    if (model.family == Family::Mobile)
        out.tau = solve_tree_ode_mobile<T>(N, rho);
    else
        out.tau = solve_tree_ode<T>(normalized_phi<T>(model, 0), N, rho);

    std::vector<T> tp = derivative(out.tau);  // length N, indices 0..N-1 >= n_max
    std::vector<T> a = log(tp);
    if constexpr (!num_traits<T>::exact) a[0] = std::log(tp[0]);

    // B_j = A^j/j!, C_i = int(tau' (-A)^i / i!)
    std::vector<std::vector<T>> B(k_max + 1), C(k_max + 1);
    B[0].assign(N, T{});
    B[0][0] = num_traits<T>::from_int(1);
    for (int j = 1; j <= k_max; ++j) {
        B[j] = mul(B[j - 1], a, N);
        const T inv = num_traits<T>::from_int(j);
        for (auto& x : B[j]) x = x / inv;
    }
    for (int i = 0; i <= k_max; ++i) {
        std::vector<T> ti = mul(tp, B[i], N);
        if (i % 2 == 1)
            for (auto& x : ti) x = -x;
        C[i] = antiderivative(ti);
        C[i].resize(N + 1, T{});
    }

    for (long n : sizes) {
        if (out.tau[n] == T{})
            throw SeriesError("profile_rows_increasing: no trees of size " + std::to_string(n) +
                              " in this variety");
        std::vector<T> row(k_max + 1);
        for (int k = 0; k <= k_max; ++k) {
            T v{};
            for (int i = 0; i <= k; ++i) {
                const auto& bj = B[k - i];
                const auto& ci = C[i];
                T dot{};
                for (long t = 0; t <= n; ++t)
                    if (!(bj[t] == T{})) dot += bj[t] * ci[n - t];
                v += dot;
            }
            row[k] = v / out.tau[n];
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// tau_n asymptotics for polynomial varieties:
//   tau_n/n! = (p / Gamma(1/(d-1))) ((d-1) phi_d R)^{-1/(d-1)} R^{-n}
//              n^{-(d-2)/(d-1)} (1 + o(1)),
// p = period of phi. Returns exact/approx ratio (drifts to 1).
// ---------------------------------------------------------------------------

struct TauRatio {
    double ratio;
    double R;
    int period;
};

inline TauRatio tau_asymptotic_ratio(const TreeModel& model, long n) {
    if (model.family != Family::Increasing)
        throw SeriesError("tau_asymptotic_ratio: polynomial varieties only");
    const auto phi = normalized_phi<double>(model, 0);
    const int d = static_cast<int>(phi.size()) - 1;
    int p = 0;
    for (int j = 1; j <= d; ++j)
        if (phi[j] != 0) p = p == 0 ? j : std::gcd(p, j);
    if (n % p != 1 % p)
        throw SeriesError("tau_asymptotic_ratio: tau_n = 0 for this size (period " +
                          std::to_string(p) + ")");
    const double R = integral_R_polynomial(phi);
    const auto tau = solve_tree_ode<double>(phi, n, R);  // scaled: tau_n/n! R^n
    const double approx = p / std::tgamma(1.0 / (d - 1)) *
                          std::pow((d - 1) * phi[d] * R, -1.0 / (d - 1)) *
                          std::pow(static_cast<double>(n), -(d - 2.0) / (d - 1.0));
    return {tau[n] / approx, R, p};
}

}  // namespace logtree::series
