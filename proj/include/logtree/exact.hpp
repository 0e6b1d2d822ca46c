#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "logtree/model.hpp"
#include "logtree/rational.hpp"

namespace logtree::exact {

struct ExactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Split laws
// ---------------------------------------------------------------------------

/// TwoPartRest: Y_{n,k} = Y_{I,k-1} + Y*_{n-I,k}; the complement keeps the
///   root and stays at level k (recursive trees, PORTs). I ranges over 1..n-1.
/// Branching: Y_{n,k} = sum_{l=1..h} Y_{I_l,k-1}; all subtrees drop a level
///   and the root retains kappa items (quad, grid, m-ary). The marginal of
///   each I_l is pi, and sum_l I_l = n - kappa.
enum class SplitShape { TwoPartRest, Branching };

template <typename T>
struct SplitLaw {
    SplitShape shape;
    int h;
    int kappa;
    std::vector<T> pi;  // pi[j], j = 0..(size-1); TwoPartRest has pi[0] = 0

    T sum() const {
        T s{};
        for (const auto& p : pi) s += p;
        return s;
    }
};

/// Subtree count at a splitting node.
inline long branch_count(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive:
        case Family::Port: return 2;
        case Family::Quad: return 1L << model.d;
        case Family::Mary: return model.m;
        case Family::Grid: {
            long h = 1;
            for (int i = 0; i < model.d; ++i) h *= model.m;
            return h;
        }
        default: return 0;
    }
}

/// Items below which a region is a single bucket node (no split law applies).
inline long bucket_threshold(const TreeModel& model) {
    switch (model.family) {
        case Family::Quad: return 1;
        case Family::Mary: return static_cast<long>(model.m) * (model.t + 1) - 1;
        case Family::Grid: return model.m - 1;
        default: return 1;
    }
}

namespace detail {

template <typename T>
SplitLaw<T> split_recursive(long n) {
    SplitLaw<T> law{SplitShape::TwoPartRest, 2, 0, std::vector<T>(n)};
    for (long j = 1; j < n; ++j) law.pi[j] = num_traits<T>::from_fraction(1, n - 1);
    return law;
}

// pi_{n,1} = (n-1)/(2n-3); pi_{n,j+1} = pi_{n,j} (2j-1)(n-j-1) / ((j+1)(2n-2j-3)).
template <typename T>
SplitLaw<T> split_port(long n) {
    SplitLaw<T> law{SplitShape::TwoPartRest, 2, 0, std::vector<T>(n)};
    T p = num_traits<T>::from_fraction(n - 1, 2 * n - 3);
    law.pi[1] = p;
    for (long j = 1; j + 1 < n; ++j) {
        p = p * num_traits<T>::from_int((2 * j - 1) * (n - j - 1));
        p = p / num_traits<T>::from_int((j + 1) * (2 * n - 2 * j - 3));
        law.pi[j + 1] = p;
    }
    return law;
}

// pi_{n,j} = (1/n) sum_{j<j1<=...<=j_{d-1}<=n} 1/(j1...j_{d-1}) via suffix sums.
template <typename T>
SplitLaw<T> split_quad(long n, int d) {
    SplitLaw<T> law{SplitShape::Branching, 1 << d, 1, std::vector<T>(n)};
    // G_0 == 1; G_r(a) = sum_{a<=x<=n} G_{r-1}(x)/x; pi[j] = G_{d-1}(j+1)/n.
    std::vector<T> g(n + 2), next(n + 2);
    for (long a = 0; a <= n + 1; ++a) g[a] = num_traits<T>::from_int(1);
    for (int r = 1; r < d; ++r) {
        next[n + 1] = T{};
        for (long x = n; x >= 1; --x)
            next[x] = next[x + 1] + g[x] / num_traits<T>::from_int(x);
        next[0] = next[1];
        std::swap(g, next);
    }
    for (long j = 0; j < n; ++j)
        law.pi[j] = g[std::min<long>(j + 1, n + 1)] / num_traits<T>::from_int(n);
    return law;
}

// pi_{n,j} = C(j,t) C(n-1-j, (m-1)(t+1)-1) / C(n, m(t+1)-1).
template <typename T>
SplitLaw<T> split_mary(long n, int m, int t) {
    const long s = static_cast<long>(m) * (t + 1) - 1;
    const long r = static_cast<long>(m - 1) * (t + 1) - 1;
    if (n < s) throw ExactError("split_distribution: region below bucket threshold");
    SplitLaw<T> law{SplitShape::Branching, m, m - 1, std::vector<T>(n)};
    for (long j = t; j <= n - 1 - r; ++j) {
        BigInt num = binomial_big(j, t) * binomial_big(n - 1 - j, r);
        law.pi[j] = num_traits<T>::from_fraction(num, binomial_big(n, s));
    }
    return law;
}

// pi_{n,j} = sum_{j<=j1<=...<=j_{d-1}<=top} prod_l C(j_l-j_{l-1}+m-2,m-2)/C(j_l+m-1,m-1)
// with j_0 = j, j_d = top = n-m+1. The kernel C(y-x+m-2,m-2) is handled by
// (m-1)-fold iterated suffix sums per nesting level.
template <typename T>
SplitLaw<T> split_grid(long n, int m, int d) {
    const long top = n - m + 1;
    if (top < 0) throw ExactError("split_distribution: region below bucket threshold");
    SplitLaw<T> law{SplitShape::Branching, 1, m - 1, std::vector<T>(top + 1)};
    for (int i = 0; i < d; ++i) law.h *= m;

    std::vector<T> invbin(top + 1);
    for (long y = 0; y <= top; ++y)
        invbin[y] = num_traits<T>::from_fraction(1, binomial_big(y + m - 1, m - 1));

    // T_d(x) = C(top-x+m-2,m-2) / C(top+m-1,m-1)
    std::vector<T> cur(top + 1);
    for (long x = 0; x <= top; ++x)
        cur[x] = num_traits<T>::from_fraction(binomial_big(top - x + m - 2, m - 2),
                                              binomial_big(top + m - 1, m - 1));
    std::vector<T> tmp(top + 1);
    for (int level = d - 1; level >= 1; --level) {
        // cur(x) <- sum_{x<=y<=top} C(y-x+m-2,m-2) invbin[y] cur(y)
        for (long y = 0; y <= top; ++y) tmp[y] = invbin[y] * cur[y];
        for (int rep = 0; rep < m - 1; ++rep)
            for (long x = top - 1; x >= 0; --x) tmp[x] += tmp[x + 1];
        cur = tmp;
    }
    for (long j = 0; j <= top; ++j) law.pi[j] = cur[j];
    return law;
}

}  // namespace detail

template <typename T>
SplitLaw<T> split_distribution(const TreeModel& model, long n) {
    if (n < 2) throw ExactError("split_distribution: requires n >= 2");
    switch (model.family) {
        case Family::Recursive: return detail::split_recursive<T>(n);
        case Family::Port: return detail::split_port<T>(n);
        case Family::Quad: return detail::split_quad<T>(n, model.d);
        case Family::Mary: return detail::split_mary<T>(n, model.m, model.t);
        case Family::Grid: return detail::split_grid<T>(n, model.m, model.d);
        default:
            throw ExactError(
                "split_distribution: no closed split law for this family (use the series module)");
    }
}

// ---------------------------------------------------------------------------
// Expected profile, recursive trees: coefficients of prod_{1<=j<n} (1 + u/j)
// ---------------------------------------------------------------------------

/// Sweeps n = 1, 2, ... and exposes the current expected-profile row
/// (truncated to k_max+1 coefficients). O(k_max) per step.
template <typename T>
class StirlingRowScanner {
public:
    explicit StirlingRowScanner(int k_max) : row_(k_max + 1) {
        row_[0] = num_traits<T>::from_int(1);
    }

    long n() const { return n_; }
    const std::vector<T>& row() const { return row_; }

    void advance() {  // row(n) -> row(n+1): multiply by (1 + u/n)
        for (size_t k = row_.size() - 1; k >= 1; --k)
            row_[k] += row_[k - 1] / num_traits<T>::from_int(n_);
        ++n_;
    }

    void advance_to(long n) {
        while (n_ < n) advance();
    }

private:
    std::vector<T> row_;
    long n_ = 1;
};

template <typename T>
std::vector<T> expected_profile_stirling(long n, int k_max) {
    if (n < 1) throw ExactError("expected_profile_stirling: n >= 1 required");
    if (k_max < 0) throw ExactError("expected_profile_stirling: k_max >= 0 required");
    if constexpr (num_traits<T>::exact) {
        if (n > 100000) throw ExactError("expected_profile_stirling: rational mode capped");
    }
    StirlingRowScanner<T> s(k_max);
    s.advance_to(n);
    return s.row();
}

// ---------------------------------------------------------------------------
// Expected-profile tables via the split-law recurrences
// ---------------------------------------------------------------------------

template <typename T>
struct ExactTable {
    TreeModel model;
    int k_max = 0;
    std::vector<std::vector<T>> mu;               // mu[n][k], n = 0..n_max
    std::vector<std::vector<std::vector<T>>> pm;  // pm[m][n][k], m = 0..m_max (may be empty)
    std::vector<std::vector<std::vector<T>>> qm;  // toll terms, same layout (optional)

    T row_sum(long n) const {
        T s{};
        for (const auto& v : mu[n]) s += v;
        return s;
    }
};

template <typename T>
ExactTable<T> expected_profile_dp(const TreeModel& model, long n_max, int k_max) {
    if (model.family == Family::Increasing || model.family == Family::Mobile)
        throw ExactError("expected_profile_dp: use the series module for increasing varieties");
    if constexpr (num_traits<T>::exact) {
        if (n_max > 2000) throw ExactError("expected_profile_dp: rational mode capped at n=2000");
    }
    ExactTable<T> table;
    table.model = model;
    table.k_max = k_max;
    table.mu.assign(n_max + 1, std::vector<T>(k_max + 1));
    auto& mu = table.mu;
    const T one = num_traits<T>::from_int(1);

    if (model.family == Family::Recursive) {
        // Uniform split: mu_{n,k} = (A_{n-1,k-1} + A_{n-1,k})/(n-1),
        // A_{N,k} = sum_{j<=N} mu_{j,k}. O(n k) total.
        std::vector<T> acc(k_max + 2);  // acc[k+1] indexed so acc[0] is the k=-1 slot
        if (n_max >= 1) mu[1][0] = one;
        for (int k = 0; k <= k_max; ++k) acc[k + 1] = mu[1][k];
        for (long n = 2; n <= n_max; ++n) {
            const T inv = num_traits<T>::from_fraction(1, n - 1);
            for (int k = 0; k <= k_max; ++k) mu[n][k] = (acc[k] + acc[k + 1]) * inv;
            for (int k = 0; k <= k_max; ++k) acc[k + 1] += mu[n][k];
        }
        return table;
    }

    if (model.family == Family::Port) {
        if (n_max >= 1) mu[1][0] = one;
        for (long n = 2; n <= n_max; ++n) {
            auto law = split_distribution<T>(model, n);
            mu[n][0] = one;
            for (int k = 1; k <= k_max; ++k) {
                T s{};
                for (long j = 1; j < n; ++j) s += law.pi[j] * (mu[j][k - 1] + mu[n - j][k]);
                mu[n][k] = s;
            }
        }
        return table;
    }

    // Branching families (quad/grid/mary): bucket regions are single nodes.
    const long thr = bucket_threshold(model);
    const T h = num_traits<T>::from_int(branch_count(model));
    for (long n = 1; n <= n_max; ++n) {
        mu[n][0] = one;
        if (n < thr || n < 2) continue;
        auto law = split_distribution<T>(model, n);
        for (int k = 1; k <= k_max; ++k) {
            T s{};
            for (size_t j = 0; j < law.pi.size(); ++j)
                if (!(law.pi[j] == T{})) s += law.pi[j] * mu[j][k - 1];
            mu[n][k] = h * s;
        }
    }
    return table;
}

/// Expected node count N_n (root + all buckets), for row-sum conservation of
/// bucketed families: N_n = 1 + h sum_j pi_{n,j} N_j.
template <typename T>
std::vector<T> expected_node_count(const TreeModel& model, long n_max) {
    std::vector<T> cnt(n_max + 1);
    const long thr = bucket_threshold(model);
    const T one = num_traits<T>::from_int(1);
    for (long n = 1; n <= n_max; ++n) {
        if (n < thr || n < 2) {
            cnt[n] = one;
            continue;
        }
        auto law = split_distribution<T>(model, n);
        if (law.shape == SplitShape::TwoPartRest) {
            cnt[n] = num_traits<T>::from_int(n);
            continue;
        }
        T s{};
        for (size_t j = 0; j < law.pi.size(); ++j)
            if (!(law.pi[j] == T{})) s += law.pi[j] * cnt[j];
        cnt[n] = one + num_traits<T>::from_int(law.h) * s;
    }
    return cnt;
}

// ---------------------------------------------------------------------------
// Central moments P^(m)_{n,k} for two-part-split families
// ---------------------------------------------------------------------------

inline bool has_two_part_split(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive:
        case Family::Port:
            return true;
        case Family::Quad: return model.d == 1;
        case Family::Mary: return model.m == 2;
        case Family::Grid: return model.m == 2 && model.d == 1;
        default: return false;
    }
}

/// Multinomial index set I_m: a+b+c = m with a,b < m (the linear a=m / b=m
/// terms live on the left side of the moment recurrence).
inline std::vector<std::array<int, 3>> moment_index_set(int m) {
    std::vector<std::array<int, 3>> out;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m - a; ++b) out.push_back({a, b, m - a - b});
    // (a,b,c) with c = m-a-b >= 1 always here except a+b=m cases:
    for (int a = 0; a < m; ++a) {
        int b = m - a;
        if (b < m) out.push_back({a, b, 0});
    }
    return out;
}

inline long multinomial3(int m, int a, int b, int c) {
    auto f = [](int x) {
        long r = 1;
        for (int i = 2; i <= x; ++i) r *= i;
        return r;
    };
    return f(m) / (f(a) * f(b) * f(c));
}

/// Central-moment tables. pm[m][n][k] = E{(Y_{n,k}-mu_{n,k})^m}; the toll
/// tables qm are kept when keep_toll is set (needed by the closed form).
template <typename T>
ExactTable<T> central_moment_dp(const TreeModel& model, long n_max, int k_max, int m_max,
                                bool keep_toll = false) {
    if (!has_two_part_split(model))
        throw ExactError("central_moment_dp: only two-part-split families are supported");
    if (m_max > 8) throw ExactError("central_moment_dp: m_max <= 8 required");
    if (n_max > 2000) throw ExactError("central_moment_dp: n_max <= 2000 required");

    ExactTable<T> table = expected_profile_dp<T>(model, n_max, k_max);
    auto& mu = table.mu;
    table.pm.assign(m_max + 1,
                    std::vector<std::vector<T>>(n_max + 1, std::vector<T>(k_max + 1)));
    if (keep_toll)
        table.qm.assign(m_max + 1,
                        std::vector<std::vector<T>>(n_max + 1, std::vector<T>(k_max + 1)));
    auto& P = table.pm;
    const T one = num_traits<T>::from_int(1);
    for (long n = 0; n <= n_max; ++n)
        for (int k = 0; k <= k_max; ++k) P[0][n][k] = one;

    const long thr = bucket_threshold(model);
    const bool branching = model.family != Family::Recursive && model.family != Family::Port;
    std::vector<std::array<int, 3>> isets[9];
    std::vector<T> coefs[9];
    for (int m = 2; m <= m_max; ++m) {
        isets[m] = moment_index_set(m);
        for (const auto& [a, b, c] : isets[m])
            coefs[m].push_back(num_traits<T>::from_int(multinomial3(m, a, b, c)));
    }

    std::vector<T> nabla_pow(m_max + 1);
    for (long n = 2; n <= n_max; ++n) {
        if (branching && n < thr) continue;  // deterministic bucket: all central moments 0
        auto law = split_distribution<T>(model, n);
        const int kap = branching ? law.kappa : 0;
        for (int k = 1; k <= k_max; ++k) {
            std::vector<T> q(m_max + 1);
            std::vector<T> lin(m_max + 1);
            for (size_t j = 0; j < law.pi.size(); ++j) {
                const T& pj = law.pi[j];
                if (pj == T{}) continue;
                const long j2 = branching ? n - kap - static_cast<long>(j)
                                          : n - static_cast<long>(j);
                const int k2 = branching ? k - 1 : k;
                T nab = mu[j][k - 1] + mu[j2][k2] - mu[n][k];
                nabla_pow[0] = one;
                for (int c = 1; c <= m_max; ++c) nabla_pow[c] = nabla_pow[c - 1] * nab;
                for (int m = 2; m <= m_max; ++m) {
                    T acc{};
                    for (size_t idx = 0; idx < isets[m].size(); ++idx) {
                        const auto& [a, b, c] = isets[m][idx];
                        T term = P[a][j][k - 1] * P[b][j2][k2];
                        if (c > 0) term = term * nabla_pow[c];
                        acc += coefs[m][idx] * term;
                    }
                    q[m] += pj * acc;
                    lin[m] += pj * (P[m][j][k - 1] + P[m][j2][k2]);
                }
            }
            for (int m = 2; m <= m_max; ++m) {
                P[m][n][k] = lin[m] + q[m];
                if (keep_toll) table.qm[m][n][k] = q[m];
            }
        }
    }
    return table;
}

/// Independent route to P^(m)_{n,k} for recursive trees:
///   P = Q_{n,k} + sum_{1<=j<n} sum_{0<=l<=k} (Q_{j,k-l}/j) [u^l](u+1)prod_{j<h<n}(1+u/h).
/// Must agree with the DP above; requires the toll tables.
template <typename T>
T closed_form_recursive_moment(const ExactTable<T>& table, long n, int k, int m) {
    if (table.model.family != Family::Recursive)
        throw ExactError("closed_form_recursive_moment: recursive trees only");
    if (table.qm.empty()) throw ExactError("closed_form_recursive_moment: toll tables not kept");
    if (n > static_cast<long>(table.mu.size()) - 1 || n > 400)
        throw ExactError("closed_form_recursive_moment: n out of range");
    const auto& Q = table.qm[m];
    T total = Q[n][k];
    // poly = prod_{j<h<n}(1+u/h), built downward from j = n-1 (empty product).
    std::vector<T> poly(k + 1);
    poly[0] = num_traits<T>::from_int(1);
    for (long j = n - 1; j >= 1; --j) {
        const T invj = num_traits<T>::from_fraction(1, j);
        for (int l = 0; l <= k; ++l) {
            T coef = poly[l];
            if (l >= 1) coef += poly[l - 1];  // [u^l](u+1)*poly
            if (!(coef == T{}) && !(Q[j][k - l] == T{})) total += Q[j][k - l] * invj * coef;
        }
        if (j >= 2)
            for (int l = k; l >= 1; --l) poly[l] += poly[l - 1] * num_traits<T>::from_fraction(1, j);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Brute-force enumeration oracles (tiny n)
// ---------------------------------------------------------------------------

using ProfileKey = std::vector<std::uint32_t>;
using ProfileDist = std::map<ProfileKey, Rat>;

namespace detail {

inline ProfileKey profile_key(const std::vector<int>& depths) {
    int mx = 0;
    for (int d : depths) mx = std::max(mx, d);
    ProfileKey key(mx + 1, 0);
    for (int d : depths) key[d]++;
    return key;
}

inline void enum_recursive_rec(std::vector<int>& depths, long n, const Rat& w, ProfileDist& out) {
    const long i = static_cast<long>(depths.size());
    if (i == n) {
        out[profile_key(depths)] += w;
        return;
    }
    const Rat wi = w / i;
    for (long p = 0; p < i; ++p) {
        depths.push_back(depths[p] + 1);
        enum_recursive_rec(depths, n, wi, out);
        depths.pop_back();
    }
}

inline void enum_port_rec(std::vector<int>& depths, std::vector<int>& gaps, long n, const Rat& w,
                          ProfileDist& out) {
    const long i = static_cast<long>(depths.size());
    if (i == n) {
        out[profile_key(depths)] += w;
        return;
    }
    const Rat wi = w / static_cast<long>(gaps.size());
    const size_t gsz = gaps.size();
    for (size_t g = 0; g < gsz; ++g) {
        const int owner = gaps[g];
        depths.push_back(depths[owner] + 1);
        gaps.push_back(owner);
        gaps.push_back(static_cast<int>(i));
        enum_port_rec(depths, gaps, n, wi, out);
        gaps.pop_back();
        gaps.pop_back();
        depths.pop_back();
    }
}

inline void mary_node_depths(const std::vector<int>& items, int depth, int m, int t,
                             std::vector<int>& out) {
    if (items.empty()) return;
    const long theta = static_cast<long>(m) * (t + 1) - 1;
    out.push_back(depth);
    if (static_cast<long>(items.size()) < theta) return;  // bucket
    std::vector<int> sample(items.begin(), items.begin() + theta);
    std::sort(sample.begin(), sample.end());
    std::vector<int> pivots;
    for (int j = 1; j < m; ++j) pivots.push_back(sample[static_cast<size_t>(j) * (t + 1) - 1]);
    std::vector<std::vector<int>> groups(m);
    for (int x : items) {
        if (std::find(pivots.begin(), pivots.end(), x) != pivots.end()) continue;
        int g = 0;
        while (g < m - 1 && x > pivots[g]) ++g;
        groups[g].push_back(x);
    }
    for (const auto& g : groups) mary_node_depths(g, depth + 1, m, t, out);
}

inline ProfileDist enum_permutation_tree(long n, int m, int t) {
    ProfileDist out;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const Rat w = Rat(1, factorial_big(static_cast<unsigned>(n)));
    do {
        std::vector<int> depths;
        mary_node_depths(perm, 0, m, t, depths);
        out[profile_key(depths)] += w;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

// Increasing varieties: enumerate (degree, ordered subtree sizes) with
// probability phi_r prod tau^_{a_i} / (s * tau^_s), where tau^ is the EGF
// coefficient sequence solving tau' = phi(tau).
struct IncreasingEnumerator {
    std::vector<Rat> phi;   // degree weights
    std::vector<Rat> tau;   // tau^_s
    std::vector<ProfileDist> memo;

    const ProfileDist& dist(long s) {
        auto& slot = memo[s];
        if (!slot.empty()) return slot;
        if (s == 1) {
            slot[ProfileKey{1}] = Rat(1);
            return slot;
        }
        const Rat total = tau[s] * s;
        const long dmax = std::min<long>(static_cast<long>(phi.size()) - 1, s - 1);
        std::vector<long> comp;
        ProfileDist acc;
        for (long r = 1; r <= dmax; ++r) {
            if (phi[r] == 0) continue;
            comp.clear();
            // enumerate ordered compositions of s-1 into r positive parts
            std::function<void(long, long)> go = [&](long slots, long rem) {
                if (slots == 0) {
                    if (rem != 0) return;
                    Rat w = phi[r] / total;
                    for (long a : comp) w *= tau[a];
                    if (w == 0) return;
                    // convolve subtree profile distributions, shifted one level
                    ProfileDist cur;
                    cur[ProfileKey{}] = Rat(1);
                    for (long a : comp) {
                        const ProfileDist& sub = dist(a);
                        ProfileDist next;
                        for (const auto& [p1, w1] : cur)
                            for (const auto& [p2, w2] : sub) {
                                ProfileKey q(std::max(p1.size(), p2.size()), 0);
                                for (size_t i = 0; i < q.size(); ++i) {
                                    if (i < p1.size()) q[i] += p1[i];
                                    if (i < p2.size()) q[i] += p2[i];
                                }
                                next[q] += w1 * w2;
                            }
                        cur.swap(next);
                    }
                    for (const auto& [p, wp] : cur) {
                        ProfileKey q(p.size() + 1);
                        q[0] = 1;
                        std::copy(p.begin(), p.end(), q.begin() + 1);
                        acc[q] += w * wp;
                    }
                    return;
                }
                for (long a = 1; a + (slots - 1) <= rem; ++a) {
                    if (tau[a] == 0) continue;
                    comp.push_back(a);
                    go(slots - 1, rem - a);
                    comp.pop_back();
                }
            };
            go(r, s - 1);
        }
        slot = std::move(acc);
        return slot;
    }
};

inline std::vector<Rat> phi_coeffs_rational(const TreeModel& model, long up_to) {
    std::vector<Rat> phi(up_to + 1);
    if (model.family == Family::Mobile) {
        phi[0] = 1;
        for (long j = 1; j <= up_to; ++j) phi[j] = Rat(1, j);
    } else {
        for (size_t j = 0; j < model.phi.size() && static_cast<long>(j) <= up_to; ++j)
            phi[j] = Rat(model.phi[j]);  // doubles convert exactly
        // normalize so phi(0) = 1 (tree distribution is scale invariant)
        const Rat p0 = phi[0];
        for (auto& c : phi) c /= p0;
    }
    return phi;
}

inline std::vector<Rat> solve_tau_rational(const std::vector<Rat>& phi, long n_max) {
    // (n+1) tau_{n+1} = [z^n] phi(tau); powers of tau rebuilt per step is fine here (tiny n).
    std::vector<Rat> tau(n_max + 1);
    for (long n = 0; n < n_max; ++n) {
        Rat val;
        std::vector<Rat> pw(n_max + 1);
        pw[0] = 1;
        for (size_t j = 0; j < phi.size(); ++j) {
            if (j > 0) {
                std::vector<Rat> nxt(n_max + 1);
                for (long a = 0; a <= n; ++a)
                    if (pw[a] != 0)
                        for (long b = 1; a + b <= n; ++b)
                            if (tau[b] != 0) nxt[a + b] += pw[a] * tau[b];
                pw = std::move(nxt);
            }
            if (phi[j] != 0 && static_cast<long>(n) <= n_max) val += phi[j] * pw[n];
        }
        tau[n + 1] = val / (n + 1);
    }
    return tau;
}

}  // namespace detail

/// Exact distribution over profile vectors for tiny trees.
inline ProfileDist enumerate_exact(const TreeModel& model, long n) {
    switch (model.family) {
        case Family::Recursive: {
            if (n < 1 || n > 8) throw ExactError("enumerate_exact: recursive supports n <= 8");
            ProfileDist out;
            std::vector<int> depths{0};
            detail::enum_recursive_rec(depths, n, Rat(1), out);
            return out;
        }
        case Family::Port: {
            if (n < 1 || n > 7) throw ExactError("enumerate_exact: port supports n <= 7");
            ProfileDist out;
            std::vector<int> depths{0};
            std::vector<int> gaps{0};
            if (n == 1) {
                out[ProfileKey{1}] = Rat(1);
                return out;
            }
            detail::enum_port_rec(depths, gaps, n, Rat(1), out);
            return out;
        }
        case Family::Quad:
            if (model.d != 1)
                throw ExactError("enumerate_exact: quad with d >= 2 has no finite outcome space");
            if (n < 1 || n > 7) throw ExactError("enumerate_exact: quad{1} supports n <= 7");
            return detail::enum_permutation_tree(n, 2, 0);
        case Family::Mary:
            if (n < 1 || n > 7) throw ExactError("enumerate_exact: mary supports n <= 7");
            return detail::enum_permutation_tree(n, model.m, model.t);
        case Family::Grid:
            if (model.d == 1) {
                if (n < 1 || n > 7) throw ExactError("enumerate_exact: grid{m,1} supports n <= 7");
                return detail::enum_permutation_tree(n, model.m, 0);
            }
            throw ExactError("enumerate_exact: grid with d >= 2 has no finite outcome space");
        case Family::Increasing:
        case Family::Mobile: {
            if (n < 1 || n > 7) throw ExactError("enumerate_exact: increasing supports n <= 7");
            detail::IncreasingEnumerator en;
            en.phi = detail::phi_coeffs_rational(model, n);
            en.tau = detail::solve_tau_rational(en.phi, n);
            if (en.tau[n] == 0)
                throw ExactError("enumerate_exact: no trees of this size in the variety");
            en.memo.resize(n + 1);
            return en.dist(n);
        }
    }
    throw ExactError("enumerate_exact: unreachable");
}

/// Per-level mean and central moments of a profile distribution.
struct DistMoments {
    std::vector<Rat> mu;
    std::vector<std::vector<Rat>> pm;  // pm[m][k], m = 0..m_max
};

inline DistMoments dist_moments(const ProfileDist& dist, int m_max) {
    size_t kmax = 0;
    for (const auto& [p, w] : dist) kmax = std::max(kmax, p.size());
    DistMoments out;
    out.mu.assign(kmax, Rat(0));
    for (const auto& [p, w] : dist)
        for (size_t k = 0; k < p.size(); ++k) out.mu[k] += w * p[k];
    out.pm.assign(m_max + 1, std::vector<Rat>(kmax, Rat(0)));
    for (size_t k = 0; k < kmax; ++k) out.pm[0][k] = 1;
    for (const auto& [p, w] : dist)
        for (size_t k = 0; k < kmax; ++k) {
            const Rat dev = Rat(k < p.size() ? p[k] : 0) - out.mu[k];
            Rat pw = 1;
            for (int m = 1; m <= m_max; ++m) {
                pw *= dev;
                out.pm[m][k] += pw * w;
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Uniform-bound monitor: sup_k mu_{n,k} r^k n^{-r} sqrt(L_n) over n <= n_cap
// ---------------------------------------------------------------------------

struct UniformBoundReport {
    double r;
    double global_sup = 0;
    long arg_n = 0;
    std::vector<std::pair<long, double>> per_decade_sup;  // (decade upper n, sup)
};

inline std::vector<UniformBoundReport> uniform_bound_report(long n_cap,
                                                            const std::vector<double>& rs = {
                                                                0.8, 1.0, 1.25}) {
    std::vector<UniformBoundReport> reports;
    for (double r : rs) reports.push_back({r});
    const int k_max = 96;
    StirlingRowScanner<double> scan(k_max);
    long next_decade = 10;
    for (long n = 1; n <= n_cap; ++n) {
        scan.advance_to(n);
        const double Ln = std::max(std::log(static_cast<double>(n)), 1.0);
        for (auto& rep : reports) {
            double rk = 1.0;
            const double nr = std::pow(static_cast<double>(n), -rep.r) * std::sqrt(Ln);
            double sup = 0;
            const auto& row = scan.row();
            for (int k = 0; k <= std::min<long>(k_max, n); ++k) {
                sup = std::max(sup, row[k] * rk * nr);
                rk *= rep.r;
            }
            if (sup > rep.global_sup) {
                rep.global_sup = sup;
                rep.arg_n = n;
            }
        }
        if (n == next_decade || n == n_cap) {
            for (auto& rep : reports) rep.per_decade_sup.emplace_back(n, rep.global_sup);
            next_decade *= 10;
        }
    }
    return reports;
}

}  // namespace logtree::exact
