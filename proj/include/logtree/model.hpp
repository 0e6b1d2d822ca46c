#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logtree {

enum class Family { Recursive, Port, Mary, Quad, Grid, Increasing, Mobile };

struct ModelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Which random-tree family plus its parameters. Immutable value type.
///
/// The binary search tree is not a separate family: it is quad:d=1 (same
/// split law) and also increasing:phi=1,2,1; mary:m=2,t=0 has the same
/// profile distribution as well.
struct TreeModel {
    Family family = Family::Recursive;
    int m = 0;                // Mary, Grid
    int t = 0;                // Mary
    int d = 0;                // Quad, Grid
    std::vector<double> phi;  // Increasing

    bool operator==(const TreeModel& o) const {
        return family == o.family && m == o.m && t == o.t && d == o.d && phi == o.phi;
    }

    static TreeModel recursive() { return {}; }
    static TreeModel port() { return {Family::Port, 0, 0, 0, {}}; }
    static TreeModel mobile() { return {Family::Mobile, 0, 0, 0, {}}; }
    static TreeModel mary(int m, int t) { return {Family::Mary, m, t, 0, {}}; }
    static TreeModel quad(int d) { return {Family::Quad, 0, 0, d, {}}; }
    static TreeModel grid(int m, int d) { return {Family::Grid, m, 0, d, {}}; }
    static TreeModel increasing(std::vector<double> phi) {
        return {Family::Increasing, 0, 0, 0, std::move(phi)};
    }

    /// Max degree of the Increasing degree polynomial.
    int phi_degree() const { return static_cast<int>(phi.size()) - 1; }
};

namespace detail {

inline double parse_number(std::string_view s, const char* field) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ModelError(std::string("model: malformed number for field '") + field + "': '" +
                         std::string(s) + "'");
    return v;
}

inline int parse_int(std::string_view s, const char* field) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ModelError(std::string("model: malformed integer for field '") + field + "': '" +
                         std::string(s) + "'");
    return v;
}

// "m=3,d=2" -> value of the named key, error if missing/extra keys.
inline std::vector<std::pair<std::string_view, std::string_view>> split_kv(std::string_view s) {
    std::vector<std::pair<std::string_view, std::string_view>> out;
    while (!s.empty()) {
        auto comma = s.find(',');
        std::string_view item = s.substr(0, comma);
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ModelError("model: expected key=value, got '" + std::string(item) + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

inline std::string_view expect_key(
    const std::vector<std::pair<std::string_view, std::string_view>>& kv, std::string_view key) {
    for (auto& [k, v] : kv)
        if (k == key) return v;
    throw ModelError("model: missing field '" + std::string(key) + "'");
}

inline std::string format_coeff(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace detail

inline void validate_model(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive:
        case Family::Port:
        case Family::Mobile:
            break;
        case Family::Mary:
            if (model.m < 2) throw ModelError("model: mary requires m >= 2");
            if (model.t < 0) throw ModelError("model: mary requires t >= 0");
            break;
        case Family::Quad:
            if (model.d < 1) throw ModelError("model: quad requires d >= 1");
            break;
        case Family::Grid:
            if (model.m < 2) throw ModelError("model: grid requires m >= 2");
            if (model.d < 1) throw ModelError("model: grid requires d >= 1");
            break;
        case Family::Increasing: {
            const auto& phi = model.phi;
            if (phi.size() < 3)
                throw ModelError("model: increasing requires degree d >= 2 (phi has d+1 coefficients)");
            if (!(phi.front() > 0)) throw ModelError("model: increasing requires phi_0 > 0");
            if (!(phi.back() > 0)) throw ModelError("model: increasing requires phi_d > 0");
            for (double c : phi)
                if (!(c >= 0) || !std::isfinite(c))
                    throw ModelError("model: increasing requires all phi_j >= 0 and finite");
            break;
        }
    }
}

/// Grammar: recursive | port | mobile | mary:m=<int>,t=<int> | quad:d=<int>
///        | grid:m=<int>,d=<int> | increasing:phi=<c0>,<c1>,...,<cd>
inline TreeModel parse_model(std::string_view text) {
    TreeModel model;
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (head == "recursive" || head == "port" || head == "mobile") {
        if (colon != std::string_view::npos)
            throw ModelError("model: '" + std::string(head) + "' takes no parameters");
        model.family = head == "recursive" ? Family::Recursive
                       : head == "port"    ? Family::Port
                                           : Family::Mobile;
    } else if (head == "mary") {
        auto kv = detail::split_kv(rest);
        if (kv.size() != 2) throw ModelError("model: mary takes exactly m and t");
        model.family = Family::Mary;
        model.m = detail::parse_int(detail::expect_key(kv, "m"), "m");
        model.t = detail::parse_int(detail::expect_key(kv, "t"), "t");
    } else if (head == "quad") {
        auto kv = detail::split_kv(rest);
        if (kv.size() != 1) throw ModelError("model: quad takes exactly d");
        model.family = Family::Quad;
        model.d = detail::parse_int(detail::expect_key(kv, "d"), "d");
    } else if (head == "grid") {
        auto kv = detail::split_kv(rest);
        if (kv.size() != 2) throw ModelError("model: grid takes exactly m and d");
        model.family = Family::Grid;
        model.m = detail::parse_int(detail::expect_key(kv, "m"), "m");
        model.d = detail::parse_int(detail::expect_key(kv, "d"), "d");
    } else if (head == "increasing") {
        constexpr std::string_view kPrefix = "phi=";
        if (rest.substr(0, kPrefix.size()) != kPrefix)
            throw ModelError("model: increasing requires phi=<c0>,<c1>,...");
        rest.remove_prefix(kPrefix.size());
        model.family = Family::Increasing;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            model.phi.push_back(detail::parse_number(rest.substr(0, comma), "phi"));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    } else {
        throw ModelError("model: unknown family '" + std::string(head) + "'");
    }
    validate_model(model);
    return model;
}

/// Canonical string form; parse(format(m)) == m.
inline std::string format_model(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive: return "recursive";
        case Family::Port: return "port";
        case Family::Mobile: return "mobile";
        case Family::Mary:
            return "mary:m=" + std::to_string(model.m) + ",t=" + std::to_string(model.t);
        case Family::Quad: return "quad:d=" + std::to_string(model.d);
        case Family::Grid:
            return "grid:m=" + std::to_string(model.m) + ",d=" + std::to_string(model.d);
        case Family::Increasing: {
            std::string s = "increasing:phi=";
            for (size_t i = 0; i < model.phi.size(); ++i) {
                if (i) s += ',';
                s += detail::format_coeff(model.phi[i]);
            }
            return s;
        }
    }
    throw ModelError("model: unreachable");
}

/// Does one inserted item create exactly one node? (Determines |W_{n+1}-W_n|<=1.)
inline bool single_node_insertion(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive:
        case Family::Port:
        case Family::Quad:
            return true;
        case Family::Mary:
            return model.m == 2 && model.t == 0;
        case Family::Grid:
            return model.m == 2;
        default:
            return false;
    }
}

/// Families grown by inserting one item at a time.
inline bool supports_incremental_growth(const TreeModel& model) {
    switch (model.family) {
        case Family::Recursive:
        case Family::Port:
        case Family::Quad:
        case Family::Grid:
        case Family::Mary:
            return true;
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------

/// Node counts per level, root at level 0.
struct Profile {
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;  // items inserted (>= node count for bucketed families)
};

struct WidthSummary {
    std::uint64_t width = 0;
    int mode_level = 0;  // smallest level attaining the width
    int tie_count = 0;
};

inline WidthSummary width_and_mode(const Profile& profile) {
    if (profile.counts.empty()) throw ModelError("width_and_mode: empty profile");
    WidthSummary s;
    s.width = 0;
    for (size_t k = 0; k < profile.counts.size(); ++k) {
        if (profile.counts[k] > s.width) {
            s.width = profile.counts[k];
            s.mode_level = static_cast<int>(k);
            s.tie_count = 1;
        } else if (profile.counts[k] == s.width) {
            ++s.tie_count;
        }
    }
    return s;
}

/// L_n = max(ln n, 1) and the drift offset Delta(k) = k - v*L_n.
struct LogScale {
    double L;
    double v;

    explicit LogScale(double n, double drift = 1.0)
        : L(std::max(std::log(n), 1.0)), v(drift) {}

    double delta(double k) const { return k - v * L; }
    double frac() const { return L - std::floor(L); }
};

}  // namespace logtree
