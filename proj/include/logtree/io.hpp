#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "logtree/asympt.hpp"
#include "logtree/montecarlo.hpp"

namespace logtree::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double (what CSV cells use).
inline std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

/// Write-to-temp-then-rename so readers never observe a partial file.
inline void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline json hist_to_json(const mc::Hist& h) {
    json arr = json::array();
    for (auto& [v, c] : h) arr.push_back({v, c});
    return arr;
}

inline json gate_to_json(const mc::GateResult& g) {
    return json{{"name", g.name},           {"pass", g.pass},
                {"measured", g.measured},   {"reference", g.reference},
                {"tolerance", g.tolerance}, {"kind", g.kind},
                {"provenance", g.provenance}, {"detail", g.detail}};
}

inline json summary_to_json(const mc::SimSummary& s) {
    json j;
    j["model"] = format_model(s.model);
    j["n"] = s.n;
    j["reps"] = s.reps;
    j["seed"] = s.seed;
    auto est = mc::hist_moments(s.width_hist, s.reps);
    j["width_mean"] = est.mean;
    j["width_var"] = est.var;
    j["width_m3"] = est.m3;
    j["width_m4"] = est.m4;
    j["width_se"] = {{"mean", est.se_mean}, {"var", est.se_var}, {"m3", est.se_m3},
                     {"m4", est.se_m4}};
    json prof = json::array();
    for (size_t k = 0; k < s.level_sum.size(); ++k)
        prof.push_back({k, s.mean_level(k), s.se_level(k)});
    j["mean_profile"] = prof;  // rows: level, mean, se
    json hists;
    hists["width"] = hist_to_json(s.width_hist);
    hists["mode"] = hist_to_json(s.mode_hist);
    for (auto& [lvl, h] : s.level_hists) hists["level_" + std::to_string(lvl)] = hist_to_json(h);
    j["histograms"] = std::move(hists);
    return j;
}

inline json constants_to_json(const TreeModel& model) {
    const auto c = asympt::model_constants(model);
    json j;
    j["model"] = format_model(model);
    j["width_regular"] = c.width_regular;
    if (c.width_regular) {
        j["v"] = c.v;
        j["sigma2"] = c.sigma2;
        j["v_exact"] = rat_to_string(c.v_exact);
        j["sigma2_exact"] = rat_to_string(c.sigma2_exact);
    }
    return j;
}

inline json gate_config_to_json(const mc::GateConfig& c) {
    return json{{"seed", c.seed},
                {"threads", c.threads},
                {"width_n", c.width_n},
                {"width_n_small", c.width_n_small},
                {"width_reps", c.width_reps},
                {"width_band_lo", c.width_band_lo},
                {"width_band_hi", c.width_band_hi},
                {"var_n_list", c.var_n_list},
                {"var_reps", c.var_reps},
                {"var_band_factor", c.var_band_factor},
                {"tail_n", c.tail_n},
                {"tail_reps", c.tail_reps},
                {"tail_T", c.tail_T},
                {"tail_p8_max", c.tail_p8_max},
                {"fig1_n_sel0", c.fig1_n_sel0},
                {"fig1_n_selm1", c.fig1_n_selm1},
                {"fig1_reps", c.fig1_reps},
                {"fig1_min_reps", c.fig1_min_reps},
                {"moment_se_mult", c.moment_se_mult},
                {"conv_ell_max", c.conv_ell_max},
                {"conv_band_lo", c.conv_band_lo},
                {"conv_band_hi", c.conv_band_hi},
                {"budget", c.budget},
                {"allow_large", c.allow_large}};
}

/// Partial override: keys present in j replace the defaults in c.
inline void gate_config_update(mc::GateConfig& c, const json& j) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("threads", c.threads);
    get("width_n", c.width_n);
    get("width_n_small", c.width_n_small);
    get("width_reps", c.width_reps);
    get("width_band_lo", c.width_band_lo);
    get("width_band_hi", c.width_band_hi);
    get("var_n_list", c.var_n_list);
    get("var_reps", c.var_reps);
    get("var_band_factor", c.var_band_factor);
    get("tail_n", c.tail_n);
    get("tail_reps", c.tail_reps);
    get("tail_T", c.tail_T);
    get("tail_p8_max", c.tail_p8_max);
    get("fig1_n_sel0", c.fig1_n_sel0);
    get("fig1_n_selm1", c.fig1_n_selm1);
    get("fig1_reps", c.fig1_reps);
    get("fig1_min_reps", c.fig1_min_reps);
    get("moment_se_mult", c.moment_se_mult);
    get("conv_ell_max", c.conv_ell_max);
    get("conv_band_lo", c.conv_band_lo);
    get("conv_band_hi", c.conv_band_hi);
    get("budget", c.budget);
    get("allow_large", c.allow_large);
}

inline std::string hist_to_csv(const mc::Hist& h) {
    std::string out = "value,freq\n";
    for (auto& [v, c] : h) out += std::to_string(v) + "," + std::to_string(c) + "\n";
    return out;
}

/// Table CSV: one row per (n, k, value).
template <typename T>
std::string table_to_csv(const std::vector<std::pair<long, std::vector<T>>>& rows) {
    std::string out = "n,k,value\n";
    for (auto& [n, row] : rows)
        for (size_t k = 0; k < row.size(); ++k) {
            out += std::to_string(n) + "," + std::to_string(k) + ",";
            if constexpr (std::is_same_v<T, Rat>)
                out += rat_to_string(row[k]);
            else
                out += format_double(row[k]);
            out += "\n";
        }
    return out;
}

template <typename T>
json table_to_json(const std::vector<std::pair<long, std::vector<T>>>& rows) {
    json arr = json::array();
    for (auto& [n, row] : rows)
        for (size_t k = 0; k < row.size(); ++k) {
            if constexpr (std::is_same_v<T, Rat>)
                arr.push_back({n, k, rat_to_string(row[k])});
            else
                arr.push_back({n, k, row[k]});
        }
    return arr;
}

}  // namespace logtree::io
