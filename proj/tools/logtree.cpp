// logtree: random logarithmic-height tree laboratory.
//
// Subcommands cover exact profile tables, asymptotic predictions, seeded
// Monte Carlo experiments and the full verification gate suite. All runs are
// reproducible: the default seed is the fixed constant 1729 and every
// replication derives its own RNG stream from (seed, replication index).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "logtree/acceptance.hpp"
#include "logtree/asympt.hpp"
#include "logtree/exact.hpp"
#include "logtree/generate.hpp"
#include "logtree/io.hpp"
#include "logtree/montecarlo.hpp"
#include "logtree/series.hpp"

namespace {

using namespace logtree;
using io::json;

constexpr std::uint64_t kDefaultSeed = 1729;

struct CommonOpts {
    std::string model_str = "recursive";
    long n = 1000;
    long reps = 100;
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string format = "json";
    int threads = 0;
    bool allow_large = false;
    std::string gate_config;
    bool exact_mode = false;
};

int env_threads() {
    if (const char* s = std::getenv("LOGTREE_THREADS")) {
        const int t = std::atoi(s);
        if (t > 0) return t;
    }
    return 0;
}

void emit(const CommonOpts& opt, const std::string& content) {
    if (opt.out.empty())
        std::cout << content << "\n";
    else
        io::atomic_write(opt.out, content);
}

void emit_json(const CommonOpts& opt, const json& j) { emit(opt, j.dump(2)); }

mc::GateConfig load_gate_config(const CommonOpts& opt) {
    mc::GateConfig cfg;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads > 0 ? opt.threads : env_threads();
    cfg.allow_large = opt.allow_large;
    if (!opt.gate_config.empty()) {
        std::ifstream in(opt.gate_config);
        if (!in) throw std::runtime_error("cannot read gate config: " + opt.gate_config);
        json j;
        in >> j;
        io::gate_config_update(cfg, j);
    }
    return cfg;
}

mc::SimOptions sim_opts(const CommonOpts& opt) {
    mc::SimOptions o;
    o.n = opt.n;
    o.reps = opt.reps;
    o.seed = opt.seed;
    o.threads = opt.threads > 0 ? opt.threads : env_threads();
    o.allow_large = opt.allow_large;
    return o;
}

void add_common(CLI::App* cmd, CommonOpts& opt, bool with_model = true) {
    if (with_model)
        cmd->add_option("--model", opt.model_str, "model string (see --help-models)");
    cmd->add_option("--seed", opt.seed, "master seed (default 1729)");
    cmd->add_option("--out", opt.out, "output path (atomic write); stdout if omitted");
    cmd->add_option("--format", opt.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", opt.threads, "worker threads (default: LOGTREE_THREADS or all)");
    cmd->add_flag("--allow-large", opt.allow_large, "lift the n*reps node budget");
}

int cmd_generate(const CommonOpts& opt, const std::string& emit_kind) {
    const auto model = parse_model(opt.model_str);
    gen::Generator g(model);
    RngStream rng(opt.seed, 0);
    std::vector<std::int32_t> depths;
    g.depths(opt.n, rng, depths);
    if (emit_kind == "depths") {
        if (opt.format == "csv") {
            std::string csv = "node,depth\n";
            for (size_t i = 0; i < depths.size(); ++i)
                csv += std::to_string(i) + "," + std::to_string(depths[i]) + "\n";
            emit(opt, csv);
        } else {
            json j{{"model", format_model(model)}, {"n", opt.n}, {"seed", opt.seed},
                   {"depths", depths}};
            emit_json(opt, j);
        }
        return 0;
    }
    const auto profile = gen::profile_from_depths(depths, opt.n);
    if (opt.format == "csv") {
        std::string csv = "level,count\n";
        for (size_t k = 0; k < profile.counts.size(); ++k)
            csv += std::to_string(k) + "," + std::to_string(profile.counts[k]) + "\n";
        emit(opt, csv);
    } else {
        const auto ws = width_and_mode(profile);
        json j{{"model", format_model(model)}, {"n", opt.n},     {"seed", opt.seed},
               {"profile", profile.counts},    {"width", ws.width}, {"mode_level", ws.mode_level},
               {"tie_count", ws.tie_count}};
        emit_json(opt, j);
    }
    return 0;
}

int cmd_exact_profile(const CommonOpts& opt, int k_max) {
    const auto model = parse_model(opt.model_str);
    if (k_max < 0) k_max = static_cast<int>(std::min<long>(opt.n, 2 + 8 * static_cast<long>(
                                                1 + std::log(static_cast<double>(opt.n)))));
    const bool increasing =
        model.family == Family::Increasing || model.family == Family::Mobile;
    if (opt.exact_mode) {
        std::vector<std::pair<long, std::vector<Rat>>> rows;
        if (increasing) {
            auto t = series::profile_rows_increasing<Rat>(model, {opt.n}, k_max);
            rows.emplace_back(opt.n, t.rows[0]);
        } else if (model.family == Family::Recursive) {
            rows.emplace_back(opt.n, exact::expected_profile_stirling<Rat>(opt.n, k_max));
        } else {
            auto t = exact::expected_profile_dp<Rat>(model, opt.n, k_max);
            rows.emplace_back(opt.n, t.mu[opt.n]);
        }
        emit(opt, opt.format == "csv" ? io::table_to_csv(rows) : io::table_to_json(rows).dump(2));
        return 0;
    }
    std::vector<std::pair<long, std::vector<double>>> rows;
    if (increasing) {
        auto t = series::profile_rows_increasing<double>(model, {opt.n}, k_max);
        rows.emplace_back(opt.n, t.rows[0]);
    } else if (model.family == Family::Recursive) {
        rows.emplace_back(opt.n, exact::expected_profile_stirling<double>(opt.n, k_max));
    } else {
        auto t = exact::expected_profile_dp<double>(model, opt.n, k_max);
        rows.emplace_back(opt.n, t.mu[opt.n]);
    }
    emit(opt, opt.format == "csv" ? io::table_to_csv(rows) : io::table_to_json(rows).dump(2));
    return 0;
}

int cmd_exact_moments(const CommonOpts& opt, int m_max, int k_max) {
    const auto model = parse_model(opt.model_str);
    if (k_max < 0)
        k_max = static_cast<int>(std::min<long>(opt.n, 2 + 4 * static_cast<long>(
                                                    1 + std::log(static_cast<double>(opt.n)))));
    if (opt.exact_mode) {
        auto t = exact::central_moment_dp<Rat>(model, opt.n, k_max, m_max);
        json j{{"model", format_model(model)}, {"n", opt.n}, {"k_max", k_max}, {"m_max", m_max}};
        json mu = json::array(), pm = json::object();
        for (int k = 0; k <= k_max; ++k) mu.push_back(rat_to_string(t.mu[opt.n][k]));
        for (int m = 2; m <= m_max; ++m) {
            json row = json::array();
            for (int k = 0; k <= k_max; ++k) row.push_back(rat_to_string(t.pm[m][opt.n][k]));
            pm["m" + std::to_string(m)] = std::move(row);
        }
        j["mu"] = std::move(mu);
        j["central_moments"] = std::move(pm);
        emit_json(opt, j);
        return 0;
    }
    auto t = exact::central_moment_dp<double>(model, opt.n, k_max, m_max);
    if (opt.format == "csv") {
        std::string csv = "n,k,value\n";  // variance table (m = 2)
        for (int k = 0; k <= k_max; ++k)
            csv += std::to_string(opt.n) + "," + std::to_string(k) + "," +
                   io::format_double(t.pm[2][opt.n][k]) + "\n";
        emit(opt, csv);
        return 0;
    }
    json j{{"model", format_model(model)}, {"n", opt.n}, {"k_max", k_max}, {"m_max", m_max}};
    j["mu"] = t.mu[opt.n];
    json pm;
    for (int m = 2; m <= m_max; ++m) pm["m" + std::to_string(m)] = t.pm[m][opt.n];
    j["central_moments"] = std::move(pm);
    emit_json(opt, j);
    return 0;
}

int cmd_constants(const CommonOpts& opt) {
    const auto model = parse_model(opt.model_str);
    json j = io::constants_to_json(model);
    if (model.family == Family::Grid || model.family == Family::Mary) {
        const auto imp = asympt::model_constants_implicit(model);
        j["implicit"] = {{"f1", imp.f1},
                         {"v", imp.v},
                         {"sigma2", imp.sigma2},
                         {"newton_iterations", imp.newton_iterations}};
    }
    emit_json(opt, j);
    return 0;
}

int cmd_predict(const CommonOpts& opt) {
    const auto model = parse_model(opt.model_str);
    const auto c = asympt::model_constants(model);
    const double n = static_cast<double>(opt.n);
    const double L = std::max(std::log(n), 1.0);
    json j{{"model", format_model(model)}, {"n", opt.n}, {"L_n", L}, {"frac", L - std::floor(L)}};
    if (c.width_regular) {
        j["v"] = c.v;
        j["sigma2"] = c.sigma2;
        j["expected_width"] = asympt::expected_width_prediction(n, c);
    } else {
        j["width_regular"] = false;
        j["expected_width"] = asympt::expected_width_mobile(n);
    }
    if (model.family == Family::Recursive) {
        const auto p = asympt::mode_prediction(n);
        j["k_hat"] = p.k_hat;
        j["width_level"] = p.width_level;
        j["selector"] = p.selector;
    }
    emit_json(opt, j);
    return 0;
}

int cmd_simulate(const CommonOpts& opt, const std::vector<int>& levels) {
    const auto model = parse_model(opt.model_str);
    auto o = sim_opts(opt);
    o.hist_levels = levels;
    const auto s = mc::simulate(model, o);
    if (opt.format == "csv")
        emit(opt, io::hist_to_csv(s.width_hist));
    else
        emit_json(opt, io::summary_to_json(s));
    return 0;
}

int cmd_figure1(const CommonOpts& opt) {
    auto cfg = load_gate_config(opt);
    const auto r = mc::figure1_experiment(opt.n, opt.reps, cfg);
    json j{{"experiment", "figure1"},
           {"model", "recursive"},
           {"n", r.n},
           {"reps", r.reps},
           {"seed", cfg.seed},
           {"base_level", r.base_level},
           {"tv", {r.tv[0], r.tv[1], r.tv[2]}},
           {"closest_offset", r.closest_offset}};
    json hists;
    hists["width"] = io::hist_to_json(r.summary.width_hist);
    for (auto& [lvl, h] : r.summary.level_hists)
        hists["level_" + std::to_string(lvl)] = io::hist_to_json(h);
    j["histograms"] = std::move(hists);
    if (opt.format == "csv")
        emit(opt, io::hist_to_csv(r.summary.width_hist));
    else
        emit_json(opt, j);
    return 0;
}

int cmd_converge(const CommonOpts& opt, int ell_max) {
    const auto model = parse_model(opt.model_str);
    auto cfg = load_gate_config(opt);
    if (ell_max > 0) cfg.conv_ell_max = ell_max;
    const auto r = mc::convergence_experiment(model, cfg);
    if (opt.format == "csv") {
        std::string csv = "n,width,mode_level,width_ratio,level_ratio\n";
        for (const auto& p : r.points)
            csv += std::to_string(p.n) + "," + std::to_string(p.width) + "," +
                   std::to_string(p.mode_level) + "," + io::format_double(p.width_ratio) + "," +
                   io::format_double(p.level_ratio) + "\n";
        emit(opt, csv);
        return r.pass_band && r.pass_shrink ? 0 : 1;
    }
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({p.n, p.width, p.mode_level, p.width_ratio, p.level_ratio});
    json j{{"experiment", "converge"},
           {"model", format_model(model)},
           {"seed", cfg.seed},
           {"points", std::move(pts)},
           {"final_ratio", r.final_ratio},
           {"osc_first", r.osc_first},
           {"osc_last", r.osc_last},
           {"pass", r.pass_band && r.pass_shrink}};
    emit_json(opt, j);
    return r.pass_band && r.pass_shrink ? 0 : 1;
}

int cmd_oracle(const CommonOpts& opt) {
    const auto model = parse_model(opt.model_str);
    const auto dist = exact::enumerate_exact(model, opt.n);
    json arr = json::array();
    for (const auto& [p, w] : dist)
        arr.push_back({{"profile", p}, {"prob", rat_to_string(w)}});
    json j{{"model", format_model(model)}, {"n", opt.n}, {"profiles", std::move(arr)}};
    emit_json(opt, j);
    return 0;
}

int cmd_series(const CommonOpts& opt, int k_max, long ratio_n, bool dump_tau) {
    const auto model = parse_model(opt.model_str);
    if (ratio_n > 0) {
        const auto r = series::tau_asymptotic_ratio(model, ratio_n);
        emit_json(opt, json{{"model", format_model(model)},
                            {"n", ratio_n},
                            {"ratio", r.ratio},
                            {"R", r.R},
                            {"period", r.period}});
        return 0;
    }
    if (dump_tau) {
        if (opt.exact_mode) {
            auto phi = series::normalized_phi<Rat>(model, opt.n);
            auto tau = model.family == Family::Mobile
                           ? series::solve_tree_ode_mobile<Rat>(opt.n)
                           : series::solve_tree_ode<Rat>(phi, opt.n);
            json arr = json::array();
            BigInt f = 1;
            for (long i = 1; i <= opt.n; ++i) {
                f *= i;
                arr.push_back(rat_to_string(tau[i] * Rat(f)));  // tau_n counts
            }
            emit_json(opt, json{{"model", format_model(model)}, {"tau", std::move(arr)}});
            return 0;
        }
        auto rows = series::profile_rows_increasing<double>(model, {opt.n}, 0);
        emit_json(opt, json{{"model", format_model(model)},
                            {"rho", rows.rho},
                            {"tau_scaled", rows.tau}});
        return 0;
    }
    if (k_max < 0) k_max = 12;
    if (opt.exact_mode) {
        auto t = series::profile_rows_increasing<Rat>(model, {opt.n}, k_max);
        std::vector<std::pair<long, std::vector<Rat>>> rows{{opt.n, t.rows[0]}};
        emit(opt, opt.format == "csv" ? io::table_to_csv(rows) : io::table_to_json(rows).dump(2));
        return 0;
    }
    auto t = series::profile_rows_increasing<double>(model, {opt.n}, k_max);
    std::vector<std::pair<long, std::vector<double>>> rows{{opt.n, t.rows[0]}};
    emit(opt, opt.format == "csv" ? io::table_to_csv(rows) : io::table_to_json(rows).dump(2));
    return 0;
}

int cmd_gates(const CommonOpts& opt, bool dump_config, const std::string& criteria_list) {
    auto cfg = load_gate_config(opt);
    if (dump_config) {
        emit_json(opt, io::gate_config_to_json(cfg));
        return 0;
    }
    std::vector<int> ids;
    if (criteria_list.empty()) {
        for (int i = 1; i <= 12; ++i) ids.push_back(i);
    } else {
        std::stringstream ss(criteria_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) ids.push_back(std::stoi(tok));
    }
    std::vector<acceptance::Criterion> results;
    bool all = true;
    for (int id : ids) {
        auto c = acceptance::run_criterion(id, cfg);
        std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << "C" << c.id << ": " << c.name << "\n";
        all = all && c.pass;
        results.push_back(std::move(c));
    }
    const auto report = acceptance::report_json(results, cfg);
    emit(opt, report.dump(2));
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "logtree: profiles, widths and modes of random logarithmic-height trees.\n"
        "Model grammar: recursive | port | mobile | mary:m=<int>,t=<int> | quad:d=<int>\n"
        "             | grid:m=<int>,d=<int> | increasing:phi=<c0>,<c1>,...,<cd>"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string emit_kind = "profile";
    int k_max = -1, m_max = 4, ell_max = -1;
    long ratio_n = 0;
    bool dump_tau = false, dump_config = false;
    std::vector<int> levels;
    std::string criteria_list;

    auto* c_gen = app.add_subcommand("generate", "draw one seeded tree");
    add_common(c_gen, opt);
    c_gen->add_option("--n", opt.n, "tree size");
    c_gen->add_option("--emit", emit_kind, "profile|depths")
        ->check(CLI::IsMember({"profile", "depths"}));

    auto* c_prof = app.add_subcommand("exact-profile", "expected profile row mu_{n,k}");
    add_common(c_prof, opt);
    c_prof->add_option("--n", opt.n, "tree size");
    c_prof->add_option("--kmax", k_max, "max level (default: auto)");
    c_prof->add_flag("--exact", opt.exact_mode, "rational arithmetic, values as p/q");

    auto* c_mom = app.add_subcommand("exact-moments", "central moments P^(m)_{n,k}");
    add_common(c_mom, opt);
    c_mom->add_option("--n", opt.n, "tree size");
    c_mom->add_option("--mmax", m_max, "max moment order (<= 8)");
    c_mom->add_option("--kmax", k_max, "max level (default: auto)");
    c_mom->add_flag("--exact", opt.exact_mode, "rational arithmetic");

    auto* c_const = app.add_subcommand("constants", "width-regularity constants (v, sigma^2)");
    add_common(c_const, opt);

    auto* c_pred = app.add_subcommand("predict", "asymptotic width/mode predictions");
    add_common(c_pred, opt);
    c_pred->add_option("--n", opt.n, "tree size");

    auto* c_sim = app.add_subcommand("simulate", "seeded Monte Carlo experiment");
    add_common(c_sim, opt);
    c_sim->add_option("--n", opt.n, "tree size");
    c_sim->add_option("--reps", opt.reps, "replications");
    c_sim->add_option("--levels", levels, "levels whose Y histograms to record");

    auto* c_fig = app.add_subcommand("figure1", "W_n vs near-peak level histograms (recursive)");
    add_common(c_fig, opt, false);
    c_fig->add_option("--n", opt.n, "tree size");
    c_fig->add_option("--reps", opt.reps, "replications (>= 100)");
    c_fig->add_option("--gate-config", opt.gate_config, "JSON threshold overrides");

    auto* c_conv = app.add_subcommand("converge", "single growth path along n_l = floor(e^sqrt(l))");
    add_common(c_conv, opt);
    c_conv->add_option("--ellmax", ell_max, "last checkpoint index (default 190)");
    c_conv->add_option("--gate-config", opt.gate_config, "JSON threshold overrides");

    auto* c_oracle = app.add_subcommand("oracle", "exact profile distribution by enumeration");
    add_common(c_oracle, opt);
    c_oracle->add_option("--n", opt.n, "tree size (tiny)");

    auto* c_series = app.add_subcommand("series", "increasing-variety rows and tau asymptotics");
    add_common(c_series, opt);
    c_series->add_option("--n", opt.n, "row size / tau length");
    c_series->add_option("--kmax", k_max, "max level");
    c_series->add_option("--ratio-n", ratio_n, "report tau_n / asymptotic approximation");
    c_series->add_flag("--tau", dump_tau, "dump tau coefficients instead of rows");
    c_series->add_flag("--exact", opt.exact_mode, "rational arithmetic");

    auto* c_gates = app.add_subcommand("gates", "run the verification gate suite");
    add_common(c_gates, opt, false);
    c_gates->add_option("--gate-config", opt.gate_config, "JSON threshold overrides");
    c_gates->add_option("--criteria", criteria_list, "comma-separated ids (default: all)");
    c_gates->add_flag("--dump-config", dump_config, "print the effective gate config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(c_gen)) return cmd_generate(opt, emit_kind);
        if (app.got_subcommand(c_prof)) return cmd_exact_profile(opt, k_max);
        if (app.got_subcommand(c_mom)) return cmd_exact_moments(opt, m_max, k_max);
        if (app.got_subcommand(c_const)) return cmd_constants(opt);
        if (app.got_subcommand(c_pred)) return cmd_predict(opt);
        if (app.got_subcommand(c_sim)) return cmd_simulate(opt, levels);
        if (app.got_subcommand(c_fig)) return cmd_figure1(opt);
        if (app.got_subcommand(c_conv)) return cmd_converge(opt, ell_max);
        if (app.got_subcommand(c_oracle)) return cmd_oracle(opt);
        if (app.got_subcommand(c_series)) return cmd_series(opt, k_max, ratio_n, dump_tau);
        if (app.got_subcommand(c_gates)) return cmd_gates(opt, dump_config, criteria_list);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
