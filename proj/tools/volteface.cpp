// volteface: closed-form distance-to-equilibrium curves, discrete-walk
// analogues, limit diagnostics and seeded simulation batches, emitted as CSV
// or JSON for external plotting.
//
// Exit codes: 0 ok, 2 usage, 3 domain error, 4 search budget exhausted.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volteface/diophantine.hpp"
#include "volteface/discrete_chain.hpp"
#include "volteface/global_norm.hpp"
#include "volteface/io.hpp"
#include "volteface/mode_core.hpp"
#include "volteface/potential.hpp"
#include "volteface/sim.hpp"

namespace vf = volteface;
using ordered_json = nlohmann::ordered_json;

namespace {

struct BudgetExhausted : std::runtime_error {
    std::uint64_t tried, budget;
    BudgetExhausted(std::uint64_t t, std::uint64_t b)
        : std::runtime_error("diophantine: search budget exhausted"), tried(t), budget(b) {}
};

struct RunConfig {
    std::string command;
    std::string format = "csv";
    std::string output = "-";

    double a = 1.0;
    double mode_n = 1.0;
    double t = 1.0;
    double t_max = 10.0;
    long long steps = 100;
    double alpha = 0.5;
    int n_sites = 5;
    int k = 1;
    bool exclude_top = false;
    bool top = false;
    std::string kind = "continuum";
    std::vector<long long> n_list = {101, 1001, 10001};
    std::vector<double> a_list = {10.0, 100.0, 1000.0};
    std::vector<double> periods;
    double delta = 0.05;
    double t_min = 1.0;
    std::uint64_t budget = 20'000'000;
    std::string model = "flat";
    double x0 = 0.0;
    int y0 = 1;
    double horizon = 1.0;
    int paths = 1000;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string events_path;
    std::string potential_kind = "zero";
    std::string potential_file;
    double amplitude = 1.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    bool normalize = false;
};

struct CommandResult {
    ordered_json config = ordered_json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;
    ordered_json scalars = ordered_json::object();
};

// ---------------------------------------------------------------------------
// command handlers
// ---------------------------------------------------------------------------

vf::Potential make_base_potential(const RunConfig& cfg) {
    if (cfg.potential_kind == "zero") return vf::Potential::zero();
    if (cfg.potential_kind == "cosine") return vf::Potential::cosine(cfg.amplitude);
    if (cfg.potential_kind == "trig") return vf::Potential::trig_poly(cfg.cos_coeffs, cfg.sin_coeffs);
    if (cfg.potential_kind == "file") {
        std::ifstream in(cfg.potential_file);
        if (!in) throw std::domain_error("cli: cannot open potential file '" + cfg.potential_file + "'");
        std::vector<std::pair<double, double>> samples;
        double x = 0.0, v = 0.0;
        while (in >> x >> v) samples.emplace_back(x, v);
        return vf::Potential::from_samples(samples);
    }
    throw std::domain_error("cli: unknown potential kind '" + cfg.potential_kind + "'");
}

vf::Potential make_potential(const RunConfig& cfg) {
    vf::Potential pot = make_base_potential(cfg);
    return cfg.normalize ? vf::normalize_potential(pot).potential : pot;
}

CommandResult run_rates(const RunConfig& cfg) {
    CommandResult res;
    if (cfg.n_sites > 0 && cfg.a <= 0.0) {
        const vf::PersistenceSummary p = vf::optimal_persistence(cfg.n_sites);
        res.config = {{"command", "rates"}, {"N", cfg.n_sites}, {"format", cfg.format}, {"output", cfg.output}};
        res.scalars = {{"alpha_opt", p.alpha_opt}, {"lambda_opt", p.lambda_opt}, {"lambda_iso", p.lambda_iso}};
        return res;
    }
    const vf::RateSummary r = vf::asymptotic_rate(cfg.a);
    const char* kind = r.kind == vf::PrefactorKind::constant_ratio     ? "constant_ratio"
                       : r.kind == vf::PrefactorKind::linear_in_t      ? "linear_in_t"
                                                                       : "oscillating_bounded";
    res.config = {{"command", "rates"}, {"a", cfg.a}, {"format", cfg.format}, {"output", cfg.output}};
    res.scalars = {{"lambda", r.lambda},
                   {"lambda_spectral", r.lambda_spectral},
                   {"prefactor", r.prefactor_value},
                   {"prefactor_kind", kind}};
    return res;
}

CommandResult run_norm_curve(const RunConfig& cfg) {
    CommandResult res;
    res.config = {{"command", "norm-curve"}, {"a", cfg.a},      {"t_max", cfg.t_max},
                  {"steps", cfg.steps},      {"format", cfg.format}, {"output", cfg.output}};
    const vf::NormCurve curve = vf::sample_norm_curve(cfg.a, cfg.t_max, static_cast<int>(cfg.steps));
    res.columns = {"t", "norm"};
    for (const auto& s : curve.samples) res.rows.push_back({s.t, s.norm});
    return res;
}

CommandResult run_mode_norm(const RunConfig& cfg) {
    CommandResult res;
    res.config = {{"command", "mode-norm"}, {"a", cfg.a},      {"n", cfg.mode_n},
                  {"t", cfg.t},             {"format", cfg.format}, {"output", cfg.output}};
    const vf::ModeNormResult closed = vf::mode_norm_squared_closed(cfg.a, cfg.mode_n, cfg.t);
    const double oracle = vf::mode_norm_squared_oracle(cfg.a, cfg.mode_n, cfg.t);
    res.columns = {"t", "r_closed", "r_oracle", "norm_closed", "regime", "auxiliary"};
    res.rows.push_back({cfg.t, closed.r_value, oracle, std::sqrt(closed.r_value),
                        vf::regime_name(closed.regime), closed.auxiliary});
    return res;
}

CommandResult run_discrete_norm(const RunConfig& cfg) {
    CommandResult res;
    res.config = {{"command", "discrete-norm"}, {"N", cfg.n_sites},        {"alpha", cfg.alpha},
                  {"steps", cfg.steps},         {"exclude_top", cfg.exclude_top},
                  {"format", cfg.format},       {"output", cfg.output}};
    const vf::ChainSpec spec(cfg.n_sites, cfg.alpha);
    res.columns = {"n", "norm"};
    for (long long n = 0; n <= cfg.steps; ++n)
        res.rows.push_back({n, vf::discrete_global_norm(spec, n, cfg.exclude_top)});
    return res;
}

CommandResult run_limit_check(const RunConfig& cfg) {
    CommandResult res;
    if (cfg.kind == "continuum") {
        res.config = {{"command", "limit-check"}, {"kind", cfg.kind},   {"a", cfg.a},
                      {"k", cfg.k},               {"t", cfg.t},         {"N_list", cfg.n_list},
                      {"top", cfg.top},           {"format", cfg.format}, {"output", cfg.output}};
        const auto rows = vf::continuum_limit_check(
            cfg.a, cfg.k, cfg.t, cfg.n_list,
            cfg.top ? vf::LimitTarget::top_mode : vf::LimitTarget::low_mode);
        res.columns = {"N", "alpha", "steps", "mode", "target_mode", "discrete_r", "continuum_r", "abs_error"};
        for (const auto& r : rows)
            res.rows.push_back({r.n_sites, r.alpha, r.n_steps, r.mode_index, r.target_mode, r.discrete_r,
                                r.continuum_r, r.abs_error});
        return res;
    }
    if (cfg.kind == "brownian") {
        res.config = {{"command", "limit-check"}, {"kind", cfg.kind},   {"n", cfg.mode_n},
                      {"t", cfg.t},               {"a_list", cfg.a_list}, {"format", cfg.format},
                      {"output", cfg.output}};
        const vf::BrownianModeLimit lim = vf::mode_norm_brownian_limit(cfg.mode_n, cfg.t);
        res.columns = {"a", "rescaled_norm", "limit", "gap"};
        for (double a : cfg.a_list) {
            const double value = lim.rescaled_norm(a);
            res.rows.push_back({a, value, lim.limit, std::abs(value - lim.limit)});
        }
        return res;
    }
    throw std::domain_error("cli: limit-check kind must be 'continuum' or 'brownian'");
}

CommandResult run_dioph(const RunConfig& cfg) {
    CommandResult res;
    res.config = {{"command", "dioph"},  {"periods", cfg.periods}, {"delta", cfg.delta},
                  {"t_min", cfg.t_min},  {"budget", cfg.budget},   {"format", cfg.format},
                  {"output", cfg.output}};
    const vf::SearchOutcome outcome = vf::find_simultaneous_time(cfg.periods, cfg.delta, cfg.t_min, cfg.budget);
    if (!outcome.found()) throw BudgetExhausted(outcome.candidates_tried, outcome.budget);
    res.scalars = {{"t", outcome.hit->t}, {"candidates_tried", outcome.candidates_tried}};
    res.columns = {"period", "multiplier", "residual"};
    for (std::size_t i = 0; i < cfg.periods.size(); ++i)
        res.rows.push_back({cfg.periods[i], outcome.hit->multipliers[i], outcome.hit->residuals[i]});
    return res;
}

CommandResult run_simulate(const RunConfig& cfg) {
    CommandResult res;
    vf::BatchParams params;
    params.master_seed = cfg.seed;
    params.n_paths = cfg.paths;
    params.n_threads = cfg.threads;
    params.record_events = !cfg.events_path.empty();

    vf::TrajectoryBatch batch;
    if (cfg.model == "flat") {
        res.config = {{"command", "simulate"}, {"model", cfg.model},   {"a", cfg.a},
                      {"x0", cfg.x0},          {"y0", cfg.y0},         {"T", cfg.horizon},
                      {"paths", cfg.paths},    {"threads", cfg.threads}, {"seed", cfg.seed},
                      {"events", cfg.events_path}, {"format", cfg.format}, {"output", cfg.output}};
        batch = vf::simulate_flat(cfg.a, cfg.x0, cfg.y0, cfg.horizon, params);
    } else if (cfg.model == "potential") {
        res.config = {{"command", "simulate"},        {"model", cfg.model},
                      {"a", cfg.a},                   {"x0", cfg.x0},
                      {"y0", cfg.y0},                 {"T", cfg.horizon},
                      {"potential", cfg.potential_kind}, {"potential_file", cfg.potential_file},
                      {"amplitude", cfg.amplitude},   {"cos_coeffs", cfg.cos_coeffs},
                      {"sin_coeffs", cfg.sin_coeffs}, {"normalize", cfg.normalize},
                      {"paths", cfg.paths},           {"threads", cfg.threads},
                      {"seed", cfg.seed},             {"events", cfg.events_path},
                      {"format", cfg.format},         {"output", cfg.output}};
        batch = vf::simulate_with_potential(make_potential(cfg), cfg.a, cfg.x0, cfg.y0, cfg.horizon, params);
    } else if (cfg.model == "chain") {
        res.config = {{"command", "simulate"}, {"model", cfg.model},   {"N", cfg.n_sites},
                      {"alpha", cfg.alpha},    {"x0", cfg.x0},         {"y0", cfg.y0},
                      {"steps", cfg.steps},    {"paths", cfg.paths},   {"threads", cfg.threads},
                      {"seed", cfg.seed},      {"events", cfg.events_path}, {"format", cfg.format},
                      {"output", cfg.output}};
        const vf::ChainSpec spec(cfg.n_sites, cfg.alpha);
        batch = vf::simulate_chain(spec, static_cast<int>(cfg.x0), cfg.y0, cfg.steps, params);
    } else {
        throw std::domain_error("cli: simulate model must be 'flat', 'potential' or 'chain'");
    }

    res.columns = {"path_id", "x_T", "y_T"};
    for (int i = 0; i < batch.n_paths(); ++i)
        res.rows.push_back({i, batch.x[static_cast<std::size_t>(i)],
                            static_cast<int>(batch.y[static_cast<std::size_t>(i)])});

    if (!cfg.events_path.empty()) {
        std::ofstream out(cfg.events_path);
        if (!out) throw std::domain_error("cli: cannot open events file '" + cfg.events_path + "'");
        out << "path_id,jump_time\n";
        for (int i = 0; i < batch.n_paths(); ++i)
            for (double et : batch.events[static_cast<std::size_t>(i)])
                out << i << ',' << vf::format_double_17(et) << '\n';
    }
    return res;
}

CommandResult run_command(const RunConfig& cfg) {
    if (cfg.command == "rates") return run_rates(cfg);
    if (cfg.command == "norm-curve") return run_norm_curve(cfg);
    if (cfg.command == "mode-norm") return run_mode_norm(cfg);
    if (cfg.command == "discrete-norm") return run_discrete_norm(cfg);
    if (cfg.command == "limit-check") return run_limit_check(cfg);
    if (cfg.command == "dioph") return run_dioph(cfg);
    if (cfg.command == "simulate") return run_simulate(cfg);
    throw std::domain_error("cli: unknown command '" + cfg.command + "'");
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

std::string render_cell(const ordered_json& cell) {
    if (cell.is_number_float()) return vf::format_double_17(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
}

std::string render_csv(const CommandResult& res) {
    std::ostringstream out;
    out << "# volteface " << res.config.value("command", "") << '\n';
    for (const auto& [key, value] : res.config.items()) {
        if (key == "command") continue;
        out << "# " << key << '=' << render_cell(value) << '\n';
    }
    if (!res.columns.empty()) {
        for (const auto& [key, value] : res.scalars.items())
            out << "# " << key << '=' << render_cell(value) << '\n';
        for (std::size_t c = 0; c < res.columns.size(); ++c)
            out << res.columns[c] << (c + 1 < res.columns.size() ? "," : "");
        out << '\n';
        for (const auto& row : res.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << render_cell(row[c]) << (c + 1 < row.size() ? "," : "");
            out << '\n';
        }
    } else {
        out << "name,value\n";
        for (const auto& [key, value] : res.scalars.items()) out << key << ',' << render_cell(value) << '\n';
    }
    return out.str();
}

std::string render_json(const CommandResult& res) {
    ordered_json doc;
    doc["tool"] = "volteface";
    doc["config"] = res.config;
    ordered_json data = ordered_json::object();
    if (!res.scalars.empty()) data["scalars"] = res.scalars;
    if (!res.columns.empty()) {
        data["columns"] = res.columns;
        ordered_json rows = ordered_json::array();
        for (const auto& row : res.rows) {
            ordered_json r = ordered_json::array();
            for (const auto& cell : row) r.push_back(cell);
            rows.push_back(r);
        }
        data["rows"] = rows;
    }
    doc["data"] = data;
    return doc.dump(2) + "\n";
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path == "-") return path;
    if (path.front() == '/') return path;
    const char* dir = std::getenv("VOLTEFACE_OUT_DIR");
    if (dir && *dir) return std::string(dir) + "/" + path;
    return path;
}

void emit(const CommandResult& res, const RunConfig& cfg) {
    const std::string payload = (cfg.format == "json") ? render_json(res) : render_csv(res);
    const std::string path = resolve_output_path(cfg.output);
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::domain_error("cli: cannot open output file '" + path + "'");
    out << payload;
}

// ---------------------------------------------------------------------------
// argument wiring
// ---------------------------------------------------------------------------

void load_config_json(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cli: cannot open config file '" + path + "'");
    ordered_json doc = ordered_json::parse(in, nullptr, true, true);
    const ordered_json& c = doc.contains("config") ? doc.at("config") : doc;
    auto get = [&c](const char* key, auto& slot) {
        if (c.contains(key)) slot = c.at(key).template get<std::decay_t<decltype(slot)>>();
    };
    cfg.command = c.value("command", "");
    get("format", cfg.format);
    get("a", cfg.a);
    get("n", cfg.mode_n);
    get("t", cfg.t);
    get("t_max", cfg.t_max);
    get("steps", cfg.steps);
    get("alpha", cfg.alpha);
    get("N", cfg.n_sites);
    get("k", cfg.k);
    get("exclude_top", cfg.exclude_top);
    get("top", cfg.top);
    get("kind", cfg.kind);
    get("N_list", cfg.n_list);
    get("a_list", cfg.a_list);
    get("periods", cfg.periods);
    get("delta", cfg.delta);
    get("t_min", cfg.t_min);
    get("budget", cfg.budget);
    get("model", cfg.model);
    get("x0", cfg.x0);
    get("y0", cfg.y0);
    get("T", cfg.horizon);
    get("paths", cfg.paths);
    get("threads", cfg.threads);
    get("seed", cfg.seed);
    get("events", cfg.events_path);
    get("potential", cfg.potential_kind);
    get("potential_file", cfg.potential_file);
    get("amplitude", cfg.amplitude);
    get("cos_coeffs", cfg.cos_coeffs);
    get("sin_coeffs", cfg.sin_coeffs);
    get("normalize", cfg.normalize);
    if (cfg.command == "rates" && !c.contains("a")) cfg.a = 0.0;  // N-form config
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string config_path;
    std::string output_override;

    CLI::App app{"Exact distance-to-equilibrium curves for the circle telegraph process and its discrete analogue"};
    app.require_subcommand(0, 1);
    app.add_option("--config", config_path, "re-run from an emitted JSON config object");
    app.add_option("--output", output_override, "override output destination when using --config");

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("-o,--output", cfg.output, "output path, or - for stdout");
    };

    CLI::App* rates = app.add_subcommand("rates", "asymptotic rate and prefactor (--a), or optimal persistence (--N)");
    double rates_a = 0.0;
    int rates_n = 0;
    rates->add_option("--a", rates_a, "flip rate");
    rates->add_option("--N", rates_n, "odd chain length");
    add_io(rates);

    CLI::App* curve = app.add_subcommand("norm-curve", "sample t -> ||P_t - mu||");
    curve->add_option("--a", cfg.a, "flip rate")->required();
    curve->add_option("--t-max", cfg.t_max, "right end of the time grid")->required();
    curve->add_option("--steps", cfg.steps, "number of grid steps");
    add_io(curve);

    CLI::App* mode = app.add_subcommand("mode-norm", "closed form and SVD oracle for one mode");
    mode->add_option("--a", cfg.a, "flip rate")->required();
    mode->add_option("--n", cfg.mode_n, "mode index")->required();
    mode->add_option("--t", cfg.t, "time")->required();
    add_io(mode);

    CLI::App* disc = app.add_subcommand("discrete-norm", "persistent-walk norm curve over step count");
    disc->add_option("--N", cfg.n_sites, "odd chain length")->required();
    disc->add_option("--alpha", cfg.alpha, "persistence in [0,1)")->required();
    disc->add_option("--steps", cfg.steps, "largest step count")->required();
    disc->add_flag("--exclude-top", cfg.exclude_top, "drop the top Fourier planes");
    add_io(disc);

    CLI::App* limit = app.add_subcommand("limit-check", "continuum or brownian limit diagnostics");
    limit->add_option("--kind", cfg.kind, "continuum or brownian")->check(CLI::IsMember({"continuum", "brownian"}));
    limit->add_option("--a", cfg.a, "flip rate (continuum kind)");
    limit->add_option("--k", cfg.k, "mode index (continuum kind)");
    limit->add_option("--n", cfg.mode_n, "mode index (brownian kind)");
    limit->add_option("--t", cfg.t, "time");
    limit->add_option("--N-list", cfg.n_list, "odd chain lengths")->delimiter(',');
    limit->add_option("--a-list", cfg.a_list, "flip rates (brownian kind)")->delimiter(',');
    limit->add_flag("--top", cfg.top, "check the top-mode planes (target k + 1/2)");
    add_io(limit);

    CLI::App* dioph = app.add_subcommand("dioph", "simultaneous near-multiple of the given periods");
    dioph->add_option("--periods", cfg.periods, "periods T_i")->required()->delimiter(',');
    dioph->add_option("--delta", cfg.delta, "residual tolerance")->required();
    dioph->add_option("--t-min", cfg.t_min, "smallest admissible time");
    dioph->add_option("--budget", cfg.budget, "candidate budget");
    add_io(dioph);

    CLI::App* sim = app.add_subcommand("simulate", "seeded trajectory batch (flat, potential or chain)");
    sim->add_option("--model", cfg.model, "flat, potential or chain")
        ->check(CLI::IsMember({"flat", "potential", "chain"}));
    sim->add_option("--a", cfg.a, "flip rate");
    sim->add_option("--x0", cfg.x0, "initial position (site index for chain)");
    sim->add_option("--y0", cfg.y0, "initial velocity, +1 or -1");
    sim->add_option("--T", cfg.horizon, "time horizon (flat/potential)");
    sim->add_option("--N", cfg.n_sites, "odd chain length (chain)");
    sim->add_option("--alpha", cfg.alpha, "persistence (chain)");
    sim->add_option("--steps", cfg.steps, "step count (chain)");
    sim->add_option("--paths", cfg.paths, "number of paths");
    sim->add_option("--threads", cfg.threads, "worker count (does not affect output)");
    sim->add_option("--seed", cfg.seed, "master seed");
    sim->add_option("--events", cfg.events_path, "also write an event log CSV to this path");
    sim->add_option("--potential", cfg.potential_kind, "zero, cosine, trig or file");
    sim->add_option("--potential-file", cfg.potential_file, "two-column samples x V(x)");
    sim->add_option("--amplitude", cfg.amplitude, "cosine amplitude");
    sim->add_option("--cos-coeffs", cfg.cos_coeffs, "trig potential cosine coefficients")->delimiter(',');
    sim->add_option("--sin-coeffs", cfg.sin_coeffs, "trig potential sine coefficients")->delimiter(',');
    sim->add_flag("--normalize", cfg.normalize, "shift the potential to Z = 1 first");
    add_io(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR USAGE: " << e.what() << '\n';
        return 2;
    }

    try {
        if (!config_path.empty()) {
            load_config_json(config_path, cfg);
            if (!output_override.empty()) cfg.output = output_override;
        } else if (rates->parsed()) {
            cfg.command = "rates";
            cfg.a = rates_a;
            cfg.n_sites = rates_n;
            if ((rates_a > 0.0) == (rates_n > 0)) {
                std::cerr << "ERROR USAGE: rates needs exactly one of --a or --N\n";
                return 2;
            }
        } else if (curve->parsed()) {
            cfg.command = "norm-curve";
        } else if (mode->parsed()) {
            cfg.command = "mode-norm";
        } else if (disc->parsed()) {
            cfg.command = "discrete-norm";
        } else if (limit->parsed()) {
            cfg.command = "limit-check";
        } else if (dioph->parsed()) {
            cfg.command = "dioph";
        } else if (sim->parsed()) {
            cfg.command = "simulate";
        } else {
            std::cerr << "ERROR USAGE: a subcommand or --config is required (see --help)\n";
            return 2;
        }
        const CommandResult res = run_command(cfg);
        emit(res, cfg);
    } catch (const BudgetExhausted& e) {
        std::cerr << "ERROR SEARCH_BUDGET: no hit within budget (tried=" << e.tried << " budget=" << e.budget
                  << ")\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "ERROR DOMAIN: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ERROR DOMAIN: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ERROR INTERNAL: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
