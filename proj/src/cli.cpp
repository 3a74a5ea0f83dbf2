#include "boolmodel/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "boolmodel/oracles.hpp"
#include "boolmodel/text.hpp"

namespace boolmodel::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

/// A JSON object whose keys must all be consumed; the resolved values are
/// collected in `echo`.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(where() + " must be an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    double number(const std::string& key, std::optional<double> fallback = {}) {
        const json* v = lookup(key, fallback.has_value());
        double x = fallback.value_or(0.0);
        if (v) {
            if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
            x = v->get<double>();
        }
        echo[key] = x;
        return x;
    }

    std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
        const json* v = lookup(key, fallback.has_value());
        std::uint64_t x = fallback.value_or(0);
        if (v) {
            if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                            v->get<std::int64_t>() < 0))
                throw ConfigError(where(key) + " must be a non-negative integer");
            x = v->get<std::uint64_t>();
        }
        echo[key] = x;
        return x;
    }

    std::vector<double> numbers(const std::string& key,
                                std::optional<std::vector<double>> fallback = {}) {
        const json* v = lookup(key, fallback.has_value());
        std::vector<double> x = fallback.value_or(std::vector<double>{});
        if (v) {
            if (!v->is_array()) throw ConfigError(where(key) + " must be an array of numbers");
            x.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
                x.push_back(e.get<double>());
            }
        }
        echo[key] = x;
        return x;
    }

    const json& child(const std::string& key) {
        const json* v = lookup(key, false);
        return *v;
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        for (const auto& [key, value] : node_.items()) out.push_back(key);
        return out;
    }

    std::string where(const std::string& key = {}) const {
        return key.empty() ? path_ : path_ + "." + key;
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) throw ConfigError("unknown key " + where(key));
    }

    json echo = json::object();

private:
    const json* lookup(const std::string& key, bool optional) {
        seen_.insert(key);
        const auto it = node_.find(key);
        if (it == node_.end()) {
            if (!optional) throw ConfigError("missing required key " + where(key));
            return nullptr;
        }
        return &*it;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::pair<RadiusDistribution, json> parse_radius(const json& node, const std::string& path) {
    Section sec(node, path);
    const json& type_node = sec.child("type");
    if (!type_node.is_string()) throw ConfigError(sec.where("type") + " must be a string");
    const auto type = type_node.get<std::string>();
    sec.echo["type"] = type;
    try {
        RadiusDistribution dist = RadiusDistribution::constant(1.0);
        if (type == "constant") {
            dist = RadiusDistribution::constant(sec.number("r"));
        } else if (type == "uniform") {
            const double a = sec.number("a");
            dist = RadiusDistribution::uniform(a, sec.number("b"));
        } else if (type == "pareto") {
            const double xm = sec.number("xm");
            dist = RadiusDistribution::pareto(xm, sec.number("exponent"));
        } else if (type == "mixture") {
            const json& comps = sec.child("components");
            if (!comps.is_array() || comps.empty())
                throw ConfigError(sec.where("components") + " must be a non-empty array");
            std::vector<std::pair<double, RadiusDistribution>> parts;
            json echo_parts = json::array();
            for (std::size_t i = 0; i < comps.size(); ++i) {
                Section part(comps[i], sec.where("components") + "[" + std::to_string(i) + "]");
                const double w = part.number("weight");
                auto [inner, inner_echo] = parse_radius(part.child("radius"), part.where("radius"));
                part.echo["radius"] = inner_echo;
                part.finish();
                parts.emplace_back(w, inner);
                echo_parts.push_back(part.echo);
            }
            sec.echo["components"] = echo_parts;
            dist = RadiusDistribution::mixture(parts);
        } else {
            throw ConfigError(sec.where("type") + ": unknown radius law '" + type +
                              "' (expected constant, uniform, pareto or mixture)");
        }
        sec.finish();
        return {dist, sec.echo};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void check_grid(const std::vector<double>& grid, const std::string& what) {
    if (grid.empty()) throw ConfigError(what + " must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw ConfigError(what + " entries must be positive and finite");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ConfigError(what + " must be strictly increasing");
    }
}

std::size_t replicates_of(Section& sec, std::size_t fallback) {
    const auto n = sec.integer("replicates", fallback);
    if (n < 1) throw ConfigError(sec.where("replicates") + " must be >= 1");
    return n;
}

void parse_policy(Section& sec, ReportPolicy& policy, bool with_volume) {
    policy.initial_rho = sec.number("initial_rho", policy.initial_rho);
    if (!(policy.initial_rho > 1.0)) throw ConfigError(sec.where("initial_rho") + " must exceed 1");
    policy.max_doublings = static_cast<int>(sec.integer("max_doublings", policy.max_doublings));
    policy.chain.cap = sec.integer("chain_cap", policy.chain.cap);
    policy.chain.budget = sec.integer("chain_budget", policy.chain.budget);
    if (with_volume) {
        policy.volume_samples = sec.integer("volume_samples", policy.volume_samples);
        if (policy.volume_samples < 1)
            throw ConfigError(sec.where("volume_samples") + " must be >= 1");
    }
}

EllTailConfig parse_ell_tail(Section& sec, const RunConfig& base) {
    EllTailConfig cfg{.params = base.params, .master_seed = base.master_seed};
    cfg.replicates = replicates_of(sec, base.replicates);
    cfg.min_count = sec.integer("min_count", cfg.min_count);
    if (cfg.min_count < 1) throw ConfigError(sec.where("min_count") + " must be >= 1");
    parse_policy(sec, cfg.policy, false);
    return cfg;
}

CrossingConfig parse_crossing(Section& sec, const RunConfig& base) {
    CrossingConfig cfg{.params = base.params, .master_seed = base.master_seed};
    cfg.replicates = replicates_of(sec, base.replicates);
    cfg.r_grid = sec.numbers("r_grid");
    check_grid(cfg.r_grid, sec.where("r_grid"));
    cfg.lambda_grid = sec.numbers("lambda_grid", std::vector<double>{base.params.lambda()});
    check_grid(cfg.lambda_grid, sec.where("lambda_grid"));
    if (cfg.lambda_grid.back() > base.params.lambda())
        throw ConfigError(sec.where("lambda_grid") + " entries must not exceed model.lambda");
    cfg.kappa = sec.number("kappa", cfg.kappa);
    if (!(cfg.kappa >= 1.0)) throw ConfigError(sec.where("kappa") + " must be >= 1");
    cfg.level = sec.number("level", cfg.level);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError(sec.where("level") + " must be in (0,1)");
    return cfg;
}

MomentSweepConfig parse_moments(Section& sec, const RunConfig& base) {
    MomentSweepConfig cfg{.params = base.params, .master_seed = base.master_seed};
    cfg.replicates = replicates_of(sec, base.replicates);
    cfg.groups = sec.integer("groups", cfg.groups);
    cfg.batches = sec.integer("batches", cfg.batches);
    if (cfg.groups < 1 || cfg.batches < 1)
        throw ConfigError(sec.where() + ": groups and batches must be >= 1");
    cfg.s = sec.number("s", cfg.s);
    if (!(cfg.s > 0.0)) throw ConfigError(sec.where("s") + " must be positive");
    cfg.div_factor = sec.number("div_factor", cfg.div_factor);
    if (!(cfg.div_factor > 1.0)) throw ConfigError(sec.where("div_factor") + " must exceed 1");
    parse_policy(sec, cfg.policy, true);
    return cfg;
}

BracketConfig parse_bracket(Section& sec, const RunConfig& base) {
    BracketConfig cfg{.radius = base.params.radius(),
                      .dimension = base.params.dimension(),
                      .master_seed = base.master_seed};
    cfg.replicates = replicates_of(sec, base.replicates);
    cfg.lambda_low = sec.number("lambda_low", cfg.lambda_low);
    cfg.lambda_high = sec.number("lambda_high", cfg.lambda_high);
    if (!(cfg.lambda_low > 0.0 && cfg.lambda_low < cfg.lambda_high && std::isfinite(cfg.lambda_high)))
        throw ConfigError(sec.where() + ": need 0 < lambda_low < lambda_high");
    cfg.iters = static_cast<int>(sec.integer("iters", cfg.iters));
    cfg.r_grid = sec.numbers("r_grid");
    check_grid(cfg.r_grid, sec.where("r_grid"));
    cfg.eps_cross = sec.number("eps_cross", cfg.eps_cross);
    if (!(cfg.eps_cross > 0.0 && cfg.eps_cross <= 1.0))
        throw ConfigError(sec.where("eps_cross") + " must be in (0,1]");
    cfg.level = sec.number("level", cfg.level);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError(sec.where("level") + " must be in (0,1)");
    cfg.kappa = sec.number("kappa", cfg.kappa);
    if (!(cfg.kappa >= 1.0)) throw ConfigError(sec.where("kappa") + " must be >= 1");
    return cfg;
}

PiAlphaConfig parse_pi_alpha(Section& sec, const RunConfig& base) {
    PiAlphaConfig cfg{.params = base.params, .master_seed = base.master_seed};
    cfg.replicates = replicates_of(sec, base.replicates);
    cfg.alphas = sec.numbers("alphas");
    check_grid(cfg.alphas, sec.where("alphas"));
    return cfg;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_atomically(const fs::path& target, const std::string& content) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

template <typename Writer>
void emit_csv(const fs::path& dir, const std::string& name, std::vector<std::string>& outputs,
              Writer&& writer) {
    std::ostringstream os;
    writer(os);
    write_atomically(dir / name, os.str());
    outputs.push_back(name);
}

}  // namespace

RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Section root(doc, "config");
    Section model(root.child("model"), "model");
    const auto d = model.integer("dimension");
    const double lambda = model.number("lambda");
    auto [radius, radius_echo] = parse_radius(model.child("radius"), "model.radius");
    model.echo["radius"] = radius_echo;
    model.finish();

    std::optional<ModelParams> params;
    try {
        params.emplace(static_cast<int>(d), lambda, radius);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }

    RunConfig cfg{.params = *params};
    cfg.master_seed = root.integer("master_seed");
    if (seed_override) cfg.master_seed = *seed_override;
    cfg.replicates = root.integer("replicates", 1000);
    if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");

    Section experiments(root.child("experiments"), "experiments");
    json exp_echo = json::object();
    bool any = false;
    auto section = [&](const char* name, auto parse, auto& slot) {
        if (!experiments.has(name)) return;
        Section sec(experiments.child(name), std::string("experiments.") + name);
        slot = parse(sec, cfg);
        sec.finish();
        exp_echo[name] = sec.echo;
        any = true;
    };
    section("ell_tail", parse_ell_tail, cfg.ell_tail);
    section("crossing_decay", parse_crossing, cfg.crossing_decay);
    section("moment_sweep", parse_moments, cfg.moment_sweep);
    section("lambda_bracket", parse_bracket, cfg.lambda_bracket);
    section("pi_alpha", parse_pi_alpha, cfg.pi_alpha);
    for (const auto& key : experiments.keys()) {
        if (!exp_echo.contains(key))
            throw ConfigError("unknown experiment '" + key +
                              "' (expected ell_tail, crossing_decay, moment_sweep, "
                              "lambda_bracket or pi_alpha)");
    }
    if (!any) throw ConfigError("experiments must name at least one experiment");
    root.finish();

    json resolved = json::object();
    resolved["model"] = model.echo;
    resolved["master_seed"] = cfg.master_seed;
    resolved["replicates"] = cfg.replicates;
    resolved["experiments"] = exp_echo;
    cfg.resolved = resolved.dump(2);
    return cfg;
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), seed_override);
}

std::vector<std::string> run_experiments(const RunConfig& cfg, const fs::path& out_dir,
                                         const RunOptions& run) {
    const auto start = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    std::vector<std::string> outputs;
    json notes = json::object();

    if (cfg.ell_tail) {
        const auto fit = ell_tail(*cfg.ell_tail, run);
        emit_csv(out_dir, "ell_survival.csv", outputs, [&](auto& os) { write_survival_csv(os, fit); });
        emit_csv(out_dir, "ell_fit.csv", outputs, [&](auto& os) { write_tail_fit_csv(os, fit); });
    }
    if (cfg.crossing_decay) {
        const auto table = crossing_decay(*cfg.crossing_decay, run);
        emit_csv(out_dir, "crossing.csv", outputs, [&](auto& os) { write_crossing_csv(os, table); });
        emit_csv(out_dir, "crossing_trend.csv", outputs,
                 [&](auto& os) { write_crossing_trend_csv(os, table); });
    }
    if (cfg.moment_sweep) {
        const auto result = moment_sweep(*cfg.moment_sweep, run);
        emit_csv(out_dir, "moments.csv", outputs, [&](auto& os) { write_moment_csv(os, result); });
        emit_csv(out_dir, "moment_diagnostics.csv", outputs,
                 [&](auto& os) { write_moment_diagnostics_csv(os, result); });
    }
    if (cfg.lambda_bracket) {
        try {
            const auto bracket = bracket_lambda_hat(*cfg.lambda_bracket, run);
            emit_csv(out_dir, "bracket.csv", outputs, [&](auto& os) { write_bracket_csv(os, bracket); });
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("lambda_bracket: ") + e.what());
        }
    }
    if (cfg.pi_alpha) {
        const auto rows = pi_alpha_curve(*cfg.pi_alpha, run);
        emit_csv(out_dir, "pi_alpha.csv", outputs, [&](auto& os) { write_pi_alpha_csv(os, rows); });
    }

    const auto end = std::chrono::system_clock::now();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = json::object();
    manifest["version"] = std::string(kVersion);
    manifest["master_seed"] = cfg.master_seed;
    manifest["threads"] = run.threads;
    manifest["start_time"] = utc_timestamp(start);
    manifest["end_time"] = utc_timestamp(end);
    manifest["wall_seconds"] = wall;
    manifest["outputs"] = outputs;
    manifest["config"] = json::parse(cfg.resolved);
    write_atomically(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return outputs;
}

unsigned default_threads() {
    if (const char* env = std::getenv("BOOLSIM_THREADS")) {
        try {
            const double v = parse_double(env);
            if (v >= 1.0 && v <= 4096.0) return static_cast<unsigned>(v);
        } catch (const std::invalid_argument&) {
        }
    }
    return 1;
}

int cmd_run(const fs::path& config, const fs::path& out_dir, std::optional<std::uint64_t> seed,
            unsigned threads, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = load_config(config, seed);
        const auto outputs = run_experiments(cfg, out_dir, RunOptions{threads});
        for (const auto& name : outputs) out << (out_dir / name).string() << '\n';
        out << (out_dir / "manifest.json").string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_oracle(std::string_view suite, unsigned threads, std::ostream& out, std::ostream& err) {
    std::vector<oracle::Check> checks;
    try {
        checks = oracle::run_suite(suite, threads);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    std::size_t failed = 0;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.suite << ": " << c.name << " (" << c.detail << ")\n";
        if (!c.passed) ++failed;
    }
    out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace boolmodel::cli
