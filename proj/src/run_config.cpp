#include "bsde/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

namespace bsde {

namespace {

using nlohmann::json;

std::string joined(const std::vector<std::string>& violations) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  " + v;
    return msg;
}

class Checker {
public:
    std::vector<std::string> errors;

    void reject_unknown(const json& obj, const std::string& path,
                        std::initializer_list<const char*> known) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* k : known)
                if (it.key() == k) {
                    ok = true;
                    break;
                }
            if (!ok) errors.push_back(path + "." + it.key() + ": unknown key");
        }
    }

    bool number(const json& obj, const std::string& path, const char* key, double& out,
                bool required, double fallback = 0.0) {
        out = fallback;
        if (!obj.contains(key)) {
            if (required) errors.push_back(path + "." + key + ": missing");
            return false;
        }
        if (!obj[key].is_number()) {
            errors.push_back(path + "." + key + ": expected a number");
            return false;
        }
        out = obj[key].get<double>();
        return true;
    }

    bool integer(const json& obj, const std::string& path, const char* key, long& out,
                 bool required, long fallback = 0) {
        out = fallback;
        if (!obj.contains(key)) {
            if (required) errors.push_back(path + "." + key + ": missing");
            return false;
        }
        if (!obj[key].is_number_integer()) {
            errors.push_back(path + "." + key + ": expected an integer");
            return false;
        }
        out = obj[key].get<long>();
        return true;
    }

    // scalar broadcast or per-asset array
    bool per_asset(const json& obj, const std::string& path, const char* key, int d,
                   std::vector<double>& out, bool required, double fallback = 0.0) {
        out.assign(std::max(d, 0), fallback);
        if (!obj.contains(key)) {
            if (required) errors.push_back(path + "." + key + ": missing");
            return false;
        }
        const json& v = obj[key];
        if (v.is_number()) {
            out.assign(std::max(d, 0), v.get<double>());
            return true;
        }
        if (v.is_array()) {
            if (static_cast<int>(v.size()) != d) {
                errors.push_back(path + "." + key + ": expected " + std::to_string(d) + " entries");
                return false;
            }
            out.clear();
            for (const auto& e : v) {
                if (!e.is_number()) {
                    errors.push_back(path + "." + key + ": expected numeric entries");
                    return false;
                }
                out.push_back(e.get<double>());
            }
            return true;
        }
        errors.push_back(path + "." + key + ": expected a number or an array");
        return false;
    }
};

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(joined(violations)), violations_(std::move(violations)) {}

RunConfig parse_config_json(const json& doc) {
    Checker ck;
    RunConfig cfg;

    if (!doc.is_object()) throw ConfigError({"config: top-level document must be an object"});
    ck.reject_unknown(doc, "config", {"model", "payoff", "solver", "workers", "benchmark", "output_dir"});

    // --- model ---
    if (!doc.contains("model") || !doc["model"].is_object()) {
        ck.errors.push_back("config.model: missing or not an object");
    } else {
        const json& m = doc["model"];
        ck.reject_unknown(m, "model", {"kind", "d", "S0", "r", "dividends", "sigma", "rho", "T"});
        std::string kind = m.value("kind", std::string("black_scholes"));
        if (m.contains("kind") && !m["kind"].is_string()) {
            ck.errors.push_back("model.kind: expected a string");
            kind = "black_scholes";
        }
        if (kind == "black_scholes") {
            cfg.model.kind = ModelKind::BlackScholes;
        } else if (kind == "dupire") {
            cfg.model.kind = ModelKind::Dupire;
        } else {
            ck.errors.push_back("model.kind: expected \"black_scholes\" or \"dupire\"");
        }
        long d = 0;
        ck.integer(m, "model", "d", d, true, 1);
        cfg.model.d = static_cast<int>(d);
        ck.per_asset(m, "model", "S0", cfg.model.d, cfg.model.s0, true);
        ck.number(m, "model", "r", cfg.model.rate, true);
        ck.per_asset(m, "model", "dividends", cfg.model.d, cfg.model.dividends, false, 0.0);
        if (cfg.model.kind == ModelKind::BlackScholes) {
            ck.per_asset(m, "model", "sigma", cfg.model.d, cfg.model.sigma, true);
        } else if (m.contains("sigma")) {
            ck.errors.push_back("model.sigma: not allowed for the dupire model (the smile is built in)");
        }
        ck.number(m, "model", "rho", cfg.model.rho, true);
        ck.number(m, "model", "T", cfg.model.maturity, true);
        if (cfg.model.d >= 1) {
            for (const auto& msg : cfg.model.check()) ck.errors.push_back(msg);
        }
    }

    // --- payoff ---
    if (!doc.contains("payoff") || !doc["payoff"].is_object()) {
        ck.errors.push_back("config.payoff: missing or not an object");
    } else {
        const json& p = doc["payoff"];
        ck.reject_unknown(p, "payoff", {"kind", "strike"});
        std::string kind;
        if (!p.contains("kind") || !p["kind"].is_string()) {
            ck.errors.push_back("payoff.kind: missing or not a string");
        } else {
            kind = p["kind"].get<std::string>();
        }
        if (kind == "put_basket") {
            cfg.payoff.kind = PayoffKind::PutBasket;
        } else if (kind == "call_basket") {
            cfg.payoff.kind = PayoffKind::CallBasket;
        } else if (kind == "constant") {
            cfg.payoff.kind = PayoffKind::Constant;
        } else if (!kind.empty()) {
            ck.errors.push_back("payoff.kind: expected \"put_basket\", \"call_basket\" or \"constant\"");
        }
        ck.number(p, "payoff", "strike", cfg.payoff.strike, true);
        if (cfg.payoff.kind != PayoffKind::Constant && !(cfg.payoff.strike > 0.0))
            ck.errors.push_back("payoff.strike: must be positive");
    }

    // --- solver ---
    if (!doc.contains("solver") || !doc["solver"].is_object()) {
        ck.errors.push_back("config.solver: missing or not an object");
    } else {
        const json& s = doc["solver"];
        ck.reject_unknown(s, "solver",
                          {"iterations", "grid_points", "mc_samples", "euler_steps", "omega", "eta",
                           "q", "kappa", "delta_fd_step", "seed"});
        long v = 0;
        ck.integer(s, "solver", "iterations", v, true, 1);
        cfg.solver.iterations = static_cast<int>(v);
        ck.integer(s, "solver", "grid_points", v, true, 1);
        cfg.solver.grid_points = static_cast<int>(v);
        ck.integer(s, "solver", "mc_samples", v, true, 1);
        cfg.solver.mc_samples = static_cast<int>(v);
        ck.integer(s, "solver", "euler_steps", v, false, 2);
        cfg.solver.euler_steps = static_cast<int>(v);
        ck.number(s, "solver", "omega", cfg.solver.omega, false, 0.0);
        ck.integer(s, "solver", "eta", v, true, 3);
        cfg.solver.eta = static_cast<int>(v);
        ck.number(s, "solver", "q", cfg.solver.q, false, 1.0);
        ck.number(s, "solver", "kappa", cfg.solver.kappa, false, 3.5);
        ck.number(s, "solver", "delta_fd_step", cfg.solver.delta_fd_step, false, 0.02);
        long seed = 0;
        ck.integer(s, "solver", "seed", seed, false, 0);
        cfg.solver.seed = static_cast<std::uint64_t>(seed);
        for (const auto& msg : cfg.solver.check()) {
            // worker count is resolved outside the file; skip that check here
            if (msg.rfind("solver.workers", 0) != 0) ck.errors.push_back(msg);
        }
    }

    // --- optional sections ---
    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_integer() || doc["workers"].get<long>() < 1)
            ck.errors.push_back("config.workers: expected an integer >= 1");
        else
            cfg.solver.workers = static_cast<int>(doc["workers"].get<long>());
    } else {
        cfg.solver.workers = 0; // resolved later
    }
    if (doc.contains("benchmark")) {
        if (!doc["benchmark"].is_object()) {
            ck.errors.push_back("config.benchmark: expected an object");
        } else {
            const json& b = doc["benchmark"];
            ck.reject_unknown(b, "benchmark", {"samples", "euler_steps"});
            long v = 0;
            if (ck.integer(b, "benchmark", "samples", v, false, cfg.benchmark_samples)) {
                if (v < 2)
                    ck.errors.push_back("benchmark.samples: must be >= 2");
            }
            cfg.benchmark_samples = v;
            if (ck.integer(b, "benchmark", "euler_steps", v, false, cfg.benchmark_euler_steps)) {
                if (v < 1) ck.errors.push_back("benchmark.euler_steps: must be >= 1");
            }
            cfg.benchmark_euler_steps = static_cast<int>(v);
        }
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string())
            ck.errors.push_back("config.output_dir: expected a string");
        else
            cfg.output_dir = doc["output_dir"].get<std::string>();
    }

    if (!ck.errors.empty()) throw ConfigError(std::move(ck.errors));
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"config: cannot read file " + path});
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError({std::string("config: JSON parse error: ") + e.what()});
    }
    return parse_config_json(doc);
}

int resolve_workers(int cli_value, const RunConfig& config) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("BSDE_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (config.solver.workers > 0) return config.solver.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

nlohmann::json resolved_config_json(const RunConfig& config, const PicardSolver& solver) {
    json j;
    j["model"]["kind"] = config.model.kind == ModelKind::BlackScholes ? "black_scholes" : "dupire";
    j["model"]["d"] = config.model.d;
    j["model"]["S0"] = config.model.s0;
    j["model"]["r"] = config.model.rate;
    j["model"]["dividends"] = config.model.dividends;
    if (config.model.kind == ModelKind::BlackScholes) j["model"]["sigma"] = config.model.sigma;
    j["model"]["rho"] = config.model.rho;
    j["model"]["T"] = config.model.maturity;
    switch (config.payoff.kind) {
        case PayoffKind::PutBasket: j["payoff"]["kind"] = "put_basket"; break;
        case PayoffKind::CallBasket: j["payoff"]["kind"] = "call_basket"; break;
        default: j["payoff"]["kind"] = "constant"; break;
    }
    j["payoff"]["strike"] = config.payoff.strike;
    const SolverParams& sp = solver.params();
    j["solver"] = {{"iterations", sp.iterations}, {"grid_points", sp.grid_points},
                   {"mc_samples", sp.mc_samples}, {"euler_steps", sp.euler_steps},
                   {"omega", sp.omega},           {"eta", sp.eta},
                   {"q", sp.q},                   {"kappa", sp.kappa},
                   {"delta_fd_step", sp.delta_fd_step},
                   {"seed", sp.seed},             {"workers", sp.workers}};
    j["derived"]["p"] = solver.basis().size();
    j["derived"]["path_scheme"] =
        config.model.kind == ModelKind::BlackScholes ? "exact_two_time" : "euler";
    j["derived"]["domain"]["horizon"] = solver.domain().horizon;
    j["derived"]["domain"]["lower"] = solver.domain().lower;
    j["derived"]["domain"]["upper"] = solver.domain().upper;
    j["output_dir"] = config.output_dir;
    return j;
}

} // namespace bsde
