#include "fleetsim/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fleetsim/error.hpp"

namespace fleetsim {

namespace {

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                         const std::string& origin, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            config_error(origin + ": unknown " + where + " key '" + key + "'");
    }
}

int require_positive_int(const nlohmann::json& v, const std::string& origin, const char* name) {
    if (!v.is_number_integer())
        config_error(origin + ": '" + std::string(name) + "' must be an integer");
    long long x = v.get<long long>();
    if (x < 1 || x > INT32_MAX)
        config_error(origin + ": '" + std::string(name) + "' must be a positive integer");
    return int(x);
}

double require_number(const nlohmann::json& v, const std::string& origin, const char* name) {
    if (!v.is_number())
        config_error(origin + ": '" + std::string(name) + "' must be a number");
    return v.get<double>();
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::vector<double> location_pmf_from_json(const nlohmann::json& v, const RoadGraph& g,
                                           const std::string& origin, const char* name) {
    if (v.is_string() && v.get<std::string>() == "uniform")
        return std::vector<double>(std::size_t(g.node_count()), 1.0 / double(g.node_count()));
    if (!v.is_object())
        config_error(origin + ": demand '" + std::string(name) +
                     "' must be \"uniform\" or a node-to-probability map");
    std::vector<double> pmf(std::size_t(g.node_count()), 0.0);
    for (const auto& [key, value] : v.items()) {
        int id = 0;
        try {
            std::size_t pos = 0;
            id = std::stoi(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            config_error(origin + ": demand '" + std::string(name) + "' has a bad node id '" +
                         key + "'");
        }
        if (!g.has_node(id))
            config_error(origin + ": demand '" + std::string(name) + "' references node " + key +
                         " which is not in the graph");
        if (!value.is_number())
            config_error(origin + ": demand '" + std::string(name) + "' probability for node " +
                         key + " is not a number");
        pmf[std::size_t(g.index_of(id))] = value.get<double>();
    }
    return pmf;
}

} // namespace

void ScenarioConfig::set_seed(std::uint64_t seed) {
    master_seed = seed;
    resolved["seed"] = seed;
}

void ScenarioConfig::set_runs(int r) {
    if (r < 1) config_error("runs must be at least 1");
    runs = r;
    resolved["runs"] = r;
}

void ScenarioConfig::set_horizon(int t) {
    if (t < 1) config_error("horizon must be at least 1");
    horizon = t;
    resolved["horizon"] = t;
}

void ScenarioConfig::set_metric(GroundMetric m) {
    metric = m;
    resolved["metric"] = m == GroundMetric::Hops ? "hops" : "euclidean";
}

void ScenarioConfig::set_out(const std::string& prefix) {
    out = prefix;
    resolved["out"] = prefix;
}

void ScenarioConfig::require_simulation() const {
    if (!graph) config_error("scenario has no graph; simulation requires one");
    if (!demand) config_error("scenario has no demand source; simulation requires one");
    if (!policy) config_error("scenario has no policy; simulation requires one");
    if (!fleet_size) config_error("scenario has no fleet_size; simulation requires one");
    if (!horizon) config_error("scenario has no horizon; simulation requires one");
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir,
                              const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        config_error(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) config_error(origin + ": scenario must be a JSON object");

    reject_unknown_keys(doc,
                        {"graph", "demand", "policy", "fleet_size", "adversary_fraction", "delta",
                         "delay_mode", "symmetric_delays", "horizon", "runs", "seed", "metric",
                         "f_max", "n_prime", "expectations", "classify", "out"},
                        origin, "scenario");

    ScenarioConfig cfg;

    if (doc.contains("graph")) {
        if (!doc["graph"].is_string())
            config_error(origin + ": 'graph' must be a path string");
        std::string path = resolve_path(base_dir, doc["graph"].get<std::string>());
        cfg.graph = std::make_shared<const RoadGraph>(RoadGraph::load_file(path));
        cfg.resolved["graph"] = path;
    }

    if (doc.contains("demand")) {
        if (!cfg.graph) config_error(origin + ": 'demand' requires a 'graph'");
        const nlohmann::json& d = doc["demand"];
        if (!d.is_object()) config_error(origin + ": 'demand' must be an object");
        reject_unknown_keys(d, {"trace", "model", "eta", "rho", "delta", "xi"}, origin, "demand");
        const bool has_trace = d.contains("trace");
        const bool has_model = d.contains("model");
        const bool has_inline = d.contains("eta") || d.contains("rho") || d.contains("delta") ||
                                d.contains("xi");
        if (int(has_trace) + int(has_model) + int(has_inline) != 1)
            config_error(origin +
                         ": demand must be exactly one of a trace file, a model file, or inline "
                         "pmfs");
        if (has_trace) {
            if (!d["trace"].is_string())
                config_error(origin + ": demand 'trace' must be a path string");
            std::string path = resolve_path(base_dir, d["trace"].get<std::string>());
            RequestTrace trace = load_trace_file(path);
            cfg.demand = std::make_shared<const DemandModel>(
                DemandModel::estimate(trace, *cfg.graph));
            cfg.resolved["demand"] = {{"trace", path}};
        } else if (has_model) {
            if (!d["model"].is_string())
                config_error(origin + ": demand 'model' must be a path string");
            std::string path = resolve_path(base_dir, d["model"].get<std::string>());
            cfg.demand = std::make_shared<const DemandModel>(
                DemandModel::load_file(path, *cfg.graph));
            cfg.resolved["demand"] = {{"model", path}};
        } else {
            for (const char* key : {"eta", "rho", "delta"}) {
                if (!d.contains(key))
                    config_error(origin + ": inline demand needs '" + std::string(key) + "'");
            }
            if (!d["eta"].is_object())
                config_error(origin + ": demand 'eta' must map counts to probabilities");
            std::map<int, double> eta;
            for (const auto& [key, value] : d["eta"].items()) {
                int count = 0;
                try {
                    std::size_t pos = 0;
                    count = std::stoi(key, &pos);
                    if (pos != key.size() || count < 0) throw std::invalid_argument(key);
                } catch (const std::exception&) {
                    config_error(origin + ": demand 'eta' has a bad count '" + key + "'");
                }
                if (!value.is_number())
                    config_error(origin + ": demand 'eta' probability for count " + key +
                                 " is not a number");
                eta[count] = value.get<double>();
            }
            std::vector<double> rho = location_pmf_from_json(d["rho"], *cfg.graph, origin, "rho");
            std::vector<double> delta_pmf =
                location_pmf_from_json(d["delta"], *cfg.graph, origin, "delta");
            std::vector<double> xi = d.contains("xi")
                                         ? location_pmf_from_json(d["xi"], *cfg.graph, origin, "xi")
                                         : delta_pmf;
            try {
                cfg.demand = std::make_shared<const DemandModel>(
                    DemandModel(std::move(eta), std::move(rho), std::move(delta_pmf),
                                std::move(xi), *cfg.graph));
            } catch (const Error& e) {
                config_error(origin + ": " + e.what()); // inline pmfs live in the config
            }
            cfg.resolved["demand"] = d;
        }
    }

    if (doc.contains("policy")) {
        if (!doc["policy"].is_string())
            config_error(origin + ": 'policy' must be \"random\" or \"instantaneous\"");
        std::string p = doc["policy"].get<std::string>();
        if (p == "random")
            cfg.policy = PolicyKind::RandomAssignment;
        else if (p == "instantaneous")
            cfg.policy = PolicyKind::InstantaneousAssignment;
        else
            config_error(origin + ": unknown policy '" + p + "'");
        cfg.resolved["policy"] = p;
    }

    if (doc.contains("fleet_size"))
        cfg.fleet_size = require_positive_int(doc["fleet_size"], origin, "fleet_size");
    if (cfg.fleet_size) cfg.resolved["fleet_size"] = *cfg.fleet_size;

    if (doc.contains("adversary_fraction")) {
        double f = require_number(doc["adversary_fraction"], origin, "adversary_fraction");
        if (!(f >= 0.0 && f <= 1.0))
            config_error(origin + ": 'adversary_fraction' must lie in [0, 1]");
        cfg.adversary_fraction = f;
    }
    cfg.resolved["adversary_fraction"] = cfg.adversary_fraction;

    if (doc.contains("delta")) {
        if (!doc["delta"].is_number_integer())
            config_error(origin + ": 'delta' must be an integer");
        long long v = doc["delta"].get<long long>();
        if (v < 0 || v > INT32_MAX)
            config_error(origin + ": 'delta' must be a non-negative integer");
        cfg.delta = int(v);
    }
    cfg.resolved["delta"] = cfg.delta;

    if (doc.contains("delay_mode")) {
        if (!doc["delay_mode"].is_string())
            config_error(origin + ": 'delay_mode' must be \"fixed-max\" or \"uniform\"");
        std::string m = doc["delay_mode"].get<std::string>();
        if (m == "fixed-max")
            cfg.delay_mode = DelayMode::FixedMax;
        else if (m == "uniform")
            cfg.delay_mode = DelayMode::Uniform;
        else
            config_error(origin + ": unknown delay mode '" + m + "'");
    }
    cfg.resolved["delay_mode"] = cfg.delay_mode == DelayMode::FixedMax ? "fixed-max" : "uniform";

    if (doc.contains("symmetric_delays")) {
        if (!doc["symmetric_delays"].is_boolean())
            config_error(origin + ": 'symmetric_delays' must be a boolean");
        cfg.symmetric_delays = doc["symmetric_delays"].get<bool>();
    }
    cfg.resolved["symmetric_delays"] = cfg.symmetric_delays;

    if (doc.contains("horizon"))
        cfg.horizon = require_positive_int(doc["horizon"], origin, "horizon");
    if (cfg.horizon) cfg.resolved["horizon"] = *cfg.horizon;

    if (doc.contains("runs")) cfg.runs = require_positive_int(doc["runs"], origin, "runs");
    cfg.resolved["runs"] = cfg.runs;

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
            config_error(origin + ": 'seed' must be a non-negative integer");
        if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0)
            config_error(origin + ": 'seed' must be a non-negative integer");
        cfg.master_seed = doc["seed"].get<std::uint64_t>();
    }
    cfg.resolved["seed"] = cfg.master_seed;

    if (doc.contains("metric")) {
        if (!doc["metric"].is_string())
            config_error(origin + ": 'metric' must be \"hops\" or \"euclidean\"");
        std::string m = doc["metric"].get<std::string>();
        if (m == "hops")
            cfg.metric = GroundMetric::Hops;
        else if (m == "euclidean")
            cfg.metric = GroundMetric::Euclidean;
        else
            config_error(origin + ": unknown metric '" + m + "'");
    }
    cfg.resolved["metric"] = cfg.metric == GroundMetric::Hops ? "hops" : "euclidean";

    if (doc.contains("f_max")) {
        double f = require_number(doc["f_max"], origin, "f_max");
        if (!(f >= 0.0 && f <= 1.0)) config_error(origin + ": 'f_max' must lie in [0, 1]");
        cfg.f_max = f;
    }
    cfg.resolved["f_max"] = cfg.effective_f_max();

    if (doc.contains("n_prime")) {
        cfg.n_prime = require_positive_int(doc["n_prime"], origin, "n_prime");
        cfg.resolved["n_prime"] = *cfg.n_prime;
    }

    if (doc.contains("expectations")) {
        const nlohmann::json& e = doc["expectations"];
        if (!e.is_object()) config_error(origin + ": 'expectations' must be an object");
        const std::vector<std::string> keys = {"demand_rate", "leg_initial_to_pickup",
                                               "leg_anywhere_to_pickup", "leg_pickup_to_dropoff",
                                               "transport_distance"};
        reject_unknown_keys(e, {keys.begin(), keys.end()}, origin, "expectations");
        for (const std::string& key : keys) {
            if (!e.contains(key))
                config_error(origin + ": 'expectations' is missing '" + key + "'");
        }
        StabilityInputs in;
        in.e_eta = require_number(e["demand_rate"], origin, "demand_rate");
        in.e_xi_rho = require_number(e["leg_initial_to_pickup"], origin, "leg_initial_to_pickup");
        in.e_vrand_rho =
            require_number(e["leg_anywhere_to_pickup"], origin, "leg_anywhere_to_pickup");
        in.e_rho_delta =
            require_number(e["leg_pickup_to_dropoff"], origin, "leg_pickup_to_dropoff");
        in.wd = require_number(e["transport_distance"], origin, "transport_distance");
        cfg.expectations = in;
        cfg.resolved["expectations"] = e;
    }

    if (doc.contains("classify")) {
        const nlohmann::json& c = doc["classify"];
        if (!c.is_object()) config_error(origin + ": 'classify' must be an object");
        reject_unknown_keys(c, {"slope_threshold", "ratio_threshold"}, origin, "classify");
        if (c.contains("slope_threshold"))
            cfg.classify.slope_per_step = require_number(c["slope_threshold"], origin,
                                                         "slope_threshold");
        if (c.contains("ratio_threshold"))
            cfg.classify.terminal_ratio = require_number(c["ratio_threshold"], origin,
                                                         "ratio_threshold");
    }
    cfg.resolved["classify"] = {{"slope_threshold", cfg.classify.slope_per_step},
                                {"ratio_threshold", cfg.classify.terminal_ratio}};

    if (doc.contains("out")) {
        if (!doc["out"].is_string()) config_error(origin + ": 'out' must be a path string");
        cfg.out = resolve_path(base_dir, doc["out"].get<std::string>());
    }
    cfg.resolved["out"] = cfg.out;

    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string(), path);
}

} // namespace fleetsim
