#ifndef FLEETSIM_CONFIG_HPP
#define FLEETSIM_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "fleetsim/analysis.hpp"
#include "fleetsim/fleet.hpp"
#include "fleetsim/policy.hpp"
#include "json.hpp"

namespace fleetsim {

struct ClassifyThresholds {
    double slope_per_step = 0.02; // growth rate that flags instability
    double terminal_ratio = 2.0;  // terminal mean vs midpoint mean
};

// One scenario document drives both simulation and threshold analysis.
// Simulation needs graph, demand, policy, fleet_size and horizon; analysis
// needs either explicit expectations or graph + demand. Parsing validates
// whatever is present and rejects unknown keys; the missing-field checks run
// when a command actually needs them.
struct ScenarioConfig {
    std::shared_ptr<const RoadGraph> graph;
    std::shared_ptr<const DemandModel> demand;

    std::optional<PolicyKind> policy;
    std::optional<int> fleet_size;
    double adversary_fraction = 0.0;
    int delta = 0;
    DelayMode delay_mode = DelayMode::FixedMax;
    bool symmetric_delays = false;
    std::optional<int> horizon;
    int runs = 1;
    std::uint64_t master_seed = 0;

    GroundMetric metric = GroundMetric::Hops;
    std::optional<double> f_max; // defaults to adversary_fraction
    std::optional<int> n_prime;
    std::optional<StabilityInputs> expectations;
    ClassifyThresholds classify;
    std::string out;

    // echo of every resolved setting; embedded in all written outputs
    nlohmann::json resolved = nlohmann::json::object();

    double effective_f_max() const { return f_max.value_or(adversary_fraction); }

    void set_seed(std::uint64_t seed);
    void set_runs(int r);
    void set_horizon(int t);
    void set_metric(GroundMetric m);
    void set_out(const std::string& prefix);

    // throws unless every simulation field is present
    void require_simulation() const;
};

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir,
                              const std::string& origin);
ScenarioConfig load_scenario_file(const std::string& path);

} // namespace fleetsim

#endif
