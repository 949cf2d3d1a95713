#ifndef FLEETSIM_SIM_HPP
#define FLEETSIM_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fleetsim/config.hpp"

namespace fleetsim {

struct Event {
    enum class Kind { Assign, Pickup, Complete };
    int t;
    Kind kind;
    int agent;
    int request;
};

// Lifecycle of one request as observed during a run. Steps are -1 until the
// corresponding event happened.
struct RequestRecord {
    int id = 0;
    int pickup = 0;
    int dropoff = 0;
    int entry = 0;
    int assigned_step = -1;
    int agent = -1;
    int picked_step = -1;
    int completed_step = -1;
    int dist_to_pickup = 0;
    int dist_to_drop = 0;
    int delay_pickup = 0;
    int delay_drop = 0;
    bool adversary_served = false;
};

struct RunOptions {
    bool record_events = false;
    // also price the optimal matching of each step's state, next to the cost
    // of the decision actually taken
    bool compare_dispatch_costs = false;
};

struct SimulationMetrics {
    std::uint64_t seed = 0;
    std::vector<int> outstanding; // unassigned requests after each step
    std::vector<int> unpicked;    // requests not yet picked up after each step
    std::int64_t entered = 0;
    std::int64_t completed = 0;
    std::int64_t wasted_delay_total = 0;  // dwell steps on adversary-served requests
    std::int64_t service_time_total = 0;  // steps from assignment to completion
    std::int64_t assignments_coop_first = 0;
    std::int64_t assignments_coop_later = 0;
    std::int64_t assignments_adv_first = 0;
    std::int64_t assignments_adv_later = 0;
    std::vector<std::uint8_t> assignment_is_adversary; // per assignment, in order
    std::vector<RequestRecord> requests;               // index == request id
    std::vector<Event> events;                         // only with record_events
    std::vector<std::int64_t> dispatch_cost;           // only with compare_dispatch_costs
    std::vector<std::int64_t> optimal_dispatch_cost;   // only with compare_dispatch_costs

    std::int64_t assignments_total() const {
        return assignments_coop_first + assignments_coop_later + assignments_adv_first +
               assignments_adv_later;
    }
    double adversary_assignment_fraction() const {
        std::int64_t n = assignments_total();
        if (n == 0) return 0.0;
        return double(assignments_adv_first + assignments_adv_later) / double(n);
    }
};

// One run: per step, sample arrivals, dispatch, advance the fleet, record.
SimulationMetrics run_once(const ScenarioConfig& cfg, std::uint64_t seed,
                           const RunOptions& opts = {});

struct AggregateSeries {
    int horizon = 0;
    int runs = 0;
    std::vector<double> mean_outstanding;
    std::vector<double> std_outstanding; // population deviation over runs
    std::vector<double> mean_unpicked;

    struct RunSummary {
        std::uint64_t seed = 0;
        int terminal_outstanding = 0;
        std::int64_t entered = 0;
        std::int64_t completed = 0;
        std::int64_t wasted_delay = 0;
        std::int64_t service_time = 0;
        std::int64_t assignments = 0;
        std::int64_t adversary_assignments = 0;
        double adversary_assignment_fraction = 0.0;
    };
    std::vector<RunSummary> per_run;
};

// Runs execute concurrently; run k always uses the seed derived from
// (master seed, k), so results do not depend on scheduling.
AggregateSeries run_ensemble(const ScenarioConfig& cfg);

struct Classification {
    bool unstable = false;
    double slope_per_step = 0.0; // least-squares slope over the final half
    double terminal_mean = 0.0;
    double midpoint_mean = 0.0;
};

// Unstable-like needs both a clearly positive trend over the final half and a
// terminal level well above the midpoint level. Series shorter than 100
// steps are rejected.
Classification classify_stability(const AggregateSeries& s,
                                  const ClassifyThresholds& thresholds = {});

void write_series_csv(const AggregateSeries& s, const std::string& path);
void write_summary_json(const AggregateSeries& s, const ScenarioConfig& cfg,
                        const std::string& path);

} // namespace fleetsim

#endif
