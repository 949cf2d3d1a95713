#ifndef FLEETSIM_FLEET_HPP
#define FLEETSIM_FLEET_HPP

#include <optional>
#include <vector>

#include "fleetsim/demand.hpp"
#include "fleetsim/graph.hpp"
#include "fleetsim/rng.hpp"

namespace fleetsim {

enum class AgentClass { Cooperative, Adversarial };

enum class DelayMode { FixedMax, Uniform };

// Per-leg dwell drawn for agents that stall: adversarial agents always,
// cooperative agents only when apply_to_cooperative puts the whole fleet on
// equal footing. Fixed-maximum mode consumes no randomness.
struct DelayPolicy {
    DelayMode mode = DelayMode::FixedMax;
    int max_delay = 0; // upper bound per leg
    bool apply_to_cooperative = false;

    bool applies_to(AgentClass klass) const {
        return klass == AgentClass::Adversarial || apply_to_cooperative;
    }

    int draw_leg_delay(AgentClass klass, Rng& rng) const {
        if (!applies_to(klass) || max_delay == 0) return 0;
        if (mode == DelayMode::FixedMax) return max_delay;
        return int(rng.below(std::uint64_t(max_delay) + 1));
    }
};

// An agent is available exactly while it has no assignment; expected_remaining
// is bookkeeping (set to the two-leg travel distance at assignment) and can
// reach zero while a stalling agent is still busy.
struct AgentState {
    int id = 0;
    int location = 0; // node id
    int expected_remaining = 0;
    AgentClass klass = AgentClass::Cooperative;
    std::optional<int> assignment; // request id

    // current trip: concatenated shortest paths origin -> pickup -> dropoff
    std::vector<int> path;
    std::size_t cursor = 0;     // index of the current position in path
    std::size_t pickup_pos = 0; // index of the pickup node
    int pick_dwell_left = 0;
    int drop_dwell_left = 0;
    bool picked_up = false;
    bool ever_assigned = false;

    bool available() const { return !assignment.has_value(); }
};

struct FleetState {
    std::vector<AgentState> agents; // index == agent id
    int time = 0;

    std::vector<int> available_ids() const {
        std::vector<int> out;
        for (const AgentState& a : agents)
            if (a.available()) out.push_back(a.id);
        return out;
    }

    int adversary_count() const {
        int n = 0;
        for (const AgentState& a : agents)
            if (a.klass == AgentClass::Adversarial) n += 1;
        return n;
    }
};

struct StepEvents {
    std::vector<std::pair<int, int>> pickups;     // (agent id, request id)
    std::vector<std::pair<int, int>> completions; // (agent id, request id)
};

struct AssignInfo {
    int dist_to_pickup = 0;
    int dist_to_drop = 0;
    int delay_pickup = 0;
    int delay_drop = 0;
    bool first_assignment = false;
};

// n agents at ids 0..n-1, locations drawn from the model's initial pmf, then
// round(f*n) adversarial ids drawn uniformly without replacement. f*n must be
// whole (within 1e-9); membership is fixed for the run.
FleetState init_fleet(int n, double f, const DemandModel& m, const RoadGraph& g, Rng& rng);

// Commits an available agent to a request: dwell for the pickup-leg delay,
// walk a shortest path to the pickup, dwell for the drop-leg delay, walk a
// shortest path to the drop-off. Delays are drawn here (pickup leg first).
AssignInfo assign_request(AgentState& agent, const Request& r, const RoadGraph& g,
                          const DelayPolicy& dp, Rng& rng);

// Advances every busy agent one step (dwell or hop) and reports pickups and
// completions in agent-id order. Idle agents do not move.
StepEvents fleet_step(FleetState& fs, const RoadGraph& g);

} // namespace fleetsim

#endif
