#ifndef FLEETSIM_POLICY_HPP
#define FLEETSIM_POLICY_HPP

#include <span>
#include <vector>

#include "fleetsim/fleet.hpp"
#include "fleetsim/matching.hpp"

namespace fleetsim {

enum class PolicyKind { RandomAssignment, InstantaneousAssignment };

// Final (agent id, request id) commitments for one step; an assignment is
// never revisited afterwards.
struct DispatchDecision {
    std::vector<std::pair<int, int>> pairs;
};

// Walks outstanding requests in id order, pairing each with an agent drawn
// uniformly at random from the remaining available pool; stops when the pool
// runs dry. Consumes one draw per pairing.
DispatchDecision dispatch_random(const FleetState& fs, std::span<const Request> outstanding,
                                 Rng& rng);

// Min-cost matching of available agents to outstanding requests over
// two-leg travel times. No agents or no requests yields an empty decision.
DispatchDecision dispatch_instantaneous(const FleetState& fs,
                                        std::span<const Request> outstanding,
                                        const RoadGraph& g);

// Rows are available agents (ascending id), columns outstanding requests
// (in the given order); cost = dist(agent, pickup) + dist(pickup, dropoff).
CostMatrix build_costs(const FleetState& fs, std::span<const Request> outstanding,
                       const RoadGraph& g);

// Total two-leg travel time a decision commits to.
std::int64_t decision_cost(const FleetState& fs, const DispatchDecision& d,
                           std::span<const Request> outstanding, const RoadGraph& g);

} // namespace fleetsim

#endif
