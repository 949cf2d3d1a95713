#include "fleetsim/policy.hpp"

#include <algorithm>
#include <unordered_map>

#include "fleetsim/error.hpp"

namespace fleetsim {

DispatchDecision dispatch_random(const FleetState& fs, std::span<const Request> outstanding,
                                 Rng& rng) {
    DispatchDecision d;
    std::vector<int> pool = fs.available_ids();
    for (const Request& r : outstanding) {
        if (pool.empty()) break;
        std::size_t pick = std::size_t(rng.below(pool.size()));
        d.pairs.emplace_back(pool[pick], r.id);
        pool.erase(pool.begin() + std::ptrdiff_t(pick));
    }
    return d;
}

CostMatrix build_costs(const FleetState& fs, std::span<const Request> outstanding,
                       const RoadGraph& g) {
    CostMatrix m;
    m.row_labels = fs.available_ids();
    m.rows = int(m.row_labels.size());
    m.cols = int(outstanding.size());
    m.col_labels.reserve(outstanding.size());
    for (const Request& r : outstanding) m.col_labels.push_back(r.id);
    m.cost.reserve(std::size_t(m.rows) * std::size_t(m.cols));
    for (int agent_id : m.row_labels) {
        const AgentState& a = fs.agents[std::size_t(agent_id)];
        for (const Request& r : outstanding) {
            std::int64_t leg = g.distance(a.location, r.pickup) + g.distance(r.pickup, r.dropoff);
            m.cost.push_back(leg);
        }
    }
    return m;
}

DispatchDecision dispatch_instantaneous(const FleetState& fs,
                                        std::span<const Request> outstanding,
                                        const RoadGraph& g) {
    DispatchDecision d;
    CostMatrix m = build_costs(fs, outstanding, g);
    if (m.rows == 0 || m.cols == 0) return d; // nothing to match
    Matching match = solve_assignment(m);
    d.pairs = std::move(match.pairs);
    return d;
}

std::int64_t decision_cost(const FleetState& fs, const DispatchDecision& d,
                           std::span<const Request> outstanding, const RoadGraph& g) {
    std::unordered_map<int, const Request*> by_id;
    by_id.reserve(outstanding.size());
    for (const Request& r : outstanding) by_id[r.id] = &r;
    std::int64_t total = 0;
    for (const auto& [agent_id, request_id] : d.pairs) {
        auto it = by_id.find(request_id);
        if (it == by_id.end())
            config_error("decision references request " + std::to_string(request_id) +
                         " which is not outstanding");
        const Request& r = *it->second;
        const AgentState& a = fs.agents[std::size_t(agent_id)];
        total += g.distance(a.location, r.pickup) + g.distance(r.pickup, r.dropoff);
    }
    return total;
}

} // namespace fleetsim
