#include "fleetsim/fleet.hpp"

#include <cmath>
#include <numeric>

#include "fleetsim/error.hpp"

namespace fleetsim {

FleetState init_fleet(int n, double f, const DemandModel& m, const RoadGraph& g, Rng& rng) {
    (void)g;
    if (n < 1) config_error("fleet size must be at least 1, got " + std::to_string(n));
    if (!(f >= 0.0 && f <= 1.0))
        config_error("adversarial proportion must lie in [0, 1], got " + std::to_string(f));
    const double product = f * double(n);
    const long long adversaries = std::llround(product);
    if (std::abs(product - double(adversaries)) > 1e-9)
        config_error("adversarial proportion " + std::to_string(f) + " of " + std::to_string(n) +
                     " agents is not a whole number of agents");

    FleetState fs;
    fs.agents.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        fs.agents[std::size_t(i)].id = i;
        fs.agents[std::size_t(i)].location = m.sample_initial(rng);
    }

    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    for (long long i = 0; i < adversaries; ++i) {
        long long j = i + (long long)rng.below(std::uint64_t(n - i));
        std::swap(ids[std::size_t(i)], ids[std::size_t(j)]);
    }
    for (long long i = 0; i < adversaries; ++i)
        fs.agents[std::size_t(ids[std::size_t(i)])].klass = AgentClass::Adversarial;
    return fs;
}

AssignInfo assign_request(AgentState& agent, const Request& r, const RoadGraph& g,
                          const DelayPolicy& dp, Rng& rng) {
    if (!agent.available())
        config_error("agent " + std::to_string(agent.id) + " is already serving request " +
                     std::to_string(*agent.assignment));

    AssignInfo info;
    info.first_assignment = !agent.ever_assigned;
    info.delay_pickup = dp.draw_leg_delay(agent.klass, rng);
    info.delay_drop = dp.draw_leg_delay(agent.klass, rng);

    Itinerary to_pickup = g.shortest_itinerary(agent.location, r.pickup);
    Itinerary to_drop = g.shortest_itinerary(r.pickup, r.dropoff);
    info.dist_to_pickup = to_pickup.hops();
    info.dist_to_drop = to_drop.hops();

    agent.path = std::move(to_pickup.nodes);
    agent.pickup_pos = agent.path.size() - 1;
    agent.path.insert(agent.path.end(), to_drop.nodes.begin() + 1, to_drop.nodes.end());
    agent.cursor = 0;
    agent.pick_dwell_left = info.delay_pickup;
    agent.drop_dwell_left = info.delay_drop;
    agent.picked_up = false;
    agent.assignment = r.id;
    agent.expected_remaining = info.dist_to_pickup + info.dist_to_drop;
    agent.ever_assigned = true;
    return info;
}

namespace {

// Pickup fires once the agent stands on the pickup node with its pickup dwell
// spent; completion fires at the drop-off with the drop dwell spent. Both can
// fire without consuming a step when the corresponding leg is empty.
void fire_milestones(AgentState& a, StepEvents& ev) {
    if (!a.assignment) return;
    if (!a.picked_up && a.pick_dwell_left == 0 && a.cursor == a.pickup_pos) {
        a.picked_up = true;
        ev.pickups.emplace_back(a.id, *a.assignment);
    }
    if (a.picked_up && a.drop_dwell_left == 0 && a.cursor + 1 == a.path.size()) {
        ev.completions.emplace_back(a.id, *a.assignment);
        a.assignment.reset();
        a.expected_remaining = 0;
        a.path.clear();
        a.cursor = 0;
        a.pickup_pos = 0;
        a.picked_up = false;
    }
}

} // namespace

StepEvents fleet_step(FleetState& fs, const RoadGraph& g) {
    (void)g;
    StepEvents ev;
    for (AgentState& a : fs.agents) {
        fire_milestones(a, ev);
        if (!a.assignment) continue;

        if (!a.picked_up) {
            if (a.pick_dwell_left > 0) {
                --a.pick_dwell_left;
            } else {
                ++a.cursor;
                a.location = a.path[a.cursor];
            }
        } else {
            if (a.drop_dwell_left > 0) {
                --a.drop_dwell_left;
            } else {
                ++a.cursor;
                a.location = a.path[a.cursor];
            }
        }
        if (a.expected_remaining > 0) --a.expected_remaining;
        fire_milestones(a, ev);
    }
    fs.time += 1;
    return ev;
}

} // namespace fleetsim
