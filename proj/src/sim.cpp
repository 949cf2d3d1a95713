#include "fleetsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "fleetsim/error.hpp"
#include "fleetsim/matching.hpp"

namespace fleetsim {

SimulationMetrics run_once(const ScenarioConfig& cfg, std::uint64_t seed,
                           const RunOptions& opts) {
    cfg.require_simulation();
    const RoadGraph& g = *cfg.graph;
    const DemandModel& model = *cfg.demand;
    const int horizon = *cfg.horizon;

    Rng rng(seed);
    FleetState fleet = init_fleet(*cfg.fleet_size, cfg.adversary_fraction, model, g, rng);
    DelayPolicy dp{cfg.delay_mode, cfg.delta, cfg.symmetric_delays};

    SimulationMetrics m;
    m.seed = seed;
    m.outstanding.reserve(std::size_t(horizon));
    m.unpicked.reserve(std::size_t(horizon));

    std::vector<Request> outstanding;
    int next_id = 0;
    std::int64_t picked_total = 0;

    for (int t = 0; t < horizon; ++t) {
        std::vector<Request> arrivals = model.sample_arrivals(t, rng, next_id);
        for (Request& r : arrivals) {
            m.entered += 1;
            RequestRecord rec;
            rec.id = r.id;
            rec.pickup = r.pickup;
            rec.dropoff = r.dropoff;
            rec.entry = t;
            m.requests.push_back(rec);
            outstanding.push_back(std::move(r));
        }

        DispatchDecision decision;
        if (*cfg.policy == PolicyKind::RandomAssignment)
            decision = dispatch_random(fleet, outstanding, rng);
        else
            decision = dispatch_instantaneous(fleet, outstanding, g);

        if (opts.compare_dispatch_costs) {
            m.dispatch_cost.push_back(decision_cost(fleet, decision, outstanding, g));
            CostMatrix costs = build_costs(fleet, outstanding, g);
            std::int64_t best = 0;
            if (costs.rows > 0 && costs.cols > 0) best = solve_assignment(costs).total_cost;
            m.optimal_dispatch_cost.push_back(best);
        }

        if (!decision.pairs.empty()) {
            std::unordered_map<int, std::size_t> pos;
            pos.reserve(outstanding.size());
            for (std::size_t i = 0; i < outstanding.size(); ++i)
                pos.emplace(outstanding[i].id, i);

            for (const auto& [agent_id, req_id] : decision.pairs) {
                AgentState& a = fleet.agents[std::size_t(agent_id)];
                const Request& r = outstanding[pos.at(req_id)];
                AssignInfo info = assign_request(a, r, g, dp, rng);

                RequestRecord& rec = m.requests[std::size_t(req_id)];
                rec.assigned_step = t;
                rec.agent = agent_id;
                rec.dist_to_pickup = info.dist_to_pickup;
                rec.dist_to_drop = info.dist_to_drop;
                rec.delay_pickup = info.delay_pickup;
                rec.delay_drop = info.delay_drop;
                rec.adversary_served = a.klass == AgentClass::Adversarial;

                if (rec.adversary_served)
                    (info.first_assignment ? m.assignments_adv_first : m.assignments_adv_later) += 1;
                else
                    (info.first_assignment ? m.assignments_coop_first : m.assignments_coop_later) += 1;
                m.assignment_is_adversary.push_back(rec.adversary_served ? 1 : 0);
                if (opts.record_events)
                    m.events.push_back({t, Event::Kind::Assign, agent_id, req_id});
            }

            std::unordered_set<int> taken;
            taken.reserve(decision.pairs.size());
            for (const auto& p : decision.pairs) taken.insert(p.second);
            std::erase_if(outstanding, [&](const Request& r) { return taken.count(r.id) > 0; });
        }

        StepEvents ev = fleet_step(fleet, g);
        for (const auto& [agent_id, req_id] : ev.pickups) {
            picked_total += 1;
            m.requests[std::size_t(req_id)].picked_step = t;
            if (opts.record_events) m.events.push_back({t, Event::Kind::Pickup, agent_id, req_id});
        }
        for (const auto& [agent_id, req_id] : ev.completions) {
            m.completed += 1;
            RequestRecord& rec = m.requests[std::size_t(req_id)];
            rec.completed_step = t;
            m.service_time_total += std::int64_t(t - rec.assigned_step) + 1;
            if (rec.adversary_served)
                m.wasted_delay_total += std::int64_t(rec.delay_pickup) + rec.delay_drop;
            if (opts.record_events)
                m.events.push_back({t, Event::Kind::Complete, agent_id, req_id});
        }

        m.outstanding.push_back(int(outstanding.size()));
        m.unpicked.push_back(int(m.entered - picked_total));
    }
    return m;
}

AggregateSeries run_ensemble(const ScenarioConfig& cfg) {
    cfg.require_simulation();
    const int runs = cfg.runs;
    const int horizon = *cfg.horizon;

    std::vector<SimulationMetrics> slots(static_cast<std::size_t>(runs));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int workers = int(std::min<unsigned>(hw, unsigned(runs)));
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= runs) return;
                try {
                    slots[std::size_t(i)] = run_once(cfg, derive_run_seed(cfg.master_seed, i));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    next.store(runs);
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    AggregateSeries s;
    s.horizon = horizon;
    s.runs = runs;
    s.mean_outstanding.assign(std::size_t(horizon), 0.0);
    s.std_outstanding.assign(std::size_t(horizon), 0.0);
    s.mean_unpicked.assign(std::size_t(horizon), 0.0);
    for (int t = 0; t < horizon; ++t) {
        double sum_out = 0.0;
        double sum_unp = 0.0;
        for (int i = 0; i < runs; ++i) {
            sum_out += slots[std::size_t(i)].outstanding[std::size_t(t)];
            sum_unp += slots[std::size_t(i)].unpicked[std::size_t(t)];
        }
        const double mean_out = sum_out / runs;
        double sq = 0.0;
        for (int i = 0; i < runs; ++i) {
            const double d = slots[std::size_t(i)].outstanding[std::size_t(t)] - mean_out;
            sq += d * d;
        }
        s.mean_outstanding[std::size_t(t)] = mean_out;
        s.std_outstanding[std::size_t(t)] = std::sqrt(sq / runs);
        s.mean_unpicked[std::size_t(t)] = sum_unp / runs;
    }

    s.per_run.reserve(std::size_t(runs));
    for (int i = 0; i < runs; ++i) {
        const SimulationMetrics& m = slots[std::size_t(i)];
        AggregateSeries::RunSummary r;
        r.seed = m.seed;
        r.terminal_outstanding = m.outstanding.back();
        r.entered = m.entered;
        r.completed = m.completed;
        r.wasted_delay = m.wasted_delay_total;
        r.service_time = m.service_time_total;
        r.assignments = m.assignments_total();
        r.adversary_assignments = m.assignments_adv_first + m.assignments_adv_later;
        r.adversary_assignment_fraction = m.adversary_assignment_fraction();
        s.per_run.push_back(r);
    }
    return s;
}

Classification classify_stability(const AggregateSeries& s, const ClassifyThresholds& thresholds) {
    const std::size_t n = s.mean_outstanding.size();
    if (n < 100)
        config_error("stability classification needs at least 100 recorded steps, got " +
                     std::to_string(n));
    const std::size_t start = n / 2;
    const std::size_t k = n - start;

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        mean_x += double(i);
        mean_y += s.mean_outstanding[i];
    }
    mean_x /= double(k);
    mean_y /= double(k);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        const double dx = double(i) - mean_x;
        sxy += dx * (s.mean_outstanding[i] - mean_y);
        sxx += dx * dx;
    }

    Classification c;
    c.slope_per_step = sxy / sxx;
    c.terminal_mean = s.mean_outstanding.back();
    c.midpoint_mean = s.mean_outstanding[n / 2];
    c.unstable = c.slope_per_step > thresholds.slope_per_step &&
                 c.terminal_mean > thresholds.terminal_ratio * c.midpoint_mean;
    return c;
}

void write_series_csv(const AggregateSeries& s, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) data_error("cannot open " + path + " for writing");
    std::fputs("t,mean_outstanding,std_outstanding,mean_unpicked\n", f);
    for (int t = 0; t < s.horizon; ++t)
        std::fprintf(f, "%d,%.6f,%.6f,%.6f\n", t, s.mean_outstanding[std::size_t(t)],
                     s.std_outstanding[std::size_t(t)], s.mean_unpicked[std::size_t(t)]);
    const bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) data_error("failed while writing " + path);
}

void write_summary_json(const AggregateSeries& s, const ScenarioConfig& cfg,
                        const std::string& path) {
    nlohmann::json doc;
    doc["config"] = cfg.resolved;
    doc["runs"] = s.runs;
    doc["horizon"] = s.horizon;

    if (s.horizon >= 100) {
        Classification c = classify_stability(s, cfg.classify);
        doc["classification"] = {
            {"label", c.unstable ? "unstable-like" : "stable-like"},
            {"slope_per_step", c.slope_per_step},
            {"terminal_mean", c.terminal_mean},
            {"midpoint_mean", c.midpoint_mean},
            {"slope_threshold", cfg.classify.slope_per_step},
            {"ratio_threshold", cfg.classify.terminal_ratio},
        };
    } else {
        doc["classification"] = nullptr;
    }

    doc["terminal"] = {
        {"mean_outstanding", s.mean_outstanding.back()},
        {"std_outstanding", s.std_outstanding.back()},
        {"mean_unpicked", s.mean_unpicked.back()},
    };

    std::int64_t entered = 0;
    std::int64_t completed = 0;
    std::int64_t wasted = 0;
    std::int64_t service = 0;
    std::int64_t assignments = 0;
    std::int64_t adversary = 0;
    nlohmann::json per_run = nlohmann::json::array();
    for (const AggregateSeries::RunSummary& r : s.per_run) {
        entered += r.entered;
        completed += r.completed;
        wasted += r.wasted_delay;
        service += r.service_time;
        assignments += r.assignments;
        adversary += r.adversary_assignments;
        per_run.push_back({
            {"seed", r.seed},
            {"terminal_outstanding", r.terminal_outstanding},
            {"entered", r.entered},
            {"completed", r.completed},
            {"wasted_delay", r.wasted_delay},
            {"service_time", r.service_time},
            {"assignments", r.assignments},
            {"adversary_assignments", r.adversary_assignments},
            {"adversary_assignment_fraction", r.adversary_assignment_fraction},
        });
    }
    doc["totals"] = {
        {"entered", entered},
        {"completed", completed},
        {"wasted_delay", wasted},
        {"service_time", service},
        {"assignments", assignments},
        {"adversary_assignments", adversary},
        {"adversary_assignment_fraction",
         assignments == 0 ? 0.0 : double(adversary) / double(assignments)},
    };
    doc["per_run"] = per_run;

    std::ofstream out(path, std::ios::binary);
    if (!out) data_error("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
    if (!out) data_error("failed while writing " + path);
}

} // namespace fleetsim
