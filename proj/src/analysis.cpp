#include "fleetsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fleetsim/error.hpp"

namespace fleetsim {

namespace {

constexpr double kPmfTolerance = 1e-9;

// Masses scaled to integers summing to exactly kScale; the per-entry
// perturbation is at most a few parts in 2^48, far inside the advertised
// 1e-9 accuracy of the transport cost.
constexpr std::int64_t kScale = std::int64_t(1) << 48;

std::vector<std::int64_t> integerize(const std::vector<double>& mass) {
    const std::size_t n = mass.size();
    double total = 0.0;
    for (double m : mass) total += m;

    std::vector<std::int64_t> out(n);
    std::vector<std::pair<double, std::size_t>> fractions(n);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double exact = (long double)(mass[i] / total) * (long double)kScale;
        long double fl = std::floor(exact);
        out[i] = (std::int64_t)fl;
        fractions[i] = {double(exact - fl), i};
        sum += out[i];
    }
    std::int64_t leftover = kScale - sum;
    if (leftover > 0) {
        // hand the leftover units to the largest fractional parts
        std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::int64_t k = 0; k < leftover; ++k) out[fractions[std::size_t(k)].second] += 1;
    } else if (leftover < 0) {
        std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second < b.second;
        });
        std::int64_t need = -leftover;
        for (std::size_t i = 0; i < n && need > 0; ++i) {
            std::size_t idx = fractions[i].second;
            if (out[idx] > 0) {
                out[idx] -= 1;
                --need;
            }
        }
    }
    return out;
}

struct FlowArc {
    int to;
    int rev;
    std::int64_t cap;
    double cost;
};

// Successive shortest paths with Dijkstra over reduced costs. Arc costs are
// non-negative, so zero initial potentials are valid.
class MinCostFlow {
public:
    explicit MinCostFlow(int n) : graph_(std::size_t(n)), potential_(std::size_t(n), 0.0) {}

    void add_arc(int from, int to, std::int64_t cap, double cost) {
        graph_[std::size_t(from)].push_back({to, int(graph_[std::size_t(to)].size()), cap, cost});
        graph_[std::size_t(to)].push_back({from, int(graph_[std::size_t(from)].size()) - 1, 0, -cost});
    }

    const std::vector<FlowArc>& arcs(int node) const { return graph_[std::size_t(node)]; }

    void push(int s, int t, std::int64_t amount) {
        const std::size_t n = graph_.size();
        std::vector<double> dist(n);
        std::vector<int> prev_node(n), prev_arc(n);
        while (amount > 0) {
            std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
            dist[std::size_t(s)] = 0.0;
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
            heap.push({0.0, s});
            while (!heap.empty()) {
                auto [d, u] = heap.top();
                heap.pop();
                if (d > dist[std::size_t(u)]) continue;
                for (std::size_t k = 0; k < graph_[std::size_t(u)].size(); ++k) {
                    const FlowArc& arc = graph_[std::size_t(u)][k];
                    if (arc.cap <= 0) continue;
                    double nd = d + arc.cost + potential_[std::size_t(u)] - potential_[std::size_t(arc.to)];
                    if (nd < dist[std::size_t(arc.to)] - 1e-15) {
                        dist[std::size_t(arc.to)] = nd;
                        prev_node[std::size_t(arc.to)] = u;
                        prev_arc[std::size_t(arc.to)] = int(k);
                        heap.push({nd, arc.to});
                    }
                }
            }
            if (!std::isfinite(dist[std::size_t(t)]))
                data_error("transport network has no augmenting path; marginals are inconsistent");
            for (std::size_t v = 0; v < n; ++v) {
                if (std::isfinite(dist[v])) potential_[v] += dist[v];
            }
            std::int64_t bottleneck = amount;
            for (int v = t; v != s; v = prev_node[std::size_t(v)]) {
                const FlowArc& arc = graph_[std::size_t(prev_node[std::size_t(v)])][std::size_t(prev_arc[std::size_t(v)])];
                bottleneck = std::min(bottleneck, arc.cap);
            }
            for (int v = t; v != s; v = prev_node[std::size_t(v)]) {
                FlowArc& arc = graph_[std::size_t(prev_node[std::size_t(v)])][std::size_t(prev_arc[std::size_t(v)])];
                arc.cap -= bottleneck;
                graph_[std::size_t(arc.to)][std::size_t(arc.rev)].cap += bottleneck;
            }
            amount -= bottleneck;
        }
    }

private:
    std::vector<std::vector<FlowArc>> graph_;
    std::vector<double> potential_;
};

void check_pmf(const std::vector<double>& pmf, const RoadGraph& g, const char* name) {
    if (int(pmf.size()) != g.node_count())
        data_error(std::string(name) + " pmf covers " + std::to_string(pmf.size()) +
                   " nodes but the graph has " + std::to_string(g.node_count()));
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p))
            data_error(std::string(name) + " pmf has a negative or non-finite entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance)
        data_error(std::string(name) + " pmf sums to " + std::to_string(sum) + ", expected 1");
}

} // namespace

TransportPlan wasserstein(const RoadGraph& g, const std::vector<double>& p,
                          const std::vector<double>& q, GroundMetric metric) {
    check_pmf(p, g, "first");
    check_pmf(q, g, "second");

    TransportPlan plan;
    std::vector<double> p_mass, q_mass;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            plan.from_nodes.push_back(g.id_of(int(i)));
            p_mass.push_back(p[i]);
        }
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] > 0.0) {
            plan.to_nodes.push_back(g.id_of(int(j)));
            q_mass.push_back(q[j]);
        }
    }
    const int np = int(plan.from_nodes.size());
    const int nq = int(plan.to_nodes.size());

    std::vector<double> ground(std::size_t(np) * std::size_t(nq));
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nq; ++j) {
            double c = metric == GroundMetric::Hops
                           ? double(g.distance(plan.from_nodes[std::size_t(i)], plan.to_nodes[std::size_t(j)]))
                           : g.euclidean(plan.from_nodes[std::size_t(i)], plan.to_nodes[std::size_t(j)]);
            ground[std::size_t(i) * std::size_t(nq) + std::size_t(j)] = c;
        }
    }

    std::vector<std::int64_t> supply = integerize(p_mass);
    std::vector<std::int64_t> demand = integerize(q_mass);

    // node layout: source, np supplies, nq demands, sink
    const int source = 0;
    const int sink = np + nq + 1;
    MinCostFlow flow(np + nq + 2);
    for (int i = 0; i < np; ++i) flow.add_arc(source, 1 + i, supply[std::size_t(i)], 0.0);
    for (int j = 0; j < nq; ++j) flow.add_arc(1 + np + j, sink, demand[std::size_t(j)], 0.0);
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nq; ++j)
            flow.add_arc(1 + i, 1 + np + j, kScale, ground[std::size_t(i) * std::size_t(nq) + std::size_t(j)]);
    }
    flow.push(source, sink, kScale);

    plan.coupling.assign(std::size_t(np) * std::size_t(nq), 0.0);
    long double total_cost = 0.0L;
    for (int i = 0; i < np; ++i) {
        for (const FlowArc& arc : flow.arcs(1 + i)) {
            if (arc.to == source || arc.to == sink) continue;
            std::int64_t sent = kScale - arc.cap; // middle arcs started at kScale
            if (sent <= 0) continue;
            int j = arc.to - 1 - np;
            double share = double((long double)sent / (long double)kScale);
            plan.coupling[std::size_t(i) * std::size_t(nq) + std::size_t(j)] = share;
            total_cost += (long double)sent * (long double)ground[std::size_t(i) * std::size_t(nq) + std::size_t(j)];
        }
    }
    plan.cost = double(total_cost / (long double)kScale);
    return plan;
}

int ceil_bound(double x) { return int(std::ceil(x - 1e-9)); }

StabilityReport make_report(const StabilityInputs& in, double delta, double f_max,
                            std::optional<int> n_prime) {
    auto require_nonneg = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0)
            config_error(std::string(name) + " must be a non-negative finite number");
    };
    require_nonneg(in.e_eta, "mean arrival count");
    require_nonneg(in.e_xi_rho, "mean initial-to-pickup distance");
    require_nonneg(in.e_vrand_rho, "mean idle-to-pickup distance");
    require_nonneg(in.e_rho_delta, "mean pickup-to-dropoff distance");
    require_nonneg(in.wd, "transport distance");
    require_nonneg(delta, "delay bound");
    if (!(f_max >= 0.0 && f_max <= 1.0))
        config_error("covered adversarial proportion must lie in [0, 1]");

    StabilityReport rep;
    rep.inputs = in;
    rep.delta = delta;
    rep.f_max = f_max;
    rep.d_max = std::max(in.e_xi_rho, in.e_vrand_rho) + in.e_rho_delta;
    rep.d_min = in.wd + in.e_rho_delta;
    rep.n_coop_real = in.e_eta * rep.d_max;
    rep.n_coop = ceil_bound(rep.n_coop_real);
    rep.n_prime = n_prime.value_or(rep.n_coop);
    rep.f_threshold = instability_threshold(double(rep.n_prime), in.e_eta, rep.d_min, delta);
    rep.n_robust_real = in.e_eta * rep.d_max + 2.0 * delta * in.e_eta * f_max;
    rep.n_robust = ceil_bound(rep.n_robust_real);
    return rep;
}

StabilityReport compute_report(const DemandModel& m, const RoadGraph& g, double delta,
                               double f_max, GroundMetric metric, std::optional<int> n_prime) {
    StabilityInputs in;
    in.e_eta = m.expected_eta();
    in.e_xi_rho = expected_graph_distance(g, m.initial_pmf(), m.pickup_pmf());
    in.e_vrand_rho = expected_graph_distance(g, m.idle_pmf(), m.pickup_pmf());
    in.e_rho_delta = expected_graph_distance(g, m.pickup_pmf(), m.dropoff_pmf());
    in.wd = wasserstein(g, m.dropoff_pmf(), m.pickup_pmf(), metric).cost;
    return make_report(in, delta, f_max, n_prime);
}

double instability_threshold(double n_prime, double e_eta, double d_min, double delta) {
    if (!(delta > 0.0))
        config_error("instability threshold is undefined for a zero delay bound");
    if (!(e_eta > 0.0))
        config_error("instability threshold is undefined for zero mean demand");
    double raw = (n_prime - e_eta * d_min) / (2.0 * delta * e_eta);
    return std::max(0.0, raw);
}

double instability_threshold(double n_prime, const DemandModel& m, const RoadGraph& g,
                             double delta, GroundMetric metric) {
    double e_rho_delta = expected_graph_distance(g, m.pickup_pmf(), m.dropoff_pmf());
    double wd = wasserstein(g, m.dropoff_pmf(), m.pickup_pmf(), metric).cost;
    return instability_threshold(n_prime, m.expected_eta(), wd + e_rho_delta, delta);
}

double coupon_collector_time(int cooperative_count) {
    if (cooperative_count < 1)
        config_error("coupon-collector time needs at least one agent");
    long double harmonic = 0.0L;
    for (int i = cooperative_count; i >= 1; --i) harmonic += 1.0L / (long double)i;
    return double((long double)cooperative_count * harmonic);
}

} // namespace fleetsim
