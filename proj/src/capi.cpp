#include "fleetsim.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fleetsim/analysis.hpp"
#include "fleetsim/config.hpp"
#include "fleetsim/demand.hpp"
#include "fleetsim/error.hpp"
#include "fleetsim/graph.hpp"
#include "fleetsim/matching.hpp"
#include "fleetsim/sim.hpp"
#include "json.hpp"

struct fleetsim_graph {
    std::shared_ptr<const fleetsim::RoadGraph> g;
};

struct fleetsim_demand {
    std::shared_ptr<const fleetsim::DemandModel> m;
};

struct fleetsim_scenario {
    fleetsim::ScenarioConfig cfg;
};

struct fleetsim_series {
    fleetsim::AggregateSeries s;
};

namespace {

thread_local std::string t_error;

template <typename F>
int guarded(F&& fn) {
    try {
        fn();
        t_error.clear();
        return FLEETSIM_OK;
    } catch (const fleetsim::Error& e) {
        t_error = e.what();
        return int(e.kind());
    } catch (const std::exception& e) {
        t_error = e.what();
        return FLEETSIM_ERR_CONFIG;
    } catch (...) {
        t_error = "unknown failure";
        return FLEETSIM_ERR_CONFIG;
    }
}

int invalid(const char* what) {
    t_error = what;
    return FLEETSIM_ERR_INVALID;
}

fleetsim::GroundMetric to_metric(int metric) {
    switch (metric) {
        case FLEETSIM_METRIC_HOPS: return fleetsim::GroundMetric::Hops;
        case FLEETSIM_METRIC_EUCLIDEAN: return fleetsim::GroundMetric::Euclidean;
        default: fleetsim::config_error("unknown metric selector " + std::to_string(metric));
    }
}

std::optional<int> to_n_prime(int n_prime) {
    if (n_prime < 0) return std::nullopt;
    return n_prime;
}

std::vector<double> dense_pmf(const fleetsim::RoadGraph& g, const int* nodes, const double* mass,
                              size_t len) {
    std::vector<double> pmf(std::size_t(g.node_count()), 0.0);
    for (size_t i = 0; i < len; ++i) pmf[std::size_t(g.index_of(nodes[i]))] += mass[i];
    return pmf;
}

fleetsim_report to_c_report(const fleetsim::StabilityReport& r) {
    fleetsim_report out{};
    out.demand_rate = r.inputs.e_eta;
    out.leg_initial_to_pickup = r.inputs.e_xi_rho;
    out.leg_anywhere_to_pickup = r.inputs.e_vrand_rho;
    out.leg_pickup_to_dropoff = r.inputs.e_rho_delta;
    out.transport_distance = r.inputs.wd;
    out.delay_bound = int(r.delta);
    out.adversary_fraction_max = r.f_max;
    out.d_max = r.d_max;
    out.d_min = r.d_min;
    out.n_coop_exact = r.n_coop_real;
    out.n_coop = r.n_coop;
    out.n_prime = r.n_prime;
    out.f_threshold = r.f_threshold;
    out.n_robust_exact = r.n_robust_real;
    out.n_robust = r.n_robust;
    return out;
}

fleetsim::StabilityReport analyze_config(const fleetsim::ScenarioConfig& cfg) {
    if (cfg.expectations)
        return fleetsim::make_report(*cfg.expectations, double(cfg.delta), cfg.effective_f_max(),
                                     cfg.n_prime);
    if (cfg.demand && cfg.graph)
        return fleetsim::compute_report(*cfg.demand, *cfg.graph, double(cfg.delta),
                                        cfg.effective_f_max(), cfg.metric, cfg.n_prime);
    fleetsim::config_error(
        "scenario provides neither explicit expectations nor a graph and demand model");
}

} // namespace

extern "C" {

const char* fleetsim_error_message(void) { return t_error.c_str(); }

const char* fleetsim_version(void) { return "0.1.0"; }

/* ---- road graph ------------------------------------------------------- */

int fleetsim_graph_load(const char* path, fleetsim_graph** out) {
    if (!path || !out) return invalid("fleetsim_graph_load: null argument");
    return guarded([&] {
        auto g = std::make_shared<fleetsim::RoadGraph>(fleetsim::RoadGraph::load_file(path));
        *out = new fleetsim_graph{std::move(g)};
    });
}

int fleetsim_graph_parse(const char* text, fleetsim_graph** out) {
    if (!text || !out) return invalid("fleetsim_graph_parse: null argument");
    return guarded([&] {
        auto g = std::make_shared<fleetsim::RoadGraph>(
            fleetsim::RoadGraph::parse(text, "<memory>"));
        *out = new fleetsim_graph{std::move(g)};
    });
}

int fleetsim_graph_grid(int side, fleetsim_graph** out) {
    if (!out) return invalid("fleetsim_graph_grid: null argument");
    return guarded([&] {
        auto g = std::make_shared<fleetsim::RoadGraph>(fleetsim::RoadGraph::grid(side));
        *out = new fleetsim_graph{std::move(g)};
    });
}

int fleetsim_graph_save(const fleetsim_graph* g, const char* path) {
    if (!g || !path) return invalid("fleetsim_graph_save: null argument");
    return guarded([&] { g->g->save_file(path); });
}

int fleetsim_graph_node_count(const fleetsim_graph* g, int* out) {
    if (!g || !out) return invalid("fleetsim_graph_node_count: null argument");
    return guarded([&] { *out = g->g->node_count(); });
}

int fleetsim_graph_edge_count(const fleetsim_graph* g, int* out) {
    if (!g || !out) return invalid("fleetsim_graph_edge_count: null argument");
    return guarded([&] { *out = g->g->edge_count(); });
}

int fleetsim_graph_distance(const fleetsim_graph* g, int from_node, int to_node, int* out) {
    if (!g || !out) return invalid("fleetsim_graph_distance: null argument");
    return guarded([&] { *out = g->g->distance(from_node, to_node); });
}

void fleetsim_graph_free(fleetsim_graph* g) { delete g; }

/* ---- demand model ----------------------------------------------------- */

int fleetsim_demand_estimate(const char* trace_path, const fleetsim_graph* g,
                             fleetsim_demand** out) {
    if (!trace_path || !g || !out) return invalid("fleetsim_demand_estimate: null argument");
    return guarded([&] {
        fleetsim::RequestTrace trace = fleetsim::load_trace_file(trace_path);
        auto m = std::make_shared<fleetsim::DemandModel>(
            fleetsim::DemandModel::estimate(trace, *g->g));
        *out = new fleetsim_demand{std::move(m)};
    });
}

int fleetsim_demand_load(const char* path, const fleetsim_graph* g, fleetsim_demand** out) {
    if (!path || !g || !out) return invalid("fleetsim_demand_load: null argument");
    return guarded([&] {
        auto m = std::make_shared<fleetsim::DemandModel>(
            fleetsim::DemandModel::load_file(path, *g->g));
        *out = new fleetsim_demand{std::move(m)};
    });
}

int fleetsim_demand_save(const fleetsim_demand* m, const char* path) {
    if (!m || !path) return invalid("fleetsim_demand_save: null argument");
    return guarded([&] { m->m->save_file(path); });
}

int fleetsim_demand_rate(const fleetsim_demand* m, double* out) {
    if (!m || !out) return invalid("fleetsim_demand_rate: null argument");
    return guarded([&] { *out = m->m->expected_eta(); });
}

int fleetsim_demand_expected_leg(const fleetsim_demand* m, const fleetsim_graph* g, int leg,
                                 double* out) {
    if (!m || !g || !out) return invalid("fleetsim_demand_expected_leg: null argument");
    return guarded([&] {
        const fleetsim::RoadGraph& graph = *g->g;
        const fleetsim::DemandModel& model = *m->m;
        switch (leg) {
            case FLEETSIM_LEG_INITIAL_TO_PICKUP:
                *out = fleetsim::expected_graph_distance(graph, model.initial_pmf(),
                                                         model.pickup_pmf());
                return;
            case FLEETSIM_LEG_ANYWHERE_TO_PICKUP: {
                std::vector<double> anywhere(std::size_t(graph.node_count()),
                                             1.0 / double(graph.node_count()));
                *out = fleetsim::expected_graph_distance(graph, anywhere, model.pickup_pmf());
                return;
            }
            case FLEETSIM_LEG_PICKUP_TO_DROPOFF:
                *out = fleetsim::expected_graph_distance(graph, model.pickup_pmf(),
                                                         model.dropoff_pmf());
                return;
            default:
                fleetsim::config_error("unknown leg selector " + std::to_string(leg));
        }
    });
}

void fleetsim_demand_free(fleetsim_demand* m) { delete m; }

/* ---- stability analysis ----------------------------------------------- */

int fleetsim_analyze_values(double demand_rate, double leg_initial_to_pickup,
                            double leg_anywhere_to_pickup, double leg_pickup_to_dropoff,
                            double transport_distance, int delay_bound,
                            double adversary_fraction_max, int n_prime, fleetsim_report* out) {
    if (!out) return invalid("fleetsim_analyze_values: null argument");
    return guarded([&] {
        fleetsim::StabilityInputs in;
        in.e_eta = demand_rate;
        in.e_xi_rho = leg_initial_to_pickup;
        in.e_vrand_rho = leg_anywhere_to_pickup;
        in.e_rho_delta = leg_pickup_to_dropoff;
        in.wd = transport_distance;
        *out = to_c_report(fleetsim::make_report(in, double(delay_bound), adversary_fraction_max,
                                                 to_n_prime(n_prime)));
    });
}

int fleetsim_analyze(const fleetsim_demand* m, const fleetsim_graph* g, int delay_bound,
                     double adversary_fraction_max, int metric, int n_prime,
                     fleetsim_report* out) {
    if (!m || !g || !out) return invalid("fleetsim_analyze: null argument");
    return guarded([&] {
        *out = to_c_report(fleetsim::compute_report(*m->m, *g->g, double(delay_bound),
                                                    adversary_fraction_max, to_metric(metric),
                                                    to_n_prime(n_prime)));
    });
}

int fleetsim_scenario_analyze(const fleetsim_scenario* s, fleetsim_report* out) {
    if (!s || !out) return invalid("fleetsim_scenario_analyze: null argument");
    return guarded([&] { *out = to_c_report(analyze_config(s->cfg)); });
}

int fleetsim_report_write(const fleetsim_report* r, const fleetsim_scenario* s,
                          const char* path) {
    if (!r || !s || !path) return invalid("fleetsim_report_write: null argument");
    return guarded([&] {
        nlohmann::json doc;
        doc["config"] = s->cfg.resolved;
        doc["inputs"] = {
            {"demand_rate", r->demand_rate},
            {"leg_initial_to_pickup", r->leg_initial_to_pickup},
            {"leg_anywhere_to_pickup", r->leg_anywhere_to_pickup},
            {"leg_pickup_to_dropoff", r->leg_pickup_to_dropoff},
            {"transport_distance", r->transport_distance},
            {"delay_bound", r->delay_bound},
            {"adversary_fraction_max", r->adversary_fraction_max},
        };
        doc["bounds"] = {
            {"d_max", r->d_max},
            {"d_min", r->d_min},
            {"n_coop", r->n_coop},
            {"n_coop_exact", r->n_coop_exact},
            {"n_prime", r->n_prime},
            {"f_threshold", r->f_threshold},
            {"n_robust", r->n_robust},
            {"n_robust_exact", r->n_robust_exact},
        };
        std::ofstream outfile(path, std::ios::binary);
        if (!outfile) fleetsim::data_error(std::string("cannot open ") + path + " for writing");
        outfile << doc.dump(2) << "\n";
        if (!outfile) fleetsim::data_error(std::string("failed while writing ") + path);
    });
}

int fleetsim_wasserstein(const fleetsim_graph* g, const int* nodes_p, const double* mass_p,
                         size_t len_p, const int* nodes_q, const double* mass_q, size_t len_q,
                         int metric, double* out) {
    if (!g || !nodes_p || !mass_p || !nodes_q || !mass_q || !out)
        return invalid("fleetsim_wasserstein: null argument");
    return guarded([&] {
        std::vector<double> p = dense_pmf(*g->g, nodes_p, mass_p, len_p);
        std::vector<double> q = dense_pmf(*g->g, nodes_q, mass_q, len_q);
        *out = fleetsim::wasserstein(*g->g, p, q, to_metric(metric)).cost;
    });
}

int fleetsim_instability_threshold(double n_prime, double demand_rate, double d_min,
                                   int delay_bound, double* out) {
    if (!out) return invalid("fleetsim_instability_threshold: null argument");
    return guarded([&] {
        *out = fleetsim::instability_threshold(n_prime, demand_rate, d_min, double(delay_bound));
    });
}

int fleetsim_coupon_collector_time(int c, double* out) {
    if (!out) return invalid("fleetsim_coupon_collector_time: null argument");
    return guarded([&] { *out = fleetsim::coupon_collector_time(c); });
}

/* ---- assignment solver ------------------------------------------------ */

int fleetsim_solve_assignment(const int64_t* cost, int rows, int cols, int* row_to_col,
                              int64_t* total_cost) {
    if (!cost || !row_to_col || !total_cost)
        return invalid("fleetsim_solve_assignment: null argument");
    return guarded([&] {
        std::vector<std::int64_t> c(cost, cost + std::size_t(rows < 0 ? 0 : rows) *
                                                     std::size_t(cols < 0 ? 0 : cols));
        fleetsim::AssignmentResult res = fleetsim::solve_assignment(rows, cols, c);
        for (int i = 0; i < rows; ++i) row_to_col[i] = res.row_to_col[std::size_t(i)];
        *total_cost = res.total_cost;
    });
}

int fleetsim_load_cost_matrix(const char* path, int64_t** cost, int* rows, int* cols) {
    if (!path || !cost || !rows || !cols)
        return invalid("fleetsim_load_cost_matrix: null argument");
    return guarded([&] {
        fleetsim::CostMatrix m = fleetsim::load_cost_matrix_file(path);
        auto* buf = static_cast<int64_t*>(std::malloc(m.cost.size() * sizeof(int64_t)));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, m.cost.data(), m.cost.size() * sizeof(int64_t));
        *cost = buf;
        *rows = m.rows;
        *cols = m.cols;
    });
}

void fleetsim_buffer_free(void* p) { std::free(p); }

/* ---- scenario --------------------------------------------------------- */

int fleetsim_scenario_load(const char* path, fleetsim_scenario** out) {
    if (!path || !out) return invalid("fleetsim_scenario_load: null argument");
    return guarded([&] { *out = new fleetsim_scenario{fleetsim::load_scenario_file(path)}; });
}

int fleetsim_scenario_parse(const char* json_text, const char* base_dir,
                            fleetsim_scenario** out) {
    if (!json_text || !base_dir || !out) return invalid("fleetsim_scenario_parse: null argument");
    return guarded([&] {
        *out = new fleetsim_scenario{fleetsim::parse_scenario(json_text, base_dir, "<memory>")};
    });
}

int fleetsim_scenario_set_seed(fleetsim_scenario* s, uint64_t seed) {
    if (!s) return invalid("fleetsim_scenario_set_seed: null argument");
    return guarded([&] { s->cfg.set_seed(seed); });
}

int fleetsim_scenario_set_runs(fleetsim_scenario* s, int runs) {
    if (!s) return invalid("fleetsim_scenario_set_runs: null argument");
    return guarded([&] { s->cfg.set_runs(runs); });
}

int fleetsim_scenario_set_horizon(fleetsim_scenario* s, int horizon) {
    if (!s) return invalid("fleetsim_scenario_set_horizon: null argument");
    return guarded([&] { s->cfg.set_horizon(horizon); });
}

int fleetsim_scenario_set_metric(fleetsim_scenario* s, int metric) {
    if (!s) return invalid("fleetsim_scenario_set_metric: null argument");
    return guarded([&] { s->cfg.set_metric(to_metric(metric)); });
}

int fleetsim_scenario_set_out(fleetsim_scenario* s, const char* prefix) {
    if (!s || !prefix) return invalid("fleetsim_scenario_set_out: null argument");
    return guarded([&] { s->cfg.set_out(prefix); });
}

int fleetsim_scenario_out_prefix(const fleetsim_scenario* s, const char** out) {
    if (!s || !out) return invalid("fleetsim_scenario_out_prefix: null argument");
    return guarded([&] { *out = s->cfg.out.c_str(); });
}

void fleetsim_scenario_free(fleetsim_scenario* s) { delete s; }

/* ---- simulation ------------------------------------------------------- */

int fleetsim_run_ensemble(const fleetsim_scenario* s, fleetsim_series** out) {
    if (!s || !out) return invalid("fleetsim_run_ensemble: null argument");
    return guarded([&] { *out = new fleetsim_series{fleetsim::run_ensemble(s->cfg)}; });
}

int fleetsim_series_length(const fleetsim_series* se, int* out) {
    if (!se || !out) return invalid("fleetsim_series_length: null argument");
    return guarded([&] { *out = se->s.horizon; });
}

int fleetsim_series_values(const fleetsim_series* se, int which, double* buffer, size_t buflen) {
    if (!se || !buffer) return invalid("fleetsim_series_values: null argument");
    const std::vector<double>* src = nullptr;
    switch (which) {
        case FLEETSIM_SERIES_MEAN_OUTSTANDING: src = &se->s.mean_outstanding; break;
        case FLEETSIM_SERIES_STD_OUTSTANDING: src = &se->s.std_outstanding; break;
        case FLEETSIM_SERIES_MEAN_UNPICKED: src = &se->s.mean_unpicked; break;
        default: return invalid("fleetsim_series_values: unknown channel selector");
    }
    if (buflen < src->size()) return invalid("fleetsim_series_values: buffer too small");
    return guarded([&] { std::memcpy(buffer, src->data(), src->size() * sizeof(double)); });
}

int fleetsim_series_classify(const fleetsim_series* se, const fleetsim_scenario* s, int* unstable,
                             double* slope_per_step, double* terminal_mean,
                             double* midpoint_mean) {
    if (!se || !s) return invalid("fleetsim_series_classify: null argument");
    return guarded([&] {
        fleetsim::Classification c = fleetsim::classify_stability(se->s, s->cfg.classify);
        if (unstable) *unstable = c.unstable ? 1 : 0;
        if (slope_per_step) *slope_per_step = c.slope_per_step;
        if (terminal_mean) *terminal_mean = c.terminal_mean;
        if (midpoint_mean) *midpoint_mean = c.midpoint_mean;
    });
}

int fleetsim_series_write_csv(const fleetsim_series* se, const char* path) {
    if (!se || !path) return invalid("fleetsim_series_write_csv: null argument");
    return guarded([&] { fleetsim::write_series_csv(se->s, path); });
}

int fleetsim_series_write_summary(const fleetsim_series* se, const fleetsim_scenario* s,
                                  const char* path) {
    if (!se || !s || !path) return invalid("fleetsim_series_write_summary: null argument");
    return guarded([&] { fleetsim::write_summary_json(se->s, s->cfg, path); });
}

void fleetsim_series_free(fleetsim_series* se) { delete se; }

} // extern "C"
