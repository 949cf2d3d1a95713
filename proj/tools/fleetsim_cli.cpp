#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fleetsim.h"

namespace {

int fail(int status) {
    std::fprintf(stderr, "error: %s\n", fleetsim_error_message());
    return status == FLEETSIM_ERR_DATA ? 2 : 1;
}

#define CHECK(call)                                     \
    do {                                                \
        const int check_status_ = (call);               \
        if (check_status_ != FLEETSIM_OK) return fail(check_status_); \
    } while (0)

struct GraphFree {
    void operator()(fleetsim_graph* p) const { fleetsim_graph_free(p); }
};
struct DemandFree {
    void operator()(fleetsim_demand* p) const { fleetsim_demand_free(p); }
};
struct ScenarioFree {
    void operator()(fleetsim_scenario* p) const { fleetsim_scenario_free(p); }
};
struct SeriesFree {
    void operator()(fleetsim_series* p) const { fleetsim_series_free(p); }
};
struct BufferFree {
    void operator()(void* p) const { fleetsim_buffer_free(p); }
};

int metric_code(const std::string& name) {
    return name == "euclidean" ? FLEETSIM_METRIC_EUCLIDEAN : FLEETSIM_METRIC_HOPS;
}

struct ScenarioFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int runs = 0;
    bool runs_set = false;
    int horizon = 0;
    bool horizon_set = false;
    std::string metric;
    std::string out;
};

// Loads the scenario and applies whichever command-line overrides were given.
int open_scenario(const ScenarioFlags& fl,
                  std::unique_ptr<fleetsim_scenario, ScenarioFree>& scenario) {
    fleetsim_scenario* raw = nullptr;
    CHECK(fleetsim_scenario_load(fl.config_path.c_str(), &raw));
    scenario.reset(raw);
    if (fl.seed_set) CHECK(fleetsim_scenario_set_seed(raw, fl.seed));
    if (fl.runs_set) CHECK(fleetsim_scenario_set_runs(raw, fl.runs));
    if (fl.horizon_set) CHECK(fleetsim_scenario_set_horizon(raw, fl.horizon));
    if (!fl.metric.empty()) CHECK(fleetsim_scenario_set_metric(raw, metric_code(fl.metric)));
    if (!fl.out.empty()) CHECK(fleetsim_scenario_set_out(raw, fl.out.c_str()));
    return 0;
}

int require_prefix(const fleetsim_scenario* s, std::string& prefix) {
    const char* p = nullptr;
    CHECK(fleetsim_scenario_out_prefix(s, &p));
    prefix = p;
    if (prefix.empty()) {
        std::fprintf(stderr, "error: no output prefix; set \"out\" in the scenario or pass --out\n");
        return 1;
    }
    return 0;
}

int cmd_estimate(const std::string& trace, const std::string& graph, const std::string& out) {
    fleetsim_graph* graw = nullptr;
    CHECK(fleetsim_graph_load(graph.c_str(), &graw));
    std::unique_ptr<fleetsim_graph, GraphFree> g(graw);

    fleetsim_demand* mraw = nullptr;
    CHECK(fleetsim_demand_estimate(trace.c_str(), graw, &mraw));
    std::unique_ptr<fleetsim_demand, DemandFree> m(mraw);

    double rate = 0.0;
    double initial_to_pickup = 0.0;
    double anywhere_to_pickup = 0.0;
    double pickup_to_dropoff = 0.0;
    CHECK(fleetsim_demand_rate(mraw, &rate));
    CHECK(fleetsim_demand_expected_leg(mraw, graw, FLEETSIM_LEG_INITIAL_TO_PICKUP,
                                       &initial_to_pickup));
    CHECK(fleetsim_demand_expected_leg(mraw, graw, FLEETSIM_LEG_ANYWHERE_TO_PICKUP,
                                       &anywhere_to_pickup));
    CHECK(fleetsim_demand_expected_leg(mraw, graw, FLEETSIM_LEG_PICKUP_TO_DROPOFF,
                                       &pickup_to_dropoff));

    std::printf("demand_rate             %.6f\n", rate);
    std::printf("leg_initial_to_pickup   %.6f\n", initial_to_pickup);
    std::printf("leg_anywhere_to_pickup  %.6f\n", anywhere_to_pickup);
    std::printf("leg_pickup_to_dropoff   %.6f\n", pickup_to_dropoff);

    CHECK(fleetsim_demand_save(mraw, out.c_str()));
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_analyze(const ScenarioFlags& fl) {
    std::unique_ptr<fleetsim_scenario, ScenarioFree> scenario;
    if (int rc = open_scenario(fl, scenario)) return rc;

    fleetsim_report r{};
    CHECK(fleetsim_scenario_analyze(scenario.get(), &r));

    std::printf("inputs\n");
    std::printf("  demand_rate             %12.6f\n", r.demand_rate);
    std::printf("  leg_initial_to_pickup   %12.6f\n", r.leg_initial_to_pickup);
    std::printf("  leg_anywhere_to_pickup  %12.6f\n", r.leg_anywhere_to_pickup);
    std::printf("  leg_pickup_to_dropoff   %12.6f\n", r.leg_pickup_to_dropoff);
    std::printf("  transport_distance      %12.6f\n", r.transport_distance);
    std::printf("  delay_bound             %12d\n", r.delay_bound);
    std::printf("  adversary_fraction_max  %12.6f\n", r.adversary_fraction_max);
    std::printf("bounds\n");
    std::printf("  d_max                   %12.6f\n", r.d_max);
    std::printf("  d_min                   %12.6f\n", r.d_min);
    std::printf("  n_coop                  %12d  (exact %.6f)\n", r.n_coop, r.n_coop_exact);
    std::printf("  n_prime                 %12d\n", r.n_prime);
    std::printf("  f_threshold             %12.6f\n", r.f_threshold);
    std::printf("  n_robust                %12d  (exact %.6f)\n", r.n_robust, r.n_robust_exact);

    std::string prefix;
    if (int rc = require_prefix(scenario.get(), prefix)) return rc;
    const std::string path = prefix + ".report.json";
    CHECK(fleetsim_report_write(&r, scenario.get(), path.c_str()));
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_simulate(const ScenarioFlags& fl) {
    std::unique_ptr<fleetsim_scenario, ScenarioFree> scenario;
    if (int rc = open_scenario(fl, scenario)) return rc;

    std::string prefix;
    if (int rc = require_prefix(scenario.get(), prefix)) return rc;

    fleetsim_series* sraw = nullptr;
    CHECK(fleetsim_run_ensemble(scenario.get(), &sraw));
    std::unique_ptr<fleetsim_series, SeriesFree> series(sraw);

    int length = 0;
    CHECK(fleetsim_series_length(sraw, &length));
    if (length >= 100) {
        int unstable = 0;
        double slope = 0.0;
        double terminal = 0.0;
        double midpoint = 0.0;
        CHECK(fleetsim_series_classify(sraw, scenario.get(), &unstable, &slope, &terminal,
                                       &midpoint));
        std::printf("classification: %s (slope %.6f per step, terminal %.3f, midpoint %.3f)\n",
                    unstable ? "unstable-like" : "stable-like", slope, terminal, midpoint);
    } else {
        std::printf("classification: undetermined (fewer than 100 steps)\n");
    }

    const std::string csv = prefix + ".series.csv";
    const std::string summary = prefix + ".summary.json";
    CHECK(fleetsim_series_write_csv(sraw, csv.c_str()));
    CHECK(fleetsim_series_write_summary(sraw, scenario.get(), summary.c_str()));
    std::printf("wrote %s\n", csv.c_str());
    std::printf("wrote %s\n", summary.c_str());
    return 0;
}

int cmd_gridgen(int side, const std::string& out) {
    fleetsim_graph* graw = nullptr;
    CHECK(fleetsim_graph_grid(side, &graw));
    std::unique_ptr<fleetsim_graph, GraphFree> g(graw);
    CHECK(fleetsim_graph_save(graw, out.c_str()));
    int nodes = 0;
    int edges = 0;
    CHECK(fleetsim_graph_node_count(graw, &nodes));
    CHECK(fleetsim_graph_edge_count(graw, &edges));
    std::printf("wrote %s (%d nodes, %d edges)\n", out.c_str(), nodes, edges);
    return 0;
}

int cmd_solve(const std::string& path) {
    int64_t* cost = nullptr;
    int rows = 0;
    int cols = 0;
    CHECK(fleetsim_load_cost_matrix(path.c_str(), &cost, &rows, &cols));
    std::unique_ptr<int64_t, BufferFree> buf(cost);

    std::vector<int> row_to_col(std::size_t(rows), -1);
    int64_t total = 0;
    CHECK(fleetsim_solve_assignment(cost, rows, cols, row_to_col.data(), &total));
    for (int r = 0; r < rows; ++r) {
        const int c = row_to_col[std::size_t(r)];
        if (c < 0) continue;
        std::printf("row %d -> col %d  cost %lld\n", r, c,
                    (long long)cost[std::size_t(r) * std::size_t(cols) + std::size_t(c)]);
    }
    std::printf("total %lld\n", (long long)total);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fleet routing simulator and stability analyzer"};
    app.set_version_flag("--version", fleetsim_version());
    app.require_subcommand(1);

    std::string est_trace;
    std::string est_graph;
    std::string est_out;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "fit a demand model to a trace of minute,pickup,dropoff records");
    estimate->add_option("--trace", est_trace, "trace file")->required();
    estimate->add_option("--graph", est_graph, "road graph file")->required();
    estimate->add_option("--out", est_out, "demand model output path")->required();

    ScenarioFlags an;
    CLI::App* analyze =
        app.add_subcommand("analyze", "compute fleet-size bounds and the instability threshold");
    analyze->add_option("config", an.config_path, "scenario file")->required();
    analyze->add_option("--metric", an.metric, "transport ground metric")
        ->check(CLI::IsMember({"hops", "euclidean"}));
    analyze->add_option("--out", an.out, "output prefix");

    ScenarioFlags si;
    CLI::App* simulate =
        app.add_subcommand("simulate", "run the scenario ensemble and classify the trend");
    simulate->add_option("config", si.config_path, "scenario file")->required();
    CLI::Option* seed_opt = simulate->add_option("--seed", si.seed, "master seed");
    CLI::Option* runs_opt = simulate->add_option("--runs", si.runs, "ensemble size");
    CLI::Option* horizon_opt = simulate->add_option("--horizon", si.horizon, "steps per run");
    simulate->add_option("--metric", si.metric, "transport ground metric")
        ->check(CLI::IsMember({"hops", "euclidean"}));
    simulate->add_option("--out", si.out, "output prefix");

    int grid_side = 0;
    std::string grid_out;
    CLI::App* gridgen = app.add_subcommand("gridgen", "write a four-neighbor grid graph");
    gridgen->add_option("--side", grid_side, "side length (>= 2)")->required();
    gridgen->add_option("--out", grid_out, "graph output path")->required();

    std::string solve_path;
    CLI::App* solve = app.add_subcommand("solve", "min-cost assignment on a cost-matrix file");
    solve->add_option("matrix", solve_path, "cost matrix file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    si.seed_set = seed_opt->count() > 0;
    si.runs_set = runs_opt->count() > 0;
    si.horizon_set = horizon_opt->count() > 0;

    if (estimate->parsed()) return cmd_estimate(est_trace, est_graph, est_out);
    if (analyze->parsed()) return cmd_analyze(an);
    if (simulate->parsed()) return cmd_simulate(si);
    if (gridgen->parsed()) return cmd_gridgen(grid_side, grid_out);
    if (solve->parsed()) return cmd_solve(solve_path);
    return 1;
}
