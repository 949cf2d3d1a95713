/* C interface to the fleet routing simulator and stability analyzer.
 *
 * Every function returns a status code; out-parameters are written only on
 * FLEETSIM_OK. fleetsim_error_message() describes the most recent failure on
 * the calling thread. Objects created here must be released with the matching
 * _free function; handles are never shared between create/free pairs.
 */
#ifndef FLEETSIM_H
#define FLEETSIM_H

#include <stddef.h>
#include <stdint.h>

#ifndef FLEETSIM_API
#define FLEETSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    FLEETSIM_OK = 0,
    FLEETSIM_ERR_CONFIG = 1, /* scenario or argument problem */
    FLEETSIM_ERR_DATA = 2,   /* input file problem */
    FLEETSIM_ERR_INVALID = 3 /* null handle or bad buffer */
};

enum {
    FLEETSIM_METRIC_HOPS = 0,
    FLEETSIM_METRIC_EUCLIDEAN = 1
};

/* Expected shortest-path legs used by the fleet-size bounds. */
enum {
    FLEETSIM_LEG_INITIAL_TO_PICKUP = 0,  /* agent start location to pickup */
    FLEETSIM_LEG_ANYWHERE_TO_PICKUP = 1, /* uniformly random node to pickup */
    FLEETSIM_LEG_PICKUP_TO_DROPOFF = 2
};

enum {
    FLEETSIM_SERIES_MEAN_OUTSTANDING = 0,
    FLEETSIM_SERIES_STD_OUTSTANDING = 1,
    FLEETSIM_SERIES_MEAN_UNPICKED = 2
};

typedef struct fleetsim_graph fleetsim_graph;
typedef struct fleetsim_demand fleetsim_demand;
typedef struct fleetsim_scenario fleetsim_scenario;
typedef struct fleetsim_series fleetsim_series;

/* Last error on this thread; empty string when the last call succeeded.
 * The pointer stays valid until the next fleetsim_* call on the thread. */
FLEETSIM_API const char* fleetsim_error_message(void);

FLEETSIM_API const char* fleetsim_version(void);

/* ---- road graph ------------------------------------------------------- */

FLEETSIM_API int fleetsim_graph_load(const char* path, fleetsim_graph** out);
FLEETSIM_API int fleetsim_graph_parse(const char* text, fleetsim_graph** out);
/* side x side four-neighbor grid with unit coordinates; side >= 2 */
FLEETSIM_API int fleetsim_graph_grid(int side, fleetsim_graph** out);
FLEETSIM_API int fleetsim_graph_save(const fleetsim_graph* g, const char* path);
FLEETSIM_API int fleetsim_graph_node_count(const fleetsim_graph* g, int* out);
FLEETSIM_API int fleetsim_graph_edge_count(const fleetsim_graph* g, int* out);
/* hop count of a shortest path between two node ids */
FLEETSIM_API int fleetsim_graph_distance(const fleetsim_graph* g, int from_node, int to_node,
                                         int* out);
FLEETSIM_API void fleetsim_graph_free(fleetsim_graph* g);

/* ---- demand model ----------------------------------------------------- */

/* Estimate arrival-count and location distributions from a trace file of
 * "minute pickup dropoff" records. */
FLEETSIM_API int fleetsim_demand_estimate(const char* trace_path, const fleetsim_graph* g,
                                          fleetsim_demand** out);
FLEETSIM_API int fleetsim_demand_load(const char* path, const fleetsim_graph* g,
                                      fleetsim_demand** out);
FLEETSIM_API int fleetsim_demand_save(const fleetsim_demand* m, const char* path);
/* mean arrivals per step */
FLEETSIM_API int fleetsim_demand_rate(const fleetsim_demand* m, double* out);
/* expected shortest-path length of one FLEETSIM_LEG_* leg, in hops */
FLEETSIM_API int fleetsim_demand_expected_leg(const fleetsim_demand* m, const fleetsim_graph* g,
                                              int leg, double* out);
FLEETSIM_API void fleetsim_demand_free(fleetsim_demand* m);

/* ---- stability analysis ----------------------------------------------- */

typedef struct fleetsim_report {
    /* inputs */
    double demand_rate;            /* expected requests per step */
    double leg_initial_to_pickup;  /* expected hops, agent start to pickup */
    double leg_anywhere_to_pickup; /* expected hops, random node to pickup */
    double leg_pickup_to_dropoff;  /* expected hops, pickup to dropoff */
    double transport_distance;     /* optimal-transport cost, dropoffs to pickups */
    int delay_bound;               /* max extra dwell per leg */
    double adversary_fraction_max; /* proportion the robust bound covers */
    /* derived */
    double d_max;          /* worst-case expected trip time */
    double d_min;          /* best-case expected trip time */
    double n_coop_exact;   /* demand_rate * d_max */
    int n_coop;            /* smallest sufficient all-cooperative fleet */
    int n_prime;           /* fleet size the threshold is evaluated at */
    double f_threshold;    /* adversary proportions above this destabilize n_prime */
    double n_robust_exact; /* n_coop_exact + 2 * delay_bound * demand_rate * f_max */
    int n_robust;          /* smallest sufficient fleet at adversary_fraction_max */
} fleetsim_report;

/* Bounds from explicit expectations. n_prime < 0 means "use n_coop". */
FLEETSIM_API int fleetsim_analyze_values(double demand_rate, double leg_initial_to_pickup,
                                         double leg_anywhere_to_pickup,
                                         double leg_pickup_to_dropoff, double transport_distance,
                                         int delay_bound, double adversary_fraction_max,
                                         int n_prime, fleetsim_report* out);
/* Bounds with expectations computed from a demand model on a graph. */
FLEETSIM_API int fleetsim_analyze(const fleetsim_demand* m, const fleetsim_graph* g,
                                  int delay_bound, double adversary_fraction_max, int metric,
                                  int n_prime, fleetsim_report* out);
/* Bounds for a loaded scenario (uses its expectations when given, otherwise
 * its demand model and graph). */
FLEETSIM_API int fleetsim_scenario_analyze(const fleetsim_scenario* s, fleetsim_report* out);
/* Serialize a report, with the scenario's resolved settings embedded. */
FLEETSIM_API int fleetsim_report_write(const fleetsim_report* r, const fleetsim_scenario* s,
                                       const char* path);

/* Optimal-transport cost between two sparse node distributions. Masses must
 * be non-negative and each sum to 1; duplicate node ids accumulate. */
FLEETSIM_API int fleetsim_wasserstein(const fleetsim_graph* g, const int* nodes_p,
                                      const double* mass_p, size_t len_p, const int* nodes_q,
                                      const double* mass_q, size_t len_q, int metric,
                                      double* out);

/* (n_prime - demand_rate * d_min) / (2 * delay_bound * demand_rate), clamped
 * at zero. Requires delay_bound > 0 and demand_rate > 0. */
FLEETSIM_API int fleetsim_instability_threshold(double n_prime, double demand_rate, double d_min,
                                                int delay_bound, double* out);

/* Expected steps until every one of c agents has been drawn at least once. */
FLEETSIM_API int fleetsim_coupon_collector_time(int c, double* out);

/* ---- assignment solver ------------------------------------------------ */

/* Min-cost bipartite matching on a row-major rows x cols matrix of
 * non-negative costs. Matches min(rows, cols) pairs; row_to_col holds one
 * entry per row, -1 where the row is unmatched. */
FLEETSIM_API int fleetsim_solve_assignment(const int64_t* cost, int rows, int cols,
                                           int* row_to_col, int64_t* total_cost);
/* Parse a delimited cost-matrix file. *cost is allocated; release it with
 * fleetsim_buffer_free. */
FLEETSIM_API int fleetsim_load_cost_matrix(const char* path, int64_t** cost, int* rows,
                                           int* cols);
FLEETSIM_API void fleetsim_buffer_free(void* p);

/* ---- scenario --------------------------------------------------------- */

FLEETSIM_API int fleetsim_scenario_load(const char* path, fleetsim_scenario** out);
/* Parse scenario text; relative paths inside it resolve against base_dir. */
FLEETSIM_API int fleetsim_scenario_parse(const char* json_text, const char* base_dir,
                                         fleetsim_scenario** out);
FLEETSIM_API int fleetsim_scenario_set_seed(fleetsim_scenario* s, uint64_t seed);
FLEETSIM_API int fleetsim_scenario_set_runs(fleetsim_scenario* s, int runs);
FLEETSIM_API int fleetsim_scenario_set_horizon(fleetsim_scenario* s, int horizon);
FLEETSIM_API int fleetsim_scenario_set_metric(fleetsim_scenario* s, int metric);
FLEETSIM_API int fleetsim_scenario_set_out(fleetsim_scenario* s, const char* prefix);
/* Output prefix ("" when unset); valid until the scenario is modified or
 * freed. */
FLEETSIM_API int fleetsim_scenario_out_prefix(const fleetsim_scenario* s, const char** out);
FLEETSIM_API void fleetsim_scenario_free(fleetsim_scenario* s);

/* ---- simulation ------------------------------------------------------- */

/* Run the scenario's ensemble (concurrent, reproducible for a fixed master
 * seed) and aggregate per-step series across runs. */
FLEETSIM_API int fleetsim_run_ensemble(const fleetsim_scenario* s, fleetsim_series** out);
FLEETSIM_API int fleetsim_series_length(const fleetsim_series* se, int* out);
/* Copy one FLEETSIM_SERIES_* channel into buffer (buflen >= length). */
FLEETSIM_API int fleetsim_series_values(const fleetsim_series* se, int which, double* buffer,
                                        size_t buflen);
/* Trend test over the final half of the mean-outstanding series; *unstable
 * is 1 when the series grows past the scenario's thresholds. */
FLEETSIM_API int fleetsim_series_classify(const fleetsim_series* se, const fleetsim_scenario* s,
                                          int* unstable, double* slope_per_step,
                                          double* terminal_mean, double* midpoint_mean);
FLEETSIM_API int fleetsim_series_write_csv(const fleetsim_series* se, const char* path);
FLEETSIM_API int fleetsim_series_write_summary(const fleetsim_series* se,
                                               const fleetsim_scenario* s, const char* path);
FLEETSIM_API void fleetsim_series_free(fleetsim_series* se);

#ifdef __cplusplus
}
#endif

#endif /* FLEETSIM_H */
