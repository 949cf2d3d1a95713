#ifndef FLEETSIM_ANALYSIS_HPP
#define FLEETSIM_ANALYSIS_HPP

#include <optional>
#include <vector>

#include "fleetsim/demand.hpp"
#include "fleetsim/graph.hpp"

namespace fleetsim {

enum class GroundMetric { Hops, Euclidean };

// Optimal coupling between two node distributions, restricted to their
// supports. coupling is row-major |from_nodes| x |to_nodes|; its row sums
// recover the first marginal, column sums the second.
struct TransportPlan {
    std::vector<int> from_nodes;
    std::vector<int> to_nodes;
    std::vector<double> coupling;
    double cost = 0.0;
};

// Exact optimal-transport cost between dense pmfs p and q over the graph's
// nodes, ground metric either hop distance or straight-line distance.
TransportPlan wasserstein(const RoadGraph& g, const std::vector<double>& p,
                          const std::vector<double>& q, GroundMetric metric);

// Expectations that the fleet-size and threshold formulas consume.
struct StabilityInputs {
    double e_eta = 0.0;       // mean arrivals per step
    double e_xi_rho = 0.0;    // mean initial-location -> pickup distance
    double e_vrand_rho = 0.0; // mean idle-location -> pickup distance
    double e_rho_delta = 0.0; // mean pickup -> dropoff distance
    double wd = 0.0;          // transport distance between dropoff and pickup pmfs
};

struct StabilityReport {
    StabilityInputs inputs{};
    double delta = 0.0; // per-leg delay bound
    double f_max = 0.0; // adversarial proportion the robust bound covers

    double d_max = 0.0; // max(e_xi_rho, e_vrand_rho) + e_rho_delta
    double d_min = 0.0; // wd + e_rho_delta

    double n_coop_real = 0.0; // e_eta * d_max
    int n_coop = 0;           // smallest sufficient all-cooperative fleet

    int n_prime = 0;          // fleet size the threshold is evaluated at
    double f_threshold = 0.0; // proportions above this destabilize n_prime

    double n_robust_real = 0.0; // e_eta * d_max + 2 * delta * e_eta * f_max
    int n_robust = 0;           // smallest sufficient fleet at proportion f_max
};

// Fleet bounds are rounded up with a 1e-9 slack so bounds that are whole
// numbers up to floating-point noise do not gain a spurious extra agent.
int ceil_bound(double x);

StabilityReport make_report(const StabilityInputs& in, double delta, double f_max,
                            std::optional<int> n_prime = {});

StabilityReport compute_report(const DemandModel& m, const RoadGraph& g, double delta,
                               double f_max, GroundMetric metric,
                               std::optional<int> n_prime = {});

// (n_prime - e_eta * d_min) / (2 * delta * e_eta), clamped at 0. Requires
// delta > 0 and e_eta > 0; anything else leaves the threshold undefined.
double instability_threshold(double n_prime, double e_eta, double d_min, double delta);
double instability_threshold(double n_prime, const DemandModel& m, const RoadGraph& g,
                             double delta, GroundMetric metric);

// Expected steps for every one of `cooperative_count` agents to be hit at
// least once by uniform draws: c * (1 + 1/2 + ... + 1/c).
double coupon_collector_time(int cooperative_count);

} // namespace fleetsim

#endif
