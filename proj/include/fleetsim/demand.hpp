#ifndef FLEETSIM_DEMAND_HPP
#define FLEETSIM_DEMAND_HPP

#include <map>
#include <string>
#include <vector>

#include "fleetsim/graph.hpp"
#include "fleetsim/rng.hpp"

namespace fleetsim {

class Rng;

// One pickup-and-delivery request. picked_up flips when the serving agent
// reaches the pickup node and any pickup dwell has elapsed.
struct Request {
    int id;
    int pickup;     // node id
    int dropoff;    // node id
    int entry_time; // step the request entered the system
    bool picked_up = false;
};

struct TraceRecord {
    int minute;
    int pickup;   // node id
    int dropoff;  // node id
    int line = 0; // source line when parsed from a file; 0 when built in code
};

using RequestTrace = std::vector<TraceRecord>;

RequestTrace parse_trace(const std::string& text, const std::string& origin);
RequestTrace load_trace_file(const std::string& path);

// Arrival-count and location distributions driving request generation.
// Location pmfs are dense over the graph's ascending-id node order; the
// idle-relocation distribution is tied to the drop-off distribution.
class DemandModel {
public:
    DemandModel(std::map<int, double> eta_pmf, std::vector<double> pickup_pmf,
                std::vector<double> dropoff_pmf, std::vector<double> initial_pmf,
                const RoadGraph& g);

    // Relative frequencies from a trace: pickups, drop-offs, and per-minute
    // arrival counts over the covered minute range (empty minutes count
    // toward eta = 0). The initial-location pmf defaults to the drop-off pmf.
    static DemandModel estimate(const RequestTrace& trace, const RoadGraph& g);

    // Uniform location pmfs with an explicit arrival-count pmf.
    static DemandModel uniform(const RoadGraph& g, std::map<int, double> eta_pmf);

    static DemandModel from_json(const std::string& text, const RoadGraph& g,
                                 const std::string& origin);
    static DemandModel load_file(const std::string& path, const RoadGraph& g);
    std::string to_json() const;
    void save_file(const std::string& path) const;

    double expected_eta() const;

    const std::map<int, double>& eta_pmf() const { return eta_; }
    const std::vector<double>& pickup_pmf() const { return pickup_; }
    const std::vector<double>& dropoff_pmf() const { return dropoff_; }
    const std::vector<double>& initial_pmf() const { return initial_; }
    const std::vector<double>& idle_pmf() const { return dropoff_; }

    // Draw the step's arrival count, then (pickup, dropoff) per request.
    // Ids are taken from next_id, which advances by the number of arrivals.
    std::vector<Request> sample_arrivals(int t, Rng& rng, int& next_id) const;

    int sample_pickup(Rng& rng) const;
    int sample_dropoff(Rng& rng) const;
    int sample_initial(Rng& rng) const;

private:
    std::map<int, double> eta_;
    std::vector<double> pickup_, dropoff_, initial_; // dense by node rank
    std::vector<double> pickup_cdf_, dropoff_cdf_, initial_cdf_;
    std::vector<int> eta_counts_;
    std::vector<double> eta_cdf_;
    std::vector<int> node_ids_; // rank -> id
};

// sum over node pairs of from(u) * to(v) * dist(u, v)
double expected_graph_distance(const RoadGraph& g, const std::vector<double>& from_pmf,
                               const std::vector<double>& to_pmf);

} // namespace fleetsim

#endif
