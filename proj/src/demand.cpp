#include "fleetsim/demand.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fleetsim/error.hpp"
#include "json.hpp"

namespace fleetsim {

namespace {

constexpr double kPmfTolerance = 1e-9;

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool parse_int(const std::string& s, int& out) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size() || v < INT_MIN || v > INT_MAX) return false;
        out = int(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void check_location_pmf(const std::vector<double>& pmf, const RoadGraph& g, const char* name) {
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

// Cumulative sums with the last positive entry forced to exactly 1 so a draw
// of u -> 1 cannot fall off the end.
std::vector<double> make_cdf(const std::vector<double>& pmf) {
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        cdf[i] = acc;
        if (pmf[i] > 0.0) last_positive = i;
    }
    for (std::size_t i = last_positive; i < cdf.size(); ++i) cdf[i] = 1.0;
    return cdf;
}

} // namespace

RequestTrace parse_trace(const std::string& text, const std::string& origin) {
    RequestTrace trace;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_fields(line);
        if (fields.empty() || fields[0][0] == '#') continue;
        auto fail = [&](const std::string& what) {
            data_error(origin + ":" + std::to_string(line_no) + ": " + what);
        };
        if (fields.size() != 3) fail("trace rows need exactly minute, pickup_node, dropoff_node");
        TraceRecord rec{};
        rec.line = line_no;
        if (!parse_int(fields[0], rec.minute) || rec.minute < 0)
            fail("bad minute '" + fields[0] + "'");
        if (!parse_int(fields[1], rec.pickup)) fail("bad pickup node '" + fields[1] + "'");
        if (!parse_int(fields[2], rec.dropoff)) fail("bad dropoff node '" + fields[2] + "'");
        trace.push_back(rec);
    }
    if (trace.empty()) data_error(origin + ": trace is empty");
    return trace;
}

RequestTrace load_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) data_error("cannot open trace file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str(), path);
}

DemandModel::DemandModel(std::map<int, double> eta_pmf, std::vector<double> pickup_pmf,
                         std::vector<double> dropoff_pmf, std::vector<double> initial_pmf,
                         const RoadGraph& g) {
    check_location_pmf(pickup_pmf, g, "pickup");
    check_location_pmf(dropoff_pmf, g, "dropoff");
    check_location_pmf(initial_pmf, g, "initial-location");
    if (eta_pmf.empty()) data_error("arrival-count pmf is empty");
    double sum = 0.0;
    for (const auto& [count, p] : eta_pmf) {
        if (count < 0) data_error("arrival-count pmf has a negative count");
        if (!(p >= 0.0) || !std::isfinite(p))
            data_error("arrival-count pmf has a negative or non-finite entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance)
        data_error("arrival-count pmf sums to " + std::to_string(sum) + ", expected 1");

    eta_ = std::move(eta_pmf);
    pickup_ = std::move(pickup_pmf);
    dropoff_ = std::move(dropoff_pmf);
    initial_ = std::move(initial_pmf);
    pickup_cdf_ = make_cdf(pickup_);
    dropoff_cdf_ = make_cdf(dropoff_);
    initial_cdf_ = make_cdf(initial_);

    std::vector<double> eta_probs;
    for (const auto& [count, p] : eta_) { // std::map iterates counts ascending
        eta_counts_.push_back(count);
        eta_probs.push_back(p);
    }
    eta_cdf_ = make_cdf(eta_probs);

    node_ids_.reserve(g.nodes().size());
    for (const auto& nd : g.nodes()) node_ids_.push_back(nd.id);
}

DemandModel DemandModel::estimate(const RequestTrace& trace, const RoadGraph& g) {
    const std::size_t n = std::size_t(g.node_count());
    std::vector<double> pickup(n, 0.0), dropoff(n, 0.0);
    std::map<int, int> per_minute;
    int min_minute = trace.front().minute, max_minute = trace.front().minute;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRecord& rec = trace[i];
        auto require_node = [&](int id, const char* what) {
            if (g.has_node(id)) return;
            const std::string where = rec.line > 0 ? "trace line " + std::to_string(rec.line)
                                                   : "trace record " + std::to_string(i + 1);
            data_error(where + ": " + std::string(what) + " node " + std::to_string(id) +
                       " is not in the graph");
        };
        require_node(rec.pickup, "pickup");
        require_node(rec.dropoff, "dropoff");
        pickup[std::size_t(g.index_of(rec.pickup))] += 1.0;
        dropoff[std::size_t(g.index_of(rec.dropoff))] += 1.0;
        per_minute[rec.minute] += 1;
        min_minute = std::min(min_minute, rec.minute);
        max_minute = std::max(max_minute, rec.minute);
    }
    const double total = double(trace.size());
    for (double& p : pickup) p /= total;
    for (double& p : dropoff) p /= total;

    // arrival counts over every minute of the covered range, including the
    // minutes with no arrivals
    std::map<int, double> eta;
    const double minutes = double(max_minute - min_minute + 1);
    for (int m = min_minute; m <= max_minute; ++m) {
        auto it = per_minute.find(m);
        int count = it == per_minute.end() ? 0 : it->second;
        eta[count] += 1.0 / minutes;
    }
    std::vector<double> initial = dropoff;
    return DemandModel(std::move(eta), std::move(pickup), std::move(dropoff),
                       std::move(initial), g);
}

DemandModel DemandModel::uniform(const RoadGraph& g, std::map<int, double> eta_pmf) {
    std::vector<double> u(std::size_t(g.node_count()), 1.0 / double(g.node_count()));
    return DemandModel(std::move(eta_pmf), u, u, u, g);
}

DemandModel DemandModel::from_json(const std::string& text, const RoadGraph& g,
                                   const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        data_error(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) data_error(origin + ": demand model must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "eta" && key != "rho" && key != "delta" && key != "xi")
            data_error(origin + ": unknown demand model key '" + key + "'");
    }
    for (const char* key : {"eta", "rho", "delta"}) {
        if (!doc.contains(key))
            data_error(origin + ": demand model is missing '" + std::string(key) + "'");
    }

    auto read_counts = [&](const nlohmann::json& obj) {
        if (!obj.is_object()) data_error(origin + ": 'eta' must map counts to probabilities");
        std::map<int, double> pmf;
        for (const auto& [key, value] : obj.items()) {
            int count = 0;
            if (!parse_int(key, count) || count < 0)
                data_error(origin + ": bad arrival count '" + key + "'");
            if (!value.is_number())
                data_error(origin + ": probability for count " + key + " is not a number");
            pmf[count] = value.get<double>();
        }
        return pmf;
    };
    auto read_locations = [&](const nlohmann::json& obj, const char* name) {
        if (!obj.is_object())
            data_error(origin + ": '" + std::string(name) + "' must map node ids to probabilities");
        std::vector<double> pmf(std::size_t(g.node_count()), 0.0);
        for (const auto& [key, value] : obj.items()) {
            int id = 0;
            if (!parse_int(key, id)) data_error(origin + ": bad node id '" + key + "'");
            if (!g.has_node(id))
                data_error(origin + ": '" + std::string(name) + "' references node " + key +
                           " which is not in the graph");
            if (!value.is_number())
                data_error(origin + ": probability for node " + key + " is not a number");
            pmf[std::size_t(g.index_of(id))] = value.get<double>();
        }
        return pmf;
    };

    std::map<int, double> eta = read_counts(doc["eta"]);
    std::vector<double> rho = read_locations(doc["rho"], "rho");
    std::vector<double> delta = read_locations(doc["delta"], "delta");
    std::vector<double> xi = doc.contains("xi") ? read_locations(doc["xi"], "xi") : delta;
    return DemandModel(std::move(eta), std::move(rho), std::move(delta), std::move(xi), g);
}

DemandModel DemandModel::load_file(const std::string& path, const RoadGraph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) data_error("cannot open demand model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str(), g, path);
}

std::string DemandModel::to_json() const {
    nlohmann::json doc;
    nlohmann::json eta = nlohmann::json::object();
    for (const auto& [count, p] : eta_) eta[std::to_string(count)] = p;
    doc["eta"] = std::move(eta);
    auto locations = [&](const std::vector<double>& pmf) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            if (pmf[i] > 0.0) obj[std::to_string(node_ids_[i])] = pmf[i];
        }
        return obj;
    };
    doc["rho"] = locations(pickup_);
    doc["delta"] = locations(dropoff_);
    doc["xi"] = locations(initial_);
    return doc.dump(2) + "\n";
}

void DemandModel::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) data_error("cannot write demand model file '" + path + "'");
    out << to_json();
    if (!out) data_error("failed writing demand model file '" + path + "'");
}

double DemandModel::expected_eta() const {
    double e = 0.0;
    for (const auto& [count, p] : eta_) e += double(count) * p;
    return e;
}

std::vector<Request> DemandModel::sample_arrivals(int t, Rng& rng, int& next_id) const {
    int count = eta_counts_[rng.sample_cdf(eta_cdf_)];
    std::vector<Request> out;
    out.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        Request r{};
        r.id = next_id++;
        r.pickup = sample_pickup(rng);
        r.dropoff = sample_dropoff(rng);
        r.entry_time = t;
        out.push_back(r);
    }
    return out;
}

int DemandModel::sample_pickup(Rng& rng) const { return node_ids_[rng.sample_cdf(pickup_cdf_)]; }
int DemandModel::sample_dropoff(Rng& rng) const { return node_ids_[rng.sample_cdf(dropoff_cdf_)]; }
int DemandModel::sample_initial(Rng& rng) const { return node_ids_[rng.sample_cdf(initial_cdf_)]; }

double expected_graph_distance(const RoadGraph& g, const std::vector<double>& from_pmf,
                               const std::vector<double>& to_pmf) {
    check_location_pmf(from_pmf, g, "from");
    check_location_pmf(to_pmf, g, "to");
    const std::size_t n = from_pmf.size();
    double e = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        if (from_pmf[u] == 0.0) continue;
        double row = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (to_pmf[v] == 0.0) continue;
            row += to_pmf[v] * double(g.distance_by_index(int(u), int(v)));
        }
        e += from_pmf[u] * row;
    }
    return e;
}

} // namespace fleetsim
