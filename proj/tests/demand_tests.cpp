#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "fleetsim/demand.hpp"
#include "fleetsim/graph.hpp"
#include "fleetsim/rng.hpp"
#include "helpers.hpp"

using fleetsim::DemandModel;
using fleetsim::RoadGraph;
using fleetsim::Rng;
using testutil::capture_error;

TEST_CASE("estimation reproduces relative frequencies from a tiny trace") {
    RoadGraph g = RoadGraph::grid(2);
    fleetsim::RequestTrace trace = fleetsim::parse_trace("0 1 1\n1 1 2\n2 1 0\n3 0 2\n", "doc");
    REQUIRE(trace.size() == 4);
    CHECK(trace[1].line == 2);

    DemandModel m = DemandModel::estimate(trace, g);
    // pickups: 1,1,1,0 over nodes 0..3
    CHECK(m.pickup_pmf() == std::vector<double>{0.25, 0.75, 0.0, 0.0});
    // dropoffs: 1,2,0,2
    CHECK(m.dropoff_pmf() == std::vector<double>{0.25, 0.25, 0.5, 0.0});
    CHECK(m.initial_pmf() == m.dropoff_pmf());
    CHECK(m.idle_pmf() == m.dropoff_pmf());
    // one arrival in each covered minute
    REQUIRE(m.eta_pmf().size() == 1);
    CHECK(m.eta_pmf().at(1) == doctest::Approx(1.0));
    CHECK(m.expected_eta() == doctest::Approx(1.0));
}

TEST_CASE("minutes without arrivals count toward the arrival distribution") {
    RoadGraph g = RoadGraph::grid(2);
    fleetsim::RequestTrace trace = fleetsim::parse_trace("0 0 1\n0 1 0\n2 3 2\n", "doc");
    DemandModel m = DemandModel::estimate(trace, g);
    REQUIRE(m.eta_pmf().size() == 3);
    CHECK(m.eta_pmf().at(0) == doctest::Approx(1.0 / 3.0));
    CHECK(m.eta_pmf().at(1) == doctest::Approx(1.0 / 3.0));
    CHECK(m.eta_pmf().at(2) == doctest::Approx(1.0 / 3.0));
    CHECK(m.expected_eta() == doctest::Approx(1.0));
}

TEST_CASE("trace problems are reported with their source line") {
    RoadGraph g = RoadGraph::grid(2);

    auto unknown = capture_error([&] {
        fleetsim::RequestTrace t = fleetsim::parse_trace("# trips\n0 0 1\n1 9 0\n", "doc");
        DemandModel::estimate(t, g);
    });
    CHECK(unknown.caught);
    CHECK(unknown.kind == 2);
    CHECK(unknown.contains("trace line 3"));
    CHECK(unknown.contains("node 9"));

    auto empty = capture_error([] { fleetsim::parse_trace("# only comments\n", "doc"); });
    CHECK(empty.caught);
    CHECK(empty.contains("empty"));

    auto bad_minute = capture_error([] { fleetsim::parse_trace("-1 0 0\n", "doc"); });
    CHECK(bad_minute.caught);
    CHECK(bad_minute.contains("doc:1:"));
    CHECK(bad_minute.contains("minute"));

    auto short_row = capture_error([] { fleetsim::parse_trace("0 1\n", "doc"); });
    CHECK(short_row.caught);
    CHECK(short_row.contains("doc:1:"));
}

TEST_CASE("comma-separated trace rows parse like whitespace rows") {
    fleetsim::RequestTrace t = fleetsim::parse_trace("0, 1, 1\n1 1 2\n", "doc");
    REQUIRE(t.size() == 2);
    CHECK(t[0].pickup == 1);
    CHECK(t[0].dropoff == 1);
}

TEST_CASE("demand models round-trip through their document form") {
    testutil::TempDir tmp;
    RoadGraph g = RoadGraph::grid(2);
    fleetsim::RequestTrace trace = fleetsim::parse_trace("0 1 1\n1 1 2\n2 1 0\n3 0 2\n", "doc");
    DemandModel m = DemandModel::estimate(trace, g);

    const std::string path = tmp.file("model.json");
    m.save_file(path);
    DemandModel back = DemandModel::load_file(path, g);
    CHECK(back.pickup_pmf() == m.pickup_pmf());
    CHECK(back.dropoff_pmf() == m.dropoff_pmf());
    CHECK(back.initial_pmf() == m.initial_pmf());
    CHECK(back.eta_pmf() == m.eta_pmf());
}

TEST_CASE("model documents are validated field by field") {
    RoadGraph g = RoadGraph::grid(2);
    auto from = [&](const std::string& text) {
        return capture_error([&] { DemandModel::from_json(text, g, "doc"); });
    };

    auto unknown_key = from(R"({"eta": {"1": 1.0}, "rho": {"0": 1.0}, "delta": {"0": 1.0}, "mu": 3})");
    CHECK(unknown_key.caught);
    CHECK(unknown_key.contains("unknown demand model key 'mu'"));

    auto missing = from(R"({"eta": {"1": 1.0}, "rho": {"0": 1.0}})");
    CHECK(missing.caught);
    CHECK(missing.contains("missing 'delta'"));

    auto bad_sum = from(R"({"eta": {"1": 1.0}, "rho": {"0": 0.7}, "delta": {"0": 1.0}})");
    CHECK(bad_sum.caught);
    CHECK(bad_sum.contains("sums to"));

    auto stray_node = from(R"({"eta": {"1": 1.0}, "rho": {"7": 1.0}, "delta": {"0": 1.0}})");
    CHECK(stray_node.caught);
    CHECK(stray_node.contains("node 7"));

    // without xi the initial distribution follows the dropoff distribution
    DemandModel m = DemandModel::from_json(
        R"({"eta": {"1": 1.0}, "rho": {"0": 1.0}, "delta": {"1": 0.5, "2": 0.5}})", g, "doc");
    CHECK(m.initial_pmf() == m.dropoff_pmf());
}

TEST_CASE("expected distances between distributions match hand computation") {
    RoadGraph g = RoadGraph::grid(3);
    std::vector<double> at0(9, 0.0), at8(9, 0.0), uniform(9, 1.0 / 9.0);
    at0[0] = 1.0;
    at8[8] = 1.0;
    CHECK(fleetsim::expected_graph_distance(g, at0, at8) == doctest::Approx(4.0));
    CHECK(fleetsim::expected_graph_distance(g, at0, at0) == doctest::Approx(0.0));
    CHECK(fleetsim::expected_graph_distance(g, uniform, at0) == doctest::Approx(2.0));
}

TEST_CASE("location sampling converges to the stored distribution") {
    RoadGraph g = RoadGraph::grid(3);
    DemandModel m = DemandModel::uniform(g, {{1, 1.0}});
    Rng rng(2024);
    const int draws = 100000;
    std::vector<int> freq(9, 0);
    for (int i = 0; i < draws; ++i) freq[std::size_t(g.index_of(m.sample_pickup(rng)))] += 1;
    double tv = 0.0;
    for (int f : freq) tv += std::abs(double(f) / draws - 1.0 / 9.0);
    tv *= 0.5;
    CHECK(tv < 0.02);
}

TEST_CASE("arrival counts and request ids line up") {
    RoadGraph g = RoadGraph::grid(2);
    DemandModel m = DemandModel::from_json(
        R"({"eta": {"0": 0.5, "2": 0.5}, "rho": {"0": 1.0}, "delta": {"3": 1.0}})", g, "doc");
    Rng rng(55);
    int next_id = 0;
    long total = 0;
    const int steps = 20000;
    for (int t = 0; t < steps; ++t) {
        std::vector<fleetsim::Request> batch = m.sample_arrivals(t, rng, next_id);
        CHECK((batch.size() == 0 || batch.size() == 2));
        for (const fleetsim::Request& r : batch) {
            CHECK(r.pickup == 0);
            CHECK(r.dropoff == 3);
            CHECK(r.entry_time == t);
        }
        total += long(batch.size());
    }
    CHECK(next_id == total);
    CHECK(double(total) / steps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    RoadGraph g = RoadGraph::grid(3);
    DemandModel m = DemandModel::uniform(g, {{0, 0.25}, {1, 0.5}, {3, 0.25}});
    Rng a(42);
    Rng b(42);
    int ida = 0;
    int idb = 0;
    for (int t = 0; t < 500; ++t) {
        auto ra = m.sample_arrivals(t, a, ida);
        auto rb = m.sample_arrivals(t, b, idb);
        REQUIRE(ra.size() == rb.size());
        for (std::size_t i = 0; i < ra.size(); ++i) {
            CHECK(ra[i].pickup == rb[i].pickup);
            CHECK(ra[i].dropoff == rb[i].dropoff);
            CHECK(ra[i].id == rb[i].id);
        }
    }
    CHECK(ida == idb);
}
