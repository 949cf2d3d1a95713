// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fleetsim/analysis.hpp"
#include "fleetsim/config.hpp"
#include "fleetsim/demand.hpp"
#include "fleetsim/graph.hpp"
#include "fleetsim/matching.hpp"
#include "fleetsim/rng.hpp"
#include "fleetsim/sim.hpp"
#include "helpers.hpp"

using namespace fleetsim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double x, double want, double tol) { return std::abs(x - want) <= tol; }

// exhaustive matching optimum; expects the cost matrix with the smaller side
// as rows
std::int64_t exhaustive_matching(int small, int large,
                                 const std::vector<std::vector<std::int64_t>>& c) {
    std::int64_t best = INT64_MAX;
    std::vector<char> used(std::size_t(large), 0);
    auto rec = [&](auto&& self, int r, std::int64_t acc) -> void {
        if (acc >= best) return;
        if (r == small) {
            best = acc;
            return;
        }
        for (int j = 0; j < large; ++j) {
            if (used[std::size_t(j)]) continue;
            used[std::size_t(j)] = 1;
            self(self, r + 1, acc + c[std::size_t(r)][std::size_t(j)]);
            used[std::size_t(j)] = 0;
        }
    };
    rec(rec, 0, 0);
    return best;
}

double ground(const RoadGraph& g, int a, int b, GroundMetric metric) {
    if (metric == GroundMetric::Hops) return double(g.distance(a, b));
    return g.euclidean(a, b);
}

// exact transport optimum for marginals in units of 1/U: try every bijection
// between the unit masses
double exhaustive_transport(const RoadGraph& g, const std::vector<int>& from_units,
                            const std::vector<int>& to_units, GroundMetric metric) {
    std::vector<std::size_t> perm(to_units.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < from_units.size(); ++i)
            cost += ground(g, from_units[i], to_units[perm[i]], metric);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / double(from_units.size());
}

struct UnitPmf {
    std::vector<double> dense;
    std::vector<int> units;
};

UnitPmf random_unit_pmf(const RoadGraph& g, int max_support, int total_units, Rng& rng) {
    const int n = g.node_count();
    const int support = 1 + int(rng.below(std::uint64_t(max_support)));
    std::vector<int> nodes;
    while (int(nodes.size()) < support) {
        int id = g.id_of(int(rng.below(std::uint64_t(n))));
        if (std::find(nodes.begin(), nodes.end(), id) == nodes.end()) nodes.push_back(id);
    }
    std::vector<int> counts(nodes.size(), 1);
    for (int u = support; u < total_units; ++u)
        counts[std::size_t(rng.below(nodes.size()))] += 1;
    UnitPmf out;
    out.dense.assign(std::size_t(n), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.dense[std::size_t(g.index_of(nodes[i]))] = double(counts[i]) / double(total_units);
        for (int c = 0; c < counts[i]; ++c) out.units.push_back(nodes[i]);
    }
    return out;
}

ScenarioConfig grid_scenario(std::shared_ptr<const RoadGraph> g,
                             std::shared_ptr<const DemandModel> m, PolicyKind policy, int fleet,
                             double fraction, int delta, int horizon, int runs,
                             std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.graph = std::move(g);
    cfg.demand = std::move(m);
    cfg.policy = policy;
    cfg.fleet_size = fleet;
    cfg.adversary_fraction = fraction;
    cfg.delta = delta;
    cfg.horizon = horizon;
    cfg.runs = runs;
    cfg.master_seed = seed;
    return cfg;
}

} // namespace

int main() {
    bool all_pass = true;
    auto report = [&](const char* name, bool pass, double secs, const std::string& detail) {
        std::printf("%s %s (%.2fs)%s%s\n", name, pass ? "pass" : "FAIL", secs,
                    detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
        if (!pass) all_pass = false;
    };

    // ---- A1: closed-form bounds on the reference workload -----------------
    {
        auto t0 = Clock::now();
        StabilityInputs in{1.02, 17.47, 17.62, 16.27, 1.09};
        StabilityReport r4 = make_report(in, 15.0, 0.4);
        StabilityReport r6 = make_report(in, 15.0, 0.6);
        StabilityReport r8 = make_report(in, 15.0, 0.8);
        const double secs = seconds_since(t0);
        const bool pass = near(r4.d_max, 33.89, 0.01) && r4.n_coop == 35 &&
                          near(r4.f_threshold, 0.565, 0.005) && r4.n_robust == 47 &&
                          r6.n_robust == 53 && (r8.n_robust == 59 || r8.n_robust == 60) &&
                          secs < 1.0;
        std::ostringstream d;
        d << "d_max=" << r4.d_max << " n_coop=" << r4.n_coop << " threshold=" << r4.f_threshold
          << " n_robust=" << r4.n_robust << "/" << r6.n_robust << "/" << r8.n_robust;
        report("A1", pass, secs, d.str());
    }

    // ---- A2: matching solver vs exhaustive search -------------------------
    {
        auto t0 = Clock::now();
        Rng rng(777);
        int mismatches = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const int small = 1 + int(rng.below(7));
            int large = small + int(rng.below(3));
            if (small <= 2) large += int(rng.below(6));
            const bool wide = rng.below(2) == 0; // rows x cols = small x large or flipped
            const int rows = wide ? small : large;
            const int cols = wide ? large : small;
            std::vector<std::int64_t> cost(std::size_t(rows) * std::size_t(cols));
            for (std::int64_t& c : cost) c = std::int64_t(rng.below(1000));

            AssignmentResult solved = solve_assignment(rows, cols, cost);

            std::vector<std::vector<std::int64_t>> m(
                static_cast<std::size_t>(small),
                std::vector<std::int64_t>(static_cast<std::size_t>(large)));
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    const std::int64_t v = cost[std::size_t(r) * std::size_t(cols) + std::size_t(c)];
                    if (wide)
                        m[std::size_t(r)][std::size_t(c)] = v;
                    else
                        m[std::size_t(c)][std::size_t(r)] = v;
                }
            if (solved.total_cost != exhaustive_matching(small, large, m)) mismatches += 1;
        }
        const double secs = seconds_since(t0);
        const bool pass = mismatches == 0 && secs < 30.0;
        std::ostringstream d;
        d << "200 instances, " << mismatches << " mismatches";
        report("A2", pass, secs, d.str());
    }

    // ---- A3: transport solver vs exhaustive unit matching + metric axioms -
    {
        auto t0 = Clock::now();
        RoadGraph g = RoadGraph::grid(4);
        Rng rng(12021);
        int bad_pairs = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const GroundMetric metric = trial % 2 ? GroundMetric::Euclidean : GroundMetric::Hops;
            UnitPmf p = random_unit_pmf(g, 5, 8, rng);
            UnitPmf q = random_unit_pmf(g, 5, 8, rng);
            const double got = wasserstein(g, p.dense, q.dense, metric).cost;
            const double want = exhaustive_transport(g, p.units, q.units, metric);
            if (std::abs(got - want) > 1e-9) bad_pairs += 1;
        }
        int bad_axioms = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const GroundMetric metric = trial % 2 ? GroundMetric::Euclidean : GroundMetric::Hops;
            UnitPmf a = random_unit_pmf(g, 4, 6, rng);
            UnitPmf b = random_unit_pmf(g, 4, 6, rng);
            UnitPmf c = random_unit_pmf(g, 4, 6, rng);
            const double aa = wasserstein(g, a.dense, a.dense, metric).cost;
            const double ab = wasserstein(g, a.dense, b.dense, metric).cost;
            const double ba = wasserstein(g, b.dense, a.dense, metric).cost;
            const double bc = wasserstein(g, b.dense, c.dense, metric).cost;
            const double ac = wasserstein(g, a.dense, c.dense, metric).cost;
            if (std::abs(aa) > 1e-9 || std::abs(ab - ba) > 1e-9 || ab < -1e-9 ||
                ac > ab + bc + 1e-9)
                bad_axioms += 1;
        }
        const double secs = seconds_since(t0);
        const bool pass = bad_pairs == 0 && bad_axioms == 0 && secs < 30.0;
        std::ostringstream d;
        d << "50 oracle pairs (" << bad_pairs << " off), 100 triples (" << bad_axioms
          << " violations)";
        report("A3", pass, secs, d.str());
    }

    // ---- A4 + A5 + A7 share the 15x15 grid workload ------------------------
    const std::uint64_t kMaster = 424242;
    auto grid15 = std::make_shared<const RoadGraph>(RoadGraph::grid(15));
    auto uniform15 =
        std::make_shared<const DemandModel>(DemandModel::uniform(*grid15, {{1, 1.0}}));
    StabilityReport grid_base = compute_report(*uniform15, *grid15, 10.0, 0.0, GroundMetric::Hops);

    struct EnsembleOut {
        AggregateSeries series;
        Classification cls;
    };
    auto run_cfg = [&](PolicyKind pk, int fleet, double fraction) {
        ScenarioConfig cfg =
            grid_scenario(grid15, uniform15, pk, fleet, fraction, 10, 2000, 20, kMaster);
        EnsembleOut out;
        out.series = run_ensemble(cfg);
        out.cls = classify_stability(out.series);
        return out;
    };

    int n_coop = grid_base.n_coop;
    double f_star = grid_base.f_threshold;
    int k_over = int(std::floor(f_star * n_coop)) + 1;
    double f_b = double(k_over) / double(n_coop);
    int n_rob = make_report(grid_base.inputs, 10.0, f_b).n_robust;
    double f_c = std::round(f_b * n_rob) / double(n_rob);

    EnsembleOut ra_a, ra_b, ra_c, ia_a, ia_b, ia_c;
    double a4_secs = 0.0;
    bool a4_pass = false;
    {
        auto t0 = Clock::now();
        ra_a = run_cfg(PolicyKind::RandomAssignment, n_coop, 0.0);
        ra_b = run_cfg(PolicyKind::RandomAssignment, n_coop, f_b);
        ra_c = run_cfg(PolicyKind::RandomAssignment, n_rob, f_c);
        ia_c = run_cfg(PolicyKind::InstantaneousAssignment, n_rob, f_c);
        a4_secs = seconds_since(t0);

        const double term_a = ra_a.series.mean_outstanding.back();
        const double term_b = ra_b.series.mean_outstanding.back();
        const bool derived_ok = n_coop == 20 && near(f_star, 0.5022222222, 1e-6) &&
                                k_over == 11 && n_rob == 31 && near(f_c, 17.0 / 31.0, 1e-12);
        a4_pass = derived_ok && !ra_a.cls.unstable && ra_b.cls.unstable &&
                  term_b > 3.0 * term_a && !ra_c.cls.unstable && !ia_c.cls.unstable &&
                  a4_secs < 300.0;
        std::ostringstream d;
        d << "n_coop=" << n_coop << " F*=" << f_star << " F=" << f_b << " n_robust=" << n_rob
          << " F'=" << f_c << "; terminals: base=" << term_a << " overloaded=" << term_b
          << " reinforced=" << ra_c.series.mean_outstanding.back() << "/"
          << ia_c.series.mean_outstanding.back();
        report("A4", a4_pass, a4_secs, d.str());
    }

    // ---- A5: optimal dispatch dominates random dispatch --------------------
    {
        auto t0 = Clock::now();
        ia_a = run_cfg(PolicyKind::InstantaneousAssignment, n_coop, 0.0);
        ia_b = run_cfg(PolicyKind::InstantaneousAssignment, n_coop, f_b);
        const bool terminals_ok =
            ia_a.series.mean_outstanding.back() <= ra_a.series.mean_outstanding.back() &&
            ia_b.series.mean_outstanding.back() <= ra_b.series.mean_outstanding.back() &&
            ia_c.series.mean_outstanding.back() <= ra_c.series.mean_outstanding.back();

        int bad_steps = 0;
        long logged = 0;
        RunOptions opts;
        opts.compare_dispatch_costs = true;
        const struct {
            int fleet;
            double fraction;
        } combos[] = {{n_coop, 0.0}, {n_coop, f_b}, {n_rob, f_c}};
        for (const auto& combo : combos) {
            ScenarioConfig cfg = grid_scenario(grid15, uniform15, PolicyKind::RandomAssignment,
                                               combo.fleet, combo.fraction, 10, 2000, 1, kMaster);
            SimulationMetrics m = run_once(cfg, derive_run_seed(kMaster, 0), opts);
            for (std::size_t t = 0; t < m.dispatch_cost.size(); ++t) {
                logged += 1;
                if (m.optimal_dispatch_cost[t] > m.dispatch_cost[t]) bad_steps += 1;
            }
        }
        const double secs = seconds_since(t0);
        const bool pass = terminals_ok && bad_steps == 0;
        std::ostringstream d;
        d << "terminals " << ia_a.series.mean_outstanding.back() << "<="
          << ra_a.series.mean_outstanding.back() << ", " << ia_b.series.mean_outstanding.back()
          << "<=" << ra_b.series.mean_outstanding.back() << ", "
          << ia_c.series.mean_outstanding.back() << "<=" << ra_c.series.mean_outstanding.back()
          << "; " << logged << " logged steps, " << bad_steps << " dominance misses";
        report("A5", pass, secs, d.str());
    }

    // ---- A6: symmetric dwells keep assignment shares proportional ----------
    {
        auto t0 = Clock::now();
        auto g8 = std::make_shared<const RoadGraph>(RoadGraph::grid(8));
        auto m8 = std::make_shared<const DemandModel>(DemandModel::uniform(*g8, {{1, 1.0}}));
        bool pass = true;
        std::ostringstream d;
        for (double f : {0.2, 0.5}) {
            ScenarioConfig cfg = grid_scenario(g8, m8, PolicyKind::RandomAssignment, 30, f, 4,
                                               12000, 1, 909);
            cfg.delay_mode = DelayMode::Uniform;
            cfg.symmetric_delays = true;
            SimulationMetrics m = run_once(cfg, 909);
            const double frac = m.adversary_assignment_fraction();
            const bool ok = m.assignments_total() >= 10000 && std::abs(frac - f) <= 0.03;
            if (!ok) pass = false;
            d << "F=" << f << ": " << m.assignments_total() << " assignments, share=" << frac
              << "  ";
        }
        report("A6", pass, seconds_since(t0), d.str());
    }

    // ---- A7: reinforcement uses fewer extra agents than adversaries --------
    {
        auto t0 = Clock::now();
        StabilityReport r = make_report(grid_base.inputs, 10.0, 0.4);
        const int added = r.n_robust - r.n_coop;
        const double adversaries = 0.4 * r.n_robust;
        const bool pass = r.n_coop == 20 && r.n_robust == 28 && double(added) < adversaries;
        std::ostringstream d;
        d << "n_robust=" << r.n_robust << " added=" << added << " adversaries=" << adversaries;
        report("A7", pass, seconds_since(t0), d.str());
    }

    // ---- A8: full-coverage formula vs Monte Carlo ---------------------------
    {
        auto t0 = Clock::now();
        const int c = 21;
        const double formula = coupon_collector_time(c);
        Rng rng(808);
        const int trials = 10000;
        std::int64_t total = 0;
        for (int trial = 0; trial < trials; ++trial) {
            std::uint32_t seen = 0;
            int count = 0;
            int draws = 0;
            while (count < c) {
                const int hit = int(rng.below(std::uint64_t(c)));
                draws += 1;
                if (!(seen & (1u << hit))) {
                    seen |= 1u << hit;
                    count += 1;
                }
            }
            total += draws;
        }
        const double mc = double(total) / double(trials);
        const double secs = seconds_since(t0);
        const bool pass = std::abs(mc - formula) <= 0.05 * formula;
        std::ostringstream d;
        d << "formula=" << formula << " monte-carlo=" << mc;
        report("A8", pass, secs, d.str());
    }

    // ---- A9: reruns write byte-identical files ------------------------------
    {
        auto t0 = Clock::now();
        testutil::TempDir tmp;
        RoadGraph::grid(5).save_file(tmp.file("g.graph"));
        const std::string text = R"({
            "graph": "g.graph",
            "demand": {"eta": {"1": 1.0}, "rho": "uniform", "delta": "uniform"},
            "policy": "random",
            "fleet_size": 8,
            "adversary_fraction": 0.5,
            "delta": 3,
            "delay_mode": "uniform",
            "horizon": 400,
            "runs": 5,
            "seed": 11
        })";
        bool pass = true;
        std::string first_csv, first_summary;
        for (int round = 0; round < 2; ++round) {
            ScenarioConfig cfg = parse_scenario(text, tmp.path(), "doc");
            AggregateSeries s = run_ensemble(cfg);
            const std::string csv = tmp.file("r" + std::to_string(round) + ".series.csv");
            const std::string summary = tmp.file("r" + std::to_string(round) + ".summary.json");
            write_series_csv(s, csv);
            write_summary_json(s, cfg, summary);
            if (round == 0) {
                first_csv = testutil::read_file(csv);
                first_summary = testutil::read_file(summary);
            } else {
                pass = testutil::read_file(csv) == first_csv &&
                       testutil::read_file(summary) == first_summary;
            }
        }
        pass = pass && !first_csv.empty() && !first_summary.empty();
        std::ostringstream d;
        d << first_csv.size() << "-byte series, " << first_summary.size() << "-byte summary";
        report("A9", pass, seconds_since(t0), d.str());
    }

    std::printf(all_pass ? "acceptance: all criteria passed\n"
                         : "acceptance: at least one criterion FAILED\n");
    return all_pass ? 0 : 1;
}
