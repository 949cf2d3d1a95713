#ifndef FLEETSIM_MATCHING_HPP
#define FLEETSIM_MATCHING_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fleetsim {

// Dense rectangular cost matrix. Rows are agents, columns are requests;
// entries are travel times in whole steps. The label vectors keep the
// original ids so a matching can be reported in domain terms.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int64_t> cost; // row-major
    std::vector<int> row_labels;    // agent ids
    std::vector<int> col_labels;    // request ids

    std::int64_t at(int r, int c) const { return cost[std::size_t(r) * std::size_t(c_stride()) + std::size_t(c)]; }
    int c_stride() const { return cols; }
};

// min(rows, cols) pairs, sorted by row label
struct Matching {
    std::vector<std::pair<int, int>> pairs; // (row label, col label)
    std::int64_t total_cost = 0;
};

// row_to_col[r] is the matched column of row r, or -1 when rows > cols and
// row r is left out
struct AssignmentResult {
    std::vector<int> row_to_col;
    std::int64_t total_cost = 0;
};

// Exact min-cost rectangular assignment via forward auction with
// epsilon scaling: epsilon starts at max-cost/(k+1) for k matched pairs and
// is cut by 4x per round until it sits below 1/k, which pins the optimum for
// integer costs. Output is deterministic for a given matrix; equal-value
// bids go to the lowest index.
AssignmentResult solve_assignment(int rows, int cols, const std::vector<std::int64_t>& cost);

Matching solve_assignment(const CostMatrix& m);

// Rows of comma- or whitespace-delimited non-negative integers.
CostMatrix parse_cost_matrix(const std::string& text, const std::string& origin);
CostMatrix load_cost_matrix_file(const std::string& path);

} // namespace fleetsim

#endif
