#include "fleetsim/matching.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "fleetsim/error.hpp"

namespace fleetsim {

namespace {

// Shortest augmenting paths over reduced costs, one path per person.
// Requires persons <= objects; integer potentials keep every comparison
// exact. Ties resolve to the lowest object index. Arrays are 1-based with
// object 0 as the path anchor.
template <typename CostAt>
std::vector<int> shortest_path_assignment(int persons, int objects, const CostAt& cost_at) {
    const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(std::size_t(persons) + 1, 0);
    std::vector<std::int64_t> v(std::size_t(objects) + 1, 0);
    std::vector<int> owner(std::size_t(objects) + 1, 0); // person holding object, 0 = free
    std::vector<int> way(std::size_t(objects) + 1, 0);
    std::vector<std::int64_t> minv(std::size_t(objects) + 1, 0);
    std::vector<char> used(std::size_t(objects) + 1, 0);

    for (int i = 1; i <= persons; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[std::size_t(j0)] = 1;
            const int i0 = owner[std::size_t(j0)];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= objects; ++j) {
                if (used[std::size_t(j)]) continue;
                const std::int64_t cur =
                    cost_at(i0 - 1, j - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
                if (cur < minv[std::size_t(j)]) {
                    minv[std::size_t(j)] = cur;
                    way[std::size_t(j)] = j0;
                }
                if (minv[std::size_t(j)] < delta) {
                    delta = minv[std::size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= objects; ++j) {
                if (used[std::size_t(j)]) {
                    u[std::size_t(owner[std::size_t(j)])] += delta;
                    v[std::size_t(j)] -= delta;
                } else {
                    minv[std::size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (owner[std::size_t(j0)] != 0);
        do {
            const int j1 = way[std::size_t(j0)];
            owner[std::size_t(j0)] = owner[std::size_t(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assigned(std::size_t(persons), -1);
    for (int j = 1; j <= objects; ++j)
        if (owner[std::size_t(j)] != 0) assigned[std::size_t(owner[std::size_t(j)]) - 1] = j - 1;
    return assigned;
}

} // namespace

AssignmentResult solve_assignment(int rows, int cols, const std::vector<std::int64_t>& cost) {
    if (rows <= 0 || cols <= 0) data_error("cost matrix is empty");
    if (cost.size() != std::size_t(rows) * std::size_t(cols))
        data_error("cost matrix size does not match its dimensions");
    const bool transposed = rows > cols;
    const int persons = transposed ? cols : rows;
    const int objects = transposed ? rows : cols;

    // Potentials are bounded by persons * max entry; cap entries so the
    // reduced costs stay clear of int64 overflow.
    const std::int64_t cost_cap =
        std::numeric_limits<std::int64_t>::max() / (12 * (std::int64_t(persons) + 2));
    for (std::int64_t c : cost) {
        if (c < 0) data_error("cost matrix has a negative entry");
        if (c > cost_cap)
            data_error("cost matrix entry " + std::to_string(c) +
                       " is too large for this matrix size");
    }

    auto cost_at = [&](int p, int o) -> std::int64_t {
        return transposed ? cost[std::size_t(o) * std::size_t(cols) + std::size_t(p)]
                          : cost[std::size_t(p) * std::size_t(cols) + std::size_t(o)];
    };

    std::vector<int> assigned = shortest_path_assignment(persons, objects, cost_at);

    AssignmentResult result;
    result.row_to_col.assign(std::size_t(rows), -1);
    for (int p = 0; p < persons; ++p) {
        int o = assigned[std::size_t(p)];
        int r = transposed ? o : p;
        int c = transposed ? p : o;
        result.row_to_col[std::size_t(r)] = c;
        result.total_cost += cost[std::size_t(r) * std::size_t(cols) + std::size_t(c)];
    }
    return result;
}

Matching solve_assignment(const CostMatrix& m) {
    AssignmentResult res = solve_assignment(m.rows, m.cols, m.cost);
    Matching out;
    out.total_cost = res.total_cost;
    for (int r = 0; r < m.rows; ++r) {
        int c = res.row_to_col[std::size_t(r)];
        if (c >= 0) out.pairs.emplace_back(m.row_labels[std::size_t(r)], m.col_labels[std::size_t(c)]);
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

CostMatrix parse_cost_matrix(const std::string& text, const std::string& origin) {
    CostMatrix m;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::int64_t> row;
        std::string cur;
        auto flush = [&]() {
            if (cur.empty()) return;
            try {
                std::size_t pos = 0;
                long long v = std::stoll(cur, &pos);
                if (pos != cur.size())
                    data_error(origin + ":" + std::to_string(line_no) + ": cost '" + cur +
                               "' is not an integer");
                if (v < 0)
                    data_error(origin + ":" + std::to_string(line_no) + ": negative cost " + cur);
                row.push_back(v);
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                data_error(origin + ":" + std::to_string(line_no) + ": cost '" + cur +
                           "' is not an integer");
            }
            cur.clear();
        };
        bool comment = false;
        for (char c : line) {
            if (c == '#') {
                comment = true;
                break;
            }
            if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
                flush();
            else
                cur.push_back(c);
        }
        flush();
        (void)comment;
        if (row.empty()) continue;
        if (m.cols == 0) m.cols = int(row.size());
        if (int(row.size()) != m.cols)
            data_error(origin + ":" + std::to_string(line_no) + ": row has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(m.cols));
        m.cost.insert(m.cost.end(), row.begin(), row.end());
        ++m.rows;
    }
    if (m.rows == 0) data_error(origin + ": cost matrix is empty");
    m.row_labels.resize(std::size_t(m.rows));
    m.col_labels.resize(std::size_t(m.cols));
    for (int r = 0; r < m.rows; ++r) m.row_labels[std::size_t(r)] = r;
    for (int c = 0; c < m.cols; ++c) m.col_labels[std::size_t(c)] = c;
    return m;
}

CostMatrix load_cost_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) data_error("cannot open cost matrix file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cost_matrix(buf.str(), path);
}

} // namespace fleetsim
