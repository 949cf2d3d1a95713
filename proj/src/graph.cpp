#include "fleetsim/graph.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include "fleetsim/error.hpp"

namespace fleetsim {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '#') break;
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
        if (pos != s.size()) return false;
        if (v < INT_MIN || v > INT_MAX) return false;
        out = int(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

RoadGraph::RoadGraph(std::vector<Node> nodes, const std::vector<std::pair<int, int>>& edges) {
    if (nodes.empty()) data_error("graph has no nodes");
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].id == nodes[i + 1].id)
            data_error("duplicate node id " + std::to_string(nodes[i].id));
    }
    nodes_ = std::move(nodes);
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].id] = int(i);

    adjacency_.assign(nodes_.size(), {});
    for (const auto& [from, to] : edges) {
        auto fi = index_.find(from);
        if (fi == index_.end())
            data_error("edge references unknown node " + std::to_string(from));
        if (index_.find(to) == index_.end())
            data_error("edge references unknown node " + std::to_string(to));
        adjacency_[std::size_t(fi->second)].push_back(to);
    }
    edge_count_ = 0;
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        edge_count_ += int(nbrs.size());
    }
    build_distances();
}

void RoadGraph::build_distances() {
    const std::size_t n = nodes_.size();
    dist_.assign(n * n, -1);
    std::vector<int> queue;
    queue.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        int* row = dist_.data() + s * n;
        row[s] = 0;
        queue.clear();
        queue.push_back(int(s));
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int u = queue[head];
            int du = row[u];
            for (int nb_id : adjacency_[std::size_t(u)]) {
                int v = index_.at(nb_id);
                if (row[v] < 0) {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (row[t] < 0)
                data_error("graph is not strongly connected: node " +
                           std::to_string(nodes_[t].id) + " is unreachable from node " +
                           std::to_string(nodes_[s].id));
        }
    }
}

RoadGraph RoadGraph::parse(const std::string& text, const std::string& origin) {
    std::vector<Node> nodes;
    std::vector<std::pair<int, int>> edges;
    enum class Section { None, Nodes, Edges };
    Section section = Section::None;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        data_error(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() == 1 && fields[0] == "nodes") {
            section = Section::Nodes;
            continue;
        }
        if (fields.size() == 1 && fields[0] == "edges") {
            section = Section::Edges;
            continue;
        }
        switch (section) {
        case Section::None:
            fail("expected 'nodes' or 'edges' section header, got '" + fields[0] + "'");
            break;
        case Section::Nodes: {
            if (fields.size() != 3) fail("node rows need exactly id, x, y");
            Node nd{};
            if (!parse_int(fields[0], nd.id)) fail("bad node id '" + fields[0] + "'");
            if (!parse_double(fields[1], nd.x) || !parse_double(fields[2], nd.y))
                fail("bad coordinates for node " + fields[0]);
            nodes.push_back(nd);
            break;
        }
        case Section::Edges: {
            if (fields.size() > 2)
                fail("weighted edges are not supported; every edge costs one step");
            if (fields.size() != 2) fail("edge rows need exactly from, to");
            int from = 0, to = 0;
            if (!parse_int(fields[0], from)) fail("bad edge endpoint '" + fields[0] + "'");
            if (!parse_int(fields[1], to)) fail("bad edge endpoint '" + fields[1] + "'");
            edges.emplace_back(from, to);
            break;
        }
        }
    }
    if (nodes.empty()) data_error(origin + ": graph document has no nodes");
    return RoadGraph(std::move(nodes), edges);
}

RoadGraph RoadGraph::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) data_error("cannot open graph file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

RoadGraph RoadGraph::grid(int k) {
    if (k < 2) config_error("grid side must be at least 2, got " + std::to_string(k));
    std::vector<Node> nodes;
    nodes.reserve(std::size_t(k) * std::size_t(k));
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            int id = r * k + c;
            nodes.push_back({id, double(c), double(r)});
            if (c + 1 < k) {
                edges.emplace_back(id, id + 1);
                edges.emplace_back(id + 1, id);
            }
            if (r + 1 < k) {
                edges.emplace_back(id, id + k);
                edges.emplace_back(id + k, id);
            }
        }
    }
    return RoadGraph(std::move(nodes), edges);
}

std::string RoadGraph::to_document() const {
    std::ostringstream out;
    out << "nodes\n";
    char buf[96];
    for (const Node& nd : nodes_) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", nd.id, nd.x, nd.y);
        out << buf;
    }
    out << "edges\n";
    for (const Node& nd : nodes_) {
        for (int to : adjacency_[std::size_t(index_.at(nd.id))])
            out << nd.id << ' ' << to << '\n';
    }
    return out.str();
}

void RoadGraph::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) data_error("cannot write graph file '" + path + "'");
    out << to_document();
    if (!out) data_error("failed writing graph file '" + path + "'");
}

int RoadGraph::index_of(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) data_error("unknown node id " + std::to_string(id));
    return it->second;
}

const std::vector<int>& RoadGraph::neighbors(int id) const {
    return adjacency_[std::size_t(index_of(id))];
}

int RoadGraph::distance(int from_id, int to_id) const {
    return distance_by_index(index_of(from_id), index_of(to_id));
}

int RoadGraph::next_hop(int from_id, int target_id) const {
    int fi = index_of(from_id);
    int ti = index_of(target_id);
    if (fi == ti) return from_id;
    int want = distance_by_index(fi, ti) - 1;
    for (int nb_id : adjacency_[std::size_t(fi)]) {
        if (distance_by_index(index_.at(nb_id), ti) == want) return nb_id;
    }
    data_error("no next hop from " + std::to_string(from_id) + " toward " +
               std::to_string(target_id));
}

double RoadGraph::euclidean(int a_id, int b_id) const {
    const Node& a = nodes_[std::size_t(index_of(a_id))];
    const Node& b = nodes_[std::size_t(index_of(b_id))];
    return std::hypot(a.x - b.x, a.y - b.y);
}

Itinerary RoadGraph::shortest_itinerary(int from_id, int to_id) const {
    Itinerary it;
    it.nodes.push_back(from_id);
    int cur = from_id;
    while (cur != to_id) {
        cur = next_hop(cur, to_id);
        it.nodes.push_back(cur);
    }
    it.cursor = 1;
    return it;
}

} // namespace fleetsim
