#ifndef FLEETSIM_GRAPH_HPP
#define FLEETSIM_GRAPH_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace fleetsim {

// Node path from an origin to a target; consecutive entries are joined by an
// edge, so traversing one hop costs one time step.
struct Itinerary {
    std::vector<int> nodes;    // node ids, nodes.front() == origin
    std::size_t cursor = 1;    // index of the next hop destination

    bool done() const { return cursor >= nodes.size(); }
    int hops() const { return int(nodes.size()) - 1; }
};

// Directed road network with unit-time edges. All-pairs hop distances are
// precomputed at construction; construction fails unless the graph is
// strongly connected.
class RoadGraph {
public:
    struct Node {
        int id;
        double x;
        double y;
    };

    RoadGraph(std::vector<Node> nodes, const std::vector<std::pair<int, int>>& edges);

    static RoadGraph load_file(const std::string& path);
    static RoadGraph parse(const std::string& text, const std::string& origin);
    // k x k four-connected grid, ids row*k+col, unit coordinates
    static RoadGraph grid(int k);

    void save_file(const std::string& path) const;
    std::string to_document() const;

    int node_count() const { return int(nodes_.size()); }
    int edge_count() const { return edge_count_; }
    const std::vector<Node>& nodes() const { return nodes_; } // ascending id

    bool has_node(int id) const { return index_.count(id) != 0; }
    int index_of(int id) const;  // rank in ascending-id order
    int id_of(int index) const { return nodes_[std::size_t(index)].id; }

    // out-neighbors as ascending node ids
    const std::vector<int>& neighbors(int id) const;

    // hop distance; both endpoints must exist
    int distance(int from_id, int to_id) const;
    int distance_by_index(int from_idx, int to_idx) const {
        return dist_[std::size_t(from_idx) * nodes_.size() + std::size_t(to_idx)];
    }

    // neighbor one hop closer to target; lowest node id wins ties;
    // next_hop(v, v) == v
    int next_hop(int from_id, int target_id) const;

    // straight-line distance between node coordinates
    double euclidean(int a_id, int b_id) const;

    Itinerary shortest_itinerary(int from_id, int to_id) const;

private:
    void build_distances();

    std::vector<Node> nodes_;                      // sorted by id
    std::unordered_map<int, int> index_;           // id -> rank
    std::vector<std::vector<int>> adjacency_;      // by rank, neighbor ids ascending
    std::vector<int> dist_;                        // n*n hop distances
    int edge_count_ = 0;
};

} // namespace fleetsim

#endif
