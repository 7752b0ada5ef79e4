#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace syncgap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using NodeIndex = std::size_t;
using NodeSet = std::vector<NodeIndex>;

// A directed link src -> dst. In weight-matrix terms this is W(dst, src):
// node dst receives input from node src.
struct Edge {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted directed network of n labelled nodes.
///
/// `weights()(i, j)` is the strength of the interaction from node j to node i.
/// Construction enforces nonnegative weights, an empty diagonal and weak
/// connectivity; a constructed Network is immutable.
class Network {
public:
    Network(std::vector<std::string> labels, Matrix weights);

    static Network from_edges(std::vector<std::string> labels, const std::vector<Edge>& edges);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(NodeIndex i) const { return labels_.at(i); }
    NodeIndex index_of(std::string_view label) const;

    const Matrix& weights() const noexcept { return weights_; }
    double weight(NodeIndex src, NodeIndex dst) const { return weights_(dst, src); }
    bool has_edge(NodeIndex src, NodeIndex dst) const { return weights_(dst, src) > 0.0; }

    // Nonzero links ordered by (src, dst).
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;
    bool is_symmetric() const;

    // Copy with W(dst, src) set to w (w = 0 removes the link).
    Network with_weight(NodeIndex src, NodeIndex dst, double w) const;
    Network scaled(double factor) const;
    // Copy with nodes reordered: node perm[k] of this network becomes node k.
    Network permuted(const std::vector<NodeIndex>& perm) const;

private:
    std::vector<std::string> labels_;
    Matrix weights_;
};

// Parses an edge list: header `src,dst,weight`, one link per line, `#`
// comment lines and blank lines ignored, LF or CRLF. Nodes are numbered in
// order of first appearance. Throws LoadError.
Network load_network(std::string_view text);
Network load_network_file(const std::filesystem::path& path);

struct Laplacian {
    Matrix L;
    Vector degree; // row sums of W
};

Laplacian laplacian(const Network& net);

struct Decomposition {
    // Strongly connected components, numbered by their smallest node index;
    // nodes inside each component are ascending.
    std::vector<NodeSet> components;
    std::vector<std::size_t> component_of;
    // Distinct (from, to) component pairs joined by at least one link.
    std::vector<std::pair<std::size_t, std::size_t>> condensation;
    std::vector<Edge> cutset_edges;
    std::vector<Edge> internal_edges;

    std::vector<std::size_t> source_components() const;
    std::vector<std::size_t> sink_components() const;
    // Kahn order of the condensation; throws if it has a cycle.
    std::vector<std::size_t> topological_order() const;
};

Decomposition decompose(const Network& net);

bool has_rooted_spanning_tree(const Network& net);

bool is_strongly_connected(const Network& net, const NodeSet& nodes);

/// Laplacian of a network split into an upstream and a downstream part with
/// links only from upstream to downstream:
///
///     L = [ L1   0      ]
///         [ -C   L2 + Dc ]
///
/// Rows/columns of the blocks follow `upstream` and `downstream`, which keep
/// the input node order.
struct BlockForm {
    NodeSet upstream;
    NodeSet downstream;
    Matrix L1;
    Matrix L2;
    Matrix C;  // downstream x upstream cutset weights
    Vector dc; // row sums of C
    bool upstream_strong = false;
    bool downstream_strong = false;

    Matrix downstream_block() const;
    // Full Laplacian in the original node numbering.
    Matrix assemble() const;
};

BlockForm block_form(const Network& net, const NodeSet& upstream, const NodeSet& downstream);

} // namespace syncgap
