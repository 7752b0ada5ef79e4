#include "syncgap/graph.hpp"

#include "syncgap/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace syncgap {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Undirected reachability from node 0; returns the visited mask.
std::vector<bool> weak_reach(const Matrix& w) {
    const auto n = static_cast<std::size_t>(w.rows());
    std::vector<bool> seen(n, false);
    if (n == 0) return seen;
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const auto k = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j] && (w(k, j) > 0.0 || w(j, k) > 0.0)) {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return seen;
}

std::vector<std::vector<NodeIndex>> out_adjacency(const Matrix& w) {
    const auto n = static_cast<std::size_t>(w.rows());
    std::vector<std::vector<NodeIndex>> adj(n);
    for (std::size_t src = 0; src < n; ++src)
        for (std::size_t dst = 0; dst < n; ++dst)
            if (w(dst, src) > 0.0) adj[src].push_back(dst);
    return adj;
}

// Iterative Tarjan; returns a component id per node (ids in reverse
// topological order, renumbered by the caller).
std::vector<std::size_t> tarjan(const std::vector<std::vector<NodeIndex>>& adj) {
    const std::size_t n = adj.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeIndex> stack;
    std::size_t counter = 0, n_comp = 0;

    struct Frame {
        NodeIndex node;
        std::size_t next;
    };
    for (NodeIndex root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.next < adj[f.node].size()) {
                const NodeIndex w = adj[f.node][f.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const NodeIndex v = f.node;
            if (low[v] == index[v]) {
                NodeIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
        }
    }
    return comp;
}

} // namespace

// ---------------------------------------------------------------------------
// Network

Network::Network(std::vector<std::string> labels, Matrix weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
    const auto n = labels_.size();
    if (weights_.rows() != weights_.cols() || static_cast<std::size_t>(weights_.rows()) != n)
        throw InputError("weight matrix must be square with one row per label");
    if (n == 0) throw InputError("network has no nodes");
    std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != n) throw InputError("node labels must be unique");
    for (std::size_t i = 0; i < n; ++i) {
        if (weights_(i, i) != 0.0) throw InputError("self-loop at node " + labels_[i]);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0)
                throw InputError("weight " + labels_[j] + "->" + labels_[i] + " must be finite and nonnegative");
        }
    }
    const auto seen = weak_reach(weights_);
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) throw InputError("network is not weakly connected (node " + labels_[i] + ")");
}

Network Network::from_edges(std::vector<std::string> labels, const std::vector<Edge>& edges) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : edges) {
        if (e.src >= labels.size() || e.dst >= labels.size()) throw InputError("edge endpoint out of range");
        if (w(e.dst, e.src) != 0.0) throw InputError("duplicate edge " + labels[e.src] + "->" + labels[e.dst]);
        w(e.dst, e.src) = e.weight;
    }
    return Network(std::move(labels), std::move(w));
}

NodeIndex Network::index_of(std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InputError("unknown node '" + std::string(label) + "'");
    return static_cast<NodeIndex>(it - labels_.begin());
}

std::vector<Edge> Network::edges() const {
    std::vector<Edge> out;
    for (NodeIndex src = 0; src < size(); ++src)
        for (NodeIndex dst = 0; dst < size(); ++dst)
            if (weights_(dst, src) > 0.0) out.push_back({src, dst, weights_(dst, src)});
    return out;
}

std::size_t Network::edge_count() const {
    return static_cast<std::size_t>((weights_.array() > 0.0).count());
}

bool Network::is_symmetric() const { return weights_ == weights_.transpose(); }

Network Network::with_weight(NodeIndex src, NodeIndex dst, double w) const {
    if (src >= size() || dst >= size()) throw InputError("edge endpoint out of range");
    if (src == dst) throw InputError("self-loop at node " + labels_[src]);
    Matrix copy = weights_;
    copy(dst, src) = w;
    return Network(labels_, std::move(copy));
}

Network Network::scaled(double factor) const {
    if (!(factor > 0.0)) throw InputError("scale factor must be positive");
    return Network(labels_, weights_ * factor);
}

Network Network::permuted(const std::vector<NodeIndex>& perm) const {
    const auto n = size();
    if (perm.size() != n) throw InputError("permutation has wrong length");
    std::vector<bool> used(n, false);
    for (auto p : perm) {
        if (p >= n || used[p]) throw InputError("not a permutation");
        used[p] = true;
    }
    std::vector<std::string> labels(n);
    Matrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
        labels[a] = labels_[perm[a]];
        for (std::size_t b = 0; b < n; ++b) w(a, b) = weights_(perm[a], perm[b]);
    }
    return Network(std::move(labels), std::move(w));
}

// ---------------------------------------------------------------------------
// Loading

Network load_network(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeIndex> ids;
    std::vector<std::size_t> first_line;
    std::vector<Edge> edges;
    std::map<std::pair<NodeIndex, NodeIndex>, std::size_t> seen_pairs;

    auto intern = [&](std::string_view id, std::size_t line) {
        auto [it, inserted] = ids.try_emplace(std::string(id), labels.size());
        if (inserted) {
            labels.emplace_back(id);
            first_line.push_back(line);
        }
        return it->second;
    };

    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        const auto fields = split_commas(line);
        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "src" || fields[1] != "dst" || fields[2] != "weight")
                throw LoadError(line_no, "expected header 'src,dst,weight'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 3) throw LoadError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty()) throw LoadError(line_no, "empty node identifier");

        double w = 0.0;
        const auto wf = fields[2];
        const auto res = std::from_chars(wf.data(), wf.data() + wf.size(), w);
        if (res.ec != std::errc{} || res.ptr != wf.data() + wf.size())
            throw LoadError(line_no, "cannot parse weight '" + std::string(wf) + "'");
        if (!std::isfinite(w)) throw LoadError(line_no, "weight is not finite");
        if (w < 0.0) throw LoadError(line_no, "negative weight");
        if (fields[0] == fields[1]) throw LoadError(line_no, "self-loop at node " + std::string(fields[0]));

        const auto src = intern(fields[0], line_no);
        const auto dst = intern(fields[1], line_no);
        const auto [it, fresh] = seen_pairs.try_emplace({src, dst}, line_no);
        if (!fresh)
            throw LoadError(line_no, "duplicate edge " + labels[src] + "->" + labels[dst] + " (first on line " +
                                         std::to_string(it->second) + ")");
        edges.push_back({src, dst, w});
    }

    if (!header_seen) throw LoadError(line_no == 0 ? 1 : line_no, "missing header 'src,dst,weight'");
    if (edges.empty()) throw LoadError(line_no, "edge list is empty");

    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : edges) w(e.dst, e.src) = e.weight;

    const auto seen = weak_reach(w);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!seen[i]) throw LoadError(first_line[i], "network is not weakly connected (node " + labels[i] + ")");

    return Network(std::move(labels), std::move(w));
}

Network load_network_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_network(buf.str());
}

// ---------------------------------------------------------------------------
// Laplacian and decomposition

Laplacian laplacian(const Network& net) {
    Laplacian out;
    out.degree = net.weights().rowwise().sum();
    out.L = -net.weights();
    out.L.diagonal() = out.degree;
    return out;
}

std::vector<std::size_t> Decomposition::source_components() const {
    std::vector<bool> has_in(components.size(), false);
    for (const auto& [from, to] : condensation) has_in[to] = true;
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < components.size(); ++c)
        if (!has_in[c]) out.push_back(c);
    return out;
}

std::vector<std::size_t> Decomposition::sink_components() const {
    std::vector<bool> has_out(components.size(), false);
    for (const auto& [from, to] : condensation) has_out[from] = true;
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < components.size(); ++c)
        if (!has_out[c]) out.push_back(c);
    return out;
}

std::vector<std::size_t> Decomposition::topological_order() const {
    const auto k = components.size();
    std::vector<std::size_t> indeg(k, 0);
    std::vector<std::vector<std::size_t>> next(k);
    for (const auto& [from, to] : condensation) {
        next[from].push_back(to);
        ++indeg[to];
    }
    std::vector<std::size_t> ready, order;
    for (std::size_t c = k; c-- > 0;)
        if (indeg[c] == 0) ready.push_back(c);
    while (!ready.empty()) {
        const auto c = ready.back();
        ready.pop_back();
        order.push_back(c);
        for (auto t : next[c])
            if (--indeg[t] == 0) ready.push_back(t);
    }
    if (order.size() != k) throw Error("condensation is not acyclic");
    return order;
}

Decomposition decompose(const Network& net) {
    const auto n = net.size();
    const auto raw = tarjan(out_adjacency(net.weights()));

    // Renumber components by their smallest member.
    std::vector<std::size_t> first_member;
    std::map<std::size_t, std::size_t> renumber;
    for (NodeIndex i = 0; i < n; ++i)
        if (renumber.try_emplace(raw[i], renumber.size()).second) first_member.push_back(i);

    Decomposition d;
    d.components.resize(renumber.size());
    d.component_of.resize(n);
    for (NodeIndex i = 0; i < n; ++i) {
        d.component_of[i] = renumber[raw[i]];
        d.components[d.component_of[i]].push_back(i);
    }

    std::set<std::pair<std::size_t, std::size_t>> cond;
    for (const auto& e : net.edges()) {
        const auto a = d.component_of[e.src], b = d.component_of[e.dst];
        if (a == b) {
            d.internal_edges.push_back(e);
        } else {
            d.cutset_edges.push_back(e);
            cond.insert({a, b});
        }
    }
    d.condensation.assign(cond.begin(), cond.end());
    return d;
}

bool has_rooted_spanning_tree(const Network& net) {
    return decompose(net).source_components().size() == 1;
}

bool is_strongly_connected(const Network& net, const NodeSet& nodes) {
    if (nodes.size() <= 1) return true;
    const auto& w = net.weights();
    auto reach_all = [&](bool forward) {
        std::vector<bool> seen(nodes.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < nodes.size(); ++b) {
                const double link = forward ? w(nodes[b], nodes[a]) : w(nodes[a], nodes[b]);
                if (!seen[b] && link > 0.0) {
                    seen[b] = true;
                    ++count;
                    stack.push_back(b);
                }
            }
        }
        return count == nodes.size();
    };
    return reach_all(true) && reach_all(false);
}

// ---------------------------------------------------------------------------
// Block form

Matrix BlockForm::downstream_block() const {
    Matrix b = L2;
    b.diagonal() += dc;
    return b;
}

Matrix BlockForm::assemble() const {
    const auto n1 = upstream.size(), n2 = downstream.size();
    const auto n = static_cast<Eigen::Index>(n1 + n2);
    Matrix L = Matrix::Zero(n, n);
    const Matrix b = downstream_block();
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t c = 0; c < n1; ++c) L(upstream[a], upstream[c]) = L1(a, c);
    for (std::size_t a = 0; a < n2; ++a) {
        for (std::size_t c = 0; c < n2; ++c) L(downstream[a], downstream[c]) = b(a, c);
        for (std::size_t c = 0; c < n1; ++c) L(downstream[a], upstream[c]) = -C(a, c);
    }
    return L;
}

BlockForm block_form(const Network& net, const NodeSet& upstream, const NodeSet& downstream) {
    const auto n = net.size();
    std::vector<int> side(n, -1);
    auto mark = [&](const NodeSet& set, int tag) {
        for (auto i : set) {
            if (i >= n) throw InputError("node index out of range in block split");
            if (side[i] != -1) throw InputError("node " + net.label(i) + " listed twice in block split");
            side[i] = tag;
        }
    };
    mark(upstream, 0);
    mark(downstream, 1);
    for (NodeIndex i = 0; i < n; ++i)
        if (side[i] == -1) throw InputError("block split does not cover node " + net.label(i));
    if (upstream.empty() || downstream.empty()) throw InputError("both blocks of a split must be nonempty");

    BlockForm bf;
    bf.upstream = upstream;
    bf.downstream = downstream;
    std::sort(bf.upstream.begin(), bf.upstream.end());
    std::sort(bf.downstream.begin(), bf.downstream.end());

    const auto& w = net.weights();
    for (auto d : bf.downstream)
        for (auto u : bf.upstream)
            if (w(u, d) > 0.0)
                throw InputError("link " + net.label(d) + "->" + net.label(u) + " points from downstream to upstream");

    const auto n1 = static_cast<Eigen::Index>(bf.upstream.size());
    const auto n2 = static_cast<Eigen::Index>(bf.downstream.size());
    Matrix w1(n1, n1), w2(n2, n2);
    bf.C.resize(n2, n1);
    for (Eigen::Index a = 0; a < n1; ++a)
        for (Eigen::Index c = 0; c < n1; ++c) w1(a, c) = w(bf.upstream[a], bf.upstream[c]);
    for (Eigen::Index a = 0; a < n2; ++a) {
        for (Eigen::Index c = 0; c < n2; ++c) w2(a, c) = w(bf.downstream[a], bf.downstream[c]);
        for (Eigen::Index c = 0; c < n1; ++c) bf.C(a, c) = w(bf.downstream[a], bf.upstream[c]);
    }
    if ((bf.C.array() == 0.0).all()) throw InputError("no cutset links from upstream to downstream");

    bf.L1 = -w1;
    bf.L1.diagonal() = w1.rowwise().sum();
    bf.L2 = -w2;
    bf.L2.diagonal() = w2.rowwise().sum();
    bf.dc = bf.C.rowwise().sum();
    bf.upstream_strong = is_strongly_connected(net, bf.upstream);
    bf.downstream_strong = is_strongly_connected(net, bf.downstream);
    return bf;
}

} // namespace syncgap
