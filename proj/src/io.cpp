#include "syncgap/io.hpp"

#include "syncgap/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <fstream>
#include <sstream>

namespace syncgap {

namespace {

std::string node_name(const Json& j, const char* field) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw InputError(std::string(field) + " must be a node label (string or integer)");
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

State3 state_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw InputError(std::string(what) + " must be an array of 3 numbers");
    State3 x;
    for (int c = 0; c < 3; ++c) {
        if (!j[c].is_number()) throw InputError(std::string(what) + " must be an array of 3 numbers");
        x[c] = j[c].get<double>();
    }
    return x;
}

Json state_to_json(const State3& x) { return Json::array({x[0], x[1], x[2]}); }

Json labels_of(const Network& net, const NodeSet& nodes) {
    Json out = Json::array();
    for (auto i : nodes) out.push_back(net.label(i));
    return out;
}

Json edge_to_json(const Network& net, const Edge& e) {
    return {{"src", net.label(e.src)}, {"dst", net.label(e.dst)}, {"w", e.weight}};
}

Json changes_to_json(const Network& net, const std::vector<EdgeChange>& changes) {
    Json out = Json::array();
    for (const auto& c : changes) out.push_back({{"src", net.label(c.src)}, {"dst", net.label(c.dst)}, {"dw", c.dw}});
    return out;
}

} // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

Json to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
    return out;
}

Json to_json(const std::vector<Complex>& zs) {
    Json out = Json::array();
    for (auto z : zs) out.push_back(to_json(z));
    return out;
}

Json network_to_json(const Network& net) {
    Json edges = Json::array();
    for (const auto& e : net.edges()) edges.push_back(edge_to_json(net, e));
    return {{"nodes", net.labels()}, {"edges", std::move(edges)}};
}

Network network_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("edges") || !j.at("edges").is_array())
        throw InputError("network object needs an 'edges' array");
    std::vector<std::string> labels;
    auto index = [&](const std::string& name) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == name) return i;
        labels.push_back(name);
        return labels.size() - 1;
    };
    if (j.contains("nodes")) {
        if (!j.at("nodes").is_array()) throw InputError("'nodes' must be an array");
        for (const auto& n : j.at("nodes")) {
            const auto name = node_name(n, "nodes");
            if (index(name) + 1 != labels.size()) throw InputError("duplicate node label '" + name + "'");
        }
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_object() || !e.contains("src") || !e.contains("dst"))
            throw InputError("each edge needs 'src' and 'dst'");
        Edge edge;
        edge.src = index(node_name(e.at("src"), "src"));
        edge.dst = index(node_name(e.at("dst"), "dst"));
        const auto& w = e.contains("w") ? e.at("w") : e.contains("weight") ? e.at("weight") : Json(1.0);
        if (!w.is_number()) throw InputError("edge weight must be a number");
        edge.weight = w.get<double>();
        if (edge.src == edge.dst) throw InputError("self-loop at node '" + labels[edge.src] + "'");
        for (const auto& prev : edges)
            if (prev.src == edge.src && prev.dst == edge.dst)
                throw InputError("duplicate edge " + labels[edge.src] + " -> " + labels[edge.dst]);
        edges.push_back(edge);
    }
    if (labels.empty()) throw InputError("network has no nodes");
    return Network::from_edges(std::move(labels), edges);
}

Json decomposition_to_json(const Network& net, const Decomposition& d) {
    Json comps = Json::array();
    for (const auto& c : d.components) comps.push_back(labels_of(net, c));
    Json cond = Json::array();
    for (auto [a, b] : d.condensation) cond.push_back({a, b});
    Json cut = Json::array();
    for (const auto& e : d.cutset_edges) cut.push_back(edge_to_json(net, e));
    return {{"components", std::move(comps)},
            {"condensation", std::move(cond)},
            {"sources", d.source_components()},
            {"sinks", d.sink_components()},
            {"cutset", std::move(cut)}};
}

Json spectral_to_json(const SpectralSummary& s) {
    Json j{{"eigenvalues", to_json(s.eigenvalues)},
           {"scale", s.scale},
           {"zero_simple", s.zero_simple},
           {"has_gap", s.has_gap},
           {"gap_simple", s.gap_simple},
           {"degenerate", s.degenerate()}};
    if (s.has_gap) {
        j["lambda2"] = to_json(s.gap);
        j["complex_gap"] = !s.gap_is_real();
        j["gap_separation"] = s.gap_separation;
    } else {
        j["lambda2"] = nullptr;
    }
    if (s.u.size() > 0) {
        j["u"] = to_json(s.u);
        j["v"] = to_json(s.v);
        j["left_residual"] = s.left_residual;
        j["right_residual"] = s.right_residual;
    }
    return j;
}

Json perron_to_json(const PerronCertificate& c) {
    return {{"shift", c.shift},         {"perron_root", c.perron_root}, {"min_eig", c.min_eig},
            {"omega", to_json(c.omega)}, {"eta", to_json(c.eta)},        {"iterations", c.iterations}};
}

Json gershgorin_to_json(const GershgorinReport& g) {
    Json disks = Json::array();
    for (const auto& d : g.disks) disks.push_back({{"center", d.center}, {"radius", d.radius}});
    return {{"disks", std::move(disks)},
            {"nonnegative_real_parts", g.nonnegative_real_parts},
            {"diagonally_dominant", g.diagonally_dominant}};
}

Json sensitivity_to_json(const Network& net, const SensitivityReport& r) {
    Json j{{"changes", changes_to_json(net, r.changes)},
           {"lambda2", to_json(r.lambda2)},
           {"slope", to_json(r.slope)},
           {"verdict", to_string(r.verdict)},
           {"path", to_string(r.path)},
           {"complex_gap", r.complex_gap}};
    if (r.M) j["M"] = to_json(*r.M);
    if (r.p) j["p"] = to_json(*r.p);
    if (r.q) j["q"] = to_json(*r.q);
    if (r.s) j["s"] = to_json(*r.s);
    if (r.cross_check) j["cross_check"] = *r.cross_check;
    return j;
}

Json msf_to_json(const MsfCurve& curve) {
    Json pts = Json::array();
    for (const auto& p : curve.points) pts.push_back({{"nu", p.nu}, {"lambda_max", p.exponent}, {"stderr", p.stderr_}});
    Json cross = Json::array();
    for (const auto& c : curve.crossings) cross.push_back({{"lo", c.lo}, {"hi", c.hi}, {"downward", c.downward}});
    return {{"alpha_c", curve.alpha_c},
            {"crossings", std::move(cross)},
            {"multiple_crossings", curve.multiple_crossings},
            {"monotone_tail", curve.monotone_tail},
            {"points", std::move(pts)}};
}

Json verdict_to_json(const StabilityVerdict& v) {
    return {{"lambda2", to_json(v.lambda2)}, {"coupling", v.coupling}, {"alpha_c", v.alpha_c},
            {"margin", v.margin},            {"stable", v.stable},     {"complex_gap", v.complex_gap}};
}

Scenario scenario_from_json(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw InputError("scenario must be a JSON object");
    if (!j.contains("network")) throw InputError("scenario needs a 'network'");

    const auto& jn = j.at("network");
    Network net = jn.is_string() ? load_network_file(base_dir / jn.get<std::string>()) : network_from_json(jn);

    ModelSpec model = ModelSpec::hindmarsh_rose();
    if (!j.contains("model")) throw InputError("scenario needs a 'model'");
    const auto& jm = j.at("model");
    if (jm.is_string()) {
        model = ModelSpec::from_name(jm.get<std::string>());
    } else if (jm.is_object() && jm.contains("name") && jm.at("name").is_string()) {
        model = ModelSpec::from_name(jm.at("name").get<std::string>());
        if (jm.contains("params")) {
            for (const auto& [k, v] : jm.at("params").items()) {
                if (!v.is_number()) throw InputError("model parameter '" + k + "' must be a number");
                model.set_param(k, v.get<double>());
            }
        }
    } else {
        throw InputError("'model' must be a name or {\"name\": .., \"params\": {..}}");
    }

    CouplingSpec coupling;
    if (j.contains("coupling")) {
        const auto& jc = j.at("coupling");
        if (jc.is_string()) {
            coupling = CouplingSpec::parse(jc.get<std::string>());
        } else if (jc.is_array() && jc.size() == 3) {
            for (int r = 0; r < 3; ++r) {
                if (!jc[r].is_array() || jc[r].size() != 3) throw InputError("coupling matrix must be 3x3");
                for (int c = 0; c < 3; ++c) coupling.H(r, c) = jc[r][c].get<double>();
            }
        } else {
            throw InputError("'coupling' must be a name or a 3x3 matrix");
        }
    }

    Scenario sc{.name = field_or<std::string>(j, "name", "scenario"),
                .network = std::move(net),
                .model = std::move(model),
                .coupling = coupling,
                .alpha = 0.0,
                .t_end = 0.0,
                .dt = 0.01,
                .events = {},
                .init = {},
                .record_stride = 10,
                .diff = std::nullopt};
    if (!j.contains("alpha") || !j.at("alpha").is_number()) throw InputError("scenario needs a numeric 'alpha'");
    sc.alpha = j.at("alpha").get<double>();
    if (!j.contains("t_end") || !j.at("t_end").is_number()) throw InputError("scenario needs a numeric 't_end'");
    sc.t_end = j.at("t_end").get<double>();
    sc.dt = field_or<double>(j, "dt", sc.dt);
    sc.record_stride = field_or<std::size_t>(j, "record_stride", sc.record_stride);

    if (j.contains("events")) {
        for (const auto& e : j.at("events")) {
            if (!e.contains("t") || !e.contains("src") || !e.contains("dst") || !e.contains("w"))
                throw InputError("each event needs 't', 'src', 'dst' and 'w'");
            sc.events.push_back({e.at("t").get<double>(), sc.network.index_of(node_name(e.at("src"), "src")),
                                 sc.network.index_of(node_name(e.at("dst"), "dst")), e.at("w").get<double>()});
        }
    }

    if (j.contains("init")) {
        const auto& ji = j.at("init");
        sc.init.seed = field_or<std::uint64_t>(ji, "seed", sc.init.seed);
        sc.init.perturbation = field_or<double>(ji, "perturbation", sc.init.perturbation);
        sc.init.transient = field_or<double>(ji, "transient", sc.init.transient);
        if (ji.contains("base_state")) sc.init.base_state = state_from_json(ji.at("base_state"), "base_state");
        if (ji.contains("states")) {
            std::vector<State3> states;
            for (const auto& s : ji.at("states")) states.push_back(state_from_json(s, "initial state"));
            sc.init.states = std::move(states);
        }
    }

    if (j.contains("diff")) {
        const auto& jd = j.at("diff");
        if (!jd.contains("i") || !jd.contains("j")) throw InputError("'diff' needs 'i' and 'j'");
        sc.diff = DiffSelection{sc.network.index_of(node_name(jd.at("i"), "diff.i")),
                                sc.network.index_of(node_name(jd.at("j"), "diff.j")),
                                field_or<int>(jd, "component", 0)};
    }
    return sc;
}

Json scenario_to_json(const Scenario& sc) {
    Json params = Json::object();
    for (const auto& [k, v] : sc.model.params()) params[k] = v;
    Json events = Json::array();
    for (const auto& e : sc.events)
        events.push_back({{"t", e.time},
                          {"src", sc.network.label(e.src)},
                          {"dst", sc.network.label(e.dst)},
                          {"w", e.weight}});
    Json init{{"seed", sc.init.seed}, {"perturbation", sc.init.perturbation}, {"transient", sc.init.transient}};
    if (sc.init.base_state) init["base_state"] = state_to_json(*sc.init.base_state);
    if (sc.init.states) {
        Json states = Json::array();
        for (const auto& s : *sc.init.states) states.push_back(state_to_json(s));
        init["states"] = std::move(states);
    }
    Json j{{"name", sc.name},
           {"network", network_to_json(sc.network)},
           {"model", {{"name", std::string(sc.model.name())}, {"params", std::move(params)}}},
           {"coupling", to_json(Matrix(sc.coupling.H))},
           {"alpha", sc.alpha},
           {"t_end", sc.t_end},
           {"dt", sc.dt},
           {"record_stride", sc.record_stride},
           {"events", std::move(events)},
           {"init", std::move(init)}};
    if (sc.diff)
        j["diff"] = {{"i", sc.network.label(sc.diff->i)},
                     {"j", sc.network.label(sc.diff->j)},
                     {"component", sc.diff->component}};
    return j;
}

std::string ranking_csv(const Network& net, const std::vector<RankedLink>& ranked) {
    std::string out = "src,dst,dw,slope_re,slope_im,verdict\n";
    for (const auto& r : ranked) {
        const auto& c = r.candidate;
        out += fmt::format("{},{},{},{},{},{}\n", net.label(c.src), net.label(c.dst), format_number(c.dw),
                           format_number(r.report.slope.real()), format_number(r.report.slope.imag()),
                           to_string(r.report.verdict));
    }
    return out;
}

std::string msf_csv(const MsfCurve& curve) {
    std::string out = "nu,lambda_max,stderr\n";
    for (const auto& p : curve.points)
        out += fmt::format("{},{},{}\n", format_number(p.nu), format_number(p.exponent), format_number(p.stderr_));
    return out;
}

std::string trajectory_csv(const Network& net, const Trajectory& traj) {
    std::string out = "t,node,x,y,z\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto t = format_number(traj.times[k]);
        for (std::size_t i = 0; i < traj.nodes; ++i) {
            const auto& x = traj.states[k][i];
            out += fmt::format("{},{},{},{},{}\n", t, net.label(i), format_number(x[0]), format_number(x[1]),
                               format_number(x[2]));
        }
    }
    return out;
}

std::string sync_csv(const Trajectory& traj) {
    std::string out = "t,sync_error,diff_selected\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += fmt::format("{},{},{}\n", format_number(traj.times[k]), format_number(traj.sync_error[k]),
                           traj.diff_selected.empty() ? std::string() : format_number(traj.diff_selected[k]));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

} // namespace syncgap
