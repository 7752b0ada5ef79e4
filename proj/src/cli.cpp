#include "syncgap/cli.hpp"

#include "syncgap/error.hpp"
#include "syncgap/graph.hpp"
#include "syncgap/io.hpp"
#include "syncgap/msf.hpp"
#include "syncgap/perturb.hpp"
#include "syncgap/sim.hpp"
#include "syncgap/spectral.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>

namespace fs = std::filesystem;

namespace syncgap {

namespace {

constexpr const char* tool_version = "1.0.0";

// Collects artifacts of one run and writes manifest.json next to them.
class Run {
public:
    Run(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out)) {
        fs::create_directories(out_);
    }

    void input(const fs::path& path, const std::string& content) {
        inputs_[path.filename().string()] = sha256_hex(content);
    }

    void write(const std::string& name, const std::string& content) {
        write_file(out_ / name, content);
        artifacts_[name] = sha256_hex(content);
    }

    void write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    Json config = Json::object();

    void finish() {
        Json m{{"tool", "syncgap"}, {"version", tool_version}, {"command", command_}, {"config", config}};
        Json in = Json::object();
        for (const auto& [k, v] : inputs_) in[k] = {{"sha256", v}};
        Json art = Json::object();
        for (const auto& [k, v] : artifacts_) art[k] = {{"sha256", v}};
        m["inputs"] = std::move(in);
        m["artifacts"] = std::move(art);
        write_file(out_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path out_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> artifacts_;
};

Network read_network(Run& run, const fs::path& path) {
    const auto text = read_file(path);
    run.input(path, text);
    return load_network(text);
}

double distance_to(Complex z, const std::vector<Complex>& zs) {
    double d = std::numeric_limits<double>::infinity();
    for (auto w : zs) d = std::min(d, std::abs(z - w));
    return d;
}

// Two-block splits: each sink component against the rest, each source
// component against the rest.
std::vector<std::pair<NodeSet, NodeSet>> two_block_splits(const Network& net, const Decomposition& d) {
    std::vector<std::pair<NodeSet, NodeSet>> out;
    std::set<NodeSet> seen;
    auto add = [&](const NodeSet& down) {
        if (down.size() == net.size() || !seen.insert(down).second) return;
        NodeSet up;
        for (NodeIndex i = 0; i < net.size(); ++i)
            if (!std::binary_search(down.begin(), down.end(), i)) up.push_back(i);
        out.emplace_back(std::move(up), down);
    };
    for (auto c : d.sink_components()) add(d.components[c]);
    for (auto c : d.source_components()) {
        NodeSet down;
        for (NodeIndex i = 0; i < net.size(); ++i)
            if (d.component_of[i] != c) down.push_back(i);
        add(down);
    }
    return out;
}

Json split_report(const Network& net, const SpectralSummary& summary, const NodeSet& up, const NodeSet& down,
                  bool dump) {
    Json j{{"upstream", Json::array()}, {"downstream", Json::array()}};
    for (auto i : up) j["upstream"].push_back(net.label(i));
    for (auto i : down) j["downstream"].push_back(net.label(i));
    try {
        const auto bf = block_form(net, up, down);
        const Matrix b = bf.downstream_block();
        const auto eig_up = eigen_all(bf.L1);
        const auto eig_down = eigen_all(b);
        j["upstream_strong"] = bf.upstream_strong;
        j["downstream_strong"] = bf.downstream_strong;
        j["upstream_eigenvalues"] = to_json(eig_up);
        j["downstream_eigenvalues"] = to_json(eig_down);
        if (summary.has_gap) {
            const double tol = 1e-8 * summary.scale;
            const bool in_down = distance_to(summary.gap, eig_down) <= tol;
            const bool in_up = distance_to(summary.gap, eig_up) <= tol;
            j["gap_location"] = in_down && in_up ? "both" : in_down ? "downstream" : in_up ? "upstream" : "none";
        }
        if (dump) {
            j["L1"] = to_json(bf.L1);
            j["L2_plus_Dc"] = to_json(b);
            j["C"] = to_json(bf.C);
        }
        try {
            j["perron"] = perron_to_json(perron_certificate(b));
        } catch (const Error& e) {
            j["perron"] = {{"error", e.what()}};
        }
        j["gershgorin"] = gershgorin_to_json(gershgorin(b));
    } catch (const InputError& e) {
        j["error"] = e.what();
    }
    return j;
}

int cmd_analyze(const fs::path& input, const fs::path& out, bool dump) {
    Run run("analyze", out);
    const auto net = read_network(run, input);
    run.config = {{"input", input.filename().string()}, {"dump_spectral", dump}};

    const auto lap = laplacian(net);
    const auto d = decompose(net);
    const auto summary = spectral_summary(lap.L);

    Json report{{"nodes", net.size()},
                {"edges", net.edge_count()},
                {"network", network_to_json(net)},
                {"decomposition", decomposition_to_json(net, d)},
                {"rooted_spanning_tree", has_rooted_spanning_tree(net)},
                {"spectrum", spectral_to_json(summary)},
                {"gershgorin", gershgorin_to_json(gershgorin(lap.L))}};
    Json splits = Json::array();
    for (const auto& [up, down] : two_block_splits(net, d)) splits.push_back(split_report(net, summary, up, down, dump));
    report["splits"] = std::move(splits);
    run.write("report.json", report);

    if (dump) {
        Json sp{{"L", to_json(lap.L)}, {"W", to_json(net.weights())}, {"eigenvalues", to_json(summary.eigenvalues)}};
        if (summary.u.size() > 0) {
            sp["u"] = to_json(summary.u);
            sp["v"] = to_json(summary.v);
        }
        run.write("spectral.json", sp);
    }
    run.finish();

    if (summary.degenerate()) {
        std::cerr << "degenerate spectrum: "
                  << (!summary.zero_simple ? "zero eigenvalue is not simple" : "spectral gap is not simple") << "\n";
        return exit_degenerate;
    }
    std::cout << fmt::format("lambda2 = {} {:+}i\n", format_number(summary.gap.real()), summary.gap.imag());
    return exit_ok;
}

std::vector<Candidate> read_candidates(Run& run, const Network& net, const fs::path& path, double dw) {
    const auto text = read_file(path);
    run.input(path, text);
    std::vector<Candidate> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (!header) {
            if (f.size() < 2 || f[0] != "src" || f[1] != "dst")
                throw LoadError(lineno, "candidate file header must be src,dst[,dw]");
            header = true;
            continue;
        }
        if (f.size() < 2 || f.size() > 3) throw LoadError(lineno, "expected src,dst[,dw]");
        Candidate c{net.index_of(f[0]), net.index_of(f[1]), dw, false};
        if (f.size() == 3) {
            try {
                std::size_t pos = 0;
                c.dw = std::stod(f[2], &pos);
                if (pos != f[2].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw LoadError(lineno, "bad dw '" + f[2] + "'");
            }
        }
        if (c.src == c.dst) throw LoadError(lineno, "self-loop candidate");
        out.push_back(c);
    }
    if (!header) throw LoadError(0, "candidate file is empty");
    return out;
}

int cmd_rank(const fs::path& input, const fs::path& out, const std::string& spec, double dw, bool oracle, double eps,
             std::optional<std::size_t> top) {
    Run run("rank", out);
    const auto net = read_network(run, input);
    spectral_gap(laplacian(net).L); // degenerate gap aborts the ranking

    std::vector<Candidate> candidates;
    if (spec == "absent") candidates = make_candidates(net, CandidateSet::all_absent, dw);
    else if (spec == "absent-symmetric") candidates = make_candidates(net, CandidateSet::absent_symmetric, dw);
    else if (spec == "cutset") candidates = make_candidates(net, CandidateSet::cutset, dw);
    else candidates = read_candidates(run, net, spec, dw);

    auto ranked = classify_links(net, candidates);
    if (top && *top < ranked.size()) ranked.resize(*top);

    run.config = {{"input", input.filename().string()},
                  {"candidates", fs::path(spec).filename().string()},
                  {"dw", dw},
                  {"oracle", oracle},
                  {"top", top ? Json(*top) : Json(nullptr)}};
    if (oracle) run.config["eps"] = eps;

    std::string csv = ranking_csv(net, ranked);
    Json entries = Json::array();
    for (const auto& r : ranked) {
        Json e = sensitivity_to_json(net, r.report);
        e["symmetric"] = r.candidate.symmetric;
        entries.push_back(std::move(e));
    }

    if (oracle) {
        std::string with = "src,dst,dw,slope_re,slope_im,verdict,fd_re,fd_im,abs_diff,agree\n";
        std::istringstream rows(csv);
        std::string row;
        std::getline(rows, row);
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            std::getline(rows, row);
            const auto& c = ranked[k].candidate;
            const auto pert = c.symmetric ? symmetric_perturbation(net, c.src, c.dst, c.dw)
                                          : edge_perturbation(net, c.src, c.dst, c.dw);
            try {
                const auto fd = fd_oracle(net, pert, eps);
                const Complex slope = ranked[k].report.slope;
                const double diff = std::abs(fd.slope - slope);
                const bool agree = diff <= 1e-3 * std::max(1.0, std::abs(slope));
                with += fmt::format("{},{},{},{},{}\n", row, format_number(fd.slope.real()),
                                    format_number(fd.slope.imag()), format_number(diff), agree ? "true" : "false");
                entries[k]["oracle"] = {{"slope", to_json(fd.slope)}, {"abs_diff", diff}, {"agree", agree}};
            } catch (const ConvergenceError& e) {
                with += row + ",,,,ambiguous\n";
                entries[k]["oracle"] = {{"error", e.what()}};
            }
        }
        csv = std::move(with);
    }

    run.write("ranking.csv", csv);
    run.write("ranking.json", Json{{"ranking", std::move(entries)}});
    run.finish();
    return exit_ok;
}

struct MsfArgs {
    std::string model = "hindmarsh_rose";
    std::string coupling = "x";
    double nu_max = 2.0;
    std::size_t grid = 21;
    LyapunovOptions lyap;
    std::optional<fs::path> network;
    std::optional<double> alpha;
};

int cmd_msf(const MsfArgs& a, const fs::path& out) {
    Run run("msf", out);
    const auto model = ModelSpec::from_name(a.model);
    const auto coupling = CouplingSpec::parse(a.coupling);
    std::optional<Network> net;
    if (a.network) net = read_network(run, *a.network);
    if (a.alpha && !net) throw InputError("--alpha needs --input (a network to check)");

    Json params = Json::object();
    for (const auto& [k, v] : model.params()) params[k] = v;
    run.config = {{"model", std::string(model.name())},
                  {"params", params},
                  {"gamma", to_json(Matrix(coupling.gamma()))},
                  {"nu_max", a.nu_max},
                  {"grid", a.grid},
                  {"dt", a.lyap.dt},
                  {"transient", a.lyap.transient},
                  {"averaging_time", a.lyap.averaging_time},
                  {"renorm_interval", a.lyap.renorm_interval}};
    if (a.network) run.config["input"] = a.network->filename().string();
    if (a.alpha) run.config["alpha"] = *a.alpha;

    const auto curve = critical_coupling(model, coupling.gamma(), a.nu_max, a.grid, a.lyap);
    run.write("msf_curve.csv", msf_csv(curve));
    Json j = msf_to_json(curve);
    if (a.alpha) j["verdict"] = verdict_to_json(stability_check(*net, *a.alpha, curve.alpha_c));
    run.write("msf.json", j);
    run.finish();
    std::cout << "alpha_c = " << format_number(curve.alpha_c) << "\n";
    return exit_ok;
}

std::string plot_script(const Scenario& sc) {
    std::string s = "# gnuplot -p plot.gp\n"
                    "set datafile separator ','\n"
                    "set key autotitle columnhead\n"
                    "set multiplot layout 2,1\n"
                    "set logscale y\n"
                    "set xlabel 't'\n"
                    "set ylabel 'sync error'\n";
    for (const auto& e : sc.events) s += fmt::format("set arrow from {0}, graph 0 to {0}, graph 1 nohead dt 2\n", e.time);
    s += "plot 'sync.csv' using 1:2 with lines\n"
         "unset logscale y\n";
    if (sc.diff)
        s += fmt::format("set ylabel 'x{}_{} - x{}_{}'\nplot 'sync.csv' using 1:3 with lines\n", sc.diff->component + 1,
                         sc.network.label(sc.diff->i), sc.diff->component + 1, sc.network.label(sc.diff->j));
    else
        s += "set ylabel 'x'\nplot 'trajectory.csv' using 1:3 with dots\n";
    s += "unset multiplot\n";
    return s;
}

struct SimArgs {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> alpha;
    std::optional<double> alpha_c;
};

int cmd_simulate(const fs::path& input, const fs::path& out, const SimArgs& a) {
    Run run("simulate", out);
    const auto text = read_file(input);
    run.input(input, text);
    Json raw;
    try {
        raw = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("scenario is not valid JSON: ") + e.what());
    }
    auto sc = scenario_from_json(raw, input.parent_path());
    if (a.seed) sc.init.seed = *a.seed;
    if (a.dt) sc.dt = *a.dt;
    if (a.alpha) sc.alpha = *a.alpha;
    std::optional<double> alpha_c = a.alpha_c;
    if (!alpha_c && raw.contains("alpha_c") && raw.at("alpha_c").is_number()) alpha_c = raw.at("alpha_c").get<double>();
    validate(sc);

    run.config = scenario_to_json(sc);
    if (raw.contains("notes")) run.config["notes"] = raw.at("notes");
    if (alpha_c) run.config["alpha_c"] = *alpha_c;

    const auto traj = integrate(sc);
    run.write("trajectory.csv", trajectory_csv(sc.network, traj));
    run.write("sync.csv", sync_csv(traj));
    run.write("plot.gp", plot_script(sc));

    // Network state and stability margin in every interval between events.
    Json phases = Json::array();
    Network current = sc.network;
    double start = 0.0;
    auto phase = [&](double end) {
        Json p{{"from", start}, {"to", end}, {"max_sync_error", max_sync_error(traj, start, end)}};
        const auto s = spectral_summary(laplacian(current).L);
        p["lambda2"] = (s.zero_simple && s.has_gap) ? to_json(s.gap) : to_json(Complex(0.0, 0.0));
        if (alpha_c) p["verdict"] = verdict_to_json(stability_check(current, sc.alpha, *alpha_c));
        else p["coupling"] = sc.alpha * ((s.zero_simple && s.has_gap) ? s.gap.real() : 0.0);
        phases.push_back(std::move(p));
    };
    for (const auto& e : sc.events) {
        if (e.time > start) phase(e.time);
        current = current.with_weight(e.src, e.dst, e.weight);
        start = e.time;
    }
    phase(sc.t_end);

    Json summary{{"phases", std::move(phases)}};
    if (!sc.events.empty()) {
        const auto t = desync_time(traj, sc.events.back().time);
        summary["desync_time"] = t ? Json(*t) : Json(nullptr);
    }
    run.write("summary.json", summary);
    run.finish();
    return exit_ok;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Spectral-gap sensitivity and synchronisation analysis of directed networks", "syncgap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    std::string input, out = ".";
    std::string candidates = "absent";
    double dw = 1.0, eps = 1e-6;
    bool oracle = false, dump = false;
    std::optional<std::size_t> top;
    MsfArgs msf;
    SimArgs sim;

    auto* analyze = app.add_subcommand("analyze", "SCCs, cutsets, spectrum and block certificates of a network");
    analyze->add_option("--input", input, "edge list (src,dst,weight)")->required();
    analyze->add_option("--out", out, "output directory");
    analyze->add_flag("--dump-spectral", dump, "also write matrices and eigenvectors");

    auto* rank = app.add_subcommand("rank", "rank candidate links by first-order gap sensitivity");
    rank->add_option("--input", input, "edge list")->required();
    rank->add_option("--out", out, "output directory");
    rank->add_option("--candidates", candidates, "absent | absent-symmetric | cutset | CSV file (src,dst[,dw])");
    rank->add_option("--dw", dw, "weight change per candidate");
    rank->add_flag("--oracle", oracle, "cross-check every slope by finite differences");
    rank->add_option("--eps", eps, "finite-difference step")->check(CLI::PositiveNumber);
    rank->add_option("--top", top, "keep the k most destabilising candidates");

    auto* msfc = app.add_subcommand("msf", "master stability curve and critical coupling");
    msfc->add_option("--model", msf.model, "hindmarsh_rose | roessler");
    msfc->add_option("--coupling", msf.coupling, "identity | x | 9 numbers (row-major)");
    msfc->add_option("--nu-max", msf.nu_max, "upper end of the nu grid")->check(CLI::PositiveNumber);
    msfc->add_option("--grid", msf.grid, "number of grid points (>= 20)");
    msfc->add_option("--dt", msf.lyap.dt, "RK4 step")->check(CLI::PositiveNumber);
    msfc->add_option("--transient", msf.lyap.transient, "discarded transient");
    msfc->add_option("--averaging-time", msf.lyap.averaging_time, "averaging time per exponent");
    msfc->add_option("--input", msf.network, "network to check against alpha_c");
    msfc->add_option("--alpha", msf.alpha, "coupling strength to check");
    msfc->add_option("--out", out, "output directory");

    auto* simc = app.add_subcommand("simulate", "integrate a scenario with timed link events");
    simc->add_option("--input", input, "scenario JSON")->required();
    simc->add_option("--out", out, "output directory");
    simc->add_option("--seed", sim.seed, "override the initial-condition seed");
    simc->add_option("--dt", sim.dt, "override the step")->check(CLI::PositiveNumber);
    simc->add_option("--alpha", sim.alpha, "override the coupling strength");
    simc->add_option("--alpha-c", sim.alpha_c, "critical coupling for the margin report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*analyze) return cmd_analyze(input, out, dump);
        if (*rank) return cmd_rank(input, out, candidates, dw, oracle, eps, top);
        if (*msfc) return cmd_msf(msf, out);
        if (*simc) return cmd_simulate(input, out, sim);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const DegenerateSpectrum& e) {
        std::cerr << "degenerate spectrum: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}

} // namespace syncgap
