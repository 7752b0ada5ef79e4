#pragma once

#include "syncgap/graph.hpp"
#include "syncgap/msf.hpp"
#include "syncgap/perturb.hpp"
#include "syncgap/sim.hpp"
#include "syncgap/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace syncgap {

using Json = nlohmann::ordered_json;

// Shortest text that reads back to the same double ("%.17g" style).
std::string format_number(double x);

Json to_json(Complex z); // {"re": .., "im": ..}
Json to_json(const Matrix& m); // row-major nested arrays
Json to_json(const Vector& v);
Json to_json(const ComplexVector& v);
Json to_json(const std::vector<Complex>& zs);

// {"nodes": [...], "edges": [{"src": .., "dst": .., "w": ..}]}
Json network_to_json(const Network& net);
Network network_from_json(const Json& j);

Json decomposition_to_json(const Network& net, const Decomposition& d);
Json spectral_to_json(const SpectralSummary& s);
Json perron_to_json(const PerronCertificate& c);
Json gershgorin_to_json(const GershgorinReport& g);
Json sensitivity_to_json(const Network& net, const SensitivityReport& r);
Json msf_to_json(const MsfCurve& curve);
Json verdict_to_json(const StabilityVerdict& v);

// `base_dir` resolves relative network paths inside the scenario.
Scenario scenario_from_json(const Json& j, const std::filesystem::path& base_dir);
Json scenario_to_json(const Scenario& sc);

// Ranking table: src,dst,dw,slope_re,slope_im,verdict
std::string ranking_csv(const Network& net, const std::vector<RankedLink>& ranked);
// nu,lambda_max,stderr
std::string msf_csv(const MsfCurve& curve);
// t,node,x,y,z
std::string trajectory_csv(const Network& net, const Trajectory& traj);
// t,sync_error,diff_selected
std::string sync_csv(const Trajectory& traj);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

} // namespace syncgap
