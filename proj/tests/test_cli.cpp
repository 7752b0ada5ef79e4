#include "syncgap/cli.hpp"
#include "syncgap/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace syncgap;

namespace {

const fs::path data_dir = SYNCGAP_DATA_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "syncgap_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(std::initializer_list<std::string> args) {
    std::vector<std::string> store{"syncgap"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : store) argv.push_back(s.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

Json read_json(const fs::path& p) { return Json::parse(read_file(p)); }

} // namespace

TEST_CASE("analyze N5") {
    const auto out = scratch("analyze_n5");
    REQUIRE(run({"analyze", "--input", (data_dir / "networks/n5.csv").string(), "--out", out.string(),
                 "--dump-spectral"}) == exit_ok);
    const auto r = read_json(out / "report.json");
    CHECK(r["spectrum"]["lambda2"]["re"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r["rooted_spanning_tree"].get<bool>());
    CHECK(r["decomposition"]["components"].size() == 2);
    REQUIRE(r["splits"].size() == 1);
    CHECK(r["splits"][0]["gap_location"] == "downstream");
    CHECK(r["splits"][0]["perron"]["min_eig"].get<double>() == doctest::Approx(1.0));
    CHECK(r["splits"][0]["gershgorin"]["nonnegative_real_parts"].get<bool>());
    CHECK(fs::exists(out / "spectral.json"));
    const auto m = read_json(out / "manifest.json");
    CHECK(m["artifacts"].contains("report.json"));
    CHECK(m["artifacts"]["report.json"]["sha256"] == sha256_hex(read_file(out / "report.json")));
}

TEST_CASE("analyze flags a complex gap") {
    const auto out = scratch("analyze_cycle");
    REQUIRE(run({"analyze", "--input", (data_dir / "networks/triangle3.csv").string(), "--out", out.string()}) ==
            exit_ok);
    CHECK(read_json(out / "report.json")["spectrum"]["complex_gap"].get<bool>());
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit_codes");
    CHECK(run({"analyze", "--input", write(dir, "empty.csv", "").string(), "--out", dir.string()}) == exit_input);
    CHECK(run({"analyze", "--input", (dir / "missing.csv").string(), "--out", dir.string()}) == exit_input);
    CHECK(run({"analyze"}) == exit_input);
    CHECK(run({"frobnicate"}) == exit_input);

    const auto roots = write(dir, "roots.csv", "src,dst,weight\n1,3,1\n2,3,1\n");
    CHECK(run({"analyze", "--input", roots.string(), "--out", (dir / "deg").string()}) == exit_degenerate);
    CHECK(fs::exists(dir / "deg" / "report.json"));
    CHECK(read_json(dir / "deg" / "report.json")["spectrum"]["degenerate"].get<bool>());
    CHECK(run({"rank", "--input", roots.string(), "--out", dir.string()}) == exit_degenerate);

    CHECK(run({"msf", "--model", "bogus", "--out", dir.string()}) == exit_input);
    CHECK(run({"msf", "--model", "roessler", "--grid", "5", "--out", dir.string()}) == exit_input);

    auto scenario = read_json(data_dir / "scenarios/fig1_hr.json");
    scenario["network"] = (data_dir / "networks/n5.csv").string();
    scenario["events"][0]["t"] = 2000.005;
    const auto bad = write(dir, "bad.json", scenario.dump());
    CHECK(run({"simulate", "--input", bad.string(), "--out", dir.string()}) == exit_input);
    CHECK(run({"simulate", "--input", write(dir, "junk.json", "{").string(), "--out", dir.string()}) == exit_input);
}

TEST_CASE("rank N5") {
    const auto n5 = (data_dir / "networks/n5.csv").string();
    SUBCASE("absent links") {
        const auto out = scratch("rank_absent");
        REQUIRE(run({"rank", "--input", n5, "--out", out.string(), "--candidates", "absent", "--top", "2"}) == exit_ok);
        const auto csv = read_file(out / "ranking.csv");
        CHECK(csv.rfind("src,dst,dw,slope_re,slope_im,verdict\n", 0) == 0);
        CHECK(csv.find("4,1,1,") != std::string::npos);
        CHECK(csv.find("5,1,1,") != std::string::npos);
        CHECK(read_json(out / "ranking.json")["ranking"].size() == 2);
    }
    SUBCASE("cutset with oracle columns") {
        const auto out = scratch("rank_cutset");
        REQUIRE(run({"rank", "--input", n5, "--out", out.string(), "--candidates", "cutset", "--oracle"}) == exit_ok);
        const auto j = read_json(out / "ranking.json")["ranking"];
        REQUIRE(j.size() == 2);
        for (const auto& e : j) {
            CHECK(e["slope"]["re"].get<double>() >= 0.0);
            CHECK(e["oracle"]["agree"].get<bool>());
        }
        CHECK(read_file(out / "ranking.csv").find("fd_re,fd_im,abs_diff,agree") != std::string::npos);
    }
    SUBCASE("candidate file") {
        const auto out = scratch("rank_file");
        const auto cands = write(out, "cands.csv", "src,dst,dw\n4,1,0.4\n2,5,1\n");
        REQUIRE(run({"rank", "--input", n5, "--out", out.string(), "--candidates", cands.string()}) == exit_ok);
        const auto j = read_json(out / "ranking.json")["ranking"];
        REQUIRE(j.size() == 2);
        CHECK(j[0]["slope"]["re"].get<double>() == doctest::Approx(-0.4));
        const auto bad = write(out, "bad.csv", "src,dst\n4,9\n");
        CHECK(run({"rank", "--input", n5, "--out", out.string(), "--candidates", bad.string()}) == exit_input);
    }
    SUBCASE("undirected path, symmetric additions") {
        const auto out = scratch("rank_sym");
        REQUIRE(run({"rank", "--input", (data_dir / "networks/path3.csv").string(), "--out", out.string(),
                     "--candidates", "absent-symmetric"}) == exit_ok);
        for (const auto& e : read_json(out / "ranking.json")["ranking"]) CHECK(e["slope"]["re"].get<double>() >= 0.0);
    }
}

TEST_CASE("identical manifests give identical outputs") {
    auto scenario = read_json(data_dir / "scenarios/fig1_roessler.json");
    scenario["network"] = (data_dir / "networks/n5.csv").string();
    scenario["t_end"] = 50;
    scenario["events"][0]["t"] = 25;
    const auto dir = scratch("determinism");
    const auto input = write(dir, "short.json", scenario.dump());
    REQUIRE(run({"simulate", "--input", input.string(), "--out", (dir / "a").string()}) == exit_ok);
    REQUIRE(run({"simulate", "--input", input.string(), "--out", (dir / "b").string()}) == exit_ok);
    CHECK(read_file(dir / "a/manifest.json") == read_file(dir / "b/manifest.json"));
    for (const char* f : {"trajectory.csv", "sync.csv", "summary.json", "plot.gp"})
        CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
    const auto m = read_json(dir / "a/manifest.json");
    CHECK(m["config"]["init"]["seed"] == 8);
    CHECK(m["config"].contains("notes"));

    REQUIRE(run({"simulate", "--input", input.string(), "--out", (dir / "c").string(), "--seed", "9"}) == exit_ok);
    CHECK(read_file(dir / "a/sync.csv") != read_file(dir / "c/sync.csv"));
    CHECK(read_json(dir / "c/manifest.json")["config"]["init"]["seed"] == 9);
}

TEST_CASE("msf command") {
    const auto out = scratch("msf");
    REQUIRE(run({"msf", "--model", "roessler", "--coupling", "identity", "--nu-max", "0.38", "--grid", "20", "--dt",
                 "0.01", "--averaging-time", "1000", "--transient", "100", "--input",
                 (data_dir / "networks/n5.csv").string(), "--alpha", "0.2", "--out", out.string()}) == exit_ok);
    const auto j = read_json(out / "msf.json");
    CHECK(j["alpha_c"].get<double>() > 0.03);
    CHECK(j["alpha_c"].get<double>() < 0.15);
    CHECK(j["verdict"]["stable"].get<bool>());
    CHECK(read_file(out / "msf_curve.csv").rfind("nu,lambda_max,stderr\n", 0) == 0);
}
