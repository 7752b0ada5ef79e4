#include "oracles.hpp"

#include "syncgap/error.hpp"
#include "syncgap/sim.hpp"

#include <doctest.h>

using namespace syncgap;

namespace {

Scenario base_scenario(ModelSpec model = ModelSpec::hindmarsh_rose()) {
    return Scenario{.name = "test",
                    .network = oracle::n5(),
                    .model = model,
                    .coupling = CouplingSpec::first_component(),
                    .alpha = 1.0,
                    .t_end = 10.0,
                    .dt = 0.01,
                    .events = {},
                    .init = {.seed = 3, .perturbation = 1e-2, .transient = 50.0, .base_state = {}, .states = {}},
                    .record_stride = 10,
                    .diff = std::nullopt};
}

double state_distance(const std::vector<State3>& a, const std::vector<State3>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return d;
}

} // namespace

TEST_CASE("validation") {
    auto sc = base_scenario();
    CHECK_NOTHROW(validate(sc));
    SUBCASE("event off the step grid") {
        sc.events = {{5.005, 3, 0, 0.4}};
        CHECK_THROWS_AS(validate(sc), InputError);
    }
    SUBCASE("t_end off the step grid") {
        sc.t_end = 10.003;
        CHECK_THROWS_AS(validate(sc), InputError);
    }
    SUBCASE("unsorted events") {
        sc.events = {{5.0, 3, 0, 0.4}, {4.0, 3, 0, 0.0}};
        CHECK_THROWS_AS(validate(sc), InputError);
    }
    SUBCASE("self-loop event") {
        sc.events = {{5.0, 2, 2, 0.4}};
        CHECK_THROWS_AS(validate(sc), InputError);
    }
    SUBCASE("negative event weight") {
        sc.events = {{5.0, 3, 0, -0.4}};
        CHECK_THROWS_AS(validate(sc), InputError);
    }
    SUBCASE("bad step") {
        sc.dt = 0.0;
        CHECK_THROWS_AS(validate(sc), InputError);
    }
}

TEST_CASE("initial states are seeded offsets around a common point") {
    const auto sc = base_scenario();
    const auto a = initial_states(sc);
    const auto b = initial_states(sc);
    REQUIRE(a.size() == 5);
    CHECK(state_distance(a, b) == 0.0);
    for (const auto& x : a) CHECK((x - a[0]).cwiseAbs().maxCoeff() <= 2e-2);
    auto other = sc;
    other.init.seed = 4;
    CHECK(state_distance(a, initial_states(other)) > 0.0);
}

TEST_CASE("synchronous states stay synchronous") {
    auto sc = base_scenario();
    sc.init.perturbation = 0.0;
    const auto traj = integrate(sc);
    for (double e : traj.sync_error) CHECK(e == 0.0);
}

TEST_CASE("recording layout") {
    auto sc = base_scenario();
    sc.diff = DiffSelection{0, 4, 0};
    const auto traj = integrate(sc);
    CHECK(traj.times.size() == 101);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(10.0));
    CHECK(traj.diff_selected.size() == traj.times.size());
    const auto series = sync_error_series(traj, std::pair<NodeIndex, NodeIndex>{0, 4}, 0);
    for (std::size_t k = 0; k < series.size(); ++k) CHECK(series[k] == traj.diff_selected[k]);
    const auto all = sync_error_series(traj);
    CHECK(all == traj.sync_error);
    CHECK(std::isnan(max_sync_error(traj, 20.0, 30.0)));
    CHECK_THROWS_AS(sync_error_series(traj, std::nullopt, 1), InputError);
}

TEST_CASE("RK4 converges at fourth order") {
    auto sc = base_scenario();
    sc.t_end = 2.0;
    std::vector<std::vector<State3>> finals;
    for (double dt : {0.04, 0.02, 0.01}) {
        sc.dt = dt;
        sc.init.states = initial_states(base_scenario());
        sc.record_stride = static_cast<std::size_t>(std::llround(sc.t_end / dt));
        finals.push_back(integrate(sc).states.back());
    }
    const double ratio = state_distance(finals[0], finals[1]) / state_distance(finals[1], finals[2]);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("integration is deterministic") {
    auto sc = base_scenario();
    sc.events = {{5.0, 3, 0, 0.4}};
    const auto a = integrate(sc);
    const auto b = integrate(sc);
    CHECK(a.sync_error == b.sync_error);
    for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(state_distance(a.states[k], b.states[k]) == 0.0);
}

TEST_CASE("a zero-weight event changes nothing") {
    auto sc = base_scenario();
    const auto a = integrate(sc);
    sc.events = {{5.0, 3, 0, 0.0}};
    const auto b = integrate(sc);
    CHECK(a.sync_error == b.sync_error);
}

TEST_CASE("relabelling nodes permutes the trajectory") {
    auto sc = base_scenario();
    sc.init.states = initial_states(sc);
    const std::vector<NodeIndex> perm{4, 2, 0, 3, 1};
    auto p = sc;
    p.network = sc.network.permuted(perm);
    std::vector<State3> states;
    for (auto k : perm) states.push_back((*sc.init.states)[k]);
    p.init.states = states;
    const auto a = integrate(sc);
    const auto b = integrate(p);
    for (std::size_t r = 0; r < a.states.size(); ++r)
        for (std::size_t k = 0; k < perm.size(); ++k) CHECK((a.states[r][perm[k]] - b.states[r][k]).norm() == 0.0);
}

TEST_CASE("escaping states are reported") {
    auto sc = base_scenario(ModelSpec::roessler());
    sc.init.states = std::vector<State3>(5, State3(1e7, 0, 0));
    CHECK_THROWS_AS(integrate(sc), IntegrationError);
}

TEST_CASE("desync time needs a sustained excursion") {
    Trajectory t;
    t.nodes = 2;
    for (int k = 0; k < 40; ++k) {
        t.times.push_back(k);
        t.sync_error.push_back(k == 5 || (k >= 20 && k < 35) ? 1.0 : 0.0);
    }
    CHECK(desync_time(t, 0.0, 0.1, 10) == 20.0);
    CHECK_FALSE(desync_time(t, 0.0, 0.1, 16).has_value());
    CHECK(max_sync_error(t, 0.0, 4.0) == 0.0);
}
